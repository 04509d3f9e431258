#pragma once

// Fixtures, random generators and independent oracles shared by the suites.

#include <cstdio>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "bayesrat/bayesrat.hpp"

namespace bayesrat::testing {

using Rng = std::mt19937_64;

inline SpacePtr states_hl() { return OutcomeSpace::make({"H", "L"}); }

inline SpacePtr numbered_states(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
  return OutcomeSpace::make(std::move(labels));
}

template <Scalar T>
T q(long p, long d) {
  if constexpr (std::is_same_v<T, Rational>)
    return Rational(p, d);
  else
    return static_cast<double>(p) / static_cast<double>(d);
}

template <Scalar T>
Dist<T> dist(const SpacePtr& space, std::vector<std::pair<long, long>> w) {
  std::vector<T> v;
  for (auto [p, d] : w) v.push_back(q<T>(p, d));
  return Dist<T>(space, std::move(v));
}

/// Prior (1/2, 1/2); posterior (4/5, 1/5) for a quarter of the agents and
/// (1, 0) for the rest.
template <Scalar T = Rational>
Observation<T> worked_example_observation() {
  auto s = states_hl();
  return Observation<T>(
      dist<T>(s, {{1, 2}, {1, 2}}),
      WeightedPosteriors<T>({{q<T>(1, 4), dist<T>(s, {{4, 5}, {1, 5}})},
                             {q<T>(3, 4), dist<T>(s, {{1, 1}, {0, 1}})}}));
}

/// Normalizes non-negative integer weights into an exact distribution.
inline Dist<Rational> from_counts(const SpacePtr& space,
                                  const std::vector<long>& counts) {
  long total = 0;
  for (auto c : counts) total += c;
  std::vector<Rational> w;
  for (auto c : counts) w.push_back(Rational(c, total));
  return Dist<Rational>(space, std::move(w));
}

inline long uniform_int(Rng& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

/// Integer counts in [0, max] restricted to `allowed`, with at least one
/// positive entry.
inline std::vector<long> random_counts(Rng& rng, const std::vector<bool>& allowed,
                                       long max = 6) {
  std::vector<long> c(allowed.size(), 0);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < allowed.size(); ++i)
    if (allowed[i]) {
      c[i] = uniform_int(rng, 0, max);
      open.push_back(i);
    }
  long total = 0;
  for (auto v : c) total += v;
  if (total == 0) c[open[uniform_int(rng, 0, static_cast<long>(open.size()) - 1)]] = 1;
  return c;
}

inline WeightedPosteriors<Rational> random_posteriors(
    Rng& rng, const SpacePtr& space, std::size_t k,
    const std::vector<bool>& allowed) {
  std::vector<long> weights;
  long total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    weights.push_back(uniform_int(rng, 1, 6));
    total += weights.back();
  }
  std::vector<WeightedBelief<Rational>> items;
  for (std::size_t i = 0; i < k; ++i)
    items.push_back({Rational(weights[i], total),
                     from_counts(space, random_counts(rng, allowed))});
  return WeightedPosteriors<Rational>(std::move(items));
}

/// Observation whose posteriors are absolutely continuous w.r.t. the prior.
inline Observation<Rational> random_ac_observation(Rng& rng, std::size_t min_states,
                                                   std::size_t max_states,
                                                   std::size_t max_posteriors) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, min_states, max_states));
  const auto k = static_cast<std::size_t>(uniform_int(rng, 1, max_posteriors));
  auto space = numbered_states(n);
  auto prior_counts = random_counts(rng, std::vector<bool>(n, true));
  std::vector<bool> supp(n);
  for (std::size_t s = 0; s < n; ++s) supp[s] = prior_counts[s] > 0;
  return Observation<Rational>(from_counts(space, prior_counts),
                               random_posteriors(rng, space, k, supp));
}

/// Observation with a planted violation: some posterior charges a state the
/// prior rules out. Returns the offending state.
inline std::pair<Observation<Rational>, std::string> random_violating_observation(
    Rng& rng) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 8));
  const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 6));
  auto space = numbered_states(n);
  const auto null_state = static_cast<std::size_t>(uniform_int(rng, 0, n - 1));
  std::vector<bool> prior_allowed(n, true);
  prior_allowed[null_state] = false;
  auto prior_counts = random_counts(rng, prior_allowed);

  std::vector<long> weights;
  long total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    weights.push_back(uniform_int(rng, 1, 6));
    total += weights.back();
  }
  const auto bad = static_cast<std::size_t>(uniform_int(rng, 0, k - 1));
  std::vector<WeightedBelief<Rational>> items;
  for (std::size_t i = 0; i < k; ++i) {
    auto counts = random_counts(rng, std::vector<bool>(n, true));
    if (i == bad) counts[null_state] += uniform_int(rng, 1, 6);
    items.push_back({Rational(weights[i], total), from_counts(space, counts)});
  }
  return {Observation<Rational>(from_counts(space, prior_counts),
                                WeightedPosteriors<Rational>(std::move(items))),
          space->label(null_state)};
}

/// Full-support prior; posteriors are a mix of prior-conditionals on random
/// disjoint blocks (rationalizable with Ω = S), perturbations of those, and
/// arbitrary beliefs.
inline Observation<Rational> random_known_omega_observation(Rng& rng,
                                                            std::size_t max_states) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, 1, max_states));
  auto space = numbered_states(n);
  std::vector<long> prior_counts(n);
  for (auto& c : prior_counts) c = uniform_int(rng, 1, 6);
  auto prior = from_counts(space, prior_counts);

  // Random set partition via random block labels.
  std::vector<std::vector<std::size_t>> blocks(n);
  for (std::size_t s = 0; s < n; ++s)
    blocks[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))].push_back(s);
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  std::shuffle(blocks.begin(), blocks.end(), rng);
  const auto k = static_cast<std::size_t>(
      uniform_int(rng, 1, std::min<long>(3, static_cast<long>(blocks.size()))));

  std::vector<Dist<Rational>> beliefs;
  for (std::size_t i = 0; i < k; ++i)
    beliefs.push_back(condition(prior, std::span<const std::size_t>(blocks[i])));

  switch (uniform_int(rng, 0, 3)) {
    case 0:  // arbitrary belief replaces one conditional
      beliefs[static_cast<std::size_t>(uniform_int(rng, 0, k - 1))] =
          from_counts(space, random_counts(rng, std::vector<bool>(n, true)));
      break;
    case 1: {  // extend one belief's support by mixing in a point mass
      auto& b = beliefs[static_cast<std::size_t>(uniform_int(rng, 0, k - 1))];
      auto extra = static_cast<std::size_t>(uniform_int(rng, 0, n - 1));
      std::vector<Rational> w(b.weights().begin(), b.weights().end());
      for (auto& x : w) x *= Rational(1, 2);
      w[extra] += Rational(1, 2);
      b = Dist<Rational>(space, std::move(w));
      break;
    }
    default:
      break;
  }

  std::vector<long> weights;
  long total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    weights.push_back(uniform_int(rng, 1, 6));
    total += weights.back();
  }
  std::vector<WeightedBelief<Rational>> items;
  for (std::size_t i = 0; i < k; ++i)
    items.push_back({Rational(weights[i], total), beliefs[i]});
  return Observation<Rational>(prior, WeightedPosteriors<Rational>(std::move(items)));
}

/// Converts an exact observation to float mode.
inline Observation<double> to_float(const Observation<Rational>& obs) {
  auto conv = [](const Dist<Rational>& d) {
    std::vector<double> w;
    for (const auto& x : d.weights()) w.push_back(static_cast<double>(x));
    return Dist<double>(d.space(), std::move(w));
  };
  std::vector<WeightedBelief<double>> items;
  for (const auto& it : obs.posteriors)
    items.push_back({static_cast<double>(it.weight), conv(it.belief)});
  return Observation<double>(conv(obs.prior), WeightedPosteriors<double>(std::move(items)));
}

/// All 2^n events of an n-outcome space, as index lists.
inline std::vector<std::vector<std::size_t>> all_events(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> e;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) e.push_back(i);
    out.push_back(std::move(e));
  }
  return out;
}

struct CommandResult {
  int exit_code;
  std::string output;
};

/// Runs a shell command, capturing stdout.
inline CommandResult run_command(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return {-1, ""};
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace bayesrat::testing
