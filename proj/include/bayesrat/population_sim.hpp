#pragma once

// Finite panels of ex ante identical agents drawn from a model's objective
// distribution, each updating by Bayes' rule under the subjective prior.

#include <cstdint>
#include <thread>
#include <vector>

#include "bayesrat/dist.hpp"
#include "bayesrat/model.hpp"
#include "bayesrat/ops.hpp"

namespace bayesrat {

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the value for agent `index` depends only on
/// (seed, index), so any split of the index range reproduces it.
constexpr std::uint64_t agent_bits(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

struct PanelDraw {
  std::size_t cell;
  std::size_t posterior;

  bool operator==(const PanelDraw&) const = default;
};

template <Scalar T>
struct PanelSample {
  std::size_t n_agents;
  std::uint64_t seed;
  std::vector<PanelDraw> draws;
  /// Distinct posteriors reachable under the objective distribution;
  /// `PanelDraw::posterior` indexes into this list.
  std::vector<Dist<T>> posteriors;
  WeightedPosteriors<T> empirical;
};

namespace detail {

using u128 = unsigned __int128;

/// Sampling tables for ω ~ ℙ. `thresholds[w]` is ceil(F(w)·2^64) where F is
/// the cumulative distribution, so a uniform 64-bit word u selects the first
/// w with u < thresholds[w]; u/2^64 < F(w) holds exactly iff it does.
template <Scalar T>
std::vector<u128> cumulative_thresholds(const Dist<T>& p) {
  std::vector<Rational> w;
  Rational total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    w.push_back(NumberTraits<T>::to_rational(p[i]));
    total += w.back();
  }
  const BigInt two64 = BigInt(1) << 64;
  std::vector<u128> out;
  Rational cum = 0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cum += w[i];
    if (w[i] > 0) last_positive = i;
    Rational scaled = cum / total * Rational(two64);
    BigInt q = numerator(scaled) / denominator(scaled);
    if (q * denominator(scaled) != numerator(scaled)) q += 1;
    out.push_back(static_cast<u128>(q));
  }
  // The last charged outcome absorbs everything above it.
  for (std::size_t i = last_positive; i < out.size(); ++i)
    out[i] = static_cast<u128>(two64);
  return out;
}

}  // namespace detail

template <Scalar T>
PanelSample<T> simulate_panel(const Model<T>& model, std::size_t n_agents,
                              std::uint64_t seed, unsigned workers = 1) {
  using traits = NumberTraits<T>;
  if (n_agents == 0) throw StructuralError("panel needs at least one agent");

  // Posterior for every reachable cell, deduplicated by value.
  std::vector<Dist<T>> posteriors;
  std::vector<std::size_t> cell_posterior(model.partition.size(), 0);
  for (std::size_t c = 0; c < model.partition.size(); ++c) {
    std::span<const std::size_t> members(model.partition[c].members);
    if (!traits::is_positive(model.p_obj.mass(members))) continue;
    if (!traits::is_positive(model.mu0.mass(members)))
      throw UndefinedUpdateError("signal '" + model.partition[c].label +
                                 "' is objectively possible but has zero "
                                 "subjective probability");
    Dist<T> post = model.induced_posterior(c);
    std::size_t k = 0;
    while (k < posteriors.size() && !posteriors[k].matches(post)) ++k;
    if (k == posteriors.size()) posteriors.push_back(std::move(post));
    cell_posterior[c] = k;
  }

  const auto thresholds = detail::cumulative_thresholds(model.p_obj);
  const auto cell_of = model.cell_index();

  std::vector<PanelDraw> draws(n_agents);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const detail::u128 u = agent_bits(seed, i);
      auto it = std::upper_bound(thresholds.begin(), thresholds.end(), u);
      const auto w = static_cast<std::size_t>(it - thresholds.begin());
      const auto c = cell_of[w];
      draws[i] = {c, cell_posterior[c]};
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, n_agents));
  if (workers == 1) {
    run(0, n_agents);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n_agents + workers - 1) / workers;
    for (std::size_t b = 0; b < n_agents; b += chunk)
      pool.emplace_back(run, b, std::min(n_agents, b + chunk));
  }

  std::vector<std::size_t> counts(posteriors.size(), 0);
  for (const auto& d : draws) ++counts[d.posterior];
  std::vector<WeightedBelief<T>> items;
  for (std::size_t k = 0; k < posteriors.size(); ++k)
    if (counts[k])
      items.push_back({T(static_cast<long>(counts[k])) /
                           T(static_cast<long>(n_agents)),
                       posteriors[k]});

  return PanelSample<T>{n_agents, seed, std::move(draws), std::move(posteriors),
                        WeightedPosteriors<T>(std::move(items))};
}

/// Half the L1 distance between two posterior distributions, matching
/// posteriors by value.
template <Scalar T>
T tv_distance(const WeightedPosteriors<T>& p, const WeightedPosteriors<T>& q) {
  using traits = NumberTraits<T>;
  if (!same_space(p.space(), q.space()))
    throw StructuralError("posterior distributions use different state spaces");
  T total = 0;
  std::vector<bool> q_seen(q.size(), false);
  for (const auto& item : p) {
    auto k = q.find(item.belief);
    if (k) {
      q_seen[*k] = true;
      total += traits::abs(T(item.weight - q[*k].weight));
    } else {
      total += item.weight;
    }
  }
  for (std::size_t k = 0; k < q.size(); ++k)
    if (!q_seen[k]) total += q[k].weight;
  return total / T(2);
}

}  // namespace bayesrat
