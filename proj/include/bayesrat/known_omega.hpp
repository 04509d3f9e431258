#pragma once

// The experimentally controlled regime: the state of the world is the
// payoff-relevant state itself (Ω = S, identity projection). A full-support
// prior then pins the possible Bayesian posteriors down to conditionals of
// the prior on the cells of some partition of S.

#include <string>
#include <utility>
#include <vector>

#include "bayesrat/dist.hpp"
#include "bayesrat/model.hpp"
#include "bayesrat/ops.hpp"
#include "bayesrat/partitions.hpp"

namespace bayesrat {

template <Scalar T>
struct Prop1Report {
  /// Posterior supports are pairwise disjoint.
  bool condition_i = true;
  std::vector<std::pair<std::size_t, std::size_t>> overlapping;
  /// Each posterior is the prior conditioned on its own support.
  bool condition_ii = true;
  std::vector<T> worst_deviation;
  bool rationalizable = false;
};

namespace detail {

template <Scalar T>
void require_full_support(const Dist<T>& prior) {
  for (std::size_t s = 0; s < prior.size(); ++s)
    if (!NumberTraits<T>::is_positive(prior[s]))
      throw PreconditionError("prior has no mass on '" +
                              prior.space()->label(s) +
                              "'; the known-state-space test needs full support");
}

}  // namespace detail

template <Scalar T>
Prop1Report<T> check_proposition1(const Observation<T>& obs) {
  detail::require_full_support(obs.prior);
  Prop1Report<T> r;
  const auto& posts = obs.posteriors;

  std::vector<std::vector<bool>> in_support;
  for (const auto& item : posts) {
    std::vector<bool> mask(obs.prior.size(), false);
    for (auto s : item.belief.support()) mask[s] = true;
    in_support.push_back(std::move(mask));
  }
  for (std::size_t a = 0; a < posts.size(); ++a)
    for (std::size_t b = a + 1; b < posts.size(); ++b)
      for (std::size_t s = 0; s < obs.prior.size(); ++s)
        if (in_support[a][s] && in_support[b][s]) {
          r.overlapping.emplace_back(a, b);
          r.condition_i = false;
          break;
        }

  for (const auto& item : posts) {
    auto supp = item.belief.support();
    Dist<T> conditional = condition(obs.prior, std::span<const std::size_t>(supp));
    r.worst_deviation.push_back(item.belief.max_abs_deviation(conditional));
    if (!item.belief.matches(conditional)) r.condition_ii = false;
  }

  r.rationalizable = r.condition_i && r.condition_ii;
  return r;
}

/// Witness for a rationalizable observation: cells are the posterior supports
/// plus whatever is left over, the agent's prior is the observed prior, and
/// the objective distribution puts P₁*(ν)·ν(s) on each state of ν's support.
template <Scalar T>
Model<T> construct_known_omega_model(const Observation<T>& obs) {
  auto report = check_proposition1(obs);
  if (!report.rationalizable)
    throw NotRationalizableError(
        !report.condition_i
            ? "posterior supports overlap"
            : "some posterior is not the prior conditioned on its support");

  const auto& states = obs.states();
  const std::size_t n = states->size();
  std::vector<SignalCell> cells;
  std::vector<T> p_obj(n, T(0));
  std::vector<bool> covered(n, false);

  for (std::size_t k = 0; k < obs.posteriors.size(); ++k) {
    const auto& item = obs.posteriors[k];
    SignalCell cell{"supp" + std::to_string(k), item.belief.support()};
    // ℙ(s) = P₁*(ν)·ν(s): cell total P₁*(ν), shaped like the prior inside it.
    for (auto s : cell.members) {
      p_obj[s] = item.weight * item.belief[s];
      covered[s] = true;
    }
    cells.push_back(std::move(cell));
  }
  SignalCell rest{"rest", {}};
  for (std::size_t s = 0; s < n; ++s)
    if (!covered[s]) rest.members.push_back(s);
  if (!rest.members.empty()) cells.push_back(std::move(rest));

  std::vector<std::size_t> identity(n);
  for (std::size_t s = 0; s < n; ++s) identity[s] = s;
  return Model<T>(states, states, std::move(identity), std::move(cells),
                  obs.prior, Dist<T>(states, std::move(p_obj)));
}

inline constexpr std::size_t kBruteForceMaxStates = 10;

/// Exhaustive search over every signal partition of S. A partition works iff
/// each observed posterior equals the prior conditioned on one of its cells;
/// the objective distribution can then put P₁*(ν) on ν's cell and nothing on
/// the others. Distinct posteriors cannot share a cell, and cells never
/// produce the same conditional because their supports are disjoint.
template <Scalar T>
bool brute_force_known_omega(const Observation<T>& obs) {
  const std::size_t n = obs.prior.size();
  if (n > kBruteForceMaxStates)
    throw ResourceBoundError("brute force limited to " +
                             std::to_string(kBruteForceMaxStates) +
                             " states, got " + std::to_string(n));
  detail::require_full_support(obs.prior);

  const auto posts = obs.posteriors.beliefs();
  return !for_each_set_partition(n, [&](std::span<const std::size_t> rgs) {
    auto blocks = blocks_of(rgs);
    std::vector<bool> used(blocks.size(), false);
    for (const auto& nu : posts) {
      bool found = false;
      for (std::size_t b = 0; b < blocks.size() && !found; ++b) {
        if (used[b]) continue;
        if (nu.matches(condition(obs.prior,
                                 std::span<const std::size_t>(blocks[b])))) {
          used[b] = true;
          found = true;
        }
      }
      if (!found) return true;  // keep searching
    }
    return false;  // witness found
  });
}

}  // namespace bayesrat
