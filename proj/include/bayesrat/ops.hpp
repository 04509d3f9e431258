#pragma once

// Finite-measure kernel: pushforward, conditioning on a partition cell,
// likelihood ratios against the prior, and the martingale test.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bayesrat/dist.hpp"

namespace bayesrat {

/// Image of `mu` under the map `projection[i]` (an index into `target`).
template <Scalar T>
Dist<T> pushforward(const Dist<T>& mu, std::span<const std::size_t> projection,
                    const SpacePtr& target) {
  if (projection.size() != mu.size())
    throw StructuralError("projection covers " +
                          std::to_string(projection.size()) + " of " +
                          std::to_string(mu.size()) + " outcomes");
  std::vector<T> out(target->size(), T(0));
  for (std::size_t i = 0; i < projection.size(); ++i) {
    if (projection[i] >= out.size())
      throw StructuralError("outcome '" + mu.space()->label(i) +
                            "' projects outside the state space");
    out[projection[i]] += mu[i];
  }
  return Dist<T>(target, std::move(out));
}

/// Label-based projection: `project(label_of_omega)` names a state in `target`.
template <Scalar T, typename F>
  requires std::is_invocable_r_v<std::string, F, const std::string&>
Dist<T> pushforward(const Dist<T>& mu, F&& project, const SpacePtr& target) {
  std::vector<std::size_t> proj;
  proj.reserve(mu.size());
  for (const auto& label : mu.space()->labels()) {
    auto s = project(label);
    auto idx = target->find(s);
    if (!idx)
      throw StructuralError("outcome '" + label + "' projects to '" + s +
                            "', which is not a state");
    proj.push_back(*idx);
  }
  return pushforward(mu, std::span<const std::size_t>(proj), target);
}

/// Elementary Bayes update of `mu` on the event `cell`.
template <Scalar T>
Dist<T> condition(const Dist<T>& mu, std::span<const std::size_t> cell) {
  std::vector<bool> in(mu.size(), false);
  for (auto i : cell) {
    if (i >= mu.size()) throw StructuralError("cell member out of range");
    if (in[i]) throw StructuralError("cell lists an outcome twice");
    in[i] = true;
  }
  const T mass = mu.mass(cell);
  if (!NumberTraits<T>::is_positive(mass))
    throw ZeroProbabilityCell("conditioning event has probability " +
                              format_number(mass));
  std::vector<T> out(mu.size(), T(0));
  for (auto i : cell) out[i] = mu[i] / mass;
  return Dist<T>(mu.space(), std::move(out));
}

template <Scalar T>
struct RnDerivative {
  /// belief(s) / prior(s) on the prior's support, empty elsewhere.
  std::vector<std::optional<T>> f;
  T max_f;
  T epsilon;
};

/// Likelihood ratio of `belief` against `prior`. On a finite space the
/// essential supremum is the maximum over the prior's support.
template <Scalar T>
RnDerivative<T> rn_derivative(const Dist<T>& prior, const Dist<T>& belief,
                              std::size_t posterior_index = 0) {
  using traits = NumberTraits<T>;
  if (!same_space(prior.space(), belief.space()))
    throw StructuralError("prior and belief use different state spaces");

  RnDerivative<T> r{std::vector<std::optional<T>>(prior.size()), T(0), T(0)};
  for (std::size_t s = 0; s < prior.size(); ++s) {
    if (!traits::is_positive(prior[s])) {
      if (traits::is_positive(belief[s]))
        throw AbsoluteContinuityViolation(prior.space()->label(s),
                                          posterior_index);
      continue;
    }
    T ratio = belief[s] / prior[s];
    if (ratio > r.max_f) r.max_f = ratio;
    r.f[s] = std::move(ratio);
  }
  // max_f >= 1 because both sides are probability measures on supp(prior).
  r.epsilon = T(1) / r.max_f;
  return r;
}

template <Scalar T>
struct MartingaleResult {
  bool holds;
  Dist<T> mean_posterior;
};

/// Checks whether the weighted mean of `posteriors` reproduces `prior`.
template <Scalar T>
MartingaleResult<T> martingale_check(std::span<const T> weights,
                                     std::span<const Dist<T>> posteriors,
                                     const Dist<T>& prior) {
  if (weights.size() != posteriors.size())
    throw StructuralError(std::to_string(weights.size()) + " weights for " +
                          std::to_string(posteriors.size()) + " posteriors");
  std::vector<T> mean(prior.size(), T(0));
  for (std::size_t k = 0; k < posteriors.size(); ++k) {
    if (!same_space(posteriors[k].space(), prior.space()))
      throw StructuralError("posterior does not share the prior's space");
    for (std::size_t s = 0; s < prior.size(); ++s)
      mean[s] += weights[k] * posteriors[k][s];
  }
  Dist<T> m(prior.space(), std::move(mean));
  bool holds = m.matches(prior);
  return {holds, std::move(m)};
}

template <Scalar T>
MartingaleResult<T> martingale_check(const std::vector<T>& weights,
                                     const std::vector<Dist<T>>& posteriors,
                                     const Dist<T>& prior) {
  return martingale_check(std::span<const T>(weights),
                          std::span<const Dist<T>>(posteriors), prior);
}

}  // namespace bayesrat
