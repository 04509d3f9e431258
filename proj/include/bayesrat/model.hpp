#pragma once

// A finite probabilistic model: states of the world, their projection onto
// payoff-relevant states, the agent's signal partition, the agent's
// subjective prior and the objective data-generating distribution.

#include <optional>
#include <string>
#include <vector>

#include "bayesrat/dist.hpp"
#include "bayesrat/ops.hpp"

namespace bayesrat {

enum class Sign { plus, minus };

inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

/// Coordinates of a state of the world built by the rationalizer:
/// (payoff-relevant state, index into the posterior support, signal sign).
struct OmegaState {
  std::size_t s;
  std::size_t posterior_index;
  Sign sign;

  bool operator==(const OmegaState&) const = default;
};

/// One generator of the agent's period-1 information.
struct SignalCell {
  std::string label;
  std::vector<std::size_t> members;

  bool operator==(const SignalCell&) const = default;
};

template <Scalar T>
struct Model {
  Model(SpacePtr states_, SpacePtr omega_, std::vector<std::size_t> projection_,
        std::vector<SignalCell> partition_, Dist<T> mu0_, Dist<T> p_obj_,
        std::vector<OmegaState> structure_ = {},
        std::optional<std::vector<T>> lambda_mix_ = std::nullopt)
      : states(std::move(states_)),
        omega(std::move(omega_)),
        projection(std::move(projection_)),
        partition(std::move(partition_)),
        mu0(std::move(mu0_)),
        p_obj(std::move(p_obj_)),
        structure(std::move(structure_)),
        lambda_mix(std::move(lambda_mix_)) {
    validate();
  }

  SpacePtr states;
  SpacePtr omega;
  std::vector<std::size_t> projection;
  std::vector<SignalCell> partition;
  Dist<T> mu0;
  Dist<T> p_obj;
  /// Empty for models that were not produced by the rationalizer.
  std::vector<OmegaState> structure;
  /// Mixing weights over posterior indices, kept for provenance.
  std::optional<std::vector<T>> lambda_mix;

  /// Index of the cell containing each state of the world.
  std::vector<std::size_t> cell_index() const {
    std::vector<std::size_t> out(omega->size());
    for (std::size_t c = 0; c < partition.size(); ++c)
      for (auto w : partition[c].members) out[w] = c;
    return out;
  }

  Dist<T> prior_over_states() const {
    return pushforward(mu0, std::span<const std::size_t>(projection), states);
  }

  Dist<T> objective_over_states() const {
    return pushforward(p_obj, std::span<const std::size_t>(projection), states);
  }

  /// The agent's belief over S after observing `cell`.
  Dist<T> induced_posterior(std::size_t cell) const {
    return pushforward(condition(mu0, std::span<const std::size_t>(
                                          partition.at(cell).members)),
                       std::span<const std::size_t>(projection), states);
  }

 private:
  void validate() const {
    if (!states || !omega) throw StructuralError("model without spaces");
    if (!same_space(mu0.space(), omega) || !same_space(p_obj.space(), omega))
      throw StructuralError("model distributions are not over its state space");
    if (projection.size() != omega->size())
      throw StructuralError("projection does not cover every state of the world");
    for (auto s : projection)
      if (s >= states->size())
        throw StructuralError("projection leaves the payoff-relevant space");
    std::vector<int> seen(omega->size(), 0);
    for (const auto& cell : partition) {
      if (cell.members.empty())
        throw StructuralError("signal cell '" + cell.label + "' is empty");
      for (auto w : cell.members) {
        if (w >= omega->size())
          throw StructuralError("signal cell '" + cell.label +
                                "' lists an unknown state");
        if (seen[w]++)
          throw StructuralError("state '" + omega->label(w) +
                                "' lies in two signal cells");
      }
    }
    for (std::size_t w = 0; w < seen.size(); ++w)
      if (!seen[w])
        throw StructuralError("state '" + omega->label(w) +
                              "' is in no signal cell");
    if (!structure.empty() && structure.size() != omega->size())
      throw StructuralError("structure does not match the state space");
  }
};

/// What an outside observer would see if the model generated the data:
/// the agent's prior over S and the objective distribution of posteriors.
template <Scalar T>
struct InducedObservables {
  Dist<T> prior;
  WeightedPosteriors<T> posteriors;
};

template <Scalar T>
InducedObservables<T> induced_observables(const Model<T>& model) {
  using traits = NumberTraits<T>;
  std::vector<WeightedBelief<T>> items;
  for (std::size_t c = 0; c < model.partition.size(); ++c) {
    std::span<const std::size_t> cell(model.partition[c].members);
    T objective = model.p_obj.mass(cell);
    if (!traits::is_positive(objective)) continue;
    if (!traits::is_positive(model.mu0.mass(cell)))
      throw UndefinedUpdateError("signal '" + model.partition[c].label +
                                 "' is objectively possible but has zero "
                                 "subjective probability");
    items.push_back({objective, model.induced_posterior(c)});
  }
  return {model.prior_over_states(), WeightedPosteriors<T>(std::move(items))};
}

}  // namespace bayesrat
