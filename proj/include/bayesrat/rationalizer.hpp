#pragma once

// Screening an observation for absolute continuity, building a model that
// rationalizes it with "phantom" signals, and checking any candidate model
// against an observation from first principles.

#include <optional>
#include <string>
#include <vector>

#include "bayesrat/dist.hpp"
#include "bayesrat/model.hpp"
#include "bayesrat/ops.hpp"

namespace bayesrat {

template <Scalar T>
struct PosteriorRn {
  std::size_t index;
  /// Set when the belief is absolutely continuous w.r.t. the prior.
  std::optional<RnDerivative<T>> rn;
  /// First prior-null outcome the belief charges, otherwise empty.
  std::optional<std::string> violation;

  bool pass() const { return rn.has_value(); }
};

template <Scalar T>
struct RnReport {
  std::vector<PosteriorRn<T>> per_posterior;
  bool overall_pass = true;
};

template <Scalar T>
RnReport<T> check_condition1(const Observation<T>& obs) {
  RnReport<T> report;
  for (std::size_t k = 0; k < obs.posteriors.size(); ++k) {
    PosteriorRn<T> entry{k, std::nullopt, std::nullopt};
    try {
      entry.rn = rn_derivative(obs.prior, obs.posteriors[k].belief, k);
    } catch (const AbsoluteContinuityViolation& e) {
      entry.violation = e.outcome();
      report.overall_pass = false;
    }
    report.per_posterior.push_back(std::move(entry));
  }
  return report;
}

enum class LambdaChoice { uniform, target };

template <Scalar T>
std::vector<T> make_lambda(const Observation<T>& obs, LambdaChoice choice) {
  if (choice == LambdaChoice::target) return obs.posteriors.weights();
  const auto k = obs.posteriors.size();
  return std::vector<T>(k, T(1) / T(static_cast<long>(k)));
}

/// Labels depend only on S and the number of posteriors, so one labeling
/// scheme serves every observation over a given state space.
inline std::string signal_label(std::size_t posterior, Sign sign) {
  return "nu" + std::to_string(posterior) + sign_char(sign);
}

inline std::string omega_label(const std::string& state, std::size_t posterior,
                               Sign sign) {
  return state + "@" + signal_label(posterior, sign);
}

/// Builds Ω = S × supp P₁* × {+,-}. Under the agent's prior, signal ν⁺ has
/// probability ε_ν·λ(ν) and leads to posterior ν; the phantom signal ν⁻
/// carries the remaining (1-ε_ν)·λ(ν) and pulls the belief back so the
/// subjective mean posterior equals the prior. The objective distribution
/// only ever emits "+" signals, with frequencies P₁*(ν).
///
/// States are ordered sign-major, then posterior index, then state, and
/// cells follow the same order (ν₀⁺, ν₁⁺, ..., ν₀⁻, ν₁⁻, ...).
template <Scalar T>
Model<T> construct_rationalization(const Observation<T>& obs,
                                   const std::vector<T>& lambda) {
  using traits = NumberTraits<T>;
  const auto& prior = obs.prior;
  const auto& posts = obs.posteriors;
  const std::size_t n_states = prior.size();
  const std::size_t n_post = posts.size();

  if (lambda.size() != n_post)
    throw InvalidMixError("mixing distribution has " +
                          std::to_string(lambda.size()) + " weights for " +
                          std::to_string(n_post) + " posteriors");
  T lambda_total = 0;
  for (std::size_t k = 0; k < n_post; ++k) {
    if (!traits::is_positive(lambda[k]))
      throw InvalidMixError("mixing distribution misses posterior #" +
                            std::to_string(k));
    lambda_total += lambda[k];
  }
  if (!traits::equal(lambda_total, T(1)))
    throw InvalidMixError("mixing weights sum to " +
                          format_number(lambda_total));

  std::vector<RnDerivative<T>> rn;
  rn.reserve(n_post);
  for (std::size_t k = 0; k < n_post; ++k)
    rn.push_back(rn_derivative(prior, posts[k].belief, k));

  std::vector<std::string> labels;
  std::vector<OmegaState> structure;
  std::vector<std::size_t> projection;
  std::vector<SignalCell> cells;
  std::vector<T> mu0;
  std::vector<T> p_obj;

  for (Sign sign : {Sign::plus, Sign::minus}) {
    for (std::size_t k = 0; k < n_post; ++k) {
      const Dist<T>& nu = posts[k].belief;
      const T& eps = rn[k].epsilon;
      const bool degenerate = traits::equal(eps, T(1));
      SignalCell cell{signal_label(k, sign), {}};
      for (std::size_t s = 0; s < n_states; ++s) {
        cell.members.push_back(labels.size());
        labels.push_back(omega_label(prior.space()->label(s), k, sign));
        structure.push_back({s, k, sign});
        projection.push_back(s);
        if (sign == Sign::plus) {
          mu0.push_back(nu[s] * eps * lambda[k]);
          p_obj.push_back(prior[s] * posts[k].weight);
        } else {
          // With ε = 1 the belief equals the prior and the phantom signal has
          // zero subjective mass; the prior is a valid conditional for it.
          T conditional = degenerate
                              ? T(prior[s])
                              : T((prior[s] - eps * nu[s]) / (T(1) - eps));
          mu0.push_back(conditional * (T(1) - eps) * lambda[k]);
          p_obj.push_back(T(0));
        }
      }
      cells.push_back(std::move(cell));
    }
  }

  auto omega = OutcomeSpace::make(std::move(labels));
  return Model<T>(prior.space(), omega, std::move(projection), std::move(cells),
                  Dist<T>(omega, std::move(mu0)), Dist<T>(omega, std::move(p_obj)),
                  std::move(structure), lambda);
}

template <Scalar T>
Model<T> construct_rationalization(const Observation<T>& obs,
                                   LambdaChoice choice = LambdaChoice::uniform) {
  return construct_rationalization(obs, make_lambda(obs, choice));
}

struct CheckOutcome {
  bool pass = false;
  std::string detail;
};

template <Scalar T>
struct CellDiagnostic {
  std::string label;
  T subjective_mass;
  T objective_mass;
  /// Absent when the cell has zero subjective mass.
  std::optional<Dist<T>> posterior;
  /// Position in the observed posterior support, if the posterior occurs there.
  std::optional<std::size_t> matched_posterior;
};

template <Scalar T>
struct VerifyReport {
  CheckOutcome prior_matches;
  CheckOutcome posteriors_match;
  CheckOutcome posterior_distribution_matches;
  CheckOutcome objective_agrees_with_prior;
  CheckOutcome subjective_martingale_holds;
  std::vector<CellDiagnostic<T>> cells;

  bool all_pass() const {
    return prior_matches.pass && posteriors_match.pass &&
           posterior_distribution_matches.pass &&
           objective_agrees_with_prior.pass && subjective_martingale_holds.pass;
  }
};

namespace detail {

template <Scalar T>
std::string render(const Dist<T>& d) {
  std::string out = "(";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) out += ", ";
    out += d.space()->label(i) + ": " + format_number(d[i]);
  }
  return out + ")";
}

}  // namespace detail

/// Recomputes everything an observer could check from the model alone and
/// compares it with the observation. Nothing about how the model was built is
/// trusted.
template <Scalar T>
VerifyReport<T> verify_model(const Model<T>& model, const Observation<T>& obs) {
  using traits = NumberTraits<T>;
  VerifyReport<T> r;

  if (!same_space(model.states, obs.states())) {
    const std::string msg = "model and observation use different state spaces";
    r.prior_matches = r.posteriors_match = r.posterior_distribution_matches =
        r.objective_agrees_with_prior = r.subjective_martingale_holds = {false, msg};
    return r;
  }

  const Dist<T> nu0 = model.prior_over_states();
  r.prior_matches.pass = nu0.matches(obs.prior);
  r.prior_matches.detail = "subjective prior over states " + detail::render(nu0);

  const Dist<T> eta0 = model.objective_over_states();
  r.objective_agrees_with_prior.pass = eta0.matches(obs.prior);
  r.objective_agrees_with_prior.detail =
      "objective distribution over states " + detail::render(eta0);

  // Per-cell Bayes updates.
  std::vector<T> mart_weights;
  std::vector<Dist<T>> mart_posteriors;
  std::vector<std::pair<T, Dist<T>>> reached;  // objective mass, posterior
  bool all_reached_known = true;
  bool undefined_update = false;
  std::string cell_problems;

  for (std::size_t c = 0; c < model.partition.size(); ++c) {
    std::span<const std::size_t> members(model.partition[c].members);
    CellDiagnostic<T> diag{model.partition[c].label, model.mu0.mass(members),
                           model.p_obj.mass(members), std::nullopt, std::nullopt};
    const bool subj = traits::is_positive(diag.subjective_mass);
    const bool objv = traits::is_positive(diag.objective_mass);
    if (subj) {
      diag.posterior = pushforward(condition(model.mu0, members),
                                   std::span<const std::size_t>(model.projection),
                                   model.states);
      diag.matched_posterior = obs.posteriors.find(*diag.posterior);
      mart_weights.push_back(diag.subjective_mass);
      mart_posteriors.push_back(*diag.posterior);
    }
    if (objv) {
      if (!subj) {
        undefined_update = true;
        cell_problems += " cell " + diag.label +
                         " is objectively reachable with zero subjective mass;";
      } else {
        reached.emplace_back(diag.objective_mass, *diag.posterior);
        if (!diag.matched_posterior) {
          all_reached_known = false;
          cell_problems += " cell " + diag.label + " induces " +
                           detail::render(*diag.posterior) +
                           ", which is not an observed posterior;";
        }
      }
    }
    r.cells.push_back(std::move(diag));
  }

  r.posteriors_match.pass = all_reached_known && !undefined_update;
  r.posteriors_match.detail =
      r.posteriors_match.pass
          ? "every reachable signal induces an observed posterior"
          : "problems:" + cell_problems;

  // Distribution of induced posteriors under the objective distribution,
  // merged by posterior value.
  if (undefined_update) {
    r.posterior_distribution_matches = {false, "Bayes update undefined on a "
                                               "reachable signal"};
  } else {
    std::vector<std::pair<Dist<T>, T>> induced;
    for (auto& [mass, post] : reached) {
      auto it = std::find_if(induced.begin(), induced.end(), [&](const auto& e) {
        return e.first.matches(post);
      });
      if (it == induced.end())
        induced.emplace_back(post, mass);
      else
        it->second += mass;
    }
    bool ok = induced.size() == obs.posteriors.size();
    std::string mismatch;
    for (const auto& [post, mass] : induced) {
      auto k = obs.posteriors.find(post);
      if (!k || !traits::equal(obs.posteriors[*k].weight, mass)) {
        ok = false;
        mismatch += " " + detail::render(post) + " has objective probability " +
                    format_number(mass) + ";";
      }
    }
    r.posterior_distribution_matches.pass = ok;
    r.posterior_distribution_matches.detail =
        ok ? std::to_string(induced.size()) +
                 " distinct posteriors with matching frequencies"
           : "induced " + std::to_string(induced.size()) + " posteriors vs " +
                 std::to_string(obs.posteriors.size()) + " observed;" + mismatch;
  }

  auto mart = martingale_check(mart_weights, mart_posteriors, obs.prior);
  r.subjective_martingale_holds.pass = mart.holds;
  r.subjective_martingale_holds.detail =
      "subjective mean posterior " + detail::render(mart.mean_posterior);
  return r;
}

}  // namespace bayesrat
