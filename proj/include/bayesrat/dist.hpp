#pragma once

// Finitely-supported distributions over labeled outcome spaces, the
// econometrician's (prior, posterior distribution) pair, and their invariants.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bayesrat/errors.hpp"
#include "bayesrat/number.hpp"

namespace bayesrat {

class OutcomeSpace;
using SpacePtr = std::shared_ptr<const OutcomeSpace>;

/// Ordered set of distinct, non-empty outcome labels.
class OutcomeSpace {
 public:
  static SpacePtr make(std::vector<std::string> labels) {
    return SpacePtr(new OutcomeSpace(std::move(labels)));
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string& label) const {
    if (auto i = find(label)) return *i;
    throw StructuralError("unknown outcome '" + label + "'");
  }

  bool operator==(const OutcomeSpace& other) const {
    return labels_ == other.labels_;
  }

 private:
  explicit OutcomeSpace(std::vector<std::string> labels)
      : labels_(std::move(labels)) {
    if (labels_.empty()) throw StructuralError("outcome space is empty");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i].empty()) throw StructuralError("empty outcome label");
      if (!index_.emplace(labels_[i], i).second)
        throw StructuralError("duplicate outcome label '" + labels_[i] + "'");
    }
  }

  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

template <Scalar T>
class Dist {
 public:
  using traits = NumberTraits<T>;

  Dist(SpacePtr space, std::vector<T> weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    if (!space_) throw StructuralError("distribution without outcome space");
    if (weights_.size() != space_->size())
      throw StructuralError("distribution has " +
                            std::to_string(weights_.size()) +
                            " weights for a space of " +
                            std::to_string(space_->size()) + " outcomes");
    T total = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (weights_[i] < 0) {
        // Rounding residue from a difference of doubles.
        if (!traits::exact && !traits::is_negative(weights_[i]))
          weights_[i] = 0;
        else
          throw StructuralError("negative weight " + format_number(weights_[i]) +
                                " on '" + space_->label(i) + "'");
      }
      total += weights_[i];
    }
    if (!traits::equal(total, T(1)))
      throw StructuralError("weights sum to " + format_number(total) +
                            ", not 1");
  }

  /// Missing labels get weight zero.
  static Dist from_map(SpacePtr space, const std::map<std::string, T>& m) {
    std::vector<T> w(space->size(), T(0));
    for (const auto& [label, value] : m) w[space->index_of(label)] = value;
    return Dist(std::move(space), std::move(w));
  }

  static Dist point_mass(SpacePtr space, std::size_t at) {
    std::vector<T> w(space->size(), T(0));
    w.at(at) = 1;
    return Dist(std::move(space), std::move(w));
  }

  static Dist uniform(SpacePtr space) {
    const auto n = space->size();
    std::vector<T> w(n, T(1) / T(static_cast<long>(n)));
    return Dist(std::move(space), std::move(w));
  }

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const T> weights() const { return weights_; }
  const T& operator[](std::size_t i) const { return weights_[i]; }
  const T& at(const std::string& label) const {
    return weights_[space_->index_of(label)];
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (traits::is_positive(weights_[i])) out.push_back(i);
    return out;
  }

  bool full_support() const { return support().size() == size(); }

  T mass(std::span<const std::size_t> event) const {
    T m = 0;
    for (auto i : event) m += weights_.at(i);
    return m;
  }

  /// Coordinate-wise equality (exact for rationals, within tolerance for
  /// doubles) over a common space.
  bool matches(const Dist& other) const {
    if (!same_space(space_, other.space_)) return false;
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (!traits::equal(weights_[i], other.weights_[i])) return false;
    return true;
  }

  T max_abs_deviation(const Dist& other) const {
    T worst = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      T d = traits::abs(T(weights_[i] - other.weights_[i]));
      if (d > worst) worst = d;
    }
    return worst;
  }

 private:
  SpacePtr space_;
  std::vector<T> weights_;
};

template <Scalar T>
struct WeightedBelief {
  T weight;
  Dist<T> belief;
};

/// A finitely-supported distribution over beliefs. Duplicate beliefs are
/// merged at construction, so `items()` is the support.
template <Scalar T>
class WeightedPosteriors {
 public:
  using traits = NumberTraits<T>;

  explicit WeightedPosteriors(std::vector<WeightedBelief<T>> raw) {
    if (raw.empty()) throw StructuralError("posterior distribution is empty");
    const SpacePtr space = raw.front().belief.space();
    T total = 0;
    for (auto& wb : raw) {
      if (!same_space(wb.belief.space(), space))
        throw StructuralError("posteriors do not share an outcome space");
      if (!traits::is_positive(wb.weight))
        throw StructuralError("posterior weight " + format_number(wb.weight) +
                              " is not strictly positive");
      total += wb.weight;
      auto dup = std::find_if(items_.begin(), items_.end(), [&](const auto& e) {
        return e.belief.matches(wb.belief);
      });
      if (dup != items_.end())
        dup->weight += wb.weight;
      else
        items_.push_back(std::move(wb));
    }
    if (!traits::equal(total, T(1)))
      throw StructuralError("posterior weights sum to " + format_number(total) +
                            ", not 1");
  }

  std::size_t size() const { return items_.size(); }
  const WeightedBelief<T>& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<WeightedBelief<T>>& items() const { return items_; }
  const SpacePtr& space() const { return items_.front().belief.space(); }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  std::optional<std::size_t> find(const Dist<T>& belief) const {
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (items_[i].belief.matches(belief)) return i;
    return std::nullopt;
  }

  std::vector<T> weights() const {
    std::vector<T> w;
    for (const auto& it : items_) w.push_back(it.weight);
    return w;
  }

  std::vector<Dist<T>> beliefs() const {
    std::vector<Dist<T>> b;
    for (const auto& it : items_) b.push_back(it.belief);
    return b;
  }

 private:
  std::vector<WeightedBelief<T>> items_;
};

/// Observed prior over S together with the distribution of posteriors.
template <Scalar T>
struct Observation {
  Observation(Dist<T> prior_, WeightedPosteriors<T> posteriors_)
      : prior(std::move(prior_)), posteriors(std::move(posteriors_)) {
    if (!same_space(prior.space(), posteriors.space()))
      throw StructuralError("prior and posteriors use different state spaces");
  }

  const SpacePtr& states() const { return prior.space(); }

  Dist<T> prior;
  WeightedPosteriors<T> posteriors;
};

}  // namespace bayesrat
