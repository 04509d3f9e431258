#pragma once

// JSON file formats for observations, models and reports. Numbers travel as
// strings: "p/q" or decimals in rational mode (parsed exactly), decimals in
// float mode. See docs/format.md.

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "bayesrat/dist.hpp"
#include "bayesrat/known_omega.hpp"
#include "bayesrat/model.hpp"
#include "bayesrat/population_sim.hpp"
#include "bayesrat/rationalizer.hpp"

namespace bayesrat {

using json = nlohmann::ordered_json;

/// Input that does not follow the file format; `where` names the offending
/// field (or line:column for JSON syntax errors).
class ParseError : public StructuralError {
 public:
  ParseError(std::string where, const std::string& what)
      : StructuralError(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

using AnyObservation = std::variant<Observation<Rational>, Observation<double>>;
using AnyModel = std::variant<Model<Rational>, Model<double>>;

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" +
                         std::to_string(col),
                     "invalid JSON");
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, "cannot write file");
  out << j.dump(2) << '\n';
}

namespace detail {

inline const json& field(const json& j, const std::string& key,
                         const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + "." + key, "missing field");
  return *it;
}

template <Scalar T>
T number_at(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_number<T>(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(where, e.what());
    }
  }
  if constexpr (!NumberTraits<T>::exact) {
    if (j.is_number()) {
      double v = j.get<double>();
      if (v < 0) throw ParseError(where, "negative number");
      return v;
    }
  }
  throw ParseError(where, "expected a number string such as \"1/4\"");
}

inline NumberMode mode_of(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  auto it = j.find("mode");
  if (it == j.end()) return NumberMode::rational;
  if (*it == "rational") return NumberMode::rational;
  if (*it == "float") return NumberMode::floating;
  throw ParseError(where + ".mode", "expected \"rational\" or \"float\"");
}

inline SpacePtr states_at(const json& j, const std::string& where) {
  const json& arr = field(j, "states", where);
  if (!arr.is_array()) throw ParseError(where + ".states", "expected an array");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string())
      throw ParseError(where + ".states[" + std::to_string(i) + "]",
                       "expected a string label");
    labels.push_back(arr[i].get<std::string>());
  }
  try {
    return OutcomeSpace::make(std::move(labels));
  } catch (const StructuralError& e) {
    throw ParseError(where + ".states", e.what());
  }
}

template <Scalar T>
Dist<T> dist_at(const json& j, const SpacePtr& space, const std::string& where) {
  if (!j.is_object())
    throw ParseError(where, "expected an object mapping labels to numbers");
  std::vector<T> w(space->size(), T(0));
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto idx = space->find(it.key());
    if (!idx) throw ParseError(where + "." + it.key(), "unknown label");
    w[*idx] = number_at<T>(it.value(), where + "." + it.key());
  }
  try {
    return Dist<T>(space, std::move(w));
  } catch (const StructuralError& e) {
    throw ParseError(where, e.what());
  }
}

template <Scalar T>
json dist_json(const Dist<T>& d) {
  json out = json::object();
  for (std::size_t i = 0; i < d.size(); ++i)
    out[d.space()->label(i)] = format_number(d[i]);
  return out;
}

template <Scalar T>
Observation<T> observation_body(const json& j, const std::string& where) {
  SpacePtr states = states_at(j, where);
  Dist<T> prior = dist_at<T>(field(j, "prior", where), states, where + ".prior");
  const json& arr = field(j, "posteriors", where);
  if (!arr.is_array() || arr.empty())
    throw ParseError(where + ".posteriors", "expected a non-empty array");
  std::vector<WeightedBelief<T>> items;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string at = where + ".posteriors[" + std::to_string(k) + "]";
    T weight = number_at<T>(field(arr[k], "weight", at), at + ".weight");
    items.push_back({weight, dist_at<T>(field(arr[k], "belief", at), states,
                                        at + ".belief")});
  }
  try {
    return Observation<T>(std::move(prior), WeightedPosteriors<T>(std::move(items)));
  } catch (const StructuralError& e) {
    throw ParseError(where + ".posteriors", e.what());
  }
}

template <Scalar T>
Model<T> model_body(const json& j, const std::string& where) {
  SpacePtr states = states_at(j, where);
  const json& arr = field(j, "omega", where);
  if (!arr.is_array() || arr.empty())
    throw ParseError(where + ".omega", "expected a non-empty array");

  std::vector<std::string> labels;
  std::vector<std::size_t> projection;
  std::vector<std::string> signals;
  std::vector<OmegaState> structure;
  bool structured = true;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + ".omega[" + std::to_string(i) + "]";
    const json& s = field(arr[i], "s", at);
    const json& sig = field(arr[i], "signal", at);
    if (!s.is_string() || !sig.is_string())
      throw ParseError(at, "\"s\" and \"signal\" must be strings");
    auto si = states->find(s.get<std::string>());
    if (!si) throw ParseError(at + ".s", "unknown state");
    projection.push_back(*si);
    signals.push_back(sig.get<std::string>());
    auto lab = arr[i].find("label");
    labels.push_back(lab != arr[i].end() && lab->is_string()
                         ? lab->get<std::string>()
                         : s.get<std::string>() + "@" + signals.back());
    auto post = arr[i].find("posterior");
    auto sign = arr[i].find("sign");
    if (post != arr[i].end() && sign != arr[i].end() &&
        post->is_number_unsigned() && (*sign == "+" || *sign == "-")) {
      structure.push_back({*si, post->get<std::size_t>(),
                           *sign == "+" ? Sign::plus : Sign::minus});
    } else {
      structured = false;
    }
  }
  if (!structured) structure.clear();

  SpacePtr omega;
  try {
    omega = OutcomeSpace::make(labels);
  } catch (const StructuralError& e) {
    throw ParseError(where + ".omega", e.what());
  }

  const json& part = field(j, "partition", where);
  if (!part.is_object() || part.empty())
    throw ParseError(where + ".partition", "expected a non-empty object");
  std::vector<SignalCell> cells;
  for (auto it = part.begin(); it != part.end(); ++it) {
    const std::string at = where + ".partition." + it.key();
    if (!it.value().is_array()) throw ParseError(at, "expected an index array");
    SignalCell cell{it.key(), {}};
    for (const auto& idx : it.value()) {
      if (!idx.is_number_unsigned() || idx.get<std::size_t>() >= labels.size())
        throw ParseError(at, "state index out of range");
      const auto w = idx.get<std::size_t>();
      if (signals[w] != it.key())
        throw ParseError(at, "state " + std::to_string(w) + " declares signal '" +
                                 signals[w] + "'");
      cell.members.push_back(w);
    }
    cells.push_back(std::move(cell));
  }

  Dist<T> mu0 = dist_at<T>(field(j, "mu0", where), omega, where + ".mu0");
  Dist<T> p_obj = dist_at<T>(field(j, "pObj", where), omega, where + ".pObj");

  std::optional<std::vector<T>> lambda;
  if (auto it = j.find("lambda"); it != j.end() && !it->empty()) {
    if (!it->is_object()) throw ParseError(where + ".lambda", "expected an object");
    std::vector<T> l(it->size(), T(0));
    std::vector<bool> seen(it->size(), false);
    for (auto e = it->begin(); e != it->end(); ++e) {
      std::size_t k = 0;
      try {
        k = std::stoul(e.key());
      } catch (const std::exception&) {
        throw ParseError(where + ".lambda." + e.key(), "expected a posterior index");
      }
      if (k >= l.size() || seen[k])
        throw ParseError(where + ".lambda." + e.key(), "bad posterior index");
      seen[k] = true;
      l[k] = number_at<T>(e.value(), where + ".lambda." + e.key());
    }
    lambda = std::move(l);
  }

  try {
    return Model<T>(states, omega, std::move(projection), std::move(cells),
                    std::move(mu0), std::move(p_obj), std::move(structure),
                    std::move(lambda));
  } catch (const StructuralError& e) {
    throw ParseError(where, e.what());
  }
}

}  // namespace detail

inline AnyObservation observation_from_json(const json& j,
                                            const std::string& where = "observation") {
  if (detail::mode_of(j, where) == NumberMode::rational)
    return detail::observation_body<Rational>(j, where);
  return detail::observation_body<double>(j, where);
}

template <Scalar T>
json observation_to_json(const Observation<T>& obs) {
  json j;
  j["mode"] = std::string(to_string(NumberTraits<T>::mode));
  j["states"] = obs.states()->labels();
  j["prior"] = detail::dist_json(obs.prior);
  json arr = json::array();
  for (const auto& item : obs.posteriors)
    arr.push_back({{"weight", format_number(item.weight)},
                   {"belief", detail::dist_json(item.belief)}});
  j["posteriors"] = std::move(arr);
  return j;
}

inline AnyModel model_from_json(const json& j, const std::string& where = "model") {
  if (detail::mode_of(j, where) == NumberMode::rational)
    return detail::model_body<Rational>(j, where);
  return detail::model_body<double>(j, where);
}

template <Scalar T>
json model_to_json(const Model<T>& m) {
  json j;
  j["mode"] = std::string(to_string(NumberTraits<T>::mode));
  j["states"] = m.states->labels();
  const auto cell_of = m.cell_index();
  json omega = json::array();
  for (std::size_t w = 0; w < m.omega->size(); ++w) {
    json e;
    e["label"] = m.omega->label(w);
    e["s"] = m.states->label(m.projection[w]);
    e["signal"] = m.partition[cell_of[w]].label;
    if (!m.structure.empty()) {
      e["posterior"] = m.structure[w].posterior_index;
      e["sign"] = std::string(1, sign_char(m.structure[w].sign));
    }
    omega.push_back(std::move(e));
  }
  j["omega"] = std::move(omega);
  j["mu0"] = detail::dist_json(m.mu0);
  j["pObj"] = detail::dist_json(m.p_obj);
  json lambda = json::object();
  if (m.lambda_mix)
    for (std::size_t k = 0; k < m.lambda_mix->size(); ++k)
      lambda[std::to_string(k)] = format_number((*m.lambda_mix)[k]);
  j["lambda"] = std::move(lambda);
  json part = json::object();
  for (const auto& c : m.partition) part[c.label] = c.members;
  j["partition"] = std::move(part);
  return j;
}

// Reports

template <Scalar T>
json to_json(const RnReport<T>& r, const Observation<T>& obs) {
  json per = json::array();
  for (const auto& e : r.per_posterior) {
    json item;
    item["index"] = e.index;
    item["pass"] = e.pass();
    if (e.rn) {
      json f = json::object();
      for (std::size_t s = 0; s < e.rn->f.size(); ++s)
        if (e.rn->f[s]) f[obs.states()->label(s)] = format_number(*e.rn->f[s]);
      item["f"] = std::move(f);
      item["max_f"] = format_number(e.rn->max_f);
      item["epsilon"] = format_number(e.rn->epsilon);
    } else {
      item["violation"] = *e.violation;
    }
    per.push_back(std::move(item));
  }
  return {{"overall_pass", r.overall_pass}, {"per_posterior", std::move(per)}};
}

inline json to_json(const CheckOutcome& c) {
  return {{"pass", c.pass}, {"detail", c.detail}};
}

template <Scalar T>
json to_json(const VerifyReport<T>& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    json e;
    e["signal"] = c.label;
    e["subjective_mass"] = format_number(c.subjective_mass);
    e["objective_mass"] = format_number(c.objective_mass);
    if (c.posterior) e["posterior"] = detail::dist_json(*c.posterior);
    if (c.matched_posterior) e["matched_posterior"] = *c.matched_posterior;
    cells.push_back(std::move(e));
  }
  return {{"all_pass", r.all_pass()},
          {"prior_matches", to_json(r.prior_matches)},
          {"posteriors_match", to_json(r.posteriors_match)},
          {"posterior_distribution_matches",
           to_json(r.posterior_distribution_matches)},
          {"objective_agrees_with_prior", to_json(r.objective_agrees_with_prior)},
          {"subjective_martingale_holds", to_json(r.subjective_martingale_holds)},
          {"cells", std::move(cells)}};
}

template <Scalar T>
json to_json(const Prop1Report<T>& r) {
  json overlaps = json::array();
  for (auto [a, b] : r.overlapping) overlaps.push_back({a, b});
  json dev = json::array();
  for (const auto& d : r.worst_deviation) dev.push_back(format_number(d));
  return {{"rationalizable", r.rationalizable},
          {"condition_i", r.condition_i},
          {"overlapping_supports", std::move(overlaps)},
          {"condition_ii", r.condition_ii},
          {"worst_deviation", std::move(dev)}};
}

template <Scalar T>
json to_json(const MartingaleResult<T>& r) {
  return {{"holds", r.holds}, {"mean_posterior", detail::dist_json(r.mean_posterior)}};
}

template <Scalar T>
json posteriors_json(const WeightedPosteriors<T>& p) {
  json arr = json::array();
  for (const auto& item : p)
    arr.push_back({{"weight", format_number(item.weight)},
                   {"belief", detail::dist_json(item.belief)}});
  return arr;
}

}  // namespace bayesrat
