// Command-line front end. Exit codes: 0 = pass, 2 = substantive failure
// (not rationalizable, check false), 1 = bad input or usage.

#include <chrono>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bayesrat/bayesrat.hpp"
#include "bayesrat/io.hpp"

namespace {

using namespace bayesrat;

constexpr int kPass = 0;
constexpr int kInputError = 1;
constexpr int kFail = 2;

int verdict(bool pass) { return pass ? kPass : kFail; }

template <Scalar T>
std::string render(const Dist<T>& d) {
  return detail::render(d);
}

/// Mass of each (state, signal) pair: rows are states, columns are cells.
template <Scalar T>
void print_table(std::ostream& os, const std::string& title, const Model<T>& m,
                 const Dist<T>& mu) {
  os << title << '\n';
  std::vector<std::vector<T>> table(m.states->size(),
                                    std::vector<T>(m.partition.size(), T(0)));
  for (std::size_t c = 0; c < m.partition.size(); ++c)
    for (auto w : m.partition[c].members) table[m.projection[w]][c] += mu[w];

  std::size_t width = 6;
  for (const auto& cell : m.partition) width = std::max(width, cell.label.size());
  for (const auto& row : table)
    for (const auto& v : row) width = std::max(width, format_number(v).size());
  std::size_t label_width = 1;
  for (const auto& s : m.states->labels()) label_width = std::max(label_width, s.size());

  auto pad = [](const std::string& s, std::size_t w) {
    return std::string(w > s.size() ? w - s.size() : 0, ' ') + s;
  };
  os << std::string(label_width, ' ');
  for (const auto& cell : m.partition) os << "  " << pad(cell.label, width);
  os << '\n';
  for (std::size_t s = 0; s < table.size(); ++s) {
    os << pad(m.states->label(s), label_width);
    for (const auto& v : table[s]) os << "  " << pad(format_number(v), width);
    os << '\n';
  }
}

template <Scalar T>
int run_check(const Observation<T>& obs, bool as_json) {
  auto report = check_condition1(obs);
  if (as_json) {
    std::cout << to_json(report, obs).dump(2) << '\n';
  } else {
    for (const auto& e : report.per_posterior) {
      std::cout << "posterior " << e.index << ' '
                << render(obs.posteriors[e.index].belief) << ": ";
      if (e.rn)
        std::cout << "max f = " << format_number(e.rn->max_f)
                  << ", epsilon = " << format_number(e.rn->epsilon) << '\n';
      else
        std::cout << "charges prior-null state '" << *e.violation << "'\n";
    }
    std::cout << (report.overall_pass ? "absolutely continuous: rationalizable\n"
                                      : "absolute continuity fails: not "
                                        "rationalizable\n");
  }
  return verdict(report.overall_pass);
}

struct RationalizeOptions {
  std::string lambda = "uniform";
  std::string lambda_file;
  std::string out;
  bool as_json = false;
};

template <Scalar T>
std::vector<T> read_lambda(const std::string& path, std::size_t n_post) {
  json j = read_json_file(path);
  if (j.contains("lambda")) j = j["lambda"];
  if (!j.is_object()) throw ParseError(path, "expected an object of index weights");
  std::vector<T> lambda(n_post, T(0));
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t k = 0;
    try {
      k = std::stoul(it.key());
    } catch (const std::exception&) {
      throw ParseError(path + ":" + it.key(), "expected a posterior index");
    }
    if (k >= n_post)
      throw InvalidMixError("mixing weight for unknown posterior #" + it.key());
    lambda[k] = detail::number_at<T>(it.value(), path + ":" + it.key());
  }
  return lambda;
}

template <Scalar T>
int run_rationalize(const Observation<T>& obs, const RationalizeOptions& opt) {
  std::vector<T> lambda;
  if (opt.lambda == "uniform") {
    lambda = make_lambda(obs, LambdaChoice::uniform);
  } else if (opt.lambda == "target") {
    lambda = make_lambda(obs, LambdaChoice::target);
  } else {
    if (opt.lambda_file.empty())
      throw ParseError("--lambda-file", "required with --lambda file");
    lambda = read_lambda<T>(opt.lambda_file, obs.posteriors.size());
  }

  Model<T> model = construct_rationalization(obs, lambda);
  json mj = model_to_json(model);
  if (!opt.out.empty()) write_json_file(opt.out, mj);

  if (opt.as_json) {
    std::cout << mj.dump(2) << '\n';
  } else {
    for (std::size_t k = 0; k < obs.posteriors.size(); ++k)
      std::cout << "nu" << k << " = " << render(obs.posteriors[k].belief)
                << "  observed weight " << format_number(obs.posteriors[k].weight)
                << ", lambda " << format_number(lambda[k]) << '\n';
    std::cout << '\n';
    print_table(std::cout, "subjective prior mu0:", model, model.mu0);
    std::cout << '\n';
    print_table(std::cout, "objective distribution P:", model, model.p_obj);
    if (!opt.out.empty()) std::cout << "\nmodel written to " << opt.out << '\n';
  }
  return kPass;
}

template <Scalar T>
int run_verify(const Model<T>& model, const Observation<T>& obs, bool as_json) {
  auto r = verify_model(model, obs);
  if (as_json) {
    std::cout << to_json(r).dump(2) << '\n';
  } else {
    auto line = [](const char* name, const CheckOutcome& c) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << name << ": " << c.detail << '\n';
    };
    line("prior_matches", r.prior_matches);
    line("posteriors_match", r.posteriors_match);
    line("posterior_distribution_matches", r.posterior_distribution_matches);
    line("objective_agrees_with_prior", r.objective_agrees_with_prior);
    line("subjective_martingale_holds", r.subjective_martingale_holds);
  }
  return verdict(r.all_pass());
}

template <Scalar T>
int run_known_omega(const Observation<T>& obs, bool brute, bool as_json) {
  auto r = check_proposition1(obs);
  std::optional<bool> oracle;
  if (brute) oracle = brute_force_known_omega(obs);
  const bool result = oracle ? *oracle : r.rationalizable;

  if (as_json) {
    json j = to_json(r);
    if (oracle) j["brute_force"] = *oracle;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "condition (i) disjoint supports: "
              << (r.condition_i ? "holds" : "fails") << '\n';
    for (auto [a, b] : r.overlapping)
      std::cout << "  supports of posteriors " << a << " and " << b << " overlap\n";
    std::cout << "condition (ii) conditional on support: "
              << (r.condition_ii ? "holds" : "fails") << '\n';
    for (std::size_t k = 0; k < r.worst_deviation.size(); ++k)
      std::cout << "  posterior " << k << " worst deviation "
                << format_number(r.worst_deviation[k]) << '\n';
    if (oracle)
      std::cout << "brute force over all partitions: "
                << (*oracle ? "witness found" : "no witness") << '\n';
    std::cout << (result ? "rationalizable with a known state space\n"
                         : "not rationalizable with a known state space\n");
  }
  if (oracle && *oracle != r.rationalizable) {
    std::cerr << "error: brute force disagrees with the support conditions\n";
    return kInputError;
  }
  return verdict(result);
}

template <Scalar T>
int run_martingale(const Observation<T>& obs, const Model<T>* model, bool as_json) {
  std::vector<T> weights;
  std::vector<Dist<T>> posteriors;
  if (model) {
    for (std::size_t c = 0; c < model->partition.size(); ++c) {
      T mass = model->mu0.mass(std::span<const std::size_t>(model->partition[c].members));
      if (!NumberTraits<T>::is_positive(mass)) continue;
      weights.push_back(mass);
      posteriors.push_back(model->induced_posterior(c));
    }
  } else {
    weights = obs.posteriors.weights();
    posteriors = obs.posteriors.beliefs();
  }
  auto r = martingale_check(weights, posteriors, obs.prior);
  if (as_json) {
    json j = to_json(r);
    j["weights"] = model ? "subjective" : "objective";
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << (model ? "subjective" : "objective") << " mean posterior "
              << render(r.mean_posterior) << " vs prior " << render(obs.prior)
              << '\n'
              << (r.holds ? "martingale holds\n" : "not a martingale\n");
  }
  return verdict(r.holds);
}

template <Scalar T>
int run_simulate(const Model<T>& model, const Observation<T>* obs, std::size_t n,
                 std::uint64_t seed, unsigned workers, double tol, bool as_json) {
  const auto start = std::chrono::steady_clock::now();
  auto sample = simulate_panel(model, n, seed, workers);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const WeightedPosteriors<T> target =
      obs ? obs->posteriors : induced_observables(model).posteriors;
  const T tv = tv_distance(sample.empirical, target);
  const bool pass = NumberTraits<T>::to_double(tv) < tol;

  if (as_json) {
    json j;
    j["n_agents"] = sample.n_agents;
    j["seed"] = sample.seed;
    j["empirical"] = posteriors_json(sample.empirical);
    j["target"] = posteriors_json(target);
    j["tv_distance"] = format_number(tv);
    j["tolerance"] = tol;
    j["pass"] = pass;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << n << " agents, seed " << seed << ", " << secs << " s\n";
    for (const auto& item : sample.empirical)
      std::cout << "  " << render(item.belief) << "  "
                << NumberTraits<T>::to_double(item.weight) << '\n';
    std::cout << "tv distance to target " << NumberTraits<T>::to_double(tv)
              << (pass ? " < " : " >= ") << tol << '\n';
  }
  return verdict(pass);
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const AbsoluteContinuityViolation& e) {
    std::cerr << "not rationalizable: " << e.what() << '\n';
    return kFail;
  } catch (const InvalidMixError& e) {
    std::cerr << "invalid mixing distribution: " << e.what() << '\n';
    return kFail;
  } catch (const NotRationalizableError& e) {
    std::cerr << "not rationalizable: " << e.what() << '\n';
    return kFail;
  } catch (const UndefinedUpdateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}

template <typename Fn>
int with_observation(const std::string& path, Fn&& fn) {
  AnyObservation obs = observation_from_json(read_json_file(path), path);
  return std::visit(fn, obs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Test belief dynamics for consistency with Bayesian updating"};
  app.require_subcommand(1);

  bool as_json = false;
  std::string obs_path, model_path;

  auto* check = app.add_subcommand("check", "Screen an observation for absolute continuity");
  check->add_option("observation", obs_path, "Observation file")->required();
  check->add_flag("--json", as_json, "Machine-readable report");

  RationalizeOptions ropt;
  auto* rat = app.add_subcommand("rationalize", "Build a rationalizing model");
  rat->add_option("observation", obs_path, "Observation file")->required();
  rat->add_option("--lambda", ropt.lambda, "Mixing distribution over posteriors")
      ->check(CLI::IsMember({"uniform", "target", "file"}));
  rat->add_option("--lambda-file", ropt.lambda_file,
                  "JSON object of posterior index -> weight (with --lambda file)");
  rat->add_option("--out", ropt.out, "Write the model to this file");
  rat->add_flag("--json", ropt.as_json, "Print the model as JSON");

  auto* ver = app.add_subcommand("verify", "Check a model against an observation");
  ver->add_option("model", model_path, "Model file")->required();
  ver->add_option("observation", obs_path, "Observation file")->required();
  ver->add_flag("--json", as_json, "Machine-readable report");

  bool brute = false;
  auto* ko = app.add_subcommand("known-omega",
                                "Test rationalizability when states of the world are observed");
  ko->add_option("observation", obs_path, "Observation file")->required();
  ko->add_flag("--brute-force", brute, "Also search every partition exhaustively");
  ko->add_flag("--json", as_json, "Machine-readable report");

  std::string weights = "objective";
  auto* mart = app.add_subcommand("martingale", "Test the martingale property of beliefs");
  mart->add_option("observation", obs_path, "Observation file")->required();
  mart->add_option("--weights", weights, "objective (observed frequencies) or subjective")
      ->check(CLI::IsMember({"objective", "subjective"}));
  mart->add_option("--model", model_path, "Model supplying subjective signal weights");
  mart->add_flag("--json", as_json, "Machine-readable report");

  std::size_t n_agents = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double tol = 0.01;
  std::string target_path;
  auto* sim = app.add_subcommand("simulate", "Sample a panel of agents from a model");
  sim->add_option("model", model_path, "Model file")->required();
  sim->add_option("--n", n_agents, "Number of agents")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--obs", target_path,
                  "Compare against this observation instead of the model's own");
  sim->add_option("--tol", tol, "Total variation threshold for a pass");
  sim->add_flag("--json", as_json, "Machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  return guarded([&]() -> int {
    if (*check)
      return with_observation(obs_path,
                              [&](const auto& obs) { return run_check(obs, as_json); });
    if (*rat)
      return with_observation(
          obs_path, [&](const auto& obs) { return run_rationalize(obs, ropt); });
    if (*ko)
      return with_observation(obs_path, [&](const auto& obs) {
        return run_known_omega(obs, brute, as_json);
      });

    auto load_model = [&] { return model_from_json(read_json_file(model_path), model_path); };

    if (*mart) {
      if (weights == "subjective" && model_path.empty())
        throw ParseError("--model", "required with --weights subjective");
      AnyObservation obs = observation_from_json(read_json_file(obs_path), obs_path);
      if (weights == "objective")
        return std::visit(
            [&](const auto& o) {
              using TO = std::decay_t<decltype(o.prior[0])>;
              return run_martingale<TO>(o, nullptr, as_json);
            },
            obs);
      AnyModel model = load_model();
      return std::visit(
          [&](const auto& o, const auto& m) -> int {
            using TO = std::decay_t<decltype(o.prior[0])>;
            using TM = std::decay_t<decltype(m.mu0[0])>;
            if constexpr (!std::is_same_v<TO, TM>)
              throw ParseError(model_path, "model and observation modes differ");
            else
              return run_martingale(o, &m, as_json);
          },
          obs, model);
    }
    if (*ver) {
      AnyModel model = load_model();
      AnyObservation obs = observation_from_json(read_json_file(obs_path), obs_path);
      return std::visit(
          [&](const auto& m, const auto& o) -> int {
            using TO = std::decay_t<decltype(o.prior[0])>;
            using TM = std::decay_t<decltype(m.mu0[0])>;
            if constexpr (!std::is_same_v<TO, TM>)
              throw ParseError(model_path, "model and observation modes differ");
            else
              return run_verify(m, o, as_json);
          },
          model, obs);
    }
    // simulate
    AnyModel model = load_model();
    if (target_path.empty())
      return std::visit(
          [&](const auto& m) {
            using TM = std::decay_t<decltype(m.mu0[0])>;
            return run_simulate<TM>(m, nullptr, n_agents, seed, workers, tol, as_json);
          },
          model);
    AnyObservation obs = observation_from_json(read_json_file(target_path), target_path);
    return std::visit(
        [&](const auto& m, const auto& o) -> int {
          using TO = std::decay_t<decltype(o.prior[0])>;
          using TM = std::decay_t<decltype(m.mu0[0])>;
          if constexpr (!std::is_same_v<TO, TM>)
            throw ParseError(target_path, "model and observation modes differ");
          else
            return run_simulate(m, &o, n_agents, seed, workers, tol, as_json);
        },
        model, obs);
  });
}
