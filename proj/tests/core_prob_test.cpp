#include <gtest/gtest.h>

#include "bayesrat/ops.hpp"
#include "support.hpp"

namespace bayesrat {
namespace {

using namespace bayesrat::testing;
using R = Rational;

// Worked-example subjective prior over {H,L} x {0.8+, 1.0+, 0.8-, 1.0-},
// listed row by row.
Dist<R> worked_mu0(const SpacePtr& omega) {
  return dist<R>(omega, {{1, 4}, {1, 4}, {0, 1}, {0, 1},
                         {1, 16}, {0, 1}, {3, 16}, {1, 4}});
}

SpacePtr worked_omega() {
  return OutcomeSpace::make({"H,0.8+", "H,1.0+", "H,0.8-", "H,1.0-",
                             "L,0.8+", "L,1.0+", "L,0.8-", "L,1.0-"});
}

const std::vector<std::size_t> kRowProjection{0, 0, 0, 0, 1, 1, 1, 1};

TEST(Number, ParsesFractionsAndDecimalsExactly) {
  EXPECT_EQ(parse_rational("1/4"), R(1, 4));
  EXPECT_EQ(parse_rational("0.8"), R(4, 5));
  EXPECT_EQ(parse_rational("0.1875"), R(3, 16));
  EXPECT_EQ(parse_rational("0.0625"), R(1, 16));
  EXPECT_EQ(parse_rational("010/08"), R(5, 4));
  EXPECT_EQ(parse_rational(".5"), R(1, 2));
  EXPECT_EQ(parse_rational("3"), R(3));
  EXPECT_EQ(parse_rational(" 2/6 "), R(1, 3));
  for (const char* bad : {"", "-1/2", "1/0", "a", "1/2/3", "1e-3", "0.5.1", "/"})
    EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
  EXPECT_DOUBLE_EQ(parse_number<double>("1/3"), 1.0 / 3.0);
}

TEST(Dist, RejectsInvalidWeights) {
  auto s = states_hl();
  EXPECT_THROW(dist<R>(s, {{1, 2}, {1, 3}}), StructuralError);
  EXPECT_THROW(Dist<R>(s, {R(3, 2), R(-1, 2)}), StructuralError);
  EXPECT_THROW(Dist<R>(s, {R(1)}), StructuralError);
  EXPECT_THROW(OutcomeSpace::make({"a", "a"}), StructuralError);
  EXPECT_THROW(OutcomeSpace::make({"a", ""}), StructuralError);
  EXPECT_NO_THROW(Dist<double>(s, {0.3 + 1e-12, 0.7}));
  EXPECT_THROW(Dist<double>(s, {0.3 + 1e-6, 0.7}), StructuralError);
}

TEST(WeightedPosteriors, MergesDuplicateBeliefs) {
  auto s = states_hl();
  WeightedPosteriors<R> p({{R(1, 4), dist<R>(s, {{1, 2}, {1, 2}})},
                           {R(1, 4), dist<R>(s, {{1, 1}, {0, 1}})},
                           {R(1, 2), dist<R>(s, {{2, 4}, {2, 4}})}});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].weight, R(3, 4));
  EXPECT_THROW(WeightedPosteriors<R>({{R(0), dist<R>(s, {{1, 1}, {0, 1}})},
                                      {R(1), dist<R>(s, {{0, 1}, {1, 1}})}}),
               StructuralError);
  EXPECT_THROW(WeightedPosteriors<R>({{R(9, 10), dist<R>(s, {{1, 1}, {0, 1}})}}),
               StructuralError);
}

TEST(Pushforward, WorkedExampleSubjectivePrior) {
  auto omega = worked_omega();
  auto nu0 = pushforward(worked_mu0(omega), std::span(kRowProjection), states_hl());
  EXPECT_EQ(nu0[0], R(1, 2));
  EXPECT_EQ(nu0[1], R(1, 2));
}

TEST(Pushforward, WorkedExampleObjectiveDistribution) {
  auto omega = worked_omega();
  auto p = dist<R>(omega, {{1, 8}, {3, 8}, {0, 1}, {0, 1}, {1, 8}, {3, 8}, {0, 1}, {0, 1}});
  auto eta0 = pushforward(p, std::span(kRowProjection), states_hl());
  EXPECT_EQ(eta0[0], R(1, 2));
  EXPECT_EQ(eta0[1], R(1, 2));
}

TEST(Pushforward, IdentityIsNoOp) {
  auto s = numbered_states(3);
  auto d = dist<R>(s, {{1, 6}, {1, 3}, {1, 2}});
  std::vector<std::size_t> id{0, 1, 2};
  EXPECT_TRUE(pushforward(d, std::span(id), s).matches(d));
}

TEST(Pushforward, ProjectionOutsideStatesIsStructuralError) {
  auto s = states_hl();
  auto d = dist<R>(numbered_states(2), {{1, 2}, {1, 2}});
  std::vector<std::size_t> bad{0, 2};
  EXPECT_THROW(pushforward(d, std::span(bad), s), StructuralError);
  EXPECT_THROW(pushforward(d, [](const std::string&) { return std::string("X"); }, s),
               StructuralError);
  auto by_label = pushforward(
      d, [](const std::string& l) { return std::string(l == "1" ? "H" : "L"); }, s);
  EXPECT_EQ(by_label[0], R(1, 2));
}

TEST(Condition, WorkedExampleSignalColumns) {
  auto omega = worked_omega();
  auto mu0 = worked_mu0(omega);
  auto s = states_hl();

  std::vector<std::size_t> col_08_plus{0, 4};
  auto post = pushforward(condition(mu0, std::span(col_08_plus)),
                          std::span(kRowProjection), s);
  EXPECT_EQ(post[0], R(4, 5));
  EXPECT_EQ(post[1], R(1, 5));

  std::vector<std::size_t> col_10_minus{3, 7};
  post = pushforward(condition(mu0, std::span(col_10_minus)),
                     std::span(kRowProjection), s);
  EXPECT_EQ(post[0], R(0));
  EXPECT_EQ(post[1], R(1));
}

TEST(Condition, FullSpaceLeavesDistributionUnchanged) {
  auto s = numbered_states(3);
  auto d = dist<R>(s, {{1, 6}, {1, 3}, {1, 2}});
  std::vector<std::size_t> all{0, 1, 2};
  EXPECT_TRUE(condition(d, std::span(all)).matches(d));
}

TEST(Condition, ZeroMassCellThrows) {
  auto omega = worked_omega();
  std::vector<std::size_t> null_cell{2};  // H,0.8-
  EXPECT_THROW(condition(worked_mu0(omega), std::span(null_cell)), ZeroProbabilityCell);
}

TEST(RnDerivative, WorkedExamplePosteriors) {
  auto s = states_hl();
  auto prior = dist<R>(s, {{1, 2}, {1, 2}});

  // Direct division: 0.8/0.5 and 0.2/0.5.
  auto r = rn_derivative(prior, dist<R>(s, {{4, 5}, {1, 5}}));
  EXPECT_EQ(*r.f[0], R(8, 5));
  EXPECT_EQ(*r.f[1], R(2, 5));
  EXPECT_EQ(r.max_f, R(8, 5));
  EXPECT_EQ(r.epsilon, R(5, 8));
  // Subjective mass of the "+" signal with uniform mixing is the 0.8+ column
  // total of the worked-example table, 0.25 + 0.0625.
  EXPECT_EQ(r.epsilon * R(1, 2), parse_rational("0.3125"));

  r = rn_derivative(prior, dist<R>(s, {{1, 1}, {0, 1}}));
  EXPECT_EQ(*r.f[0], R(2));
  EXPECT_EQ(*r.f[1], R(0));
  EXPECT_EQ(r.epsilon, R(1, 2));
  EXPECT_EQ(r.epsilon * R(1, 2), parse_rational("0.25"));

  r = rn_derivative(prior, prior);
  EXPECT_EQ(*r.f[0], R(1));
  EXPECT_EQ(*r.f[1], R(1));
  EXPECT_EQ(r.epsilon, R(1));
}

TEST(RnDerivative, ViolationNamesOffendingOutcome) {
  auto s = numbered_states(3);
  auto prior = dist<R>(s, {{1, 2}, {1, 2}, {0, 1}});
  try {
    rn_derivative(prior, dist<R>(s, {{1, 3}, {1, 3}, {1, 3}}), 4);
    FAIL() << "expected a violation";
  } catch (const AbsoluteContinuityViolation& e) {
    EXPECT_EQ(e.outcome(), "3");
    EXPECT_EQ(e.posterior_index(), 4u);
  }
  // Prior-null outcomes that the belief also ignores carry no derivative.
  auto r = rn_derivative(prior, dist<R>(s, {{1, 1}, {0, 1}, {0, 1}}));
  EXPECT_FALSE(r.f[2].has_value());
  EXPECT_EQ(r.epsilon, R(1, 2));
}

TEST(RnDerivative, FloatMode) {
  auto s = states_hl();
  auto r = rn_derivative(dist<double>(s, {{1, 2}, {1, 2}}), dist<double>(s, {{4, 5}, {1, 5}}));
  EXPECT_NEAR(r.epsilon, 0.625, 1e-12);
}

TEST(Martingale, ObjectiveWeightsFailOnWorkedExample) {
  auto s = states_hl();
  std::vector<R> w{R(1, 4), R(3, 4)};
  std::vector<Dist<R>> posts{dist<R>(s, {{4, 5}, {1, 5}}), dist<R>(s, {{1, 1}, {0, 1}})};
  auto r = martingale_check(w, posts, dist<R>(s, {{1, 2}, {1, 2}}));
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(r.mean_posterior[0], parse_rational("0.95"));
  EXPECT_EQ(r.mean_posterior[1], parse_rational("0.05"));
}

TEST(Martingale, SubjectiveSignalWeightsHoldOnWorkedExample) {
  auto s = states_hl();
  std::vector<R> w{parse_rational("0.3125"), parse_rational("0.25"),
                   parse_rational("0.1875"), parse_rational("0.25")};
  std::vector<Dist<R>> posts{dist<R>(s, {{4, 5}, {1, 5}}), dist<R>(s, {{1, 1}, {0, 1}}),
                             dist<R>(s, {{0, 1}, {1, 1}}), dist<R>(s, {{0, 1}, {1, 1}})};
  auto r = martingale_check(w, posts, dist<R>(s, {{1, 2}, {1, 2}}));
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.mean_posterior.matches(dist<R>(s, {{1, 2}, {1, 2}})));
}

TEST(Martingale, SinglePosteriorEqualToPrior) {
  auto s = numbered_states(3);
  auto prior = dist<R>(s, {{1, 6}, {1, 3}, {1, 2}});
  std::vector<R> w{R(1)};
  std::vector<Dist<R>> posts{prior};
  EXPECT_TRUE(martingale_check(w, posts, prior).holds);
}

TEST(Martingale, LengthMismatchIsStructuralError) {
  auto s = states_hl();
  std::vector<R> w{R(1, 2), R(1, 2)};
  std::vector<Dist<R>> posts{dist<R>(s, {{1, 2}, {1, 2}})};
  EXPECT_THROW(martingale_check(w, posts, posts[0]), StructuralError);
}

// Properties over random exact distributions.

class CoreProperties : public ::testing::TestWithParam<int> {};

TEST_P(CoreProperties, PushforwardConditioningAndRnIdentities) {
  Rng rng(static_cast<std::uint64_t>(GetParam()));
  const auto n_omega = static_cast<std::size_t>(uniform_int(rng, 1, 7));
  const auto n_states = static_cast<std::size_t>(uniform_int(rng, 1, 4));
  auto omega = numbered_states(n_omega);
  auto states = numbered_states(n_states);
  auto mu = from_counts(omega, random_counts(rng, std::vector<bool>(n_omega, true)));

  // Pushforward keeps total mass and sums preimages.
  std::vector<std::size_t> proj(n_omega);
  for (auto& p : proj) p = static_cast<std::size_t>(uniform_int(rng, 0, n_states - 1));
  auto pushed = pushforward(mu, std::span<const std::size_t>(proj), states);
  for (std::size_t s = 0; s < n_states; ++s) {
    R pre = 0;
    for (std::size_t w = 0; w < n_omega; ++w)
      if (proj[w] == s) pre += mu[w];
    EXPECT_EQ(pushed[s], pre);
  }

  // Law of total probability over a random partition with charged cells.
  std::vector<std::vector<std::size_t>> cells(n_omega);
  for (std::size_t w = 0; w < n_omega; ++w)
    cells[static_cast<std::size_t>(uniform_int(rng, 0, n_omega - 1))].push_back(w);
  std::erase_if(cells, [](const auto& c) { return c.empty(); });
  std::vector<R> recomposed(n_omega, R(0));
  std::vector<R> cell_mass;
  std::vector<Dist<R>> cell_posts;
  for (const auto& c : cells) {
    R m = mu.mass(std::span<const std::size_t>(c));
    if (m == 0) continue;
    auto cond = condition(mu, std::span<const std::size_t>(c));
    for (std::size_t w = 0; w < n_omega; ++w) recomposed[w] += m * cond[w];
    cell_mass.push_back(m);
    cell_posts.push_back(cond);
  }
  for (std::size_t w = 0; w < n_omega; ++w) EXPECT_EQ(recomposed[w], mu[w]);
  EXPECT_TRUE(martingale_check(cell_mass, cell_posts, mu).holds);

  // Likelihood ratio reconstructs the belief on every event.
  auto prior = from_counts(states, random_counts(rng, std::vector<bool>(n_states, true)));
  std::vector<bool> supp(n_states);
  for (std::size_t s = 0; s < n_states; ++s) supp[s] = prior[s] > 0;
  auto belief = from_counts(states, random_counts(rng, supp));
  auto rn = rn_derivative(prior, belief);
  for (const auto& event : all_events(n_states)) {
    R integral = 0;
    for (auto s : event)
      if (rn.f[s]) integral += *rn.f[s] * prior[s];
    EXPECT_EQ(integral, belief.mass(std::span<const std::size_t>(event)));
  }
  EXPECT_GT(rn.epsilon, 0);
  EXPECT_LE(rn.epsilon, 1);
  bool equal_on_support = true;
  for (std::size_t s = 0; s < n_states; ++s)
    if (prior[s] > 0 && prior[s] != belief[s]) equal_on_support = false;
  EXPECT_EQ(rn.epsilon == 1, equal_on_support);
}

INSTANTIATE_TEST_SUITE_P(RandomSeeds, CoreProperties, ::testing::Range(0, 200));

}  // namespace
}  // namespace bayesrat
