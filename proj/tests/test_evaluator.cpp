#include "fate421/errors.hpp"
#include "fate421/evaluator.hpp"
#include "fate421/policy_engine.hpp"
#include "fate421/result_tables.hpp"
#include "fate421/solver.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace fate421;
using testing::C;
using testing::Q;

namespace {

const RoundConfig first = RoundConfig::first(3, 6, 3);

std::shared_ptr<const FateGraph> graph_of(const RoundConfig& config) {
  return std::make_shared<const FateGraph>(build_fate_graph(config));
}

Strategy random_mixed(const FateGraph& g, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> weight(1, 5);
  Strategy s("mixed");
  for (int j = 0; j < g.last_layer(); ++j)
    for (const auto& node : g.layer(j))
      for (const auto& e : node.events) {
        if (node.absorbing) {
          s.set({j, node.state, e.cast}, node.state);
          continue;
        }
        MixedDecision law;
        int total = 0;
        std::vector<int> w;
        for (std::size_t k = 0; k < e.successors.size(); ++k) total += w.emplace_back(weight(rng));
        for (std::size_t k = 0; k < e.successors.size(); ++k)
          law[g.node(j + 1, e.successors[k]).state] = Rational(w[k], total);
        s.set({j, node.state, e.cast}, law);
      }
  return s;
}

// Expected utility by walking every fate of the strategy.
Rational walk(const Strategy& s, const UtilitySpec& u, const FateGraph& g, int j, const Combination& state) {
  if (j == g.last_layer()) return u(j, state).value();
  const auto& node = g.node(j, *g.find(j, state));
  Rational total(0);
  for (const auto& e : node.events)
    for (const auto& [next, w] : s.law({j, state, e.cast})) total += e.probability * w * walk(s, u, g, j + 1, next);
  return total;
}

}  // namespace

TEST_CASE("kernel rows are laws") {
  const auto g = graph_of(first);
  for (const auto& s : {tabulate(*g, one_goal_rule(C("421"), first), "ratchet"),
                        extract_pure_strategy(backward_induction(g, UtilitySpec::transfer())), random_mixed(*g, 3)}) {
    const auto k = exact_transition_matrix(s, *g);
    for (int j = 0; j <= k.last_layer(); ++j) {
      const Matrix<Rational> sigma = k.sigma(j);
      for (Eigen::Index r = 0; r < sigma.rows(); ++r) CHECK(sigma.row(r).sum() == 1);
    }
  }
}

TEST_CASE("kernel of a single die replayed until it shows 2") {
  const auto config = RoundConfig::first(1, 2, 2);
  const auto g = graph_of(config);
  const auto k = exact_transition_matrix(tabulate(*g, bernoulli_rule(C("2", 2), config), "bernoulli"), *g);
  const auto sigma = k.sigma(0);
  CHECK(sigma(0, k.index(1, C("2", 2))) == Q("1/2"));
  CHECK(sigma(0, k.index(1, Combination(2))) == Q("1/2"));
}

TEST_CASE("absorbing states have identity rows") {
  const auto g = graph_of(first);
  const auto k = exact_transition_matrix(tabulate(*g, one_goal_rule(C("421"), first), "ratchet"), *g);
  const auto sigma = k.sigma(1);
  const int from = k.index(1, C("421"));
  REQUIRE(from >= 0);
  CHECK(sigma(from, k.index(2, C("421"))) == 1);
  CHECK(sigma.row(from).sum() == 1);
}

TEST_CASE("kolmogorov expectation examples") {
  const auto g = graph_of(first);
  const auto u = UtilitySpec::one_goal(C("123"));
  const Rational ratchet = kolmogorov_expectation(tabulate(*g, one_goal_rule(C("123"), first), "ratchet"), u, *g);
  CHECK(ratchet == Q("42571/186624"));
  CHECK(to_decimal(ratchet, 5) == "0.22811");

  const auto small = RoundConfig::first(1, 6, 2);
  const auto sg = graph_of(small);
  CHECK(kolmogorov_expectation(tabulate(*sg, one_goal_rule(C("6"), small), "keep six"), UtilitySpec::one_goal(C("6")),
                               *sg) == Q("11/36"));
}

TEST_CASE("kolmogorov expectation equals walking every fate") {
  for (const auto& config : {RoundConfig::first(2, 2, 2), RoundConfig::first(2, 3, 3), RoundConfig::next(2, 3, 3, 2)}) {
    const auto g = graph_of(config);
    for (std::uint32_t seed = 1; seed <= 5; ++seed) {
      const Strategy s = random_mixed(*g, seed);
      const auto u = UtilitySpec::sum_of_faces();
      CHECK(kolmogorov_expectation(s, u, *g) == walk(s, u, *g, 0, Combination(config.faces)));
      CHECK(duality_check(s, u, *g).passed());
    }
  }
}

TEST_CASE("floating kernels agree with exact ones") {
  const auto g = graph_of(first);
  const auto u = UtilitySpec::transfer();
  const Strategy s = extract_pure_strategy(backward_induction(g, u));
  const double approx = kolmogorov_expectation<double>(s, u, *g);
  CHECK(approx == doctest::Approx(to_double(kolmogorov_expectation(s, u, *g))).epsilon(1e-12));
}

TEST_CASE("fokker-planck density") {
  const auto g = graph_of(first);
  const Strategy s = tabulate(*g, one_goal_rule(C("123"), first), "ratchet");
  const auto d = fokker_planck_density(s, *g);
  CHECK(d.at(0, Combination(6)) == 1);
  for (int j = 0; j <= g->last_layer(); ++j) CHECK(d.rho[static_cast<std::size_t>(j)].sum() == 1);
  for (const auto& state : d.kernel.states(3)) {
    CHECK(d.at(4, state) == d.at(3, state));
    CHECK(d.at(10, state) == d.at(3, state));
  }
  const Vector<Rational> next = d.kernel.sigma(3).transpose() * d.rho[3];
  CHECK(next == d.rho[3]);
  CHECK(d.at(3, C("123")) == Q("42571/186624"));
}

TEST_CASE("adjointness on random vectors") {
  const auto g = graph_of(first);
  const auto k = exact_transition_matrix(random_mixed(*g, 9), *g);
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  for (int j = 0; j < k.last_layer(); ++j) {
    const auto sigma = k.sigma(j);
    Vector<Rational> u(sigma.cols()), rho(sigma.rows());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = Rational(num(rng), den(rng));
    for (Eigen::Index i = 0; i < rho.size(); ++i) rho(i) = Rational(num(rng), den(rng));
    const Vector<Rational> su = sigma * u;
    const Vector<Rational> sr = sigma.transpose() * rho;
    CHECK(su.dot(rho) == u.dot(sr));
  }
}

TEST_CASE("conservation law") {
  const auto g = graph_of(first);
  const auto u = UtilitySpec::one_goal(C("123"));
  const auto report = duality_check(tabulate(*g, one_goal_rule(C("123"), first), "ratchet"), u, *g);
  CHECK(report.passed());
  REQUIRE(report.entries.size() == 5);
  CHECK(report.entries.front().time == 0);
  CHECK(report.entries.back().time == 4);
  CHECK(report.initial_value == Q("42571/186624"));
  for (const auto& e : report.entries) CHECK(e.inner_product == report.initial_value);
  CHECK(report.offending().empty());
}

TEST_CASE("result law and value from a node") {
  const auto g = graph_of(first);
  const auto u = UtilitySpec::transfer();
  const auto solved = backward_induction(g, u);
  const Strategy s = extract_pure_strategy(solved);
  CHECK(expected_value_from(s, u, *g, 0, Combination(6)) == solved.root_value());
  const Strategy from = tabulate_from(*g, [](int, const Combination&, const Combination&, std::span<const Combination> l) {
    return l.back();
  }, "last", 1, C("4"));
  Rational mass(0);
  for (const auto& [d, p] : result_law(from, *g, 1, C("4"))) {
    CHECK(d.norm() == 3);
    CHECK(d.count(4) >= 1);
    mass += p;
  }
  CHECK(mass == 1);
  CHECK(expected_value_from(s, u, *g, 1, C("421")) == 10);
}

TEST_CASE("holes in a strategy are reported") {
  const auto g = graph_of(first);
  Strategy s("empty");
  CHECK_THROWS_AS(exact_transition_matrix(s, *g), StrategyHole);
  Strategy illegal("illegal");
  for (const auto& e : g->node(0, 0).events) illegal.set({0, Combination(6), e.cast}, Combination(6));
  CHECK_THROWS_AS(exact_transition_matrix(illegal, *g), StrategyHole);
}

TEST_CASE("monte carlo") {
  const auto g = graph_of(first);
  const auto u = UtilitySpec::one_goal(C("123"));
  const Strategy s = tabulate(*g, one_goal_rule(C("123"), first), "ratchet");
  const double exact = to_double(Q("42571/186624"));
  const auto a = monte_carlo(s, u, first, 100000, 421, 1);
  CHECK(std::abs(a.mean - exact) <= 4 * a.standard_error);
  const auto b = monte_carlo(s, u, first, 100000, 421, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  const auto c = monte_carlo(s, u, first, 100000, 422, 4);
  CHECK(c.mean != a.mean);

  int inside = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto r = monte_carlo(s, u, first, 100000, seed, 4);
    inside += std::abs(r.mean - exact) <= 4 * r.standard_error;
  }
  CHECK(inside == 40);
}

TEST_CASE("monte carlo of a constant utility") {
  const auto g = graph_of(first);
  std::map<Combination, Extended> values;
  for (const auto& c : combinations_of_norm(3, 6)) values[c] = Extended(Q("5/2"));
  const auto r = monte_carlo(tabulate(*g, one_goal_rule(C("421"), first), "ratchet"), UtilitySpec::table({}, values),
                             first, 5000, 1, 2);
  CHECK(r.mean == 2.5);
  CHECK(r.standard_error == 0);
}

TEST_CASE("monte carlo of goal identification on the transfer utility") {
  const auto g = graph_of(first);
  const auto u = UtilitySpec::transfer();
  const auto table = std::make_shared<const ResultProbabilityTable>(ResultProbabilityTable::compile(Player::first, 3, 6, 3));
  const Strategy s = goal_id_strategy(PolicyConfig{1, 1, Player::first}, u, table, *g);
  const double exact = to_double(kolmogorov_expectation(s, u, *g));
  const auto r = monte_carlo(s, u, first, 100000, 2024, 4);
  CHECK(std::abs(r.mean - exact) <= 4 * r.standard_error);
}

TEST_CASE("optimality ratio") {
  CHECK(optimality_ratio(Q("3"), Q("3")) == 1);
  CHECK_THROWS_AS(optimality_ratio(Q("3"), Q("0")), PreconditionError);
  const auto u = UtilitySpec::transfer();
  const Rational best = optimal_value(first, u);
  const Rational next = optimality_ratio(optimal_value(RoundConfig::next(3, 6, 3, 3), u), best);
  CHECK(next == Q("814586/1048863"));
  CHECK(to_decimal(next, 5, Rounding::truncate) == "0.77663");
  const auto g = graph_of(first);
  const auto table = std::make_shared<const ResultProbabilityTable>(ResultProbabilityTable::compile(Player::first, 3, 6, 3));
  const Rational h1s1 = optimality_ratio(
      kolmogorov_expectation(goal_id_strategy(PolicyConfig{1, 1, Player::first}, u, table, *g), u, *g), best);
  CHECK(h1s1 == Q("348342/349621"));
  CHECK(to_decimal(h1s1, 5) == "0.99634");
}
