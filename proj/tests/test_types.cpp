#include <algorithm>

#include <doctest.h>

#include "dflrb/oracle.hpp"
#include "dflrb/types.hpp"

using namespace dflrb;

namespace {

Eigen::VectorXi weights3() {
  Eigen::VectorXi w(3);
  w << 3, 5, 7;
  return w;
}

}  // namespace

TEST_CASE("sense signs") {
  CHECK(sense_sign(ProblemSense::Minimize) == 1.0);
  CHECK(sense_sign(ProblemSense::Maximize) == -1.0);

  const auto knap = DecisionProblem::knapsack(weights3(), 8);
  CHECK(knap.sense() == ProblemSense::Maximize);
  CHECK(knap.sign() == -1.0);

  const auto grid = DecisionProblem::shortest_path_grid(3);
  CHECK(grid.sense() == ProblemSense::Minimize);
  CHECK(grid.sign() == 1.0);

  const auto port = DecisionProblem::portfolio(Mat::Identity(2, 2), 0.5);
  CHECK(port.sense() == ProblemSense::Maximize);
}

TEST_CASE("knapsack construction validation") {
  CHECK_THROWS_AS(DecisionProblem::knapsack(Eigen::VectorXi(), 5), ConfigError);
  Eigen::VectorXi bad(2);
  bad << 3, 0;
  CHECK_THROWS_AS(DecisionProblem::knapsack(bad, 5), ConfigError);
  CHECK_THROWS_AS(DecisionProblem::knapsack(weights3(), -1), ConfigError);

  const auto p = DecisionProblem::knapsack(weights3(), 8);
  CHECK(p.cost_dim() == 3);
  CHECK(p.decision_dim() == 3);
  CHECK(p.knapsack_data().capacity == 8);
  CHECK_THROWS_AS(p.shortest_path_data(), ConfigError);
  CHECK_THROWS_AS(p.portfolio_data(), ConfigError);
}

TEST_CASE("portfolio construction validation") {
  CHECK_THROWS_AS(DecisionProblem::portfolio(Mat::Identity(2, 3), 1.0),
                  ConfigError);
  CHECK_THROWS_AS(DecisionProblem::portfolio(Mat::Identity(2, 2), 0.0),
                  ConfigError);
  Mat asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(DecisionProblem::portfolio(asym, 1.0), ConfigError);
  Mat indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(DecisionProblem::portfolio(indef, 1.0), ConfigError);

  // PSD but singular is fine.
  Mat psd(2, 2);
  psd << 1.0, 1.0, 1.0, 1.0;
  CHECK_NOTHROW(DecisionProblem::portfolio(psd, 1.0));
}

TEST_CASE("grid structure: neighbours, arcs, incidence, supply") {
  const auto problem = DecisionProblem::shortest_path_grid(3);
  const ShortestPathData& g = problem.shortest_path_data();
  const int n = 9;
  CHECK(g.node_count() == n);
  CHECK(g.source() == 0);
  CHECK(g.sink() == 8);

  // 3x3 8-neighbourhood degrees: corners 3, edges 5, center 8.
  CHECK(g.neighbors[0].size() == 3);
  CHECK(g.neighbors[1].size() == 5);
  CHECK(g.neighbors[4].size() == 8);
  int movement = 0;
  for (int v = 0; v < n; ++v) {
    movement += static_cast<int>(g.neighbors[v].size());
    // ascending and mutual
    for (std::size_t i = 1; i < g.neighbors[v].size(); ++i)
      CHECK(g.neighbors[v][i - 1] < g.neighbors[v][i]);
    for (int w : g.neighbors[v]) {
      const auto& back = g.neighbors[w];
      CHECK(std::find(back.begin(), back.end(), v) != back.end());
    }
  }
  CHECK(movement == 40);  // 4*3 + 4*5 + 8
  CHECK(static_cast<int>(g.arcs.size()) == n + movement);

  // Internal arcs come first, one per node, carrying that node's cost.
  for (int v = 0; v < n; ++v) {
    CHECK(g.arcs[v].from == v);
    CHECK(g.arcs[v].to == v + n);
    CHECK(g.arcs[v].node == v);
  }
  for (std::size_t a = n; a < g.arcs.size(); ++a) CHECK(g.arcs[a].node == -1);

  // Incidence: +1 at from, -1 at to, one pair per arc.
  CHECK(g.incidence.rows() == 2 * n);
  CHECK(g.incidence.cols() == static_cast<int>(g.arcs.size()));
  CHECK(g.incidence.nonZeros() == 2 * static_cast<int>(g.arcs.size()));
  const Vec col_sums = g.incidence.transpose() * Vec::Ones(2 * n);
  CHECK(col_sums.cwiseAbs().maxCoeff() == 0.0);

  CHECK(g.supply[0] == 1.0);
  CHECK(g.supply[8 + n] == -1.0);
  CHECK(g.supply.sum() == 0.0);

  CHECK_THROWS_AS(DecisionProblem::shortest_path_grid(1), ConfigError);
}

TEST_CASE("check_cost rejects wrong dimensions") {
  const auto p = DecisionProblem::knapsack(weights3(), 8);
  CHECK_NOTHROW(p.check_cost(Vec::Ones(3)));
  CHECK_THROWS(p.check_cost(Vec::Ones(4)));
}

TEST_CASE("dataset validation") {
  const auto p = DecisionProblem::knapsack(weights3(), 8);
  Dataset d;
  CHECK_THROWS_AS(d.validate(p), ConfigError);

  Instance ins;
  ins.features = Vec::Ones(4);
  ins.true_cost = Vec::Ones(3);
  const Solution sol = solve_oracle(p, ins.true_cost);
  ins.oracle_decision = sol.decision;
  ins.oracle_objective = sol.objective;
  d.instances.push_back(ins);
  CHECK_NOTHROW(d.validate(p));

  Instance bad_feat = ins;
  bad_feat.features = Vec::Ones(5);
  d.instances.push_back(bad_feat);
  CHECK_THROWS_AS(d.validate(p), ConfigError);
  d.instances.pop_back();

  Instance bad_cost = ins;
  bad_cost.true_cost = Vec::Ones(2);
  d.instances.push_back(bad_cost);
  CHECK_THROWS_AS(d.validate(p), ConfigError);
  d.instances.pop_back();

  Instance no_oracle = ins;
  no_oracle.oracle_decision = Vec();
  d.instances.push_back(no_oracle);
  CHECK_THROWS_AS(d.validate(p), ConfigError);
}

TEST_CASE("kind and split names") {
  CHECK(to_string(ProblemKind::Knapsack) == "knapsack");
  CHECK(to_string(ProblemKind::ShortestPath) == "shortest_path");
  CHECK(to_string(ProblemKind::Portfolio) == "portfolio");
  CHECK(to_string(Split::Train) == "train");
  CHECK(to_string(Split::Validation) == "validation");
  CHECK(to_string(Split::Test) == "test");
}
