#include "dflrb/types.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace dflrb {
namespace {

ShortestPathData build_grid(int side) {
  if (side < 2) throw ConfigError("shortest_path: grid side must be >= 2");
  const int n = side * side;

  ShortestPathData g;
  g.side = side;
  g.neighbors.resize(n);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int v = r * side + c;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= side || cc < 0 || cc >= side) continue;
          g.neighbors[v].push_back(rr * side + cc);
        }
      }
    }
  }

  // Node-split arcs: internal arcs first, in node order, so node v's cost
  // lives on arc v; then movement arcs in (from node, to node) order.
  for (int v = 0; v < n; ++v) g.arcs.push_back({v, v + n, v});
  for (int v = 0; v < n; ++v)
    for (int w : g.neighbors[v]) g.arcs.push_back({v + n, w, -1});

  const int arc_count = static_cast<int>(g.arcs.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * arc_count);
  for (int a = 0; a < arc_count; ++a) {
    trip.emplace_back(g.arcs[a].from, a, 1.0);
    trip.emplace_back(g.arcs[a].to, a, -1.0);
  }
  g.incidence.resize(2 * n, arc_count);
  g.incidence.setFromTriplets(trip.begin(), trip.end());

  g.supply = Vec::Zero(2 * n);
  g.supply[g.source()] = 1.0;          // source_in
  g.supply[g.sink() + n] = -1.0;       // sink_out
  return g;
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Knapsack: return "knapsack";
    case ProblemKind::ShortestPath: return "shortest_path";
    case ProblemKind::Portfolio: return "portfolio";
  }
  return "unknown";
}

std::string to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "unknown";
}

DecisionProblem DecisionProblem::knapsack(Eigen::VectorXi weights,
                                          long capacity) {
  if (weights.size() == 0) throw ConfigError("knapsack: no items");
  if ((weights.array() <= 0).any())
    throw ConfigError("knapsack: weights must be strictly positive");
  if (capacity < 0) throw ConfigError("knapsack: capacity must be >= 0");
  KnapsackData d;
  d.weights = std::move(weights);
  d.capacity = capacity;
  return DecisionProblem(ProblemKind::Knapsack, std::move(d));
}

DecisionProblem DecisionProblem::shortest_path_grid(int side) {
  return DecisionProblem(ProblemKind::ShortestPath, build_grid(side));
}

DecisionProblem DecisionProblem::portfolio(Mat sigma, double risk_bound) {
  if (sigma.rows() == 0 || sigma.rows() != sigma.cols())
    throw ConfigError("portfolio: sigma must be square and non-empty");
  if (!(risk_bound > 0.0))
    throw ConfigError("portfolio: risk bound must be strictly positive");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
    throw ConfigError("portfolio: sigma must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-8 * scale)
    throw ConfigError("portfolio: sigma must be positive semidefinite");
  PortfolioData d;
  d.sigma = std::move(sigma);
  d.risk_bound = risk_bound;
  return DecisionProblem(ProblemKind::Portfolio, std::move(d));
}

ProblemSense DecisionProblem::sense() const {
  return kind_ == ProblemKind::ShortestPath ? ProblemSense::Minimize
                                            : ProblemSense::Maximize;
}

int DecisionProblem::cost_dim() const {
  switch (kind_) {
    case ProblemKind::Knapsack:
      return static_cast<int>(knapsack_data().weights.size());
    case ProblemKind::ShortestPath:
      return shortest_path_data().node_count();
    case ProblemKind::Portfolio:
      return static_cast<int>(portfolio_data().sigma.rows());
  }
  return 0;
}

const KnapsackData& DecisionProblem::knapsack_data() const {
  if (kind_ != ProblemKind::Knapsack)
    throw ConfigError("problem is not a knapsack");
  return std::get<KnapsackData>(data_);
}

const ShortestPathData& DecisionProblem::shortest_path_data() const {
  if (kind_ != ProblemKind::ShortestPath)
    throw ConfigError("problem is not a shortest path");
  return std::get<ShortestPathData>(data_);
}

const PortfolioData& DecisionProblem::portfolio_data() const {
  if (kind_ != ProblemKind::Portfolio)
    throw ConfigError("problem is not a portfolio");
  return std::get<PortfolioData>(data_);
}

void DecisionProblem::check_cost(const Vec& cost) const {
  if (cost.size() != cost_dim())
    throw std::invalid_argument("cost dimension " + std::to_string(cost.size()) +
                                " does not match problem dimension " +
                                std::to_string(cost_dim()));
}

void Dataset::validate(const DecisionProblem& problem) const {
  if (instances.empty())
    throw ConfigError("dataset split '" + to_string(split) + "' is empty");
  const Eigen::Index feat_dim = instances.front().features.size();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& ins = instances[i];
    if (ins.features.size() != feat_dim)
      throw ConfigError("dataset: inconsistent feature dimension at instance " +
                        std::to_string(i));
    if (ins.true_cost.size() != problem.cost_dim())
      throw ConfigError("dataset: cost dimension mismatch at instance " +
                        std::to_string(i));
    if (ins.oracle_decision.size() != problem.decision_dim())
      throw ConfigError("dataset: oracle decision missing at instance " +
                        std::to_string(i));
  }
}

}  // namespace dflrb
