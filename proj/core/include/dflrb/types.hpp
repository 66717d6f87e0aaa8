#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dflrb/errors.hpp"

namespace dflrb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

// Feasibility tolerance shared by every continuous-feasibility check.
inline constexpr double kFeasTol = 1e-6;

enum class ProblemSense { Minimize, Maximize };
enum class ProblemKind { Knapsack, ShortestPath, Portfolio };
enum class Split { Train, Validation, Test };

// +1 for minimization, -1 for maximization. Multiplying a cost vector by
// this sign converts the problem to minimization form and back.
inline double sense_sign(ProblemSense s) {
  return s == ProblemSense::Minimize ? 1.0 : -1.0;
}

std::string to_string(ProblemKind kind);
std::string to_string(Split split);

// 0/1 knapsack: maximize v'x subject to w'x <= capacity.
struct KnapsackData {
  Eigen::VectorXi weights;  // strictly positive integers
  long capacity = 0;        // non-negative
};

// Node-weighted grid shortest path on a side x side grid with 8-neighbour
// moves, top-left to bottom-right, both endpoints' costs counted. Solved on
// the node-split digraph: node v becomes v_in = v and v_out = v + side^2;
// the internal arc v_in -> v_out carries v's cost, movement arcs carry 0.
struct ShortestPathData {
  struct Arc {
    int from = 0;
    int to = 0;
    int node = -1;  // >= 0 marks the internal arc carrying that node's cost
  };

  int side = 0;
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> neighbors;  // 8-neighbourhood, ascending ids
  SpMat incidence;                          // 2*side^2 x |arcs|, +1 out / -1 in
  Vec supply;                               // +1 at source_in, -1 at sink_out

  int node_count() const { return side * side; }
  int source() const { return 0; }
  int sink() const { return side * side - 1; }
};

// Portfolio selection: maximize c'x subject to 1'x <= 1, x >= 0,
// x' sigma x <= risk_bound.
struct PortfolioData {
  Mat sigma;                // symmetric positive semidefinite
  double risk_bound = 0.0;  // strictly positive
};

// A parametric optimization problem with a fixed feasible set; only the
// linear cost vector varies per instance. Static data is validated at
// construction, so a constructed problem is always internally consistent.
class DecisionProblem {
 public:
  static DecisionProblem knapsack(Eigen::VectorXi weights, long capacity);
  static DecisionProblem shortest_path_grid(int side);
  static DecisionProblem portfolio(Mat sigma, double risk_bound);

  ProblemKind kind() const { return kind_; }
  ProblemSense sense() const;
  double sign() const { return sense_sign(sense()); }

  // Dimension of the cost vector c and of the decision vector x. For all
  // three kinds these coincide (shortest path decisions are node indicators).
  int cost_dim() const;
  int decision_dim() const { return cost_dim(); }

  const KnapsackData& knapsack_data() const;
  const ShortestPathData& shortest_path_data() const;
  const PortfolioData& portfolio_data() const;

  void check_cost(const Vec& cost) const;  // throws on dimension mismatch

 private:
  DecisionProblem(ProblemKind kind,
                  std::variant<KnapsackData, ShortestPathData, PortfolioData> data)
      : kind_(kind), data_(std::move(data)) {}

  ProblemKind kind_;
  std::variant<KnapsackData, ShortestPathData, PortfolioData> data_;
};

// A feasible decision and its objective under the cost used to solve.
struct Solution {
  Vec decision;
  double objective = 0.0;
};

// One benchmark instance: features, true cost, and the cached true-cost
// oracle solution (decisions are compared against it throughout).
struct Instance {
  Vec features;
  Vec true_cost;
  Vec oracle_decision;
  double oracle_objective = 0.0;
};

struct Dataset {
  Split split = Split::Train;
  std::vector<Instance> instances;

  int size() const { return static_cast<int>(instances.size()); }
  // Throws ConfigError unless non-empty with consistent dimensions matching
  // the problem.
  void validate(const DecisionProblem& problem) const;
};

}  // namespace dflrb
