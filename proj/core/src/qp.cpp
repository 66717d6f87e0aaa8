#include "dflrb/solvers/qp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "barrier.hpp"
#include "dflrb/solvers/shortest_path.hpp"

namespace dflrb::solvers {
namespace detail {
namespace {

bool strictly_feasible(const QpForm& f, const Vec& y) {
  if (((f.h - f.G * y).array() <= 0.0).any()) return false;
  if (f.has_quad && y.dot(f.quad * y) >= f.quad_rhs) return false;
  return true;
}

// ψ(y) / t for a unit-scale q: objective plus barrier, kept at O(1)
// magnitudes so line-search comparisons stay meaningful at large t.
double barrier_phi(const QpForm& f, double t, const Vec& y) {
  const Vec s = f.h - f.G * y;
  double phi = f.q.dot(y) + f.mu_reg * y.squaredNorm();
  phi -= s.array().log().sum() / t;
  if (f.has_quad) phi -= std::log(f.quad_rhs - y.dot(f.quad * y)) / t;
  return phi;
}

// Gradient of ψ/t. Every term is O(1) for a unit-scale q (the multiplier
// estimates 1/(t s) are bounded near the central path), so the achievable
// residual is set by double rounding at O(1), not at O(t).
Vec scaled_gradient(const QpForm& f, double t, const Vec& y) {
  const Vec s = f.h - f.G * y;
  Vec grad = f.q + 2.0 * f.mu_reg * y +
             f.G.transpose() * (t * s.array()).inverse().matrix();
  if (f.has_quad) {
    const double sq = f.quad_rhs - y.dot(f.quad * y);
    grad += (2.0 / (t * sq)) * (f.quad * y);
  }
  return grad;
}

// Feasible-start Newton centering for fixed t; updates y and the equality
// multipliers w in place. Converged means the stationarity residual of the
// scaled KKT system drops below res_stop; a rounding plateau (no represent-
// able progress) is accepted if the residual is at least below res_accept.
void newton_center(const QpForm& f, double t, Vec& y, Vec& w, double res_stop,
                   double res_accept) {
  const int nv = f.nv;
  const int me = static_cast<int>(f.A.rows());

  const auto residual = [&](const Vec& yy, const Vec& ww) {
    Vec r = scaled_gradient(f, t, yy);
    if (me > 0) r += f.A.transpose() * ww;
    return r.cwiseAbs().maxCoeff();
  };

  // The residual is not monotone along damped Newton steps (feasibility
  // caps can spike it transiently), so the only exits are convergence, a
  // representability plateau, and the iteration cap.
  for (int iter = 0; iter < 200; ++iter) {
    if (residual(y, w) <= res_stop) return;

    const Vec s = f.h - f.G * y;
    const Vec sinv_t = (t * s.array()).inverse().matrix();
    const Vec grad = scaled_gradient(f, t, y);
    Mat H = f.G.transpose() *
            sinv_t.cwiseProduct(s.cwiseInverse()).asDiagonal() * f.G;
    H.diagonal().array() += 2.0 * f.mu_reg;
    if (f.has_quad) {
      const double sq = f.quad_rhs - y.dot(f.quad * y);
      const Vec qy2 = 2.0 * (f.quad * y);
      H += (2.0 / (t * sq)) * f.quad + (qy2 * qy2.transpose()) / (t * sq * sq);
    }

    Vec dy;
    if (me > 0) {
      Mat M = Mat::Zero(nv + me, nv + me);
      M.topLeftCorner(nv, nv) = H;
      M.topRightCorner(nv, me) = f.A.transpose();
      M.bottomLeftCorner(me, nv) = f.A;
      Vec rhs = Vec::Zero(nv + me);
      rhs.head(nv) = -grad;
      const Vec sol = M.partialPivLu().solve(rhs);
      dy = sol.head(nv);
      w = sol.tail(me);
    } else {
      Eigen::LLT<Mat> llt(H);
      if (llt.info() == Eigen::Success) {
        dy = llt.solve(-grad);
      } else {
        dy = H.ldlt().solve(-grad);
      }
    }

    const double dec2 = dy.dot(H * dy);
    if (!std::isfinite(dec2))
      throw NumericalError("barrier: non-finite Newton decrement");

    double alpha = 1.0;
    while (alpha > 1e-16 && !strictly_feasible(f, y + alpha * dy)) alpha *= 0.5;
    // Armijo only outside the quadratic region (decrement lambda > 0.2):
    // near the center the per-step decrease of phi falls below its own
    // rounding noise and a sufficient-decrease test would reject steps
    // that still shrink the residual by orders of magnitude.
    if (t * dec2 > 0.04) {
      const double phi0 = barrier_phi(f, t, y);
      const double slope = grad.dot(dy);
      while (alpha > 1e-16 &&
             barrier_phi(f, t, y + alpha * dy) > phi0 + 0.25 * alpha * slope)
        alpha *= 0.5;
    }
    const Vec y_next = y + alpha * dy;
    if (alpha <= 1e-16 || y_next == y) break;  // rounding plateau
    y = y_next;
  }
  if (residual(y, w) > res_accept)
    throw NumericalError("barrier: Newton centering did not converge (t = " +
                         std::to_string(t) + ")");
}

}  // namespace

double Residuals::max() const {
  return std::max(stationarity, std::max(primal, complementarity));
}

Residuals kkt_residuals(const QpForm& f, const Vec& y, const Vec& mu,
                        double mu_quad, const Vec& nu) {
  Residuals r;
  Vec stat = f.q + 2.0 * f.mu_reg * y + f.G.transpose() * mu;
  if (f.has_quad) stat += mu_quad * 2.0 * (f.quad * y);
  if (f.A.rows() > 0) stat += f.A.transpose() * nu;
  r.stationarity = stat.cwiseAbs().maxCoeff();

  const Vec g = f.G * y - f.h;  // <= 0 when feasible
  r.primal = std::max(0.0, g.maxCoeff());
  if (f.A.rows() > 0)
    r.primal = std::max(r.primal, (f.A * y - f.b).cwiseAbs().maxCoeff());
  double quad_g = 0.0;
  if (f.has_quad) {
    quad_g = y.dot(f.quad * y) - f.quad_rhs;
    r.primal = std::max(r.primal, std::max(0.0, quad_g));
  }

  r.complementarity = (mu.array() * g.array()).abs().maxCoeff();
  if (f.has_quad)
    r.complementarity = std::max(r.complementarity, std::abs(mu_quad * quad_g));
  return r;
}

BarrierOut barrier_solve(const QpForm& f, double tol) {
  if (!strictly_feasible(f, f.y0) ||
      (f.A.rows() > 0 && (f.A * f.y0 - f.b).cwiseAbs().maxCoeff() > 1e-9))
    throw NumericalError("barrier: start point is not strictly feasible");

  // Center on the unit-scale cost q / n_scale and meet tol in those units.
  // An absolute residual bound at arbitrary cost scale would be stricter
  // than double rounding allows: the multiplier estimates 1/(t s) inherit
  // the cancellation noise of the slacks, which grows with t.
  const double n_scale = std::max(1.0, f.q.cwiseAbs().maxCoeff());
  QpForm fn = f;
  fn.q /= n_scale;
  fn.mu_reg /= n_scale;
  const double res_stop = 0.02 * tol;
  const double res_accept = tol;

  BarrierOut out;
  out.y = f.y0;
  Vec w = Vec::Zero(f.A.rows());
  const double t_target = 100.0 / tol;
  double t = 1.0;
  for (int stage = 0; stage < 64; ++stage) {
    newton_center(fn, t, out.y, w, res_stop, res_accept);
    out.stage_points.push_back(out.y);
    if (t >= t_target) break;
    t *= 10.0;
  }
  if (t < t_target) throw NumericalError("barrier: stage limit reached");

  // Multipliers for the original q: mu_original = n_scale * mu_normalized.
  out.t_final = t / n_scale;
  const Vec s = f.h - f.G * out.y;
  out.mu = n_scale * (t * s.array()).inverse().matrix();
  out.mu_quad = f.has_quad ? n_scale / (t * (f.quad_rhs -
                                             out.y.dot(f.quad * out.y)))
                           : 0.0;
  out.nu = f.A.rows() > 0 ? Vec(n_scale * w) : Vec();
  return out;
}

QpForm build_qp_form(const DecisionProblem& problem, double mu_reg) {
  QpForm f;
  f.mu_reg = mu_reg;
  switch (problem.kind()) {
    case ProblemKind::Knapsack: {
      const KnapsackData& d = problem.knapsack_data();
      const int n = static_cast<int>(d.weights.size());
      f.nv = n;
      f.G = Mat::Zero(2 * n + 1, n);
      f.G.topLeftCorner(n, n) = -Mat::Identity(n, n);
      f.G.block(n, 0, n, n) = Mat::Identity(n, n);
      for (int i = 0; i < n; ++i) f.G(2 * n, i) = d.weights[i];
      f.h = Vec::Zero(2 * n + 1);
      f.h.segment(n, n).setOnes();
      f.h[2 * n] = static_cast<double>(d.capacity);
      if (d.capacity == 0)
        throw NumericalError("qp: knapsack relaxation has no strict interior");
      const double wsum = static_cast<double>(d.weights.sum());
      const double alpha =
          std::min(0.5, 0.5 * static_cast<double>(d.capacity) / wsum);
      f.y0 = Vec::Constant(n, alpha);
      for (int i = 0; i < n; ++i) f.decision_vars.push_back(i);
      break;
    }
    case ProblemKind::ShortestPath: {
      const ShortestPathData& g = problem.shortest_path_data();
      const int n = g.node_count();
      const int m = static_cast<int>(g.arcs.size());
      f.nv = m;
      f.G = -Mat::Identity(m, m);  // y >= 0
      f.h = Vec::Zero(m);
      // The full incidence matrix has one redundant row (rows sum to zero);
      // dropping the sink_out row leaves a full-row-rank flow system.
      const int drop = g.sink() + n;
      f.A = Mat::Zero(2 * n - 1, m);
      f.b = Vec::Zero(2 * n - 1);
      Mat dense = Mat(g.incidence);
      int row = 0;
      for (int i = 0; i < 2 * n; ++i) {
        if (i == drop) continue;
        f.A.row(row) = dense.row(i);
        f.b[row] = g.supply[i];
        ++row;
      }
      // Interior start: unit flow along one path, plus a small circulation
      // around every adjacent pair so all arcs are strictly positive.
      std::vector<int> move_idx(static_cast<std::size_t>(n) * n, -1);
      for (int a = n; a < m; ++a)
        move_idx[static_cast<std::size_t>(g.arcs[a].from - n) * n +
                 g.arcs[a].to] = a;
      f.y0 = Vec::Zero(m);
      const std::vector<int> path =
          shortest_path_nodes(problem, Vec::Ones(n));
      for (std::size_t i = 0; i < path.size(); ++i) {
        f.y0[path[i]] += 1.0;  // internal arc of node path[i]
        if (i + 1 < path.size())
          f.y0[move_idx[static_cast<std::size_t>(path[i]) * n + path[i + 1]]] +=
              1.0;
      }
      const double delta = 0.25;
      for (int v = 0; v < n; ++v) {
        for (int w2 : g.neighbors[v]) {
          if (w2 < v) continue;  // each unordered pair once
          f.y0[v] += delta;
          f.y0[w2] += delta;
          f.y0[move_idx[static_cast<std::size_t>(v) * n + w2]] += delta;
          f.y0[move_idx[static_cast<std::size_t>(w2) * n + v]] += delta;
        }
      }
      for (int v = 0; v < n; ++v) f.decision_vars.push_back(v);
      break;
    }
    case ProblemKind::Portfolio: {
      const PortfolioData& d = problem.portfolio_data();
      const int n = static_cast<int>(d.sigma.rows());
      f.nv = n;
      f.G = Mat::Zero(n + 1, n);
      f.G.topLeftCorner(n, n) = -Mat::Identity(n, n);
      f.G.row(n).setOnes();
      f.h = Vec::Zero(n + 1);
      f.h[n] = 1.0;
      f.has_quad = true;
      f.quad = d.sigma;
      f.quad_rhs = d.risk_bound;
      const double e_sig_e = Vec::Ones(n).dot(d.sigma * Vec::Ones(n));
      double rho = 0.5 / n;
      if (e_sig_e > 0.0)
        rho = std::min(rho, 0.5 * std::sqrt(d.risk_bound / e_sig_e));
      f.y0 = Vec::Constant(n, rho);
      for (int i = 0; i < n; ++i) f.decision_vars.push_back(i);
      break;
    }
  }
  f.q = Vec::Zero(f.nv);
  return f;
}

void fill_cost(const DecisionProblem& problem, const Vec& cost, QpForm* form) {
  problem.check_cost(cost);
  form->q.setZero();
  const double s = problem.sign();
  for (std::size_t j = 0; j < form->decision_vars.size(); ++j)
    form->q[form->decision_vars[j]] = s * cost[static_cast<Eigen::Index>(j)];
}

}  // namespace detail

namespace {

using detail::QpForm;

Vec project_decision(const QpForm& f, const Vec& y) {
  Vec x(static_cast<Eigen::Index>(f.decision_vars.size()));
  for (std::size_t j = 0; j < f.decision_vars.size(); ++j)
    x[static_cast<Eigen::Index>(j)] = y[f.decision_vars[j]];
  return x;
}

// Active-set refinement for linear-constrained regularized QPs: solve the
// equality KKT system on the barrier's active set. Brings residuals from
// ~1e-8 to ~1e-12, which finite-difference tests of the QPTL chain rely on.
bool polish(const QpForm& f, Vec& y, Vec& mu, Vec& nu) {
  const int nv = f.nv;
  const int mi = static_cast<int>(f.G.rows());
  const int me = static_cast<int>(f.A.rows());
  const Vec s = f.h - f.G * y;
  std::vector<int> act;
  for (int i = 0; i < mi; ++i)
    if (mu[i] > s[i]) act.push_back(i);
  const int na = static_cast<int>(act.size());

  Mat M = Mat::Zero(nv + na + me, nv + na + me);
  Vec rhs(nv + na + me);
  M.topLeftCorner(nv, nv) = 2.0 * f.mu_reg * Mat::Identity(nv, nv);
  rhs.head(nv) = -f.q;
  for (int a = 0; a < na; ++a) {
    M.block(0, nv + a, nv, 1) = f.G.row(act[a]).transpose();
    M.block(nv + a, 0, 1, nv) = f.G.row(act[a]);
    rhs[nv + a] = f.h[act[a]];
  }
  if (me > 0) {
    M.block(0, nv + na, nv, me) = f.A.transpose();
    M.block(nv + na, 0, me, nv) = f.A;
    rhs.tail(me) = f.b;
  }

  Eigen::FullPivLU<Mat> lu(M);
  if (!lu.isInvertible()) return false;
  const Vec sol = lu.solve(rhs);
  const Vec y_p = sol.head(nv);
  const Vec mu_act = sol.segment(nv, na);
  if (na > 0 && mu_act.minCoeff() < -1e-8) return false;
  const Vec s_p = f.h - f.G * y_p;
  if (s_p.minCoeff() < -1e-10) return false;

  Vec mu_p = Vec::Zero(mi);
  for (int a = 0; a < na; ++a) mu_p[act[a]] = std::max(0.0, mu_act[a]);
  Vec nu_p = me > 0 ? Vec(sol.tail(me)) : Vec();

  const double before = detail::kkt_residuals(f, y, mu, 0.0, nu).max();
  const double after = detail::kkt_residuals(f, y_p, mu_p, 0.0, nu_p).max();
  if (!(after <= before)) return false;
  y = y_p;
  mu = mu_p;
  nu = nu_p;
  return true;
}

}  // namespace

KKTSolution qp_regularized_solve(const DecisionProblem& problem,
                                 const Vec& cost, double mu_reg, double tol) {
  if (!(mu_reg > 0.0))
    throw ConfigError("qp_regularized_solve: mu_reg must be > 0");
  QpForm f = detail::build_qp_form(problem, mu_reg);
  detail::fill_cost(problem, cost, &f);

  detail::BarrierOut out = detail::barrier_solve(f, tol);

  KKTSolution k;
  k.y = out.y;
  k.mu = out.mu;
  k.mu_quad = out.mu_quad;
  k.nu = out.nu;
  if (!f.has_quad) polish(f, k.y, k.mu, k.nu);

  k.decision = project_decision(f, k.y);
  const detail::Residuals r =
      detail::kkt_residuals(f, k.y, k.mu, k.mu_quad, k.nu);
  k.stationarity_residual = r.stationarity;
  k.primal_residual = r.primal;
  k.complementarity_residual = r.complementarity;
  const Vec slack = f.h - f.G * k.y;
  k.active.resize(f.G.rows());
  for (Eigen::Index i = 0; i < f.G.rows(); ++i)
    k.active[i] = k.mu[i] > slack[i];
  if (r.max() > tol) {
    std::ostringstream msg;
    msg << "qp_regularized_solve: residuals above tolerance (stationarity "
        << r.stationarity << ", primal " << r.primal << ", complementarity "
        << r.complementarity << ")";
    throw NumericalError(msg.str());
  }
  return k;
}

Vec kkt_jacobian_vector_product(const DecisionProblem& problem,
                                const KKTSolution& kkt, double mu_reg,
                                const Vec& downstream) {
  if (downstream.size() != problem.decision_dim())
    throw std::invalid_argument("kkt_jvp: downstream dimension mismatch");
  QpForm f = detail::build_qp_form(problem, mu_reg);

  const int nv = f.nv;
  const int mi = static_cast<int>(f.G.rows());
  const int qd = f.has_quad ? 1 : 0;
  const int me = static_cast<int>(f.A.rows());
  const int nk = nv + mi + qd + me;

  Mat K = Mat::Zero(nk, nk);
  Mat H = 2.0 * mu_reg * Mat::Identity(nv, nv);
  if (f.has_quad) H += kkt.mu_quad * 2.0 * f.quad;
  K.topLeftCorner(nv, nv) = H;
  K.block(0, nv, nv, mi) = f.G.transpose();
  K.block(nv, 0, mi, nv) = kkt.mu.asDiagonal() * f.G;
  const Vec gvals = f.G * kkt.y - f.h;
  K.block(nv, nv, mi, mi) = Mat(gvals.asDiagonal());
  if (f.has_quad) {
    const Vec qy2 = 2.0 * (f.quad * kkt.y);
    K.block(0, nv + mi, nv, 1) = qy2;
    K.block(nv + mi, 0, 1, nv) = kkt.mu_quad * qy2.transpose();
    K(nv + mi, nv + mi) = kkt.y.dot(f.quad * kkt.y) - f.quad_rhs;
  }
  if (me > 0) {
    K.block(0, nv + mi + qd, nv, me) = f.A.transpose();
    K.block(nv + mi + qd, 0, me, nv) = f.A;
  }
  K.diagonal().array() += kKktDamping;

  Vec r = Vec::Zero(nk);
  for (std::size_t j = 0; j < f.decision_vars.size(); ++j)
    r[f.decision_vars[j]] = downstream[static_cast<Eigen::Index>(j)];

  const Mat Kt = K.transpose();
  Vec z = Kt.partialPivLu().solve(r);
  if (!z.allFinite() ||
      (Kt * z - r).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + r.cwiseAbs().maxCoeff())) {
    Eigen::FullPivLU<Mat> lu(Kt);
    if (!lu.isInvertible())
      throw NumericalError("kkt_jvp: singular KKT matrix (degenerate active set)");
    z = lu.solve(r);
  }

  Vec grad(static_cast<Eigen::Index>(f.decision_vars.size()));
  for (std::size_t j = 0; j < f.decision_vars.size(); ++j)
    grad[static_cast<Eigen::Index>(j)] = -z[f.decision_vars[j]];
  return problem.sign() * grad;
}

}  // namespace dflrb::solvers
