#pragma once

#include <string>
#include <vector>

#include "dflrb/rng.hpp"
#include "dflrb/types.hpp"

namespace dflrb::surrogates {

enum class Method {
  TwoStageMSE,
  SPOPlus,
  DBB,
  IMLE,
  FY,
  QPTL,
  MAPContrastive,
  Pairwise,
  PairwiseDiff,
  Listwise,
};

const std::vector<Method>& all_methods();
std::string to_string(Method m);
Method method_from_string(const std::string& s);

bool requires_cache(Method m);    // ranking losses
bool is_stochastic(Method m);     // IMLE, FY
bool has_df_attack(Method m);     // every method except TwoStageMSE

struct SurrogateConfig {
  Method method = Method::TwoStageMSE;
  double dbb_lambda = 0.1;
  double imle_lambda = 0.1;
  double imle_eps = 0.1;
  int imle_kappa = 5;
  double fy_eps = 0.5;
  int fy_samples = 10;
  bool fy_zero_noise = false;  // test hook: forces every Z_s to 0
  double qptl_mu = 1.0;
  double listwise_tau = 0.001;
  double pairwise_theta = 10.0;
  double p_solve = 0.05;  // cache growth probability per gradient step
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// Decisions that oracle-based estimators treat as equal: differences within
// ten times the continuous-solver tolerance are solver noise, not signal.
inline constexpr double kOracleSnapTol = 1e-5;

struct LossGrad {
  double loss = 0.0;
  Vec grad;  // dL/d(s*c_hat): gradient in minimization-form cost coordinates
};

// Pool of feasible decisions the ranking losses compare against. Grown via
// cache_update; deduplicated by exact vector equality.
class SolutionCache {
 public:
  SolutionCache() = default;
  static SolutionCache from_dataset(const Dataset& train);

  bool insert(const Vec& decision);  // true if newly added
  bool contains(const Vec& decision) const;
  int size() const { return static_cast<int>(pool_.size()); }
  const std::vector<Vec>& pool() const { return pool_; }

 private:
  std::vector<Vec> pool_;
};

// Every loss below follows one contract: costs are converted to
// minimization form (multiplied by the problem's sense sign) before the
// formulas apply, and the returned gradient is d loss / d (sign * c_hat).
// Training and the decision-focused attack multiply by the sign again to
// chain into model backprop. Losses are sense-invariant scalars.

LossGrad mse_loss(const Vec& c_hat, const Vec& c);  // literal, no sense handling

LossGrad spo_plus(const DecisionProblem& problem, const Vec& c_hat,
                  const Vec& c, const Vec& x_star_c);

LossGrad dbb_grad(const DecisionProblem& problem, const Vec& c_hat,
                  const Vec& c, const Vec& x_star_c, double lambda);

LossGrad imle_grad(const DecisionProblem& problem, const Vec& c_hat,
                   const Vec& c, const Vec& x_star_c, double lambda,
                   double eps_noise, int kappa, Rng& rng);

LossGrad fy_grad(const DecisionProblem& problem, const Vec& c_hat,
                 const Vec& c, const Vec& x_star_c, double eps_fy, int samples,
                 Rng& rng, bool zero_noise = false);

LossGrad qptl_grad(const DecisionProblem& problem, const Vec& c_hat,
                   const Vec& c, const Vec& x_star_c, double mu_reg);

LossGrad map_contrastive(const DecisionProblem& problem, const Vec& c_hat,
                         const Vec& c, const Vec& x_star_c);

LossGrad pairwise_loss(const DecisionProblem& problem, const Vec& c_hat,
                       const Vec& c, const Vec& x_star_c, double theta,
                       const SolutionCache& cache);

LossGrad pairwise_diff_loss(const DecisionProblem& problem, const Vec& c_hat,
                            const Vec& c, const Vec& x_star_c,
                            const SolutionCache& cache);

LossGrad listwise_loss(const DecisionProblem& problem, const Vec& c_hat,
                       const Vec& c, const Vec& x_star_c, double tau,
                       const SolutionCache& cache);

// With probability config-p_solve, solves x*(c_hat) and inserts it into the
// cache. Exactly one uniform draw per call regardless of outcome.
void cache_update(SolutionCache& cache, const DecisionProblem& problem,
                  const Vec& c_hat, double p_solve, Rng& rng);

// Dispatch on config.method. `cache` is required for the ranking losses and
// `rng` for the stochastic ones; passing nullptr where required throws
// ConfigError.
LossGrad loss_and_grad(const DecisionProblem& problem,
                       const SurrogateConfig& config, const Vec& c_hat,
                       const Vec& c, const Vec& x_star_c,
                       const SolutionCache* cache, Rng* rng);

}  // namespace dflrb::surrogates
