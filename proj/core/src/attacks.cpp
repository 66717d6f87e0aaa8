#include "dflrb/attacks.hpp"

#include <algorithm>

#include "dflrb/errors.hpp"

namespace dflrb::attacks {
namespace {

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string to_string(AttackKind kind) {
  return kind == AttackKind::PredictionFocused ? "pf" : "df";
}

AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "pf") return AttackKind::PredictionFocused;
  if (s == "df") return AttackKind::DecisionFocused;
  throw ConfigError("unknown attack kind '" + s + "'");
}

void AttackConfig::validate() const {
  if (!(epsilon >= 0.0)) throw ConfigError("attack config: epsilon must be >= 0");
  if (clamp_box && !(clamp_box->lo <= clamp_box->hi))
    throw ConfigError("attack config: clamp box lo must not exceed hi");
}

Vec fgsm_step(const Vec& z, const Vec& grad_z, double epsilon,
              const std::optional<ClampBox>& clamp_box) {
  if (z.size() != grad_z.size())
    throw std::invalid_argument("fgsm_step: dimension mismatch");
  if (!(epsilon >= 0.0)) throw ConfigError("fgsm_step: epsilon must be >= 0");
  Vec out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double v = z[i] + epsilon * sign0(grad_z[i]);
    if (clamp_box) v = std::clamp(v, clamp_box->lo, clamp_box->hi);
    out[i] = v;
  }
  return out;
}

Vec pf_input_gradient(const nn::Model& model, const Vec& z, const Vec& c) {
  const Vec c_hat = model.forward(z);
  if (c_hat.size() != c.size())
    throw std::invalid_argument("pf_input_gradient: cost dimension mismatch");
  const Vec upstream = 2.0 * (c_hat - c);
  return model.backward(z, upstream).input;
}

Vec df_input_gradient(const nn::Model& model, const DecisionProblem& problem,
                      const surrogates::SurrogateConfig& config, const Vec& z,
                      const Vec& c, const Vec& x_star_c,
                      const surrogates::SolutionCache* cache, Rng* rng) {
  if (config.method == surrogates::Method::TwoStageMSE)
    throw ConfigError("df_fgsm: two_stage has no surrogate decision loss");
  const Vec c_hat = model.forward(z);
  const surrogates::LossGrad lg =
      surrogates::loss_and_grad(problem, config, c_hat, c, x_star_c, cache, rng);
  // lg.grad lives in minimization-form cost coordinates; the model predicts
  // in the problem's own coordinates.
  const Vec upstream = problem.sign() * lg.grad;
  return model.backward(z, upstream).input;
}

Vec pf_fgsm(const nn::Model& model, const Vec& z, const Vec& c, double epsilon,
            const std::optional<ClampBox>& clamp_box) {
  return fgsm_step(z, pf_input_gradient(model, z, c), epsilon, clamp_box);
}

Vec df_fgsm(const nn::Model& model, const DecisionProblem& problem,
            const surrogates::SurrogateConfig& config, const Vec& z,
            const Vec& c, const Vec& x_star_c, double epsilon,
            const surrogates::SolutionCache* cache, Rng* rng,
            const std::optional<ClampBox>& clamp_box) {
  return fgsm_step(
      z, df_input_gradient(model, problem, config, z, c, x_star_c, cache, rng),
      epsilon, clamp_box);
}

}  // namespace dflrb::attacks
