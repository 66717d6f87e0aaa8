#pragma once

#include <optional>
#include <string>

#include "dflrb/nn.hpp"
#include "dflrb/surrogates.hpp"
#include "dflrb/types.hpp"

namespace dflrb::attacks {

enum class AttackKind { PredictionFocused, DecisionFocused };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& s);

// Optional per-feature box applied after the FGSM step, for real data whose
// features have hard ranges. Synthetic features are unconstrained.
struct ClampBox {
  double lo = 0.0;
  double hi = 0.0;
};

struct AttackConfig {
  AttackKind kind = AttackKind::PredictionFocused;
  double epsilon = 0.0;
  std::optional<ClampBox> clamp_box;

  void validate() const;  // throws ConfigError
};

// z + epsilon * sign(grad_z), componentwise, with sign(0) = 0. Every
// component of the perturbation is exactly -epsilon, 0, or +epsilon.
Vec fgsm_step(const Vec& z, const Vec& grad_z, double epsilon,
              const std::optional<ClampBox>& clamp_box = std::nullopt);

// Input gradient of the PF objective J = ||forward(z) - c||^2. The FGSM
// direction does not depend on epsilon, so sweeps compute it once per
// instance and reuse it across perturbation levels.
Vec pf_input_gradient(const nn::Model& model, const Vec& z, const Vec& c);

// Input gradient of the method's surrogate loss chained through the model.
Vec df_input_gradient(const nn::Model& model, const DecisionProblem& problem,
                      const surrogates::SurrogateConfig& config, const Vec& z,
                      const Vec& c, const Vec& x_star_c,
                      const surrogates::SolutionCache* cache = nullptr,
                      Rng* rng = nullptr);

// Prediction-focused FGSM: ascends J = ||forward(z) - c||^2.
Vec pf_fgsm(const nn::Model& model, const Vec& z, const Vec& c, double epsilon,
            const std::optional<ClampBox>& clamp_box = std::nullopt);

// Decision-focused FGSM: ascends the method's surrogate loss, chaining the
// surrogate gradient through model backward. `cache` is required for the
// ranking losses and `rng` for the stochastic ones (one noise draw per call,
// seeded per instance by the caller). TwoStageMSE has no surrogate decision
// loss and is rejected.
Vec df_fgsm(const nn::Model& model, const DecisionProblem& problem,
            const surrogates::SurrogateConfig& config, const Vec& z,
            const Vec& c, const Vec& x_star_c, double epsilon,
            const surrogates::SolutionCache* cache = nullptr, Rng* rng = nullptr,
            const std::optional<ClampBox>& clamp_box = std::nullopt);

}  // namespace dflrb::attacks
