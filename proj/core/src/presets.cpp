#include "dflrb/harness/presets.hpp"

#include <charconv>

#include "dflrb/errors.hpp"

namespace dflrb::harness {
namespace {

using surrogates::Method;
using surrogates::SurrogateConfig;

MethodPreset mp(Method method, double lr) {
  MethodPreset out;
  out.lr = lr;
  out.surrogate.method = method;
  return out;
}

MethodPreset mp_dbb(double lr, double lambda) {
  MethodPreset out = mp(Method::DBB, lr);
  out.surrogate.dbb_lambda = lambda;
  return out;
}

MethodPreset mp_imle(double lr, double lambda, double eps, int kappa) {
  MethodPreset out = mp(Method::IMLE, lr);
  out.surrogate.imle_lambda = lambda;
  out.surrogate.imle_eps = eps;
  out.surrogate.imle_kappa = kappa;
  return out;
}

MethodPreset mp_fy(double lr, double eps) {
  MethodPreset out = mp(Method::FY, lr);
  out.surrogate.fy_eps = eps;
  return out;
}

MethodPreset mp_qptl(double lr, double mu) {
  MethodPreset out = mp(Method::QPTL, lr);
  out.surrogate.qptl_mu = mu;
  return out;
}

MethodPreset mp_listwise(double lr, double tau) {
  MethodPreset out = mp(Method::Listwise, lr);
  out.surrogate.listwise_tau = tau;
  return out;
}

MethodPreset mp_pairwise(double lr, double theta) {
  MethodPreset out = mp(Method::Pairwise, lr);
  out.surrogate.pairwise_theta = theta;
  return out;
}

Preset knapsack_preset(const std::string& name, long capacity, double lr_ts,
                       double lr_spo, MethodPreset dbb, MethodPreset imle,
                       MethodPreset fy, MethodPreset qptl) {
  Preset p;
  p.name = name;
  p.kind = ProblemKind::Knapsack;
  p.knapsack.n_days = 300;
  p.knapsack.capacity = capacity;
  p.model.kind = nn::ModelKind::Linear;
  p.model.input_dim = p.knapsack.items_per_day * p.knapsack.feature_dim;
  p.model.output_dim = p.knapsack.items_per_day;
  p.methods = {mp(Method::TwoStageMSE, lr_ts),
               mp(Method::SPOPlus, lr_spo),
               dbb,
               imle,
               fy,
               qptl,
               mp_listwise(1.0, 0.001),
               mp_pairwise(0.5, 10.0),
               mp(Method::PairwiseDiff, 1.0),
               mp(Method::MAPContrastive, 1.0)};
  return p;
}

Preset portfolio_preset(const std::string& name, int deg,
                        std::vector<MethodPreset> methods) {
  Preset p;
  p.name = name;
  p.kind = ProblemKind::Portfolio;
  p.portfolio.n_samples = 400;
  p.portfolio.p = 5;
  p.portfolio.d = 20;
  p.portfolio.deg = deg;
  p.portfolio.eta = 1.0;
  p.model.kind = nn::ModelKind::Linear;
  p.model.input_dim = p.portfolio.p;
  p.model.output_dim = p.portfolio.d;
  p.methods = std::move(methods);
  return p;
}

Preset gridsp_preset(const std::string& name, int side, double dbb_lambda) {
  Preset p;
  p.name = name;
  p.kind = ProblemKind::ShortestPath;
  p.gridsp.n_samples = 500;
  p.gridsp.side = side;
  p.gridsp.feature_dim = 5;
  p.model.kind = nn::ModelKind::MLP;
  p.model.input_dim = side * side * p.gridsp.feature_dim;
  p.model.hidden_dim = 64;
  p.model.output_dim = side * side;
  p.model.activation = nn::OutputActivation::ReLU;
  p.methods = {mp(Method::TwoStageMSE, 0.001),
               mp(Method::SPOPlus, 0.005),
               mp_dbb(0.001, dbb_lambda),
               mp_imle(0.001, 10.0, 0.05, 50),
               mp_fy(0.01, 0.01),
               mp_listwise(0.005, 0.5),
               mp_pairwise(0.01, 0.1),
               mp(Method::PairwiseDiff, 0.005),
               mp(Method::MAPContrastive, 0.005)};
  return p;
}

std::vector<Preset> build_registry() {
  std::vector<Preset> r;
  r.push_back(knapsack_preset("knapsack-60", 60, 0.5, 0.5,
                              mp_dbb(0.5, 0.1), mp_imle(0.5, 0.1, 0.5, 5),
                              mp_fy(1.0, 0.005), mp_qptl(0.5, 10.0)));
  r.push_back(knapsack_preset("knapsack-120", 120, 1.0, 1.0,
                              mp_dbb(1.0, 1.0), mp_imle(0.5, 0.1, 0.1, 5),
                              mp_fy(1.0, 0.5), mp_qptl(0.5, 1.0)));
  r.push_back(portfolio_preset(
      "portfolio-deg1", 1,
      {mp(Method::TwoStageMSE, 0.01), mp(Method::SPOPlus, 0.5),
       mp_dbb(1.0, 0.1), mp_imle(0.5, 0.1, 0.1, 5), mp_fy(0.1, 0.01),
       mp_qptl(0.1, 10.0), mp_listwise(0.1, 0.01), mp_pairwise(0.01, 0.01),
       mp(Method::PairwiseDiff, 0.1), mp(Method::MAPContrastive, 0.01)}));
  r.push_back(portfolio_preset(
      "portfolio-deg16", 16,
      {mp(Method::TwoStageMSE, 0.05), mp(Method::SPOPlus, 0.5),
       mp_dbb(1.0, 0.1), mp_imle(0.5, 0.1, 0.05, 5), mp_fy(1.0, 2.0),
       mp_qptl(0.05, 10.0), mp_listwise(0.05, 0.005), mp_pairwise(0.1, 0.05),
       mp(Method::PairwiseDiff, 0.05), mp(Method::MAPContrastive, 1.0)}));
  r.push_back(gridsp_preset("gridsp-12", 12, 10.0));
  r.push_back(gridsp_preset("gridsp-24", 24, 100.0));
  return r;
}

}  // namespace

const MethodPreset* Preset::find(surrogates::Method m) const {
  for (const MethodPreset& entry : methods)
    if (entry.surrogate.method == m) return &entry;
  return nullptr;
}

const MethodPreset& Preset::require(surrogates::Method m) const {
  const MethodPreset* entry = find(m);
  if (entry == nullptr)
    throw ConfigError("method '" + surrogates::to_string(m) +
                      "' is not available for preset '" + name + "'");
  return *entry;
}

const std::vector<Preset>& preset_registry() {
  static const std::vector<Preset> registry = build_registry();
  return registry;
}

Preset preset_by_name(const std::string& name) {
  for (const Preset& p : preset_registry())
    if (p.name == name) return p;
  // gridsp-<side> with a non-published side: closest published column.
  constexpr std::string_view prefix = "gridsp-";
  if (name.rfind(prefix, 0) == 0) {
    const std::string_view digits = std::string_view(name).substr(prefix.size());
    int side = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), side);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && side >= 2 &&
        side <= 32) {
      Preset p = preset_by_name(side <= 12 ? "gridsp-12" : "gridsp-24");
      p.name = name;
      p.gridsp.side = side;
      p.model.input_dim = side * side * p.gridsp.feature_dim;
      p.model.output_dim = side * side;
      return p;
    }
  }
  throw ConfigError("unknown preset '" + name + "'");
}

PresetData generate_preset_data(const Preset& preset, std::uint64_t seed) {
  switch (preset.kind) {
    case ProblemKind::Knapsack: {
      datagen::KnapsackGenConfig cfg = preset.knapsack;
      cfg.seed = seed;
      datagen::KnapsackGen gen = datagen::gen_knapsack(cfg);
      return {std::move(gen.problem), std::move(gen.dataset)};
    }
    case ProblemKind::Portfolio: {
      datagen::PortfolioGenConfig cfg = preset.portfolio;
      cfg.seed = seed;
      datagen::PortfolioGen gen = datagen::gen_portfolio(cfg);
      return {std::move(gen.problem), std::move(gen.dataset)};
    }
    case ProblemKind::ShortestPath: {
      datagen::GridSPGenConfig cfg = preset.gridsp;
      cfg.seed = seed;
      datagen::GridSPGen gen = datagen::gen_gridsp(cfg);
      return {std::move(gen.problem), std::move(gen.dataset)};
    }
  }
  throw ConfigError("generate_preset_data: unknown problem kind");
}

}  // namespace dflrb::harness
