#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dflrb/datagen.hpp"
#include "dflrb/nn.hpp"
#include "dflrb/surrogates.hpp"

namespace dflrb::harness {

struct MethodPreset {
  double lr = 0.0;
  surrogates::SurrogateConfig surrogate;
};

// A named problem setup: generator settings, model architecture, and the
// published per-method hyperparameters. The method list doubles as the
// availability matrix (QPTL is absent for the grid problem, IntOpt is not
// implemented anywhere).
struct Preset {
  std::string name;
  ProblemKind kind = ProblemKind::Knapsack;
  datagen::KnapsackGenConfig knapsack;    // kind == Knapsack
  datagen::PortfolioGenConfig portfolio;  // kind == Portfolio
  datagen::GridSPGenConfig gridsp;        // kind == ShortestPath
  nn::ModelSpec model;
  std::vector<MethodPreset> methods;

  const MethodPreset* find(surrogates::Method m) const;
  const MethodPreset& require(surrogates::Method m) const;  // throws ConfigError
};

// The six shipped presets: knapsack-60, knapsack-120, portfolio-deg1,
// portfolio-deg16, gridsp-12, gridsp-24.
const std::vector<Preset>& preset_registry();

// Registry lookup by name. Also accepts gridsp-<side> for side in [2, 32]:
// the grid side is configurable, with hyperparameters taken from the closest
// published column (side <= 12 uses the 12 column, larger sides the 24 one).
Preset preset_by_name(const std::string& name);

struct PresetData {
  DecisionProblem problem;
  Dataset full;
};

// Generates the preset's full dataset with the generator seeded by `seed`
// (the preset's own seed field is ignored).
PresetData generate_preset_data(const Preset& preset, std::uint64_t seed);

}  // namespace dflrb::harness
