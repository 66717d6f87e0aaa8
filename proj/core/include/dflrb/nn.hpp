#pragma once

#include <string>
#include <vector>

#include "dflrb/rng.hpp"
#include "dflrb/types.hpp"

namespace dflrb::nn {

enum class ModelKind { Linear, MLP };
enum class OutputActivation { None, ReLU };

std::string to_string(ModelKind kind);
std::string to_string(OutputActivation act);
ModelKind model_kind_from_string(const std::string& s);
OutputActivation activation_from_string(const std::string& s);

struct ModelSpec {
  ModelKind kind = ModelKind::Linear;
  int input_dim = 0;
  int output_dim = 0;
  int hidden_dim = 0;  // MLP only
  OutputActivation activation = OutputActivation::None;

  void validate() const;  // throws ConfigError
};

struct Gradients {
  std::vector<Mat> weights;
  std::vector<Vec> biases;
  Vec input;  // dL/dz
};

// Linear map or one-hidden-layer ReLU MLP with reverse-mode gradients with
// respect to parameters and inputs. Weights initialize to
// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) drawn row-major per layer in
// order, biases to zero; the draw order is part of the determinism contract.
class Model {
 public:
  Model(const ModelSpec& spec, Rng& rng);

  const ModelSpec& spec() const { return spec_; }
  Vec forward(const Vec& z) const;
  Gradients backward(const Vec& z, const Vec& upstream) const;

  int layer_count() const { return static_cast<int>(weights_.size()); }
  Mat& weight(int i) { return weights_[i]; }
  const Mat& weight(int i) const { return weights_[i]; }
  Vec& bias(int i) { return biases_[i]; }
  const Vec& bias(int i) const { return biases_[i]; }

 private:
  ModelSpec spec_;
  std::vector<Mat> weights_;
  std::vector<Vec> biases_;
};

// JSON checkpoint, versioned, row-major weight arrays. Field names:
// version, kind, input_dim, output_dim, hidden_dim, output_activation,
// layers[{rows, cols, weight, bias}].
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);
std::string checkpoint_to_string(const Model& model);
Model checkpoint_from_string(const std::string& text);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_stab = 1e-8;
  long step = 0;
  std::vector<Mat> m_w, v_w;
  std::vector<Vec> m_b, v_b;

  static AdamState init(const Model& model, double lr);
};

// Standard bias-corrected Adam update over every parameter block.
// Throws NumericalError on non-finite gradients (divergence signal).
void adam_step(AdamState& state, Model& model, const Gradients& grads);

// ReduceLROnPlateau: improvement means metric < best - 1e-8; after
// `patience` consecutive non-improving steps the lr is multiplied by
// `factor` (never below min_lr) and the counter resets.
class PlateauScheduler {
 public:
  explicit PlateauScheduler(double lr, double factor = 0.1, int patience = 10,
                            double min_lr = 1e-6);
  double step(double metric);  // returns the current lr after the update
  double lr() const { return lr_; }

 private:
  double lr_;
  double factor_;
  int patience_;
  double min_lr_;
  double best_;
  int since_improve_ = 0;
};

}  // namespace dflrb::nn
