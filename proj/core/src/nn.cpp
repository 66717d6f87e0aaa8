#include "dflrb/nn.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dflrb::nn {
namespace {

using nlohmann::json;

Vec relu(const Vec& v) { return v.cwiseMax(0.0); }

// Derivative convention: relu'(0) = 0.
Vec relu_mask(const Vec& pre) {
  return (pre.array() > 0.0).cast<double>().matrix();
}

Mat init_weight(int rows, int cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  Mat w(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

std::string to_string(ModelKind kind) {
  return kind == ModelKind::Linear ? "linear" : "mlp";
}

std::string to_string(OutputActivation act) {
  return act == OutputActivation::None ? "none" : "relu";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "linear") return ModelKind::Linear;
  if (s == "mlp") return ModelKind::MLP;
  throw ConfigError("unknown model kind '" + s + "'");
}

OutputActivation activation_from_string(const std::string& s) {
  if (s == "none") return OutputActivation::None;
  if (s == "relu") return OutputActivation::ReLU;
  throw ConfigError("unknown output activation '" + s + "'");
}

void ModelSpec::validate() const {
  if (input_dim <= 0 || output_dim <= 0)
    throw ConfigError("model spec: input_dim and output_dim must be positive");
  if (kind == ModelKind::MLP && hidden_dim <= 0)
    throw ConfigError("model spec: MLP requires hidden_dim > 0");
}

Model::Model(const ModelSpec& spec, Rng& rng) : spec_(spec) {
  spec_.validate();
  if (spec_.kind == ModelKind::Linear) {
    weights_.push_back(init_weight(spec_.output_dim, spec_.input_dim, rng));
    biases_.push_back(Vec::Zero(spec_.output_dim));
  } else {
    weights_.push_back(init_weight(spec_.hidden_dim, spec_.input_dim, rng));
    biases_.push_back(Vec::Zero(spec_.hidden_dim));
    weights_.push_back(init_weight(spec_.output_dim, spec_.hidden_dim, rng));
    biases_.push_back(Vec::Zero(spec_.output_dim));
  }
}

Vec Model::forward(const Vec& z) const {
  if (z.size() != spec_.input_dim)
    throw std::invalid_argument("forward: input dimension mismatch");
  Vec pre;
  if (spec_.kind == ModelKind::Linear) {
    pre = weights_[0] * z + biases_[0];
  } else {
    const Vec hidden = relu(weights_[0] * z + biases_[0]);
    pre = weights_[1] * hidden + biases_[1];
  }
  return spec_.activation == OutputActivation::ReLU ? relu(pre) : pre;
}

Gradients Model::backward(const Vec& z, const Vec& upstream) const {
  if (z.size() != spec_.input_dim)
    throw std::invalid_argument("backward: input dimension mismatch");
  if (upstream.size() != spec_.output_dim)
    throw std::invalid_argument("backward: upstream dimension mismatch");

  Gradients g;
  if (spec_.kind == ModelKind::Linear) {
    const Vec pre = weights_[0] * z + biases_[0];
    Vec d = upstream;
    if (spec_.activation == OutputActivation::ReLU)
      d = d.cwiseProduct(relu_mask(pre));
    g.weights.push_back(d * z.transpose());
    g.biases.push_back(d);
    g.input = weights_[0].transpose() * d;
  } else {
    const Vec a0 = weights_[0] * z + biases_[0];
    const Vec hidden = relu(a0);
    const Vec pre = weights_[1] * hidden + biases_[1];
    Vec d = upstream;
    if (spec_.activation == OutputActivation::ReLU)
      d = d.cwiseProduct(relu_mask(pre));
    g.weights.resize(2);
    g.biases.resize(2);
    g.weights[1] = d * hidden.transpose();
    g.biases[1] = d;
    const Vec dh = (weights_[1].transpose() * d).cwiseProduct(relu_mask(a0));
    g.weights[0] = dh * z.transpose();
    g.biases[0] = dh;
    g.input = weights_[0].transpose() * dh;
  }
  return g;
}

std::string checkpoint_to_string(const Model& model) {
  const ModelSpec& s = model.spec();
  json j;
  j["version"] = 1;
  j["kind"] = to_string(s.kind);
  j["input_dim"] = s.input_dim;
  j["output_dim"] = s.output_dim;
  j["hidden_dim"] = s.hidden_dim;
  j["output_activation"] = to_string(s.activation);
  json layers = json::array();
  for (int i = 0; i < model.layer_count(); ++i) {
    const Mat& w = model.weight(i);
    json layer;
    layer["rows"] = static_cast<int>(w.rows());
    layer["cols"] = static_cast<int>(w.cols());
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    layer["weight"] = flat;
    layer["bias"] = std::vector<double>(model.bias(i).data(),
                                        model.bias(i).data() + model.bias(i).size());
    layers.push_back(layer);
  }
  j["layers"] = layers;
  return j.dump(2);
}

void save_checkpoint(const Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_string(model) << '\n';
}

Model checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint parse error: ") + e.what());
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw ConfigError("checkpoint: unsupported version");
  ModelSpec spec;
  spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
  spec.input_dim = j.at("input_dim").get<int>();
  spec.output_dim = j.at("output_dim").get<int>();
  spec.hidden_dim = j.at("hidden_dim").get<int>();
  spec.activation =
      activation_from_string(j.at("output_activation").get<std::string>());

  Rng scratch(0);
  Model model(spec, scratch);
  const json& layers = j.at("layers");
  if (static_cast<int>(layers.size()) != model.layer_count())
    throw ConfigError("checkpoint: layer count mismatch");
  for (int i = 0; i < model.layer_count(); ++i) {
    const json& layer = layers[static_cast<std::size_t>(i)];
    const int rows = layer.at("rows").get<int>();
    const int cols = layer.at("cols").get<int>();
    Mat& w = model.weight(i);
    if (rows != w.rows() || cols != w.cols())
      throw ConfigError("checkpoint: layer shape mismatch");
    const auto flat = layer.at("weight").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != w.size())
      throw ConfigError("checkpoint: weight array size mismatch");
    std::size_t idx = 0;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) w(r, c) = flat[idx++];
    const auto bias = layer.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(bias.size()) != model.bias(i).size())
      throw ConfigError("checkpoint: bias size mismatch");
    for (std::size_t k = 0; k < bias.size(); ++k)
      model.bias(i)[static_cast<Eigen::Index>(k)] = bias[k];
  }
  return model;
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

AdamState AdamState::init(const Model& model, double lr) {
  AdamState s;
  s.lr = lr;
  for (int i = 0; i < model.layer_count(); ++i) {
    s.m_w.push_back(Mat::Zero(model.weight(i).rows(), model.weight(i).cols()));
    s.v_w.push_back(Mat::Zero(model.weight(i).rows(), model.weight(i).cols()));
    s.m_b.push_back(Vec::Zero(model.bias(i).size()));
    s.v_b.push_back(Vec::Zero(model.bias(i).size()));
  }
  return s;
}

void adam_step(AdamState& state, Model& model, const Gradients& grads) {
  if (static_cast<int>(grads.weights.size()) != model.layer_count())
    throw std::invalid_argument("adam_step: gradient block count mismatch");
  for (const Mat& g : grads.weights)
    if (!g.allFinite())
      throw NumericalError("adam_step: non-finite weight gradient");
  for (const Vec& g : grads.biases)
    if (!g.allFinite())
      throw NumericalError("adam_step: non-finite bias gradient");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (int i = 0; i < model.layer_count(); ++i) {
    state.m_w[i] = state.beta1 * state.m_w[i] + (1.0 - state.beta1) * grads.weights[i];
    state.v_w[i] = state.beta2 * state.v_w[i] +
                   (1.0 - state.beta2) * grads.weights[i].cwiseProduct(grads.weights[i]);
    const Mat mhat = state.m_w[i] / bc1;
    const Mat vhat = state.v_w[i] / bc2;
    model.weight(i).array() -=
        state.lr * mhat.array() / (vhat.array().sqrt() + state.eps_stab);

    state.m_b[i] = state.beta1 * state.m_b[i] + (1.0 - state.beta1) * grads.biases[i];
    state.v_b[i] = state.beta2 * state.v_b[i] +
                   (1.0 - state.beta2) * grads.biases[i].cwiseProduct(grads.biases[i]);
    const Vec mbhat = state.m_b[i] / bc1;
    const Vec vbhat = state.v_b[i] / bc2;
    model.bias(i).array() -=
        state.lr * mbhat.array() / (vbhat.array().sqrt() + state.eps_stab);
  }
}

PlateauScheduler::PlateauScheduler(double lr, double factor, int patience,
                                   double min_lr)
    : lr_(lr),
      factor_(factor),
      patience_(patience),
      min_lr_(min_lr),
      best_(std::numeric_limits<double>::infinity()) {
  if (!(lr > 0.0) || !(factor > 0.0) || factor >= 1.0 || patience < 1)
    throw ConfigError("plateau scheduler: invalid constants");
}

double PlateauScheduler::step(double metric) {
  if (!std::isfinite(metric))
    throw NumericalError("plateau scheduler: non-finite metric");
  if (metric < best_ - 1e-8) {
    best_ = metric;
    since_improve_ = 0;
  } else {
    ++since_improve_;
    if (since_improve_ >= patience_) {
      lr_ = std::max(lr_ * factor_, min_lr_);
      since_improve_ = 0;
    }
  }
  return lr_;
}

}  // namespace dflrb::nn
