#include "dflrb/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dflrb/errors.hpp"

namespace dflrb::harness {
namespace {

using nlohmann::json;

const std::set<std::string>& known_override_keys() {
  static const std::set<std::string> keys = {
      "dbb_lambda", "imle_lambda", "imle_eps",       "imle_kappa",
      "fy_eps",     "fy_samples",  "qptl_mu",        "listwise_tau",
      "pairwise_theta", "p_solve"};
  return keys;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (problem.empty()) throw ConfigError("config: problem preset is required");
  if (method != "all") surrogates::method_from_string(method);  // throws
  if (method == "all" && (!surrogate_overrides.empty() || lr != 0.0))
    throw ConfigError(
        "config: lr and surrogate overrides require a single method");
  for (const auto& [key, value] : surrogate_overrides) {
    if (known_override_keys().count(key) == 0)
      throw ConfigError("config: unknown surrogate field '" + key + "'");
    if (!std::isfinite(value))
      throw ConfigError("config: surrogate field '" + key + "' is not finite");
  }
  if (lr < 0.0) throw ConfigError("config: lr must be >= 0");
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  for (double eps : epsilons)
    if (!(eps >= 0.0)) throw ConfigError("config: epsilons must be >= 0");
  if (attack_kinds.empty()) throw ConfigError("config: no attacks selected");
  if (epochs < 0) throw ConfigError("config: epochs must be >= 0");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
  if (out.empty()) throw ConfigError("config: output directory is required");
  const double sum = split.train + split.val + split.test;
  if (!(split.train > 0.0) || !(split.val > 0.0) || !(split.test > 0.0) ||
      std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("config: split ratios must be positive and sum to 1");
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  static const std::set<std::string> known = {
      "problem", "method", "surrogate", "lr",   "trials",  "epsilons",
      "attacks", "split",  "epochs",    "seed", "out",     "threads"};
  for (const auto& [key, _] : j.items())
    if (known.count(key) == 0)
      throw ConfigError("config: unknown field '" + key + "'");

  ExperimentConfig c;
  try {
    if (j.contains("problem")) c.problem = j["problem"].get<std::string>();
    if (j.contains("method")) c.method = j["method"].get<std::string>();
    if (j.contains("surrogate")) {
      if (!j["surrogate"].is_object())
        throw ConfigError("config: 'surrogate' must be an object");
      for (const auto& [key, value] : j["surrogate"].items()) {
        if (!value.is_number())
          throw ConfigError("config: surrogate field '" + key +
                            "' must be a number");
        c.surrogate_overrides[key] = value.get<double>();
      }
    }
    if (j.contains("lr")) c.lr = j["lr"].get<double>();
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("epsilons"))
      c.epsilons = j["epsilons"].get<std::vector<double>>();
    if (j.contains("attacks")) {
      c.attack_kinds.clear();
      for (const auto& a : j["attacks"])
        c.attack_kinds.push_back(
            attacks::attack_kind_from_string(a.get<std::string>()));
    }
    if (j.contains("split")) {
      const json& s = j["split"];
      c.split.train = s.value("train", c.split.train);
      c.split.val = s.value("val", c.split.val);
      c.split.test = s.value("test", c.split.test);
    }
    if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& config) {
  json j;
  j["problem"] = config.problem;
  j["method"] = config.method;
  if (!config.surrogate_overrides.empty()) {
    json s = json::object();
    for (const auto& [key, value] : config.surrogate_overrides) s[key] = value;
    j["surrogate"] = s;
  }
  if (config.lr != 0.0) j["lr"] = config.lr;
  j["trials"] = config.trials;
  j["epsilons"] = config.epsilons;
  json att = json::array();
  for (attacks::AttackKind k : config.attack_kinds)
    att.push_back(attacks::to_string(k));
  j["attacks"] = att;
  j["split"] = {{"train", config.split.train},
                {"val", config.split.val},
                {"test", config.split.test}};
  j["epochs"] = config.epochs;
  j["seed"] = config.seed;
  j["out"] = config.out;
  j["threads"] = config.threads;
  return j.dump(2);
}

}  // namespace dflrb::harness
