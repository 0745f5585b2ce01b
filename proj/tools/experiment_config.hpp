/*
 * Copyright 2026 The APL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef APL_TOOLS_EXPERIMENT_CONFIG_HPP_
#define APL_TOOLS_EXPERIMENT_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "apl/apl.hpp"
#include "json.hpp"

namespace apl::cli {

using nlohmann::json;

/// Malformed config or flag; carries the field path in its message.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Fully resolved experiment. `resolved` holds every field with defaults filled in.
struct ExperimentConfig {
  APLParams loss;
  synth::DatasetSpec dataset;
  bool reseed_dataset = true;
  double validation_fraction = 0.2;
  train::ModelSpec model;
  train::OptSpec opt;
  std::vector<int> ks{1, 3, 5};
  std::vector<std::uint64_t> seeds{0};
  std::string output;
  json grid = json::object();
  json resolved;

  /// FNV-1a of the resolved document without "output": where results go is
  /// not part of the experiment's identity.
  std::string hash() const {
    json identity = resolved;
    identity.erase("output");
    return io::hex64(io::fnv1a64(identity.dump()));
  }
};

inline json default_config() {
  return json{
      {"loss", {{"alpha1", 1.0}, {"alpha2", 0.5}, {"beta1", 1.0}, {"gamma_plus", 0.0},
                {"gamma_minus", 0.0}, {"p_th", 0.0}, {"trunc_order", 200}}},
      {"dataset", {{"n_samples", 5000}, {"n_features", 50}, {"n_classes", 20}, {"positive_rate", 0.05},
                   {"noise_std", 1.0}, {"seed", 0}}},
      {"reseed_dataset", true},
      {"validation_fraction", 0.2},
      {"model", {{"kind", "linear"}, {"hidden_size", 32}, {"init_scale", 0.01}, {"seed", 0}}},
      {"opt", {{"learning_rate", 0.5}, {"momentum", 0.9}, {"epochs", 30}, {"batch_size", 64}}},
      {"ks", {1, 3, 5}},
      {"seeds", {0}},
      {"output", ""},
      {"grid", json::object()},
  };
}

namespace detail {

inline void merge_into(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError("field '" + path + "': expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("field '" + key + "': unknown field");
    json& slot = base[it.key()];
    if (slot.is_object() && it.key() != "grid") {
      merge_into(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("field '" + path + "': expected a number, got " + j.dump());
  return j.get<double>();
}

inline std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError("field '" + path + "': expected an integer, got " + j.dump());
  return j.get<std::int64_t>();
}

inline std::uint64_t seed_value(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ConfigError("field '" + path + "': expected a non-negative integer, got " + j.dump());
  }
  return j.get<std::uint64_t>();
}

template <typename F>
auto checked(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("field '" + path + "': " + e.what());
  }
}

}  // namespace detail

/// Reads an APL parameter object; absent keys keep their defaults.
inline APLParams parse_loss(const json& j, const std::string& path = "loss") {
  if (!j.is_object()) throw ConfigError("field '" + path + "': expected an object");
  APLCoefficients c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = path + "." + it.key();
    if (it.key() == "alpha1") c.alpha1 = detail::number(it.value(), key);
    else if (it.key() == "alpha2") c.alpha2 = detail::number(it.value(), key);
    else if (it.key() == "beta1") c.beta1 = detail::number(it.value(), key);
    else if (it.key() == "gamma_plus") c.gamma_plus = detail::number(it.value(), key);
    else if (it.key() == "gamma_minus") c.gamma_minus = detail::number(it.value(), key);
    else if (it.key() == "p_th") c.p_th = detail::number(it.value(), key);
    else if (it.key() == "trunc_order") c.trunc_order = static_cast<int>(detail::integer(it.value(), key));
    else if (it.key() == "id") continue;
    else throw ConfigError("field '" + key + "': unknown field");
  }
  return detail::checked(path, [&] { return APLParams(c); });
}

inline json loss_to_json(const APLParams& p) {
  return json{{"alpha1", p.alpha1()},         {"alpha2", p.alpha2()},
              {"beta1", p.beta1()},           {"gamma_plus", p.gamma_plus()},
              {"gamma_minus", p.gamma_minus()}, {"p_th", p.p_th()},
              {"trunc_order", p.trunc_order()}};
}

/// Parses JSON text, reporting the line and column of syntax errors.
inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Applies "a.b.c=<json>" (bare strings allowed) on top of the document.
inline void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json patch = value;
  std::string rest = path;
  std::vector<std::string> keys;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1)) {
    keys.push_back(rest.substr(0, pos));
  }
  keys.push_back(rest);
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) patch = json{{*it, patch}};
  detail::merge_into(doc, patch, "");
}

inline ExperimentConfig resolve_config(const json& user, const std::vector<std::string>& overrides = {}) {
  json doc = default_config();
  detail::merge_into(doc, user, "");
  for (const auto& o : overrides) apply_override(doc, o);

  ExperimentConfig cfg;
  cfg.loss = parse_loss(doc["loss"]);

  const json& d = doc["dataset"];
  cfg.dataset.n_samples = static_cast<int>(detail::integer(d["n_samples"], "dataset.n_samples"));
  cfg.dataset.n_features = static_cast<int>(detail::integer(d["n_features"], "dataset.n_features"));
  cfg.dataset.n_classes = static_cast<int>(detail::integer(d["n_classes"], "dataset.n_classes"));
  cfg.dataset.positive_rate = detail::number(d["positive_rate"], "dataset.positive_rate");
  cfg.dataset.noise_std = detail::number(d["noise_std"], "dataset.noise_std");
  cfg.dataset.seed = detail::seed_value(d["seed"], "dataset.seed");
  detail::checked("dataset", [&] { cfg.dataset.validate(); return 0; });

  if (!doc["reseed_dataset"].is_boolean()) throw ConfigError("field 'reseed_dataset': expected a boolean");
  cfg.reseed_dataset = doc["reseed_dataset"].get<bool>();
  cfg.validation_fraction = detail::number(doc["validation_fraction"], "validation_fraction");
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
    throw ConfigError("field 'validation_fraction': must lie in (0, 1)");
  }

  const json& m = doc["model"];
  if (m["kind"] == "linear") cfg.model.kind = train::ModelKind::linear;
  else if (m["kind"] == "mlp1") cfg.model.kind = train::ModelKind::mlp1;
  else throw ConfigError("field 'model.kind': expected \"linear\" or \"mlp1\", got " + m["kind"].dump());
  cfg.model.hidden_size = static_cast<int>(detail::integer(m["hidden_size"], "model.hidden_size"));
  cfg.model.init_scale = detail::number(m["init_scale"], "model.init_scale");
  cfg.model.seed = detail::seed_value(m["seed"], "model.seed");
  detail::checked("model", [&] { cfg.model.validate(); return 0; });

  const json& o = doc["opt"];
  cfg.opt.learning_rate = detail::number(o["learning_rate"], "opt.learning_rate");
  cfg.opt.momentum = detail::number(o["momentum"], "opt.momentum");
  cfg.opt.epochs = static_cast<int>(detail::integer(o["epochs"], "opt.epochs"));
  cfg.opt.batch_size = static_cast<int>(detail::integer(o["batch_size"], "opt.batch_size"));
  detail::checked("opt", [&] { cfg.opt.validate(); return 0; });

  if (!doc["ks"].is_array() || doc["ks"].empty()) throw ConfigError("field 'ks': expected a non-empty array");
  cfg.ks.clear();
  for (std::size_t i = 0; i < doc["ks"].size(); ++i) {
    const auto k = detail::integer(doc["ks"][i], "ks[" + std::to_string(i) + "]");
    if (k < 1 || k > cfg.dataset.n_classes) {
      throw ConfigError("field 'ks[" + std::to_string(i) + "]': must lie in [1, dataset.n_classes]");
    }
    cfg.ks.push_back(static_cast<int>(k));
  }

  if (!doc["seeds"].is_array() || doc["seeds"].empty()) throw ConfigError("field 'seeds': expected a non-empty array");
  cfg.seeds.clear();
  for (std::size_t i = 0; i < doc["seeds"].size(); ++i) {
    cfg.seeds.push_back(detail::seed_value(doc["seeds"][i], "seeds[" + std::to_string(i) + "]"));
  }

  if (!doc["output"].is_string()) throw ConfigError("field 'output': expected a string");
  cfg.output = doc["output"].get<std::string>();

  cfg.grid = doc["grid"];
  if (!cfg.grid.is_object()) throw ConfigError("field 'grid': expected an object");
  for (auto it = cfg.grid.begin(); it != cfg.grid.end(); ++it) {
    const std::string key = "grid." + it.key();
    if (!default_config()["loss"].contains(it.key())) throw ConfigError("field '" + key + "': not a loss parameter");
    if (!it.value().is_array() || it.value().empty()) throw ConfigError("field '" + key + "': expected a non-empty array");
    for (std::size_t i = 0; i < it.value().size(); ++i) {
      json probe = doc["loss"];
      probe[it.key()] = it.value()[i];
      parse_loss(probe, key + "[" + std::to_string(i) + "]");
    }
  }

  cfg.resolved = doc;
  return cfg;
}

}  // namespace apl::cli

#endif  // APL_TOOLS_EXPERIMENT_CONFIG_HPP_
