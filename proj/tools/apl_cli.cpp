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

// Command-line front end: figure data, p*, Taylor check, sweeps, training and
// the gradient audit.
//
// Exit status: 0 success, 1 runtime failure, 2 malformed config or flags,
// 3 audit tolerance exceeded.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "apl/apl.hpp"
#include "experiment_config.hpp"
#include "json.hpp"

namespace apl::cli {
namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAuditFailed = 3;

/// Writes to `path`, or stdout when empty. Always binary so line endings stay LF.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

/// --params accepts inline JSON or a path to a JSON file: one parameter object
/// or an array of them, each optionally carrying an "id".
std::vector<analysis::NamedParams> parse_params_arg(const std::string& arg) {
  const std::string text = (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) ? arg : read_file(arg);
  const json j = parse_json_text(text, "--params");
  std::vector<analysis::NamedParams> out;
  auto one = [&](const json& obj, const std::string& path, const std::string& fallback_id) {
    std::string id = fallback_id;
    if (obj.is_object() && obj.contains("id")) {
      if (!obj["id"].is_string()) throw ConfigError("field '" + path + ".id': expected a string");
      id = obj["id"].get<std::string>();
    }
    out.push_back({id, parse_loss(obj, path)});
  };
  if (j.is_array()) {
    if (j.empty()) throw ConfigError("--params: empty array");
    for (std::size_t i = 0; i < j.size(); ++i) {
      one(j[i], "params[" + std::to_string(i) + "]", "series" + std::to_string(i));
    }
  } else {
    one(j, "params", "APL");
  }
  return out;
}

std::string hash_of(const json& j) { return io::hex64(io::fnv1a64(j.dump())); }

struct RunResult {
  metrics::MetricReport final_metrics;
  double final_train_loss = 0.0;
  train::TrainHistory history;
};

RunResult run_one(const ExperimentConfig& cfg, const APLParams& loss, std::uint64_t seed) {
  synth::DatasetSpec ds = cfg.dataset;
  if (cfg.reseed_dataset) ds.seed = cfg.dataset.seed + seed;
  const auto data = synth::generate(ds);
  const auto [train_set, valid_set] = synth::split(data, cfg.validation_fraction);
  train::ModelSpec model = cfg.model;
  model.seed = seed;
  RunResult r;
  r.history = train::train(model, train_set, loss, cfg.opt, cfg.ks, &valid_set);
  r.final_metrics = r.history.validation.back();
  r.final_train_loss = r.history.train_loss.back();
  return r;
}

int cmd_curves(int figure_no, const std::string& params_arg, const std::string& out_path,
               const analysis::GridSpec& grid) {
  const analysis::Figure fig = analysis::figure_from_number(figure_no);
  const auto series = params_arg.empty() ? analysis::default_figure_params(fig) : parse_params_arg(params_arg);
  const auto tables = analysis::emit_curve(fig, series, grid);

  json resolved{{"command", "curves"}, {"figure", figure_no},
                {"grid", {{"lo", grid.lo}, {"hi", grid.hi}, {"points", grid.points}, {"poly_terms", grid.poly_terms}}}};
  for (const auto& s : series) {
    json p = loss_to_json(s.params);
    p["id"] = s.id;
    resolved["params"].push_back(p);
  }
  Output out(out_path);
  io::write_hash_comment(out.stream(), hash_of(resolved));
  io::write_curves_csv(out.stream(), tables);
  return 0;
}

int cmd_pstar(const std::string& params_arg, int scan_points) {
  const auto series = parse_params_arg(params_arg);
  json result = json::array();
  for (const auto& s : series) {
    analysis::PStarOptions opts;
    opts.scan_points = scan_points;
    json rec{{"id", s.id}, {"params", loss_to_json(s.params)}};
    try {
      const auto cp = analysis::find_pstar(s.params, opts);
      rec["p_star"] = cp.p_star;
      rec["residual"] = cp.residual;
      rec["bracket"] = {cp.bracket.first, cp.bracket.second};
    } catch (const NoCriticalPoint& e) {
      std::cerr << "pstar: " << s.id << ": " << e.what() << "\n";
      return kExitRuntime;
    }
    result.push_back(rec);
  }
  std::cout << (result.size() == 1 ? result[0] : result).dump(2) << "\n";
  return 0;
}

int cmd_taylor_check(int order, const analysis::GridSpec& grid) {
  double worst = 0.0, worst_p = 0.0;
  int worst_label = 1;
  for (double p : grid.samples()) {
    const auto probs = ProbMatrix::from_values(1, 1, {p});
    for (int y : {0, 1}) {
      const LabelMatrix labels(1, 1, {static_cast<std::uint8_t>(y)});
      const double err = std::abs(taylor_bce(probs, labels, order) - bce(probs, labels).value);
      if (err > worst) {
        worst = err;
        worst_p = p;
        worst_label = y;
      }
    }
  }
  const json out{{"order", order},        {"grid_lo", grid.lo},   {"grid_hi", grid.hi}, {"grid_points", grid.points},
                 {"max_abs_error", worst}, {"worst_p", worst_p}, {"worst_label", worst_label}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_train(const ExperimentConfig& cfg) {
  Output out(cfg.output);
  io::write_hash_comment(out.stream(), cfg.hash());
  for (std::uint64_t seed : cfg.seeds) {
    const RunResult r = run_one(cfg, cfg.loss, seed);
    train::write_history_jsonl(out.stream(), r.history, "\"seed\": " + std::to_string(seed) + ", ");
  }
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.grid.empty()) throw ConfigError("field 'grid': sweep needs at least one loss parameter list");
  std::vector<std::string> keys;
  for (auto it = cfg.grid.begin(); it != cfg.grid.end(); ++it) keys.push_back(it.key());

  struct Row {
    json point;
    std::string hash;
    std::map<std::string, double> metrics;
  };
  std::vector<Row> rows;
  std::vector<std::size_t> idx(keys.size(), 0);
  for (bool done = false; !done;) {
    json loss_json = cfg.resolved["loss"];
    json point = json::object();
    for (std::size_t k = 0; k < keys.size(); ++k) {
      loss_json[keys[k]] = cfg.grid[keys[k]][idx[k]];
      point[keys[k]] = cfg.grid[keys[k]][idx[k]];
    }
    const APLParams loss = parse_loss(loss_json);
    json point_cfg = cfg.resolved;
    point_cfg["loss"] = loss_json;
    point_cfg.erase("grid");
    point_cfg.erase("output");
    Row row{point, hash_of(point_cfg), {}};
    for (std::uint64_t seed : cfg.seeds) {
      const RunResult r = run_one(cfg, loss, seed);
      for (const auto& [name, v] : r.final_metrics.values) row.metrics[name] += v;
      row.metrics["final_train_loss"] += r.final_train_loss;
    }
    for (auto& [name, v] : row.metrics) v /= static_cast<double>(cfg.seeds.size());
    rows.push_back(std::move(row));

    // Odometer over the grid, last key fastest.
    for (std::size_t k = keys.size();;) {
      if (k == 0) {
        done = true;
        break;
      }
      --k;
      if (++idx[k] < cfg.grid[keys[k]].size()) break;
      idx[k] = 0;
    }
  }

  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    const double ma = a.metrics.at("mAP"), mb = b.metrics.at("mAP");
    if (ma != mb) return ma > mb;
    return a.hash < b.hash;
  });

  Output out(cfg.output);
  io::write_hash_comment(out.stream(), cfg.hash());
  std::ostream& os = out.stream();
  os << "rank,config_hash";
  for (const auto& k : keys) os << ',' << k;
  for (const auto& [name, v] : rows.front().metrics) os << ',' << name;
  os << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << (i + 1) << ',' << rows[i].hash;
    for (const auto& k : keys) os << ',' << io::sig9(rows[i].point[k].get<double>());
    for (const auto& [name, v] : rows[i].metrics) os << ',' << io::sig9(v);
    os << '\n';
  }
  return 0;
}

int cmd_audit(int trials, std::uint64_t seed, const std::string& params_arg, double tolerance) {
  std::vector<analysis::NamedParams> sets;
  if (params_arg.empty()) {
    sets = {{"bce", APLParams::bce()},
            {"asl", APLParams::asl(0.0, 4.0, 0.05)},
            {"apl", APLCoefficients{.alpha1 = 2.0, .alpha2 = 1.0, .beta1 = 1.4, .gamma_plus = 1.0,
                                    .gamma_minus = 4.0, .p_th = 0.05}},
            {"apl_imbalance", APLParams::asl(0.0, 2.0, 0.05)}};
  } else {
    sets = parse_params_arg(params_arg);
  }
  bool ok = true;
  json report = json::array();
  for (const auto& s : sets) {
    const auto r = train::finite_difference_audit(s.params, trials, seed);
    const bool pass = r.max_rel_error < tolerance;
    ok = ok && pass;
    report.push_back({{"id", s.id}, {"params", loss_to_json(s.params)}, {"max_rel_error", r.max_rel_error},
                      {"checked", r.checked}, {"skipped", r.skipped}, {"pass", pass}});
  }
  std::cout << json{{"trials", trials}, {"seed", seed}, {"tolerance", tolerance}, {"results", report}}.dump(2)
            << "\n";
  return ok ? 0 : kExitAuditFailed;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                             const std::string& out_override) {
  const json user = parse_json_text(read_file(path), path);
  std::vector<std::string> all = overrides;
  if (!out_override.empty()) all.push_back("output=" + json(out_override).dump());
  return resolve_config(user, all);
}

void add_grid_options(CLI::App* cmd, analysis::GridSpec& grid) {
  cmd->add_option("--grid-lo", grid.lo, "Lowest probability sampled");
  cmd->add_option("--grid-hi", grid.hi, "Highest probability sampled");
  cmd->add_option("--grid-points", grid.points, "Number of samples");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Asymmetric polynomial loss toolkit"};
  app.require_subcommand(1);

  int figure = 2;
  std::string params_arg, out_path, config_path;
  std::vector<std::string> overrides;
  analysis::GridSpec curve_grid;
  auto* curves = app.add_subcommand("curves", "Write figure data (1: coefficients, 2: L- curves, 3: L- gradients) as CSV");
  curves->add_option("--figure", figure, "Figure number")->required()->check(CLI::IsMember({1, 2, 3}));
  curves->add_option("--params", params_arg, "Parameter JSON (inline or file); defaults per figure");
  curves->add_option("--out", out_path, "Output CSV (stdout when omitted)");
  curves->add_option("--poly-terms", curve_grid.poly_terms, "Bases listed for figure 1");
  add_grid_options(curves, curve_grid);

  int scan_points = 10000;
  auto* pstar = app.add_subcommand("pstar", "Locate the critical point p* of the negative-class gradient");
  pstar->add_option("--params", params_arg, "Parameter JSON (inline or file)")->required();
  pstar->add_option("--scan-points", scan_points, "Scan grid size")->check(CLI::Range(2, 10000000));

  int order = 200;
  analysis::GridSpec taylor_grid{.lo = 0.05, .hi = 0.95, .points = 91};
  auto* taylor = app.add_subcommand("taylor-check", "Max |truncated Taylor BCE - BCE| over a probability grid");
  taylor->add_option("--order", order, "Truncation order M")->required()->check(CLI::PositiveNumber);
  add_grid_options(taylor, taylor_grid);

  auto* sweep = app.add_subcommand("sweep", "Train over a Cartesian grid of loss parameters");
  auto* train_cmd = app.add_subcommand("train", "Train one configuration over its seed list");
  for (auto* cmd : {sweep, train_cmd}) {
    cmd->add_option("--config", config_path, "Experiment config JSON")->required();
    cmd->add_option("--out", out_path, "Overrides the config's output path");
    cmd->add_option("--set", overrides, "Override a config field: key.path=<json>");
  }

  int trials = 200;
  std::uint64_t audit_seed = 0;
  double tolerance = 1e-4;
  auto* audit = app.add_subcommand("audit", "Check analytic gradients against central differences");
  audit->add_option("--trials", trials, "Random draws per parameter set")->check(CLI::PositiveNumber);
  audit->add_option("--seed", audit_seed, "Random seed");
  audit->add_option("--params", params_arg, "Parameter JSON (inline or file); defaults to a built-in set");
  audit->add_option("--tolerance", tolerance, "Maximum relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*curves) return cmd_curves(figure, params_arg, out_path, curve_grid);
    if (*pstar) return cmd_pstar(params_arg, scan_points);
    if (*taylor) return cmd_taylor_check(order, taylor_grid);
    if (*audit) return cmd_audit(trials, audit_seed, params_arg, tolerance);
    const ExperimentConfig cfg = load_config(config_path, overrides, out_path);
    if (*sweep) return cmd_sweep(cfg);
    return cmd_train(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidParams& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace apl::cli

int main(int argc, char** argv) { return apl::cli::run(argc, argv); }
