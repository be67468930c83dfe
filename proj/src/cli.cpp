// Copyright 2026 The DCGC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dcgc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dcgc/gradcheck.hpp"
#include "dcgc/graph.hpp"
#include "dcgc/pipeline.hpp"
#include "dcgc/report.hpp"

namespace dcgc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kAttributesFile = "attributes.csv";
constexpr const char* kEdgesFile = "edges.txt";
constexpr const char* kLabelsFile = "labels.txt";
constexpr const char* kMetadataFile = "metadata.json";

fs::path resolve_path(const fs::path& p) {
  if (p.is_absolute() || fs::exists(p)) return p;
  if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir) {
    const fs::path alt = fs::path(dir) / p;
    if (fs::exists(alt)) return alt;
  }
  return p;
}

// Flags mirroring TrainConfig. Values only override the config file when the
// flag was given.
struct TrainFlags {
  TrainConfig values;
  std::string supervision_mode = "neighbor_distribution";
  std::string center_mode = "dual";
  std::string lambda_mode = "fixed";
  std::string config_path;
  std::vector<std::function<void(TrainConfig&)>> appliers;
  std::vector<std::pair<CLI::Option*, std::function<void(TrainConfig&)>>> options;

  template <typename T>
  void add(CLI::App* app, const std::string& name, T TrainConfig::*field,
           const std::string& help) {
    CLI::Option* opt = app->add_option(name, values.*field, help);
    options.emplace_back(opt, [this, field](TrainConfig& c) {
      c.*field = values.*field;
    });
  }

  void attach(CLI::App* app, bool include_tau_beta = true) {
    app->add_option("--config", config_path,
                    "JSON config file with TrainConfig field names");
    add(app, "--epochs-pretrain", &TrainConfig::epochs_pretrain, "Pretraining epochs");
    add(app, "--epochs-finetune", &TrainConfig::epochs_finetune, "Fine-tuning epochs");
    add(app, "--t", &TrainConfig::t, "Filtering times");
    add(app, "--update-interval", &TrainConfig::update_interval,
        "Target refresh interval T");
    if (include_tau_beta) {
      add(app, "--tau", &TrainConfig::tau, "Neighbor-distribution similarity gate");
      add(app, "--beta", &TrainConfig::beta, "Contrastive vs reconstruction weight");
    }
    add(app, "--gamma", &TrainConfig::gamma, "Dual-center loss weight");
    add(app, "--lambda", &TrainConfig::lambda, "Feature-center share of the KL loss");
    add(app, "--k", &TrainConfig::k, "Cluster count (default: label count)");
    add(app, "--embed-dim", &TrainConfig::embed_dim, "Embedding width");
    add(app, "--learning-rate", &TrainConfig::learning_rate, "Adam step size");
    add(app, "--seed", &TrainConfig::seed, "Random seed");
    add(app, "--batch-size", &TrainConfig::batch_size,
        "Contrastive minibatch size (0 = full batch)");
    add(app, "--kmeans-n-init", &TrainConfig::kmeans_n_init, "K-means restarts");
    add(app, "--pseudo-label-interval", &TrainConfig::pseudo_label_interval,
        "Pretraining pseudo-label refresh period");
    CLI::Option* norm = app->add_flag(
        "--normalize-reconstruction", values.normalize_reconstruction,
        "Divide the reconstruction loss by N^2");
    options.emplace_back(norm, [this](TrainConfig& c) {
      c.normalize_reconstruction = values.normalize_reconstruction;
    });
    CLI::Option* sup = app->add_option("--supervision-mode", supervision_mode,
                                       "neighbor_distribution | pseudo_label | none");
    options.emplace_back(sup, [this](TrainConfig& c) {
      c.supervision_mode = parse_supervision_mode(supervision_mode);
    });
    CLI::Option* cen =
        app->add_option("--center-mode", center_mode, "dual | feature_only | nd_only");
    options.emplace_back(cen, [this](TrainConfig& c) {
      c.center_mode = parse_center_mode(center_mode);
    });
    CLI::Option* lam =
        app->add_option("--lambda-mode", lambda_mode, "fixed | learnable");
    options.emplace_back(lam, [this](TrainConfig& c) {
      c.lambda_mode = parse_lambda_mode(lambda_mode);
    });
  }

  TrainConfig resolve() const {
    TrainConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(resolve_path(config_path));
      if (!in) throw ConfigError("cannot open config file " + config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
      cfg = config_from_json(j, cfg);
    }
    for (const auto& [opt, apply] : options) {
      if (opt->count() > 0) apply(cfg);
    }
    return cfg;
  }
};

struct DataFlags {
  std::string dir;
  std::string attributes, edges, labels;

  void attach(CLI::App* app) {
    app->add_option("--data", dir,
                    "Directory holding attributes.csv, edges.txt, labels.txt");
    app->add_option("--attributes", attributes, "Attribute CSV");
    app->add_option("--edges", edges, "Edge list");
    app->add_option("--labels", labels, "Label file (optional)");
  }

  Graph load() const {
    fs::path attr = attributes, edge = edges, label = labels;
    if (!dir.empty()) {
      const fs::path base = resolve_path(dir);
      if (attr.empty()) attr = base / kAttributesFile;
      if (edge.empty()) edge = base / kEdgesFile;
      if (label.empty() && fs::exists(base / kLabelsFile)) label = base / kLabelsFile;
    }
    if (attr.empty() || edge.empty()) {
      throw ConfigError("no dataset: pass --data or --attributes and --edges");
    }
    attr = resolve_path(attr);
    edge = resolve_path(edge);
    for (const fs::path& p : {attr, edge}) {
      if (!fs::exists(p)) throw InputError("missing data file " + p.string());
    }
    std::optional<fs::path> lbl;
    if (!label.empty()) {
      lbl = resolve_path(label);
      if (!fs::exists(*lbl)) throw InputError("missing label file " + lbl->string());
    }
    return load_graph(attr, edge, lbl);
  }
};

std::vector<ClusterReport> repeated_runs(const Graph& g, TrainConfig cfg,
                                         int repeats,
                                         const std::string& embeddings) {
  std::vector<ClusterReport> runs;
  const std::uint64_t base_seed = cfg.seed;
  for (int r = 0; r < repeats; ++r) {
    cfg.seed = base_seed + static_cast<std::uint64_t>(r);
    RunResult result = run_dcgc(g, cfg);
    if (!embeddings.empty()) {
      fs::path path = embeddings;
      if (repeats > 1) {
        path.replace_filename(path.stem().string() + "_run" + std::to_string(r) +
                              path.extension().string());
      }
      write_attributes(path, result.embedding);
    }
    runs.push_back(std::move(result.report));
  }
  return runs;
}

void print_summary(std::ostream& out, const RunReport& report) {
  if (!report.summary) {
    out << "runs: " << report.runs.size() << " (no ground-truth labels)\n";
    return;
  }
  const MetricSummary& s = *report.summary;
  out << std::fixed << std::setprecision(4);
  out << "runs: " << report.runs.size() << '\n';
  out << "ACC " << s.acc.mean << " +/- " << s.acc.std << '\n';
  out << "NMI " << s.nmi.mean << " +/- " << s.nmi.std << '\n';
  out << "ARI " << s.ari.mean << " +/- " << s.ari.std << '\n';
  out << "F1  " << s.f1.mean << " +/- " << s.f1.std << '\n';
  out.unsetf(std::ios::floatfield);
}

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " grid value '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError(std::string("empty ") + what + " grid");
  return values;
}

int cmd_gen(const SbmSpec& spec, const std::string& blocks, std::uint64_t seed,
            const std::string& out_dir, std::ostream& out) {
  SbmSpec s = spec;
  s.block_sizes.clear();
  std::stringstream ss(blocks);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      s.block_sizes.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("bad block size '" + item + "'");
    }
  }
  validate(s);
  const Graph g = generate_sbm(s, seed);
  const fs::path dir = out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  write_attributes(dir / kAttributesFile, g.attributes);
  write_edges(dir / kEdgesFile, g);
  write_labels(dir / kLabelsFile, *g.labels);
  json meta = {
      {"generator", "sbm"},
      {"seed", seed},
      {"block_sizes", s.block_sizes},
      {"p_in", s.p_in},
      {"p_out", s.p_out},
      {"attribute_dim", s.attribute_dim},
      {"attribute_separation", s.attribute_separation},
      {"noise_std", s.noise_std},
      {"num_nodes", g.num_nodes()},
      {"num_edges", g.num_edges()},
      {"homophily", homophily_ratio(g)},
  };
  std::ofstream mf(dir / kMetadataFile);
  if (!mf) throw InputError("cannot write " + (dir / kMetadataFile).string());
  mf << meta.dump(2) << '\n';
  out << "wrote " << g.num_nodes() << " nodes, " << g.num_edges()
      << " edges to " << dir.string() << '\n';
  return kOk;
}

int cmd_eval(const std::string& report_path, const std::string& pred_path,
             const std::string& truth_path, const std::string& out_path,
             std::ostream& out) {
  std::vector<Labels> preds;
  if (!report_path.empty()) {
    const RunReport report = load_report(resolve_path(report_path));
    for (const auto& run : report.runs) preds.push_back(run.predictions);
  } else if (!pred_path.empty()) {
    preds.push_back(read_labels(resolve_path(pred_path)));
  } else {
    throw ConfigError("eval: pass --report or --pred");
  }
  if (truth_path.empty()) throw ConfigError("eval: pass --truth");
  const Labels truth = read_labels(resolve_path(truth_path));
  std::vector<MetricReport> metrics;
  json j;
  j["runs"] = json::array();
  for (const Labels& p : preds) {
    metrics.push_back(clustering_metrics(p, truth));
    j["runs"].push_back(to_json(metrics.back()));
  }
  const MetricSummary s = summarize(metrics);
  j["summary"] = {{"acc", {{"mean", s.acc.mean}, {"std", s.acc.std}}},
                  {"nmi", {{"mean", s.nmi.mean}, {"std", s.nmi.std}}},
                  {"ari", {{"mean", s.ari.mean}, {"std", s.ari.std}}},
                  {"f1", {{"mean", s.f1.mean}, {"std", s.f1.std}}}};
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw InputError("cannot write " + out_path);
    f << j.dump(2) << '\n';
  }
  out << j.dump(2) << '\n';
  return kOk;
}

void write_sweep_header(std::ostream& csv) {
  csv << "tau,beta,status,runs,acc_mean,acc_std,nmi_mean,nmi_std,ari_mean,"
         "ari_std,f1_mean,f1_std\n";
}

std::string csv_escape(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ' ';
  }
  return s;
}

int cmd_sweep(const Graph& g, const TrainConfig& base,
              const std::vector<double>& taus, const std::vector<double>& betas,
              int repeats, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  std::ostringstream csv;
  csv << std::setprecision(17);
  write_sweep_header(csv);
  for (double tau : taus) {
    for (double beta : betas) {
      TrainConfig cfg = base;
      cfg.tau = tau;
      cfg.beta = beta;
      csv << tau << ',' << beta << ',';
      try {
        const RunReport r = make_run_report(repeated_runs(g, cfg, repeats, ""));
        if (r.summary) {
          const MetricSummary& s = *r.summary;
          csv << "ok," << r.runs.size() << ',' << s.acc.mean << ',' << s.acc.std
              << ',' << s.nmi.mean << ',' << s.nmi.std << ',' << s.ari.mean << ','
              << s.ari.std << ',' << s.f1.mean << ',' << s.f1.std << '\n';
        } else {
          csv << "no_labels," << r.runs.size() << ",,,,,,,,\n";
        }
      } catch (const std::exception& e) {
        err << "sweep cell tau=" << tau << " beta=" << beta
            << " failed: " << e.what() << '\n';
        csv << "error: " << csv_escape(e.what()) << ",0,,,,,,,,\n";
      }
    }
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw InputError("cannot write " + out_path);
    f << csv.str();
  }
  out << csv.str();
  return kOk;
}

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out) {
  const auto rows = run_gradcheck(opts);
  bool ok = true;
  out << std::left << std::setw(16) << "loss" << std::setw(16)
      << "max_rel_error" << "status\n";
  for (const auto& row : rows) {
    out << std::left << std::setw(16) << to_string(row.loss) << std::setw(16)
        << std::scientific << std::setprecision(3) << row.max_relative_error
        << (row.passed ? "pass" : "FAIL") << '\n';
    out.unsetf(std::ios::floatfield);
    ok = ok && row.passed;
  }
  return ok ? kOk : kNumericFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Dual-center graph clustering with neighbor distributions", "dcgc"};
  app.require_subcommand(1);

  // gen
  CLI::App* gen = app.add_subcommand("gen", "Generate a stochastic block model dataset");
  SbmSpec spec;
  std::string blocks = "50,50";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--blocks", blocks, "Comma-separated block sizes");
  gen->add_option("--p-in", spec.p_in, "Intra-block edge probability");
  gen->add_option("--p-out", spec.p_out, "Inter-block edge probability");
  gen->add_option("--attr-dim", spec.attribute_dim, "Attribute dimension");
  gen->add_option("--separation", spec.attribute_separation,
                  "Distance of block attribute means from the origin");
  gen->add_option("--noise", spec.noise_std, "Attribute noise std");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", gen_out, "Output directory")->required();

  // run
  CLI::App* run_cmd = app.add_subcommand("run", "Train and cluster a graph");
  DataFlags run_data;
  TrainFlags run_flags;
  int repeats = 1;
  std::string report_out, embeddings_out;
  run_data.attach(run_cmd);
  run_flags.attach(run_cmd);
  run_cmd->add_option("--repeats", repeats, "Number of seeds (seed, seed+1, ...)");
  run_cmd->add_option("--out", report_out, "Report JSON path");
  run_cmd->add_option("--embeddings", embeddings_out,
                      "CSV path for the final embedding");

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Score predictions against labels");
  std::string eval_report, eval_pred, eval_truth, eval_out;
  eval->add_option("--report", eval_report, "Report JSON produced by run");
  eval->add_option("--pred", eval_pred, "Prediction file, one label per line");
  eval->add_option("--truth", eval_truth, "Ground-truth label file");
  eval->add_option("--out", eval_out, "Write the metric JSON here as well");

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "Grid over tau and beta");
  DataFlags sweep_data;
  TrainFlags sweep_flags;
  std::string tau_grid = "0.1,0.3,0.5,0.7,0.9", beta_grid = "0.3";
  int sweep_repeats = 1;
  std::string sweep_out;
  sweep_data.attach(sweep);
  sweep_flags.attach(sweep, /*include_tau_beta=*/false);
  sweep->add_option("--tau-grid", tau_grid, "Comma-separated tau values");
  sweep->add_option("--beta-grid", beta_grid, "Comma-separated beta values");
  sweep->add_option("--repeats", sweep_repeats, "Seeds per cell");
  sweep->add_option("--out", sweep_out, "CSV summary path");

  // gradcheck
  CLI::App* grad = app.add_subcommand("gradcheck",
                                      "Compare tape gradients with finite differences");
  GradcheckOptions gopts;
  grad->add_option("--seed", gopts.seed, "Random seed");
  grad->add_option("--instances", gopts.instances, "Random instances per loss");
  grad->add_option("--max-nodes", gopts.max_nodes, "Largest instance size");
  grad->add_option("--max-dim", gopts.max_dim, "Largest feature/embedding width");
  grad->add_option("--eps", gopts.eps, "Central-difference step");
  grad->add_option("--tolerance", gopts.tolerance, "Max relative error");
  grad->add_flag("--inject-sign-error", gopts.flip_tape_sign,
                 "Negate tape gradients (negative control)")
      ->group("");

  std::vector<std::string> argv_store = {"dcgc"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) err << app.get_subcommands().front()->help();
    return kConfigError;
  }

  try {
    if (gen->parsed()) return cmd_gen(spec, blocks, gen_seed, gen_out, out);
    if (run_cmd->parsed()) {
      const TrainConfig cfg = run_flags.resolve();
      validate(cfg);
      if (repeats < 1) throw ConfigError("--repeats must be >= 1");
      const Graph g = run_data.load();
      resolve_k(g, cfg);
      const RunReport report =
          make_run_report(repeated_runs(g, cfg, repeats, embeddings_out));
      if (!report_out.empty()) save_report(report_out, report);
      print_summary(out, report);
      return kOk;
    }
    if (eval->parsed()) {
      return cmd_eval(eval_report, eval_pred, eval_truth, eval_out, out);
    }
    if (sweep->parsed()) {
      const TrainConfig cfg = sweep_flags.resolve();
      const auto taus = parse_grid(tau_grid, "tau");
      const auto betas = parse_grid(beta_grid, "beta");
      if (sweep_repeats < 1) throw ConfigError("--repeats must be >= 1");
      const Graph g = sweep_data.load();
      resolve_k(g, cfg);
      return cmd_sweep(g, cfg, taus, betas, sweep_repeats, sweep_out, out, err);
    }
    if (grad->parsed()) return cmd_gradcheck(gopts, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kUnexpected;
}

}  // namespace dcgc::cli
