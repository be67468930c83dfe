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

#include "dcgc/report.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace dcgc {

using nlohmann::json;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json record_json(const EpochRecord& r) {
  json j;
  j["epoch"] = r.epoch;
  j["lc"] = r.lc;
  j["lr"] = r.lr;
  j["ld"] = optional_json(r.ld);
  j["ld_feature"] = optional_json(r.ld_feature);
  j["ld_nd"] = optional_json(r.ld_nd);
  j["total"] = r.total;
  j["seconds"] = r.seconds;
  j["metrics"] = r.metrics ? to_json(*r.metrics) : json(nullptr);
  return j;
}

EpochRecord record_from_json(const json& j) {
  EpochRecord r;
  r.epoch = j.at("epoch").get<int>();
  r.lc = j.at("lc").get<double>();
  r.lr = j.at("lr").get<double>();
  r.ld = optional_double(j, "ld");
  r.ld_feature = optional_double(j, "ld_feature");
  r.ld_nd = optional_double(j, "ld_nd");
  r.total = j.at("total").get<double>();
  r.seconds = j.at("seconds").get<double>();
  if (!j.at("metrics").is_null()) r.metrics = metrics_from_json(j.at("metrics"));
  return r;
}

json stat_json(const MetricStat& s) { return json{{"mean", s.mean}, {"std", s.std}}; }

MetricStat stat_from_json(const json& j) {
  return MetricStat{j.at("mean").get<double>(), j.at("std").get<double>()};
}

MetricStat stat_of(const std::vector<double>& xs) {
  MetricStat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(var / static_cast<double>(xs.size()));
  return s;
}

}  // namespace

MetricSummary summarize(const std::vector<MetricReport>& runs) {
  std::vector<double> acc, nmi, ari, f1;
  for (const auto& m : runs) {
    acc.push_back(m.acc);
    nmi.push_back(m.nmi);
    ari.push_back(m.ari);
    f1.push_back(m.f1);
  }
  return MetricSummary{stat_of(acc), stat_of(nmi), stat_of(ari), stat_of(f1)};
}

RunReport make_run_report(std::vector<ClusterReport> runs) {
  RunReport r;
  r.runs = std::move(runs);
  std::vector<MetricReport> metrics;
  for (const auto& run : r.runs) {
    if (!run.metrics) return r;
    metrics.push_back(*run.metrics);
  }
  if (!metrics.empty()) r.summary = summarize(metrics);
  return r;
}

json to_json(const TrainConfig& c) {
  return json{
      {"epochs_pretrain", c.epochs_pretrain},
      {"epochs_finetune", c.epochs_finetune},
      {"t", c.t},
      {"update_interval", c.update_interval},
      {"tau", c.tau},
      {"beta", c.beta},
      {"gamma", c.gamma},
      {"lambda", c.lambda},
      {"lambda_mode", to_string(c.lambda_mode)},
      {"k", c.k},
      {"embed_dim", c.embed_dim},
      {"learning_rate", c.learning_rate},
      {"seed", c.seed},
      {"batch_size", c.batch_size},
      {"supervision_mode", to_string(c.supervision_mode)},
      {"center_mode", to_string(c.center_mode)},
      {"kmeans_n_init", c.kmeans_n_init},
      {"pseudo_label_interval", c.pseudo_label_interval},
      {"normalize_reconstruction", c.normalize_reconstruction},
  };
}

TrainConfig config_from_json(const json& j, TrainConfig c) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "epochs_pretrain", "epochs_finetune", "t", "update_interval", "tau",
      "beta", "gamma", "lambda", "lambda_mode", "k", "embed_dim",
      "learning_rate", "seed", "batch_size", "supervision_mode",
      "center_mode", "kmeans_n_init", "pseudo_label_interval",
      "normalize_reconstruction"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("config: unknown field '" + key + "'");
  }
  try {
    auto get = [&j](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("epochs_pretrain", c.epochs_pretrain);
    get("epochs_finetune", c.epochs_finetune);
    get("t", c.t);
    get("update_interval", c.update_interval);
    get("tau", c.tau);
    get("beta", c.beta);
    get("gamma", c.gamma);
    get("lambda", c.lambda);
    get("k", c.k);
    get("embed_dim", c.embed_dim);
    get("learning_rate", c.learning_rate);
    get("seed", c.seed);
    get("batch_size", c.batch_size);
    get("kmeans_n_init", c.kmeans_n_init);
    get("pseudo_label_interval", c.pseudo_label_interval);
    get("normalize_reconstruction", c.normalize_reconstruction);
    if (j.contains("lambda_mode")) {
      c.lambda_mode = parse_lambda_mode(j.at("lambda_mode").get<std::string>());
    }
    if (j.contains("supervision_mode")) {
      c.supervision_mode =
          parse_supervision_mode(j.at("supervision_mode").get<std::string>());
    }
    if (j.contains("center_mode")) {
      c.center_mode = parse_center_mode(j.at("center_mode").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

json to_json(const MetricReport& m) {
  return json{{"acc", m.acc}, {"nmi", m.nmi}, {"ari", m.ari}, {"f1", m.f1}};
}

MetricReport metrics_from_json(const json& j) {
  return MetricReport{j.at("acc").get<double>(), j.at("nmi").get<double>(),
                      j.at("ari").get<double>(), j.at("f1").get<double>()};
}

json to_json(const ClusterReport& r) {
  json trace;
  trace["pretrain"] = json::array();
  for (const auto& e : r.trace.pretrain) trace["pretrain"].push_back(record_json(e));
  trace["finetune"] = json::array();
  for (const auto& e : r.trace.finetune) trace["finetune"].push_back(record_json(e));
  json j;
  j["config"] = to_json(r.config);
  j["seed"] = r.config.seed;
  j["num_nodes"] = r.num_nodes;
  j["num_edges"] = r.num_edges;
  j["k"] = r.k;
  j["predictions"] = r.predictions;
  j["argmax_predictions"] = r.argmax_predictions;
  j["metrics"] = r.metrics ? to_json(*r.metrics) : json(nullptr);
  j["argmax_metrics"] = r.argmax_metrics ? to_json(*r.argmax_metrics) : json(nullptr);
  j["homophily"] = optional_json(r.homophily);
  j["alpha"] = {r.alpha(0), r.alpha(1), r.alpha(2)};
  j["lambda"] = r.lambda;
  j["timing"] = {{"pretrain_seconds", r.trace.pretrain_seconds},
                 {"finetune_seconds", r.trace.finetune_seconds},
                 {"cluster_seconds", r.trace.cluster_seconds}};
  j["trace"] = std::move(trace);
  return j;
}

ClusterReport cluster_report_from_json(const json& j) {
  ClusterReport r;
  r.config = config_from_json(j.at("config"));
  r.num_nodes = j.at("num_nodes").get<int>();
  r.num_edges = j.at("num_edges").get<std::int64_t>();
  r.k = j.at("k").get<int>();
  r.predictions = j.at("predictions").get<Labels>();
  r.argmax_predictions = j.at("argmax_predictions").get<Labels>();
  if (!j.at("metrics").is_null()) r.metrics = metrics_from_json(j.at("metrics"));
  if (!j.at("argmax_metrics").is_null()) {
    r.argmax_metrics = metrics_from_json(j.at("argmax_metrics"));
  }
  r.homophily = optional_double(j, "homophily");
  const auto alpha = j.at("alpha").get<std::vector<double>>();
  if (alpha.size() != 3) throw InputError("report: alpha must have 3 entries");
  r.alpha = Eigen::Vector3d(alpha[0], alpha[1], alpha[2]);
  r.lambda = j.at("lambda").get<double>();
  const json& timing = j.at("timing");
  r.trace.pretrain_seconds = timing.at("pretrain_seconds").get<double>();
  r.trace.finetune_seconds = timing.at("finetune_seconds").get<double>();
  r.trace.cluster_seconds = timing.at("cluster_seconds").get<double>();
  for (const auto& e : j.at("trace").at("pretrain")) {
    r.trace.pretrain.push_back(record_from_json(e));
  }
  for (const auto& e : j.at("trace").at("finetune")) {
    r.trace.finetune.push_back(record_from_json(e));
  }
  return r;
}

json to_json(const RunReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["runs"] = json::array();
  for (const auto& run : r.runs) j["runs"].push_back(to_json(run));
  if (r.summary) {
    j["summary"] = {{"acc", stat_json(r.summary->acc)},
                    {"nmi", stat_json(r.summary->nmi)},
                    {"ari", stat_json(r.summary->ari)},
                    {"f1", stat_json(r.summary->f1)}};
  } else {
    j["summary"] = nullptr;
  }
  return j;
}

RunReport run_report_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw InputError("report: unsupported schema version");
    }
    RunReport r;
    for (const auto& run : j.at("runs")) {
      r.runs.push_back(cluster_report_from_json(run));
    }
    if (!j.at("summary").is_null()) {
      const json& s = j.at("summary");
      r.summary = MetricSummary{stat_from_json(s.at("acc")),
                                stat_from_json(s.at("nmi")),
                                stat_from_json(s.at("ari")),
                                stat_from_json(s.at("f1"))};
    }
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("report: ") + e.what());
  }
}

void save_report(const std::filesystem::path& path, const RunReport& r) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json(r).dump(2) << '\n';
}

RunReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return run_report_from_json(j);
}

bool operator==(const MetricReport& a, const MetricReport& b) {
  return a.acc == b.acc && a.nmi == b.nmi && a.ari == b.ari && a.f1 == b.f1;
}

bool operator==(const TrainConfig& a, const TrainConfig& b) {
  return to_json(a) == to_json(b);
}

bool operator==(const EpochRecord& a, const EpochRecord& b) {
  return a.epoch == b.epoch && a.lc == b.lc && a.lr == b.lr && a.ld == b.ld &&
         a.ld_feature == b.ld_feature && a.ld_nd == b.ld_nd &&
         a.total == b.total && a.seconds == b.seconds && a.metrics == b.metrics;
}

bool operator==(const ClusterReport& a, const ClusterReport& b) {
  return a.config == b.config && a.num_nodes == b.num_nodes &&
         a.num_edges == b.num_edges && a.k == b.k &&
         a.predictions == b.predictions &&
         a.argmax_predictions == b.argmax_predictions &&
         a.metrics == b.metrics && a.argmax_metrics == b.argmax_metrics &&
         a.homophily == b.homophily && a.alpha == b.alpha &&
         a.lambda == b.lambda && a.trace.pretrain == b.trace.pretrain &&
         a.trace.finetune == b.trace.finetune &&
         a.trace.pretrain_seconds == b.trace.pretrain_seconds &&
         a.trace.finetune_seconds == b.trace.finetune_seconds &&
         a.trace.cluster_seconds == b.trace.cluster_seconds;
}

}  // namespace dcgc
