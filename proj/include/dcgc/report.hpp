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

// JSON schema for run reports and config files. Field names match the
// TrainConfig members; CLI flags use the same names in kebab-case.

#ifndef DCGC_REPORT_HPP_
#define DCGC_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"

#include "dcgc/pipeline.hpp"

namespace dcgc {

inline constexpr int kReportSchemaVersion = 1;

struct MetricStat {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct MetricSummary {
  MetricStat acc, nmi, ari, f1;
};

// Mean and population std over runs.
MetricSummary summarize(const std::vector<MetricReport>& runs);

// One or more seeded runs of the same configuration.
struct RunReport {
  std::vector<ClusterReport> runs;
  std::optional<MetricSummary> summary;  // present when every run has metrics
};

RunReport make_run_report(std::vector<ClusterReport> runs);

nlohmann::json to_json(const TrainConfig& cfg);
// Applies the fields present in `j` on top of `base`. Unknown fields are
// rejected.
TrainConfig config_from_json(const nlohmann::json& j, TrainConfig base = {});

nlohmann::json to_json(const MetricReport& m);
MetricReport metrics_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ClusterReport& r);
ClusterReport cluster_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunReport& r);
RunReport run_report_from_json(const nlohmann::json& j);

void save_report(const std::filesystem::path& path, const RunReport& r);
RunReport load_report(const std::filesystem::path& path);

bool operator==(const MetricReport& a, const MetricReport& b);
bool operator==(const TrainConfig& a, const TrainConfig& b);
bool operator==(const EpochRecord& a, const EpochRecord& b);
bool operator==(const ClusterReport& a, const ClusterReport& b);

}  // namespace dcgc

#endif  // DCGC_REPORT_HPP_
