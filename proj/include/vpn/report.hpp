#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vpn/eval.hpp"
#include "vpn/vpn.hpp"

namespace vpn {

inline constexpr const char* kToolName = "vpn";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunReport {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::string command;
  nlohmann::json config;  // echo sufficient to reproduce the run (seed included)
  std::optional<Verdict> verdict;
  std::vector<QueryOutcome> outcomes;
  std::vector<AttackReport> attack_reports;
  std::vector<int> skipped_labels;
  std::vector<std::string> warnings;
  SolverStats stats;
  double wall_time_s = 0.0;
};

// Trigger JSON fragment: {"row":r,"col":c,"size":s,"values":[...]}
nlohmann::json trigger_to_json(const TriggerRegion& region, const TriggerAssignment& assignment);
std::pair<TriggerRegion, TriggerAssignment> trigger_from_json(const nlohmann::json& j);
std::pair<TriggerRegion, TriggerAssignment> load_trigger_file(const std::string& path);
void save_trigger_file(const std::string& path, const TriggerRegion& region,
                       const TriggerAssignment& assignment);

nlohmann::json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

nlohmann::json outcome_to_json(const QueryOutcome& o);
QueryOutcome outcome_from_json(const nlohmann::json& j);

nlohmann::json attack_report_to_json(const AttackReport& r);
AttackReport attack_report_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);

// Exit codes are a total function of the verdict kind: 10 poisoned,
// 20 poison-free, 30 inconclusive.
int exit_code_for(const Verdict& v);

}  // namespace vpn
