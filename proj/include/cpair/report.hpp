#pragma once

// Task orchestration and reports.

#include "cpair/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cpair {

inline constexpr const char* kToolVersion = "0.1.0";

enum class TaskStatus { pass, inconclusive, not_applicable, falsified, failed, input_error };
const char* to_string(TaskStatus s);

struct TaskResult {
  std::string label;
  TaskKind kind = TaskKind::classify;
  TaskStatus status = TaskStatus::pass;
  std::string message;  // set when the task stopped on an error
  nlohmann::ordered_json body;
  double seconds = 0.0;
};

struct RunReport {
  std::uint64_t seed = 1;
  std::vector<TaskResult> tasks;
  double seconds = 0.0;
  int exit_code = 0;
};

/// 0 pass, 1 some failed / falsified / not applicable, 2 input error, 3 inconclusive.
int exit_code_for(const std::vector<TaskResult>& tasks);

/// Status of a set of deciding items: failed when some item fails by more than the
/// inconclusive band, inconclusive when some item sits within a factor 10 of its threshold.
TaskStatus status_of(const std::vector<CheckItem>& items);

TaskResult run_task(const TaskConfig& task);
RunReport run(const RunConfig& config);

nlohmann::ordered_json to_json(const CheckItem& item);
nlohmann::ordered_json to_json(const Witness& w);
/// Timing fields live in a separate "timing" object, omitted when include_timing is false.
nlohmann::ordered_json to_json(const RunReport& report, bool include_timing = true);
std::string to_text(const RunReport& report);

/// Human-readable number with 17 significant digits.
std::string full(double x);

}  // namespace cpair
