#pragma once

// Run configuration: a JSON document declaring models, forms and tasks.
// The schema is described in README.md ("Configuration").

#include "cpair/jacobi.hpp"
#include "cpair/registry.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpair {

inline constexpr int kSchemaVersion = 1;

/// Input errors; carries every validation message found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

enum class TaskKind { classify, verify_pair, deform_forward, deform_converse, single_deform, jacobi, sweep };
const char* to_string(TaskKind k);
std::optional<TaskKind> task_kind_from_string(const std::string& s);

struct TaskConfig {
  TaskKind kind = TaskKind::classify;
  std::string label;
  std::optional<FormField> form;                 // classify
  std::optional<FormField> alpha0, beta0, alpha, beta;
  std::optional<DeformationFamily> family;       // deform-* and sweep
  int k = -1, l = -1;
  std::vector<double> t_grid;                    // empty: task default
  CheckOptions options;
  // jacobi
  SideTag side = SideTag::alpha;
  std::vector<int> resolutions;
  std::vector<double> base;
  // sweep
  std::string csv_path;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::vector<TaskConfig> tasks;
};

/// Overrides applied on top of the file (command-line flags).
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::vector<double>> t_grid;
};

/// Throws ConfigError with all problems found.
RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
RunConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

/// A one-task configuration for a registry example (used by the CLI subcommands).
RunConfig builtin_config(const std::string& name, std::optional<TaskKind> task, const ConfigOverrides& overrides = {});

/// Parses "a,b,c" into numbers; throws ConfigError.
std::vector<double> parse_t_grid(const std::string& list);

}  // namespace cpair
