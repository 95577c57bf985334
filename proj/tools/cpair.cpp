#include "cpair/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

using namespace cpair;

namespace {

struct Options {
  std::string config;
  std::string example;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string t_grid;
  std::string out;
  std::string format = "text";
  bool no_timing = false;
  std::string direction = "forward";
  std::string filter;
};

int emit(const RunReport& report, const Options& o) {
  const std::string body =
      o.format == "structured" ? to_json(report, !o.no_timing).dump(2) + "\n" : to_text(report);
  if (o.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(o.out);
    if (!f) {
      std::cerr << fmt::format("cannot write '{}'\n", o.out);
      return 2;
    }
    f << body;
  }
  return report.exit_code;
}

int execute(const Options& o, std::optional<TaskKind> kind) {
  ConfigOverrides ov;
  ov.seed = o.seed;
  ov.tol = o.tol;
  try {
    if (!o.t_grid.empty()) ov.t_grid = parse_t_grid(o.t_grid);
    RunConfig cfg;
    if (!o.config.empty()) {
      if (!o.example.empty()) throw ConfigError({"give either --config or an example name, not both"});
      cfg = load_config(o.config, ov);
      if (kind) {
        std::erase_if(cfg.tasks, [&](const TaskConfig& t) { return t.kind != *kind; });
        if (cfg.tasks.empty()) throw ConfigError({fmt::format("the configuration has no '{}' task", to_string(*kind))});
      }
    } else if (!o.example.empty()) {
      cfg = builtin_config(o.example, kind, ov);
    } else {
      throw ConfigError({"need --config PATH or an example name (see 'cpair examples')"});
    }
    return emit(run(cfg), o);
  } catch (const ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "error: " << msg << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact pair verification toolkit"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool with_example = true) {
    sub->add_option("--config", o.config, "JSON run configuration");
    if (with_example) sub->add_option("example", o.example, "registry example (see 'examples')");
    sub->add_option("--seed", o.seed, "seed for random sampling");
    sub->add_option("--tol", o.tol, "tolerance for every check")->check(CLI::PositiveNumber);
    sub->add_option("--t-grid", o.t_grid, "comma-separated deformation parameters");
    sub->add_option("--out", o.out, "write the report here instead of stdout");
    sub->add_option("--format", o.format, "text or structured (JSON)")->check(CLI::IsMember({"text", "structured"}));
    sub->add_flag("--no-timing", o.no_timing, "omit timing fields from structured reports");
  };

  auto* classify = app.add_subcommand("classify", "Cartan class of a 1-form");
  auto* pair = app.add_subcommand("verify-pair", "certify a contact pair and its Reeb fields");
  auto* deform = app.add_subcommand("deform", "linear deformation theorems");
  deform->add_option("--direction", o.direction, "forward, converse or single")
      ->check(CLI::IsMember({"forward", "converse", "single"}));
  auto* jacobi = app.add_subcommand("jacobi", "Jacobi brackets on the leaves");
  auto* sweep_cmd = app.add_subcommand("sweep", "volume coefficient and Reeb residual versus t (CSV via --out)");
  auto* run_cmd = app.add_subcommand("run", "run every task of a configuration");
  auto* examples = app.add_subcommand("examples", "list registry examples");
  examples->add_option("filter", o.filter, "substring filter");
  examples->add_option("--format", o.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  for (auto* s : {classify, pair, deform, jacobi, sweep_cmd}) common(s);
  common(run_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (examples->parsed()) {
    const auto list = list_examples(o.filter);
    if (o.format == "structured") {
      nlohmann::ordered_json j = nlohmann::ordered_json::array();
      for (const auto& e : list)
        j.push_back({{"name", e.name}, {"dim", e.dim}, {"k", e.k}, {"l", e.l}, {"kind", e.kind}, {"summary", e.summary}});
      std::cout << j.dump(2) << "\n";
    } else {
      for (const auto& e : list) {
        const std::string dim = e.dim > 0 ? std::to_string(e.dim) : "2k+1";
        const std::string type = e.l >= 0 ? fmt::format("type ({}, {})", e.k, e.l) : "single form";
        std::cout << fmt::format("{:<22} dim {:<5} {:<13} {:<7} {}\n", e.name, dim, type, e.kind, e.summary);
      }
    }
    return 0;
  }
  if (classify->parsed()) return execute(o, TaskKind::classify);
  if (pair->parsed()) return execute(o, TaskKind::verify_pair);
  if (jacobi->parsed()) return execute(o, TaskKind::jacobi);
  if (sweep_cmd->parsed()) {
    // With --out on an example, the CSV goes to that path and the report to stdout.
    if (o.config.empty() && !o.out.empty()) {
      ConfigOverrides ov{o.seed, o.tol, std::nullopt};
      try {
        if (!o.t_grid.empty()) ov.t_grid = parse_t_grid(o.t_grid);
        RunConfig cfg = builtin_config(o.example, TaskKind::sweep, ov);
        for (auto& t : cfg.tasks) t.csv_path = o.out;
        Options shown = o;
        shown.out.clear();
        return emit(run(cfg), shown);
      } catch (const ConfigError& e) {
        for (const auto& msg : e.errors()) std::cerr << "error: " << msg << "\n";
        return 2;
      }
    }
    return execute(o, TaskKind::sweep);
  }
  if (deform->parsed()) {
    const TaskKind k = o.direction == "forward"    ? TaskKind::deform_forward
                       : o.direction == "converse" ? TaskKind::deform_converse
                                                   : TaskKind::single_deform;
    return execute(o, k);
  }
  return execute(o, std::nullopt);
}
