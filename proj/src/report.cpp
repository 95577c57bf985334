#include "cpair/report.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>

namespace cpair {

using nlohmann::ordered_json;

namespace {

bool decisive_failure(const CheckItem& c) {
  if (c.passed) return false;
  if (!c.banded) return true;
  const double m = c.margin();
  return !std::isfinite(c.value) || !(m <= 10.0);
}

std::vector<CheckItem> concat(std::vector<CheckItem> a, const std::vector<CheckItem>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

ordered_json items_json(const std::vector<CheckItem>& items) {
  ordered_json out = ordered_json::array();
  for (const auto& c : items) out.push_back(to_json(c));
  return out;
}

ordered_json optional_witness(const std::optional<Witness>& w) { return w ? to_json(*w) : ordered_json(nullptr); }

ordered_json certificate_json(const ContactPairCertificate& c) {
  ordered_json j;
  j["k"] = c.k;
  j["l"] = c.l;
  j["passed"] = c.passed;
  j["tol"] = c.tol;
  j["points"] = c.points.size();
  j["min_abs_volume"] = c.min_abs_volume;
  j["orientation"] = c.orientation;
  j["min_sigma"] = c.min_sigma;
  j["items"] = items_json(c.items());
  return j;
}

ordered_json class_json(const ClassReport& r) {
  ordered_json j;
  j["k"] = r.k;
  j["class"] = r.k >= 0 ? ordered_json(2 * r.k + 1) : ordered_json(nullptr);
  j["constant"] = r.constant;
  j["passed"] = r.passed;
  j["points"] = r.points;
  j["power"] = to_json(r.power);
  j["next"] = to_json(r.next);
  j["class_change"] = optional_witness(r.class_change);
  return j;
}

TaskStatus verdict_status(const TheoremVerdict& v) {
  const auto deciding = concat(v.hypotheses, v.conclusions);
  switch (v.outcome) {
    case Outcome::pass:
      return status_of(deciding);
    case Outcome::not_applicable:
      for (const auto& c : v.hypotheses)
        if (decisive_failure(c)) return TaskStatus::not_applicable;
      return TaskStatus::inconclusive;
    case Outcome::falsified:
      for (const auto& c : v.conclusions)
        if (decisive_failure(c)) return TaskStatus::falsified;
      return TaskStatus::inconclusive;
  }
  return TaskStatus::failed;
}

ordered_json verdict_json(const TheoremVerdict& v) {
  ordered_json j;
  j["direction"] = v.direction;
  j["outcome"] = to_string(v.outcome);
  j["hypotheses"] = items_json(v.hypotheses);
  j["conclusions"] = items_json(v.conclusions);
  j["facts"] = items_json(v.facts);
  ordered_json steps = ordered_json::array();
  for (const auto& s : v.steps) steps.push_back({{"t", s.t}, {"items", items_json(s.items)}});
  j["steps"] = steps;
  return j;
}

std::vector<double> grid_or(const std::vector<double>& t, std::vector<double> fallback) {
  return t.empty() ? fallback : t;
}

// Coordinate-trig test functions on the leaf axes.
struct TrigTriple {
  Expr f, g, h;
};
TrigTriple leaf_functions(const JacobiSide& s) {
  const auto& a = s.grid().active();
  const int d = static_cast<int>(a.size());
  auto x = [&](int q) { return fmt::format("x{}", a[q % d]); };
  const int n = s.grid().model_dim();
  return {parse(fmt::format("cos({} - {})", x(1), x(0)), n),
          parse(fmt::format("sin({}) * cos({}) + sin({})", x(1), x(2), x(0)), n),
          parse(fmt::format("sin({}) + cos({}) * sin({})", x(2), x(0), x(1)), n)};
}

void run_jacobi(const TaskConfig& t, TaskResult& r) {
  std::vector<CheckItem> items;
  ordered_json levels = ordered_json::array();
  struct Level {
    int n;
    double unit, jacobi, consistency;
  };
  std::vector<Level> done;
  std::vector<int> active;
  for (int n : t.resolutions) {
    const JacobiSide s = JacobiSide::make(*t.alpha, *t.beta, t.k, t.l, t.side, n, t.base, t.options);
    active = s.grid().active();
    const double tol = s.tol();
    const TrigTriple fn = leaf_functions(s);
    const std::string tag = fmt::format("N={}: ", n);

    const GridVectorField xf = hamiltonian_field(fn.f, s);
    Tracker res = upper(tag + "hamiltonian residual", tol);
    res.observe(xf.max_residual, {});
    items.push_back(res.item());

    const GridFunction fg = jacobi_bracket(fn.f, fn.g, s), gf = jacobi_bracket(fn.g, fn.f, s);
    double anti = 0.0;
    for (std::size_t q = 0; q < fg.values.size(); ++q) anti = std::max(anti, std::abs(fg.values[q] + gf.values[q]));
    Tracker at = upper(tag + "antisymmetry", 0.0);
    at.observe(anti, {});
    items.push_back(at.item());

    if (n >= 16) {
      std::vector<int> c1(s.dim(), n / 2), c2(s.dim(), n / 2);
      c1[0] = 4;
      c2[0] = 11;
      const double loc = sup_interior(jacobi_bracket(grid_bump(s, c1, 2.5), grid_bump(s, c2, 2.5), s), s);
      Tracker lt = upper(tag + "locality", 1e-9);
      lt.observe(loc, {});
      items.push_back(lt.item());
    }

    const BivectorField lam = build_bivector(s);
    Tracker dg = upper(tag + "degenerate direction", tol);
    dg.observe(degenerate_direction_defect(s, lam), {});
    items.push_back(dg.item());

    Level lv{n, unit_bracket_defect(fn.g, s), jacobi_identity_defect(fn.f, fn.g, fn.h, s),
             bivector_consistency_defect(fn.f, fn.g, s, lam)};
    levels.push_back({{"resolution", n},
                      {"step", s.grid().max_step()},
                      {"unit_bracket_defect", lv.unit},
                      {"jacobi_identity_defect", lv.jacobi},
                      {"bivector_consistency_defect", lv.consistency}});
    done.push_back(lv);
  }
  // Second order or better: the defect drops by >= 0.875 (N2/N1)^2 (3.5 per halving).
  for (std::size_t i = 1; i < done.size(); ++i) {
    const Level &a = done[i - 1], &b = done[i];
    const double ratio = static_cast<double>(b.n) / a.n;
    const double need = 0.875 * ratio * ratio;
    auto rate = [&](const char* what, double coarse, double fine) {
      const std::string name = fmt::format("{} rate {}->{}", what, a.n, b.n);
      if (fine < 1e-12 && coarse < 1e-12) {
        CheckItem c = pass_item(name + " (exact)");
        c.value = fine;
        items.push_back(c);
        return;
      }
      Tracker tr = lower(name, need);
      tr.observe(coarse / fine, {});
      CheckItem c = tr.item();
      c.banded = false;
      items.push_back(c);
    };
    rate("unit bracket", a.unit, b.unit);
    rate("jacobi identity", a.jacobi, b.jacobi);
    rate("bivector consistency", a.consistency, b.consistency);
  }
  r.body["side"] = t.side == SideTag::alpha ? "alpha" : "beta";
  r.body["active_axes"] = active;
  r.body["base"] = t.base;
  r.body["levels"] = levels;
  r.body["items"] = items_json(items);
  r.status = status_of(items);
}

}  // namespace

const char* to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::pass: return "pass";
    case TaskStatus::inconclusive: return "inconclusive";
    case TaskStatus::not_applicable: return "not_applicable";
    case TaskStatus::falsified: return "falsified";
    case TaskStatus::failed: return "failed";
    case TaskStatus::input_error: return "input_error";
  }
  return "?";
}

TaskStatus status_of(const std::vector<CheckItem>& items) {
  bool inconclusive = false;
  for (const auto& c : items) {
    if (decisive_failure(c)) return TaskStatus::failed;
    if (!c.passed || c.inconclusive()) inconclusive = true;
  }
  return inconclusive ? TaskStatus::inconclusive : TaskStatus::pass;
}

int exit_code_for(const std::vector<TaskResult>& tasks) {
  bool failed = false, inconclusive = false;
  for (const auto& t : tasks) {
    switch (t.status) {
      case TaskStatus::input_error: return 2;
      case TaskStatus::pass: break;
      case TaskStatus::inconclusive: inconclusive = true; break;
      default: failed = true;
    }
  }
  if (failed) return 1;
  return inconclusive ? 3 : 0;
}

TaskResult run_task(const TaskConfig& t) {
  TaskResult r;
  r.label = t.label;
  r.kind = t.kind;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (t.kind) {
      case TaskKind::classify: {
        const ClassReport c = cartan_class(*t.form, t.options);
        r.body = class_json(c);
        r.status = c.passed ? status_of({c.power, c.next}) : TaskStatus::failed;
        break;
      }
      case TaskKind::verify_pair: {
        const ContactPairCertificate c = verify_contact_pair(*t.alpha, *t.beta, t.k, t.l, t.options);
        r.body = certificate_json(c);
        r.status = status_of(c.items());
        if (!c.passed && r.status == TaskStatus::pass) r.status = TaskStatus::failed;
        break;
      }
      case TaskKind::deform_forward:
      case TaskKind::deform_converse: {
        const TheoremVerdict v =
            t.kind == TaskKind::deform_forward
                ? verify_forward(*t.family, grid_or(t.t_grid, default_forward_grid()), t.options)
                : verify_converse(*t.family, grid_or(t.t_grid, default_converse_grid()), t.options,
                                  t.family->model->is_closed());
        r.body = verdict_json(v);
        r.status = verdict_status(v);
        break;
      }
      case TaskKind::single_deform: {
        const SingleDeformationReport s =
            verify_single_linear_deformation(*t.alpha0, *t.alpha, grid_or(t.t_grid, default_forward_grid()), t.options);
        ordered_json j;
        j["k"] = s.k;
        j["tol"] = s.tol;
        j["alpha0_class"] = class_json(s.alpha0_class);
        j["alpha_contact"] = to_json(s.alpha_contact);
        j["alpha_orientation"] = to_json(s.alpha_orientation);
        j["alpha0_on_reeb"] = to_json(s.alpha0_on_reeb);
        j["condition_ii"] = s.condition_ii;
        j["condition_i"] = s.condition_i ? ordered_json(*s.condition_i) : ordered_json(nullptr);
        j["agree"] = s.agree ? ordered_json(*s.agree) : ordered_json(nullptr);
        j["violation"] = optional_witness(s.violation);
        ordered_json steps = ordered_json::array();
        for (const auto& st : s.steps)
          steps.push_back({{"t", st.t}, {"holds", st.holds}, {"contact", to_json(st.contact)},
                           {"orientation", to_json(st.orientation)}});
        j["steps"] = steps;
        r.body = j;
        if (!s.condition_i) {
          r.status = TaskStatus::input_error;
          r.message = "the t grid needs a positive value";
        } else if (!*s.agree) {
          r.status = TaskStatus::falsified;
        } else if (!s.condition_ii) {
          r.status = TaskStatus::not_applicable;
        } else {
          r.status = status_of({s.alpha_contact, s.alpha_orientation, s.alpha0_on_reeb});
        }
        break;
      }
      case TaskKind::jacobi:
        run_jacobi(t, r);
        break;
      case TaskKind::sweep: {
        const auto rows = sweep(*t.family, grid_or(t.t_grid, default_forward_grid()), t.options);
        ordered_json j = ordered_json::array();
        for (const auto& row : rows)
          j.push_back({{"t", row.t},
                       {"min_volume_coeff", row.min_volume_coeff},
                       {"max_volume_coeff", row.max_volume_coeff},
                       {"max_reeb_residual", row.max_reeb_residual}});
        r.body["rows"] = j;
        if (!t.csv_path.empty()) {
          std::ofstream out(t.csv_path);
          if (!out) throw std::invalid_argument(fmt::format("cannot write '{}'", t.csv_path));
          write_sweep_csv(out, rows);
          r.body["csv"] = t.csv_path;
        }
        r.status = TaskStatus::pass;
        break;
      }
    }
  } catch (const DegenerateFormError& e) {
    r.status = TaskStatus::failed;
    r.message = e.what();
    r.body["witness"] = to_json(e.witness());
  } catch (const ContactPairError& e) {
    r.status = TaskStatus::failed;
    r.message = e.what();
    r.body["witness"] = optional_witness(e.witness());
  } catch (const JacobiError& e) {
    r.status = TaskStatus::not_applicable;
    r.message = e.what();
  } catch (const std::invalid_argument& e) {
    r.status = TaskStatus::input_error;
    r.message = e.what();
  } catch (const std::exception& e) {
    r.status = TaskStatus::failed;
    r.message = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

RunReport run(const RunConfig& config) {
  RunReport report;
  report.seed = config.seed;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& t : config.tasks) report.tasks.push_back(run_task(t));
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.exit_code = exit_code_for(report.tasks);
  return report;
}

ordered_json to_json(const Witness& w) {
  ordered_json j;
  j["point"] = w.point;
  j["t"] = w.t ? ordered_json(*w.t) : ordered_json(nullptr);
  j["value"] = w.value;
  return j;
}

ordered_json to_json(const CheckItem& c) {
  ordered_json j;
  j["name"] = c.name;
  j["sense"] = c.sense == CheckItem::Sense::upper ? "upper" : "lower";
  j["passed"] = c.passed;
  j["value"] = c.value;
  j["threshold"] = c.threshold;
  j["banded"] = c.banded;
  j["inconclusive"] = c.inconclusive();
  j["first"] = optional_witness(c.first);
  j["worst"] = optional_witness(c.worst);
  return j;
}

ordered_json to_json(const RunReport& report, bool include_timing) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "cpair";
  j["version"] = kToolVersion;
  j["seed"] = report.seed;
  j["exit_code"] = report.exit_code;
  ordered_json tasks = ordered_json::array();
  for (const auto& t : report.tasks) {
    ordered_json tj;
    tj["label"] = t.label;
    tj["task"] = to_string(t.kind);
    tj["status"] = to_string(t.status);
    if (!t.message.empty()) tj["message"] = t.message;
    tj["result"] = t.body;
    tasks.push_back(tj);
  }
  j["tasks"] = tasks;
  if (include_timing) {
    ordered_json timing;
    timing["total_seconds"] = report.seconds;
    ordered_json per = ordered_json::array();
    for (const auto& t : report.tasks) per.push_back({{"label", t.label}, {"seconds", t.seconds}});
    timing["tasks"] = per;
    j["timing"] = timing;
  }
  return j;
}

std::string full(double x) { return fmt::format("{:.17g}", x); }

namespace {

std::string witness_text(const Witness& w) {
  std::string s = "at (";
  for (std::size_t i = 0; i < w.point.size(); ++i) s += (i ? ", " : "") + full(w.point[i]);
  s += ")";
  if (w.t) s += " t=" + full(*w.t);
  return s + " value=" + full(w.value);
}

void item_text(std::string& out, const CheckItem& c, const char* indent) {
  out += fmt::format("{}{} {} = {} ({} {})\n", indent, c.passed ? (c.inconclusive() ? "NEAR" : "ok  ") : "FAIL", c.name,
                     full(c.value), c.sense == CheckItem::Sense::upper ? "<=" : ">", full(c.threshold));
  auto located = [](const std::optional<Witness>& w) { return w && (!w->point.empty() || w->t); };
  if (!c.passed && located(c.worst)) out += fmt::format("{}     worst {}\n", indent, witness_text(*c.worst));
  if (!c.passed && located(c.first)) out += fmt::format("{}     first {}\n", indent, witness_text(*c.first));
}

void items_text(std::string& out, const ordered_json& list, const char* heading) {
  if (!list.is_array() || list.empty()) return;
  out += fmt::format("  {}:\n", heading);
  for (const auto& j : list) {
    CheckItem c;
    c.name = j["name"];
    c.sense = j["sense"] == "upper" ? CheckItem::Sense::upper : CheckItem::Sense::lower;
    c.passed = j["passed"];
    c.value = j["value"].is_number() ? j["value"].get<double>() : std::nan("");
    c.threshold = j["threshold"];
    c.banded = j["banded"];
    auto wit = [](const ordered_json& w) -> std::optional<Witness> {
      if (w.is_null()) return std::nullopt;
      Witness x;
      x.point = w["point"].get<std::vector<double>>();
      if (!w["t"].is_null()) x.t = w["t"].get<double>();
      x.value = w["value"].is_number() ? w["value"].get<double>() : std::nan("");
      return x;
    };
    c.first = wit(j["first"]);
    c.worst = wit(j["worst"]);
    item_text(out, c, "    ");
  }
}

}  // namespace

std::string to_text(const RunReport& report) {
  std::string out = fmt::format("cpair {}  seed {}\n", kToolVersion, report.seed);
  for (const auto& t : report.tasks) {
    out += fmt::format("\n[{}] {} ({})\n", to_string(t.status), t.label, to_string(t.kind));
    if (!t.message.empty()) out += fmt::format("  error: {}\n", t.message);
    const ordered_json& b = t.body;
    if (b.contains("witness") && !b["witness"].is_null()) {
      Witness w;
      w.point = b["witness"]["point"].get<std::vector<double>>();
      w.value = b["witness"]["value"].is_number() ? b["witness"]["value"].get<double>() : std::nan("");
      out += "  witness " + witness_text(w) + "\n";
    }
    switch (t.kind) {
      case TaskKind::classify:
        if (b.contains("k")) {
          out += fmt::format("  class {} (k = {}), constant {}\n", b["class"].dump(), b["k"].get<int>(),
                             b["constant"].get<bool>());
          items_text(out, ordered_json::array({b["power"], b["next"]}), "checks");
        }
        break;
      case TaskKind::verify_pair:
        if (b.contains("items")) {
          out += fmt::format("  type ({}, {}) on {} points, min |vol| {}\n", b["k"].get<int>(), b["l"].get<int>(),
                             b["points"].get<std::size_t>(), full(b["min_abs_volume"]));
          items_text(out, b["items"], "certificate");
        }
        break;
      case TaskKind::deform_forward:
      case TaskKind::deform_converse:
        if (b.contains("outcome")) {
          out += fmt::format("  {} direction: {}\n", b["direction"].get<std::string>(), b["outcome"].get<std::string>());
          items_text(out, b["hypotheses"], "hypotheses");
          items_text(out, b["conclusions"], "conclusions");
          items_text(out, b["facts"], "facts");
        }
        break;
      case TaskKind::single_deform:
        if (b.contains("condition_ii")) {
          out += fmt::format("  condition (i) {}  condition (ii) {}  agree {}\n", b["condition_i"].dump(),
                             b["condition_ii"].dump(), b["agree"].dump());
          items_text(out, ordered_json::array({b["alpha_contact"], b["alpha_orientation"], b["alpha0_on_reeb"]}),
                     "checks");
          if (!b["violation"].is_null()) {
            Witness w;
            w.point = b["violation"]["point"].get<std::vector<double>>();
            if (!b["violation"]["t"].is_null()) w.t = b["violation"]["t"].get<double>();
            w.value = b["violation"]["value"];
            out += "  violation " + witness_text(w) + "\n";
          }
        }
        break;
      case TaskKind::jacobi:
        if (b.contains("levels")) {
          for (const auto& lv : b["levels"])
            out += fmt::format("  N={:<4} unit {}  jacobi {}  consistency {}\n", lv["resolution"].get<int>(),
                               full(lv["unit_bracket_defect"]), full(lv["jacobi_identity_defect"]),
                               full(lv["bivector_consistency_defect"]));
          items_text(out, b["items"], "checks");
        }
        break;
      case TaskKind::sweep:
        if (b.contains("rows")) {
          out += "  t, min volume coeff, max volume coeff, max Reeb residual\n";
          for (const auto& row : b["rows"])
            out += fmt::format("  {}, {}, {}, {}\n", full(row["t"]), full(row["min_volume_coeff"]),
                               full(row["max_volume_coeff"]), full(row["max_reeb_residual"]));
          if (b.contains("csv")) out += fmt::format("  csv written to {}\n", b["csv"].get<std::string>());
        }
        break;
    }
  }
  out += fmt::format("\nexit code {}\n", report.exit_code);
  return out;
}

}  // namespace cpair
