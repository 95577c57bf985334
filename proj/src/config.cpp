#include "cpair/config.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace cpair {

using nlohmann::json;

namespace {

constexpr TaskKind kAllTasks[] = {TaskKind::classify,      TaskKind::verify_pair, TaskKind::deform_forward,
                                  TaskKind::deform_converse, TaskKind::single_deform, TaskKind::jacobi,
                                  TaskKind::sweep};

std::string join(const std::vector<std::string>& errors) {
  std::string s = "invalid configuration:";
  for (const auto& e : errors) s += "\n  " + e;
  return s;
}

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

class Builder {
 public:
  explicit Builder(const ConfigOverrides& o) : overrides_(o) {}

  std::vector<std::string> errors;

  void error(const std::string& where, const std::string& what) { errors.push_back(fmt::format("{}: {}", where, what)); }

  RunConfig build(const json& doc) {
    RunConfig cfg;
    if (!doc.is_object()) {
      error("config", "top level must be an object");
      return cfg;
    }
    static const std::vector<std::string> known = {"schema_version", "seed", "tol", "samples", "t_grid",
                                                   "builtin", "models", "forms", "tasks"};
    for (const auto& [key, _] : doc.items())
      if (std::find(known.begin(), known.end(), key) == known.end()) error("config", fmt::format("unknown key '{}'", key));

    if (!doc.contains("schema_version")) {
      error("schema_version", "missing");
    } else if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion) {
      error("schema_version", fmt::format("expected {}", kSchemaVersion));
    }
    cfg.seed = overrides_.seed.value_or(integer(doc, "seed", "seed", 1));
    if (overrides_.tol) {
      cfg.tol = overrides_.tol;
    } else if (doc.contains("tol")) {
      cfg.tol = number(doc["tol"], "tol");
    }
    if (cfg.tol && !(*cfg.tol > 0.0)) error("tol", "must be positive");
    seed_ = cfg.seed;
    global_tol_ = cfg.tol;
    if (doc.contains("samples")) global_samples_ = samples(doc["samples"], "samples");
    if (doc.contains("t_grid")) global_t_ = numbers(doc["t_grid"], "t_grid");

    std::optional<Builtin> builtin;
    if (doc.contains("builtin")) builtin = load_builtin(doc["builtin"]);
    if (doc.contains("models")) load_models(doc["models"]);
    if (doc.contains("forms")) load_forms(doc["forms"]);

    if (doc.contains("tasks")) {
      const json& tasks = doc["tasks"];
      if (!tasks.is_array()) {
        error("tasks", "must be an array");
      } else {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          auto t = task(tasks[i], fmt::format("tasks[{}]", i));
          if (t) cfg.tasks.push_back(std::move(*t));
        }
      }
    } else if (builtin) {
      json t = {{"task", default_task(*builtin)}};
      auto tc = task(t, "builtin");
      if (tc) cfg.tasks.push_back(std::move(*tc));
    } else {
      error("tasks", "missing (and no builtin to derive a default task from)");
    }
    if (doc.contains("tasks") && cfg.tasks.empty() && errors.empty()) error("tasks", "empty");
    return cfg;
  }

  // Task for a registry example without a document.
  RunConfig build_builtin(const std::string& name, std::optional<TaskKind> kind) {
    RunConfig cfg;
    cfg.seed = overrides_.seed.value_or(1);
    cfg.tol = overrides_.tol;
    seed_ = cfg.seed;
    global_tol_ = cfg.tol;
    const auto b = load_builtin(name);
    if (b) {
      json t = {{"task", kind ? to_string(*kind) : default_task(*b)}};
      auto tc = task(t, name);
      if (tc) cfg.tasks.push_back(std::move(*tc));
    }
    return cfg;
  }

 private:
  const ConfigOverrides& overrides_;
  std::uint64_t seed_ = 1;
  std::optional<double> global_tol_;
  std::optional<SampleSpec> global_samples_;
  std::optional<std::vector<double>> global_t_;
  std::map<std::string, ModelPtr> models_;
  std::map<std::string, FormField> forms_;
  std::optional<DeformationFamily> builtin_family_;

  static std::string default_task(const Builtin& b) {
    if (b.family) return "deform-forward";
    if (b.single) return "single-deform";
    if (b.pair) return "verify-pair";
    return "classify";
  }

  double number(const json& j, const std::string& where) {
    if (!j.is_number()) {
      error(where, "expected a number");
      return 0.0;
    }
    return j.get<double>();
  }

  std::int64_t integer(const json& obj, const std::string& key, const std::string& where, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& j = obj[key];
    if (!j.is_number_integer()) {
      error(where, "expected an integer");
      return fallback;
    }
    return j.get<std::int64_t>();
  }

  std::string string(const json& obj, const std::string& key, const std::string& where, bool required = true) {
    if (!obj.contains(key)) {
      if (required) error(where, fmt::format("missing '{}'", key));
      return {};
    }
    if (!obj[key].is_string()) {
      error(fmt::format("{}.{}", where, key), "expected a string");
      return {};
    }
    return obj[key].get<std::string>();
  }

  std::vector<double> numbers(const json& j, const std::string& where) {
    std::vector<double> out;
    if (!j.is_array()) {
      error(where, "expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], fmt::format("{}[{}]", where, i)));
    return out;
  }

  std::optional<SampleSpec> samples(const json& j, const std::string& where) {
    if (!j.is_object()) {
      error(where, "expected an object");
      return std::nullopt;
    }
    const std::string mode = string(j, "mode", where);
    if (mode == "grid") {
      const auto r = integer(j, "per_axis", where + ".per_axis", 0);
      if (r < 0) error(where + ".per_axis", "must be >= 0");
      return SampleSpec::grid(static_cast<int>(r));
    }
    if (mode == "random") {
      const auto count = integer(j, "count", where + ".count", 4096);
      if (count <= 0) error(where + ".count", "must be positive");
      const auto seed = integer(j, "seed", where + ".seed", static_cast<std::int64_t>(seed_));
      return SampleSpec::random(static_cast<std::size_t>(std::max<std::int64_t>(count, 1)),
                                overrides_.seed.value_or(static_cast<std::uint64_t>(seed)));
    }
    if (!mode.empty()) error(where + ".mode", fmt::format("unknown sampling mode '{}'", mode));
    return std::nullopt;
  }

  std::optional<Builtin> load_builtin(const json& j) {
    if (!j.is_string()) {
      error("builtin", "expected a registry name");
      return std::nullopt;
    }
    try {
      Builtin b = resolve_builtin(j.get<std::string>());
      models_["builtin"] = b.model;
      if (b.form) forms_["form"] = *b.form;
      if (b.single) {
        forms_["alpha0"] = b.single->first;
        forms_["alpha"] = b.single->second;
      }
      if (b.pair) {
        forms_["alpha"] = b.pair->first;
        forms_["beta"] = b.pair->second;
      }
      if (b.family) {
        forms_["alpha0"] = b.family->alpha0;
        forms_["beta0"] = b.family->beta0;
        builtin_family_ = b.family;
      }
      pair_type_ = {b.info.k, b.info.l};
      return b;
    } catch (const std::exception& e) {
      error("builtin", e.what());
      return std::nullopt;
    }
  }
  std::pair<int, int> pair_type_{-1, -1};

  ModelPtr model_ref(const json& obj, const std::string& key, const std::string& where) {
    const std::string name = string(obj, key, where);
    if (name.empty()) return nullptr;
    const auto it = models_.find(name);
    if (it == models_.end()) {
      error(fmt::format("{}.{}", where, key), fmt::format("unresolved model '{}'", name));
      return nullptr;
    }
    return it->second;
  }

  std::optional<FormField> form_ref(const json& obj, const std::string& key, const std::string& where,
                                    bool required = true) {
    if (!obj.contains(key)) {
      if (required) error(where, fmt::format("missing '{}'", key));
      return std::nullopt;
    }
    const std::string name = string(obj, key, where);
    if (name.empty()) return std::nullopt;
    const auto it = forms_.find(name);
    if (it == forms_.end()) {
      error(fmt::format("{}.{}", where, key), fmt::format("unresolved form '{}'", name));
      return std::nullopt;
    }
    return it->second;
  }

  void load_models(const json& list) {
    if (!list.is_array()) {
      error("models", "must be an array");
      return;
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = fmt::format("models[{}]", i);
      const json& m = list[i];
      if (!m.is_object()) {
        error(where, "expected an object");
        continue;
      }
      const std::string name = string(m, "name", where);
      const std::string kind = string(m, "kind", where);
      if (name.empty() || kind.empty()) continue;
      if (models_.count(name)) error(where + ".name", fmt::format("duplicate model '{}'", name));
      ModelPtr model;
      try {
        if (kind == "lie") {
          model = lie_model(m, where, name);
        } else if (kind == "chart") {
          model = chart_model(m, where, name);
        } else if (kind == "product") {
          const ModelPtr left = model_ref(m, "left", where), right = model_ref(m, "right", where);
          const auto coarse = integer(m, "coarse_resolution", where + ".coarse_resolution", 8);
          if (coarse < 1) error(where + ".coarse_resolution", "must be positive");
          if (left && right && coarse >= 1) model = Model::product(name, left, right, static_cast<int>(coarse));
        } else if (kind == "heisenberg3") {
          model = Model::heisenberg3();
        } else if (kind == "torus") {
          const auto n = integer(m, "dim", where + ".dim", 3), r = integer(m, "resolution", where + ".resolution", 32);
          if (n < 1 || r < 1) error(where, "dim and resolution must be positive");
          else model = Model::torus(static_cast<int>(n), static_cast<int>(r));
        } else if (kind == "darboux") {
          const auto k = integer(m, "k", where + ".k", 1), r = integer(m, "resolution", where + ".resolution", 32);
          if (k < 1 || r < 1) error(where, "k and resolution must be positive");
          else model = Model::darboux(static_cast<int>(k), static_cast<int>(r));
        } else {
          error(where + ".kind", fmt::format("unknown model kind '{}'", kind));
        }
      } catch (const std::exception& e) {
        error(where, e.what());
      }
      if (model) models_[name] = model;
    }
  }

  ModelPtr lie_model(const json& m, const std::string& where, const std::string& name) {
    const auto n = integer(m, "dim", where + ".dim", 0);
    if (n < 1) {
      error(where + ".dim", "missing or not positive");
      return nullptr;
    }
    StructureConstants c(static_cast<int>(n));
    const std::size_t before = errors.size();
    if (m.contains("brackets")) {
      const json& b = m["brackets"];
      if (!b.is_array()) error(where + ".brackets", "expected an array of [i, j, k, c]");
      for (std::size_t r = 0; b.is_array() && r < b.size(); ++r) {
        const std::string w = fmt::format("{}.brackets[{}]", where, r);
        if (!b[r].is_array() || b[r].size() != 4) {
          error(w, "expected [i, j, k, c]");
          continue;
        }
        int idx[3];
        bool ok = true;
        for (int q = 0; q < 3; ++q) {
          if (!b[r][q].is_number_integer() || b[r][q].get<int>() < 0 || b[r][q].get<int>() >= n) {
            error(w, fmt::format("index {} out of range 0..{}", q, n - 1));
            ok = false;
          } else {
            idx[q] = b[r][q].get<int>();
          }
        }
        const double v = number(b[r][3], w + "[3]");
        if (ok && idx[0] == idx[1]) error(w, "[e_i, e_i] must vanish");
        else if (ok) c.set_bracket(idx[0], idx[1], idx[2], v);
      }
    }
    if (errors.size() != before) return nullptr;
    bool check = true;
    if (m.contains("check_jacobi")) check = m["check_jacobi"].is_boolean() && m["check_jacobi"].get<bool>();
    return Model::lie_group(name, std::move(c), check);
  }

  ModelPtr chart_model(const json& m, const std::string& where, const std::string& name) {
    if (!m.contains("axes") || !m["axes"].is_array() || m["axes"].empty()) {
      error(where + ".axes", "expected a non-empty array");
      return nullptr;
    }
    std::vector<Axis> axes;
    const std::size_t before = errors.size();
    for (std::size_t i = 0; i < m["axes"].size(); ++i) {
      const json& a = m["axes"][i];
      const std::string w = fmt::format("{}.axes[{}]", where, i);
      if (!a.is_object()) {
        error(w, "expected an object");
        continue;
      }
      const std::string kind = string(a, "kind", w);
      const auto res = integer(a, "resolution", w + ".resolution", 32);
      if (res < 1) error(w + ".resolution", "must be positive");
      if (kind == "periodic") {
        axes.push_back(Axis::periodic(static_cast<int>(res)));
      } else if (kind == "box") {
        const double lo = a.contains("lo") ? number(a["lo"], w + ".lo") : -1.0;
        const double hi = a.contains("hi") ? number(a["hi"], w + ".hi") : 1.0;
        if (!(hi > lo)) error(w, "needs lo < hi");
        axes.push_back(Axis::box(lo, hi, static_cast<int>(res)));
      } else if (!kind.empty()) {
        error(w + ".kind", fmt::format("unknown axis kind '{}' (periodic | box)", kind));
      }
    }
    if (errors.size() != before) return nullptr;
    return Model::chart(name, std::move(axes));
  }

  void load_forms(const json& list) {
    if (!list.is_array()) {
      error("forms", "must be an array");
      return;
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = fmt::format("forms[{}]", i);
      const json& f = list[i];
      if (!f.is_object()) {
        error(where, "expected an object");
        continue;
      }
      const std::string name = string(f, "name", where);
      if (!name.empty() && forms_.count(name)) error(where + ".name", fmt::format("duplicate form '{}'", name));
      const ModelPtr model = model_ref(f, "model", where);
      if (name.empty() || !model) continue;
      if (f.contains("pullback")) {
        const std::string side = string(f, "pullback", where);
        const auto of = form_ref(f, "form", where);
        if (side != "left" && side != "right") {
          error(where + ".pullback", "expected 'left' or 'right'");
          continue;
        }
        if (!of) continue;
        if (!model->is_product()) {
          error(where + ".model", "pullbacks need a product model");
          continue;
        }
        const ModelPtr factor = side == "left" ? model->as_product().left : model->as_product().right;
        if (of->model() != factor) {
          error(where + ".form", fmt::format("form does not live on the {} factor", side));
          continue;
        }
        forms_[name] = side == "left" ? pullback_left(model, *of) : pullback_right(model, *of);
        continue;
      }
      const auto degree = integer(f, "degree", where + ".degree", 1);
      if (degree < 0 || degree > model->dim()) {
        error(where + ".degree", fmt::format("must be in 0..{}", model->dim()));
        continue;
      }
      if (!f.contains("coefficients") || !f["coefficients"].is_array()) {
        error(where + ".coefficients", "expected an array");
        continue;
      }
      const json& c = f["coefficients"];
      const std::size_t expected = binomial(model->dim(), static_cast<int>(degree));
      if (c.size() != expected) {
        error(where + ".coefficients",
              fmt::format("dimension mismatch: a {}-form on a {}-dimensional model has {} coefficients, got {}", degree,
                          model->dim(), expected, c.size()));
        continue;
      }
      std::vector<std::string> coeffs;
      bool ok = true;
      for (std::size_t q = 0; q < c.size(); ++q) {
        const std::string w = fmt::format("{}.coefficients[{}]", where, q);
        if (c[q].is_number()) {
          coeffs.push_back(fmt::format("{:.17g}", c[q].get<double>()));
        } else if (c[q].is_string() && !model->is_lie()) {
          coeffs.push_back(c[q].get<std::string>());
        } else {
          error(w, model->is_lie() ? "invariant forms take numeric coefficients" : "expected a string or number");
          ok = false;
          continue;
        }
        try {
          const Expr e = parse(coeffs.back(), model->dim());
          for (int a = 0; a < model->dim(); ++a)
            if (!model->axis(a).is_coordinate() && !(e.partial(a).is_constant() && e.partial(a).constant_value() == 0.0)) {
              error(w, fmt::format("depends on x{}, which is not a chart coordinate", a));
              ok = false;
              break;
            }
        } catch (const ParseError& e) {
          error(w, fmt::format("parse error at position {}: {}", e.position(), e.detail()));
          ok = false;
        }
      }
      if (ok) forms_[name] = FormField::parse(model, static_cast<int>(degree), coeffs);
    }
  }

  void check_pair_dims(const ModelPtr& model, int k, int l, const std::string& where) {
    if (k < 0 || l < 0) {
      error(where, "needs k >= 0 and l >= 0");
      return;
    }
    if (model && 2 * k + 2 * l + 2 != model->dim())
      error(where, fmt::format("dimension mismatch: type ({}, {}) needs 2k+2l+2 = {} dimensions, model has {}", k, l,
                               2 * k + 2 * l + 2, model->dim()));
  }

  std::optional<TaskConfig> task(const json& j, const std::string& where) {
    if (!j.is_object()) {
      error(where, "expected an object");
      return std::nullopt;
    }
    const std::size_t before = errors.size();
    TaskConfig t;
    const std::string kind = string(j, "task", where);
    const auto parsed = task_kind_from_string(kind);
    if (!parsed) {
      if (!kind.empty()) error(where + ".task", fmt::format("unknown task '{}'", kind));
      return std::nullopt;
    }
    t.kind = *parsed;
    t.label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : kind;
    t.options.tol = global_tol_.value_or(0.0);
    if (!overrides_.tol && j.contains("tol")) t.options.tol = number(j["tol"], where + ".tol");
    t.options.samples = global_samples_;
    if (j.contains("samples")) t.options.samples = samples(j["samples"], where + ".samples");
    if (overrides_.t_grid) t.t_grid = *overrides_.t_grid;
    else if (j.contains("t_grid")) t.t_grid = numbers(j["t_grid"], where + ".t_grid");
    else if (global_t_) t.t_grid = *global_t_;
    t.k = static_cast<int>(integer(j, "k", where + ".k", pair_type_.first));
    t.l = static_cast<int>(integer(j, "l", where + ".l", pair_type_.second));

    switch (t.kind) {
      case TaskKind::classify:
        t.form = j.contains("form") ? form_ref(j, "form", where) : form_or_builtin("form", where);
        if (t.form && t.form->degree() != 1) error(where + ".form", "classification needs a 1-form");
        break;
      case TaskKind::verify_pair:
      case TaskKind::jacobi:
        t.alpha = j.contains("alpha") ? form_ref(j, "alpha", where) : form_or_builtin("alpha", where);
        t.beta = j.contains("beta") ? form_ref(j, "beta", where) : form_or_builtin("beta", where);
        if (t.alpha && t.beta) {
          if (t.alpha->model() != t.beta->model()) error(where, "alpha and beta live on different models");
          check_pair_dims(t.alpha->model(), t.k, t.l, where);
        }
        if (t.kind == TaskKind::jacobi) jacobi_fields(j, where, t);
        break;
      case TaskKind::single_deform:
        t.alpha0 = j.contains("alpha0") ? form_ref(j, "alpha0", where) : form_or_builtin("alpha0", where);
        t.alpha = j.contains("alpha") ? form_ref(j, "alpha", where) : form_or_builtin("alpha", where);
        if (t.alpha0 && t.alpha && t.alpha0->model() != t.alpha->model()) error(where, "alpha0 and alpha live on different models");
        if (t.alpha && t.alpha->dim() % 2 == 0) error(where, "dimension mismatch: the single-form criterion needs odd dimension");
        break;
      case TaskKind::deform_forward:
      case TaskKind::deform_converse:
      case TaskKind::sweep:
        family(j, where, t);
        if (t.kind == TaskKind::sweep) {
          t.csv_path = string(j, "csv", where, false);
        }
        break;
    }
    if (errors.size() != before) return std::nullopt;
    return t;
  }

  std::optional<FormField> form_or_builtin(const std::string& name, const std::string& where) {
    const auto it = forms_.find(name);
    if (it != forms_.end()) return it->second;
    if (builtin_family_ && name == "alpha") return builtin_family_->alpha;
    if (builtin_family_ && name == "beta") return builtin_family_->beta;
    error(where, fmt::format("missing '{}'", name));
    return std::nullopt;
  }

  void family(const json& j, const std::string& where, TaskConfig& t) {
    const bool explicit_forms = j.contains("alpha0") || j.contains("beta0") || j.contains("alpha") || j.contains("beta");
    if (!explicit_forms && builtin_family_) {
      t.family = builtin_family_;
      if (j.contains("k") || j.contains("l"))
        check_pair_dims(t.family->model, t.k, t.l, where);
      t.k = t.family->k;
      t.l = t.family->l;
      return;
    }
    const auto a0 = form_ref(j, "alpha0", where), b0 = form_ref(j, "beta0", where), a = form_ref(j, "alpha", where),
               b = form_ref(j, "beta", where);
    if (!(a0 && b0 && a && b)) return;
    const ModelPtr m = a->model();
    if (a0->model() != m || b0->model() != m || b->model() != m) {
      error(where, "family forms live on different models");
      return;
    }
    check_pair_dims(m, t.k, t.l, where);
    if (2 * t.k + 2 * t.l + 2 != m->dim()) return;
    try {
      t.family = DeformationFamily::make(*a0, *b0, *a, *b, t.k, t.l, t.options);
    } catch (const std::exception& e) {
      error(where, e.what());
    }
  }

  void jacobi_fields(const json& j, const std::string& where, TaskConfig& t) {
    const std::string side = j.contains("side") ? string(j, "side", where) : "alpha";
    if (side == "alpha") t.side = SideTag::alpha;
    else if (side == "beta") t.side = SideTag::beta;
    else error(where + ".side", "expected 'alpha' or 'beta'");
    if (j.contains("resolutions")) {
      for (double r : numbers(j["resolutions"], where + ".resolutions")) {
        if (r < 3 || r != std::floor(r)) error(where + ".resolutions", "entries must be integers >= 3");
        t.resolutions.push_back(static_cast<int>(r));
      }
    } else {
      t.resolutions = {16, 32};
    }
    if (t.alpha) {
      const Model& m = *t.alpha->model();
      if (j.contains("base")) {
        t.base = numbers(j["base"], where + ".base");
        if (static_cast<int>(t.base.size()) != m.dim())
          error(where + ".base", fmt::format("dimension mismatch: expected {} coordinates", m.dim()));
      } else {
        for (const Axis& a : m.axes()) t.base.push_back(a.kind == AxisKind::box ? 0.5 * (a.lo + a.hi) : 0.0);
      }
    }
  }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors) : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

const char* to_string(TaskKind k) {
  switch (k) {
    case TaskKind::classify: return "classify";
    case TaskKind::verify_pair: return "verify-pair";
    case TaskKind::deform_forward: return "deform-forward";
    case TaskKind::deform_converse: return "deform-converse";
    case TaskKind::single_deform: return "single-deform";
    case TaskKind::jacobi: return "jacobi";
    case TaskKind::sweep: return "sweep";
  }
  return "?";
}

std::optional<TaskKind> task_kind_from_string(const std::string& s) {
  for (TaskKind k : kAllTasks)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({fmt::format("config: JSON parse error at byte {}: {}", e.byte, e.what())});
  }
  Builder b(overrides);
  RunConfig cfg = b.build(doc);
  if (!b.errors.empty()) throw ConfigError(b.errors);
  return cfg;
}

RunConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError({fmt::format("{}: cannot read file", path)});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

RunConfig builtin_config(const std::string& name, std::optional<TaskKind> task, const ConfigOverrides& overrides) {
  Builder b(overrides);
  RunConfig cfg = b.build_builtin(name, task);
  if (!b.errors.empty()) throw ConfigError(b.errors);
  return cfg;
}

std::vector<double> parse_t_grid(const std::string& list) {
  std::vector<double> out;
  std::vector<std::string> errors;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      errors.push_back(fmt::format("--t-grid: '{}' is not a number", item));
    }
  }
  if (out.empty() && errors.empty()) errors.push_back("--t-grid: empty list");
  if (!errors.empty()) throw ConfigError(errors);
  return out;
}

}  // namespace cpair
