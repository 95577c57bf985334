#include "cpair/deformation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

namespace cpair {

namespace {

std::vector<double> as_vec(std::span<const double> p) { return {p.begin(), p.end()}; }

double max_abs(const VectorValue& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct FamilySample {
  FormValue a0, b0, a, b, da, db;
};

class FamilySampler {
 public:
  explicit FamilySampler(const DeformationFamily& f)
      : f_(f), da_(exterior_derivative(f.alpha)), db_(exterior_derivative(f.beta)) {}
  FamilySample at(std::span<const double> p) const {
    return {f_.alpha0.at(p), f_.beta0.at(p), f_.alpha.at(p), f_.beta.at(p), da_.at(p), db_.at(p)};
  }

 private:
  const DeformationFamily& f_;
  FormField da_, db_;
};

struct Abc {
  double a = 0, b = 0, c = 0;
};

// Raw coefficients of the three wedge expressions in the coordinate volume.
Abc raw_abc(const FamilySample& s, int k, int l) {
  const FormValue p = wedge_power(s.da, k), q = wedge_power(s.db, l);
  const FormValue l0 = wedge(s.a0, p), l1 = wedge(s.a, p);
  const FormValue r0 = wedge(s.b0, q), r1 = wedge(s.b, q);
  return {wedge(l1, r1).top(), wedge(l0, r1).top() + wedge(l1, r0).top(), wedge(l0, r0).top()};
}

double omega_coeff(const std::optional<FormField>& omega, std::span<const double> p) {
  return omega ? omega->at(p).top() : 1.0;
}

void check_omega(const std::optional<FormField>& omega, const Model& model) {
  if (omega && (omega->degree() != model.dim() || omega->model().get() != &model))
    throw std::invalid_argument("reference volume must be a top-degree form on the family's model");
}

CheckItem with_t(CheckItem item, double t) {
  if (item.first) item.first->t = t;
  if (item.worst) item.worst->t = t;
  return item;
}

CheckItem prefixed(CheckItem item, const std::string& prefix) {
  item.name = prefix + item.name;
  return item;
}

std::vector<CheckItem> prefixed(const std::vector<CheckItem>& items, const std::string& prefix) {
  std::vector<CheckItem> out;
  for (const CheckItem& c : items) out.push_back(prefixed(c, prefix));
  return out;
}

// Merges equally named items across t values; witnesses carry their t.
class StepMerger {
 public:
  void add(const std::vector<CheckItem>& items, double t) {
    if (trackers_.empty())
      for (const CheckItem& c : items) trackers_.emplace_back(c.name, c.sense, c.threshold);
    for (std::size_t i = 0; i < items.size(); ++i) trackers_[i].merge(with_t(items[i], t));
  }
  std::vector<CheckItem> items() const {
    std::vector<CheckItem> out;
    for (const Tracker& tr : trackers_) out.push_back(tr.item());
    return out;
  }

 private:
  std::vector<Tracker> trackers_;
};

// The four pairings of the closed forms with a Reeb pair.
std::vector<CheckItem> compatibility_items(const DeformationFamily& f, const ContactPairCertificate& cert, double tol) {
  Tracker items[4] = {upper("alpha0(E_alpha)", tol), upper("alpha0(E_beta)", tol), upper("beta0(E_alpha)", tol),
                      upper("beta0(E_beta)", tol)};
  for (std::size_t i = 0; i < cert.points.size(); ++i) {
    const auto p = cert.points[i];
    const FormValue a0 = f.alpha0.at(p), b0 = f.beta0.at(p);
    const VectorValue& ea = cert.e_alpha[i];
    const VectorValue& eb = cert.e_beta[i];
    auto rel = [](const FormValue& w, const VectorValue& e) {
      return std::abs(w(e)) / std::max(1.0, norm_inf(w) * max_abs(e));
    };
    items[0].observe(rel(a0, ea), p);
    items[1].observe(rel(a0, eb), p);
    items[2].observe(rel(b0, ea), p);
    items[3].observe(rel(b0, eb), p);
  }
  return {items[0].item(), items[1].item(), items[2].item(), items[3].item()};
}

Outcome decide(const std::vector<CheckItem>& hyps, const std::vector<CheckItem>& concl) {
  if (!all_passed(hyps)) return Outcome::not_applicable;
  return all_passed(concl) ? Outcome::pass : Outcome::falsified;
}

}  // namespace

DeformationFamily DeformationFamily::make(FormField alpha0, FormField beta0, FormField alpha, FormField beta, int k,
                                          int l, const CheckOptions& opts) {
  for (const FormField* w : {&alpha0, &beta0, &alpha, &beta})
    if (w->degree() != 1) throw InvalidFamily("family forms must be 1-forms");
  const ModelPtr model = alpha.model();
  for (const FormField* w : {&alpha0, &beta0, &beta})
    if (w->model() != model) throw InvalidFamily("family forms live on different models");
  if (k < 0 || l < 0 || 2 * k + 2 * l + 2 != model->dim())
    throw InvalidFamily(fmt::format("type ({}, {}) needs dimension {}, model has {}", k, l, 2 * k + 2 * l + 2,
                                    model->dim()));

  const double tol = resolve_tol(*model, opts);
  const PointSet pts = resolve_points(*model, opts);
  const FormField da0 = exterior_derivative(alpha0), db0 = exterior_derivative(beta0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = pts[i];
    const FormValue a0 = alpha0.at(p), b0 = beta0.at(p);
    const double ra = norm_inf(da0.at(p)), rb = norm_inf(db0.at(p));
    if (ra > tol * std::max(1.0, norm_inf(a0))) throw InvalidFamily("alpha0 is not closed", Witness{as_vec(p), {}, ra});
    if (rb > tol * std::max(1.0, norm_inf(b0))) throw InvalidFamily("beta0 is not closed", Witness{as_vec(p), {}, rb});
    const double indep = norm_inf(wedge(a0, b0));
    if (!(indep > tol * norm_inf(a0) * norm_inf(b0)))
      throw InvalidFamily("alpha0 and beta0 are linearly dependent", Witness{as_vec(p), {}, indep});
  }
  return {model, std::move(alpha0), std::move(beta0), std::move(alpha), std::move(beta), k, l};
}

std::pair<FormField, FormField> family_at(const DeformationFamily& f, double t) {
  return {f.alpha0 + t * f.alpha, f.beta0 + t * f.beta};
}

ABCReport compute_abc(const DeformationFamily& f, const std::optional<FormField>& omega, const CheckOptions& opts) {
  check_omega(omega, *f.model);
  const FamilySampler sampler(f);
  ABCReport r;
  r.points = resolve_points(*f.model, opts);
  const double tol = resolve_tol(*f.model, opts);
  const double inf = std::numeric_limits<double>::infinity();
  r.min_a = r.min_b = inf;
  r.max_a = r.max_b = -inf;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto p = r.points[i];
    const double w = omega_coeff(omega, p);
    if (!(std::abs(w) > tol))
      throw std::invalid_argument(fmt::format("reference volume vanishes at sample {}", i));
    const Abc v = raw_abc(sampler.at(p), f.k, f.l);
    r.a.push_back(v.a / w);
    r.b.push_back(v.b / w);
    r.c.push_back(v.c / w);
    r.min_a = std::min(r.min_a, r.a.back());
    r.max_a = std::max(r.max_a, r.a.back());
    r.min_b = std::min(r.min_b, r.b.back());
    r.max_b = std::max(r.max_b, r.b.back());
    r.max_abs_b = std::max(r.max_abs_b, std::abs(r.b.back()));
    r.max_abs_c = std::max(r.max_abs_c, std::abs(r.c.back()));
  }
  return r;
}

double volume_identity_defect(const DeformationFamily& f, const std::vector<double>& t_samples,
                              const std::optional<FormField>& omega, const CheckOptions& opts) {
  const ABCReport abc = compute_abc(f, omega, opts);
  const FamilySampler sampler(f);
  const int k = f.k, l = f.l;
  double defect = 0.0;
  for (std::size_t i = 0; i < abc.points.size(); ++i) {
    const auto p = abc.points[i];
    const FamilySample s = sampler.at(p);
    const double w = omega_coeff(omega, p);
    for (double t : t_samples) {
      const FormValue at = s.a0 + t * s.a, bt = s.b0 + t * s.b;
      const FormValue dat = t * s.da, dbt = t * s.db;
      const double lhs = wedge(wedge(at, wedge_power(dat, k)), wedge(bt, wedge_power(dbt, l))).top();
      const double tk = std::pow(t, k + l);
      const double rhs = tk * (t * t * abc.a[i] + t * abc.b[i] + abc.c[i]) * w;
      const double scale = std::max(
          {1.0, std::abs(tk) * (t * t * std::abs(abc.a[i]) + std::abs(t * abc.b[i]) + std::abs(abc.c[i])) * std::abs(w),
           volume_scale({at, bt, dat, dbt}, k, l)});
      defect = std::max(defect, std::abs(lhs - rhs) / scale);
    }
  }
  return defect;
}

OneFormSource field_source(const FormField& w) {
  const auto f = std::make_shared<FormField>(w);
  return [f](std::span<const double> p) { return f->at(p); };
}

OneFormSource random_source(int n, std::uint64_t seed) {
  const auto state = std::make_shared<std::uint64_t>(seed);
  return [state, n](std::span<const double>) {
    std::vector<double> c(n);
    for (double& x : c) x = 2.0 * uniform01(*state) - 1.0;
    return FormValue::covector(c);
  };
}

LemmaDefects lemma_p1_p2_check(const FormField& alpha, const FormField& beta, int k, int l, const OneFormSource& w,
                               std::size_t count, const CheckOptions& opts) {
  const PairSampler sampler(alpha, beta);
  const PointSet pts = resolve_points(*alpha.model(), opts);
  LemmaDefects d;
  for (std::size_t i = 0; i < count; ++i) {
    const auto p = pts[i % pts.size()];
    const PairSample s = sampler.at(p);
    const ReebSolve r = solve_reeb(s);
    const FormValue om = w(p);
    const FormValue dak = wedge_power(s.dalpha, k), dbl = wedge_power(s.dbeta, l);
    const double vol = volume_coefficient(s, k, l);
    const double base = norm_inf(om) * std::pow(norm_inf(s.dalpha), k) * std::pow(norm_inf(s.dbeta), l);

    const double lhs1 = wedge(wedge(om, dak), wedge(s.beta, dbl)).top();
    const double rhs1 = om(r.e_alpha) * vol;
    d.p1 = std::max(d.p1, std::abs(lhs1 - rhs1) / std::max({1.0, base * norm_inf(s.beta), std::abs(rhs1)}));

    const double lhs2 = wedge(wedge(wedge(om, s.alpha), dak), dbl).top();
    const double rhs2 = -om(r.e_beta) * vol;
    d.p2 = std::max(d.p2, std::abs(lhs2 - rhs2) / std::max({1.0, base * norm_inf(s.alpha), std::abs(rhs2)}));
  }
  return d;
}

double lemma_p3_check(const FormField& alpha, const FormField& beta, int k, int l, const OneFormSource& w,
                      const OneFormSource& v, std::size_t count, bool project, const CheckOptions& opts) {
  const PairSampler sampler(alpha, beta);
  const PointSet pts = resolve_points(*alpha.model(), opts);
  double defect = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto p = pts[i % pts.size()];
    const PairSample s = sampler.at(p);
    FormValue om = w(p), ob = v(p);
    if (project) {
      const VectorValue eb = solve_reeb(s).e_beta;
      om = om - om(eb) * s.beta;
      ob = ob - ob(eb) * s.beta;
    }
    const FormValue dak = wedge_power(s.dalpha, k), dbl = wedge_power(s.dbeta, l);
    const double val = wedge(wedge(om, dak), wedge(ob, dbl)).top();
    const double scale =
        norm_inf(om) * norm_inf(ob) * std::pow(norm_inf(s.dalpha), k) * std::pow(norm_inf(s.dbeta), l);
    defect = std::max(defect, std::abs(val) / std::max(1.0, scale));
  }
  return defect;
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::not_applicable: return "not_applicable";
    case Outcome::falsified: return "falsified";
  }
  return "?";
}

std::vector<double> default_forward_grid() { return {-10, -1, -0.1, -0.01, 0.01, 0.1, 1, 10}; }
std::vector<double> default_converse_grid() { return {0.01, 0.1, 1, 10}; }

TheoremVerdict verify_forward(const DeformationFamily& f, const std::vector<double>& t_grid, const CheckOptions& opts) {
  TheoremVerdict v;
  v.direction = "forward";
  const double tol = resolve_tol(*f.model, opts);
  const ContactPairCertificate cert = verify_contact_pair(f.alpha, f.beta, f.k, f.l, opts);
  v.hypotheses = prefixed(cert.items(), "pair: ");
  for (const CheckItem& c : compatibility_items(f, cert, tol)) v.hypotheses.push_back(c);

  StepMerger merged;
  for (double t : t_grid) {
    if (t == 0.0) continue;
    const auto [at, bt] = family_at(f, t);
    const ContactPairCertificate ct = verify_contact_pair(at, bt, f.k, f.l, opts);
    Tracker scaling = upper("reeb_scaling", tol);
    for (std::size_t i = 0; i < ct.points.size(); ++i) {
      const VectorValue xa = cert.e_alpha[i] / t, xb = cert.e_beta[i] / t;
      const double da = max_abs(ct.e_alpha[i] - xa) / std::max(1.0, max_abs(xa));
      const double db = max_abs(ct.e_beta[i] - xb) / std::max(1.0, max_abs(xb));
      scaling.observe(std::max(da, db), ct.points[i], t);
    }
    std::vector<CheckItem> items = prefixed(ct.items(), "pair_t: ");
    items.push_back(scaling.item());
    merged.add(items, t);
    v.steps.push_back({t, std::move(items)});
  }
  v.conclusions = merged.items();
  v.outcome = decide(v.hypotheses, v.conclusions);
  return v;
}

TheoremVerdict verify_converse(const DeformationFamily& f, const std::vector<double>& t_grid, const CheckOptions& opts,
                               bool integrals) {
  if (t_grid.size() < 4) throw std::invalid_argument("converse: t grid needs at least 4 values");
  const auto [lo, hi] = std::minmax_element(t_grid.begin(), t_grid.end());
  if (!(*lo > 0.0)) throw std::invalid_argument("converse: t grid must be strictly positive");
  if (*hi < 100.0 * *lo) throw std::invalid_argument("converse: t grid must span two orders of magnitude");
  if (integrals && !f.model->is_closed())
    throw std::invalid_argument("converse: integral check needs a model without boundary");

  TheoremVerdict v;
  v.direction = "converse";
  const double tol = resolve_tol(*f.model, opts);

  StepMerger merged;
  std::vector<VectorValue> x, y;
  Tracker sx = upper("reeb_scaling_alpha", 10 * tol), sy = upper("reeb_scaling_beta", 10 * tol);
  for (double t : t_grid) {
    const auto [at, bt] = family_at(f, t);
    const ContactPairCertificate ct = verify_contact_pair(at, bt, f.k, f.l, opts);
    if (x.empty()) {
      for (std::size_t i = 0; i < ct.points.size(); ++i) {
        x.push_back(t * ct.e_alpha[i]);
        y.push_back(t * ct.e_beta[i]);
      }
    }
    for (std::size_t i = 0; i < ct.points.size(); ++i) {
      sx.observe(max_abs(t * ct.e_alpha[i] - x[i]) / std::max(1.0, max_abs(x[i])), ct.points[i], t);
      sy.observe(max_abs(t * ct.e_beta[i] - y[i]) / std::max(1.0, max_abs(y[i])), ct.points[i], t);
    }
    std::vector<CheckItem> items = prefixed(ct.items(), "pair_t: ");
    merged.add(items, t);
    v.steps.push_back({t, std::move(items)});
  }
  v.hypotheses = merged.items();
  v.hypotheses.push_back(sx.item());
  v.hypotheses.push_back(sy.item());

  const ContactPairCertificate cert = verify_contact_pair(f.alpha, f.beta, f.k, f.l, opts);
  v.conclusions = prefixed(cert.items(), "pair: ");
  Tracker ex = upper("E_alpha = X", tol), ey = upper("E_beta = Y", tol);
  for (std::size_t i = 0; i < cert.points.size(); ++i) {
    ex.observe(max_abs(cert.e_alpha[i] - x[i]) / std::max(1.0, max_abs(x[i])), cert.points[i]);
    ey.observe(max_abs(cert.e_beta[i] - y[i]) / std::max(1.0, max_abs(y[i])), cert.points[i]);
  }
  v.conclusions.push_back(ex.item());
  v.conclusions.push_back(ey.item());
  for (const CheckItem& c : compatibility_items(f, cert, tol)) v.conclusions.push_back(c);

  const ABCReport abc = compute_abc(f, std::nullopt, opts);
  Tracker mc = upper("max|C|", tol), mb = upper("max|B|", tol), nb = lower("min B", -tol);
  for (std::size_t i = 0; i < abc.points.size(); ++i) {
    mc.observe(std::abs(abc.c[i]), abc.points[i]);
    mb.observe(std::abs(abc.b[i]), abc.points[i]);
    nb.observe(abc.b[i], abc.points[i]);
  }
  v.facts = {mc.item(), mb.item(), nb.item()};
  if (integrals) {
    const auto [s1, s2] = stokes_vanishing_check(f);
    CheckItem i1 = pass_item("stokes alpha0 term"), i2 = pass_item("stokes beta0 term");
    i1.value = s1;
    i2.value = s2;
    i1.threshold = i2.threshold = tol;
    i1.passed = s1 <= tol;
    i2.passed = s2 <= tol;
    v.facts.push_back(i1);
    v.facts.push_back(i2);
  }
  v.outcome = decide(v.hypotheses, v.conclusions);
  return v;
}

std::pair<double, double> stokes_vanishing_check(const DeformationFamily& f) {
  if (!f.model->is_closed()) throw std::invalid_argument("Stokes check needs a model without boundary");
  const FamilySampler sampler(f);
  const int k = f.k, l = f.l;
  double s1 = 0.0, s2 = 0.0;
  std::size_t nodes = 0;
  // One quadrature pass accumulates both integrands; the grid weights are uniform.
  integrate(*f.model, [&](std::span<const double> p) {
    const FamilySample s = sampler.at(p);
    const FormValue dak = wedge_power(s.da, k), dbl = wedge_power(s.db, l);
    const FormValue l0 = wedge(s.a0, dak), l1 = wedge(s.a, dak);
    const FormValue r0 = wedge(s.b0, dbl), r1 = wedge(s.b, dbl);
    s1 += wedge(l0, r1).top();
    s2 += wedge(l1, r0).top();
    ++nodes;
    return 0.0;
  });
  const double weight = integrate(*f.model, [](std::span<const double>) { return 1.0; }) / static_cast<double>(nodes);
  return {std::abs(s1 * weight), std::abs(s2 * weight)};
}

std::vector<SweepRow> sweep(const DeformationFamily& f, const std::vector<double>& t_grid, const CheckOptions& opts) {
  const PointSet pts = resolve_points(*f.model, opts);
  std::vector<SweepRow> rows;
  for (double t : t_grid) {
    const auto [at, bt] = family_at(f, t);
    const PairSampler sampler(at, bt);
    SweepRow row{t, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const PairSample s = sampler.at(pts[i]);
      const double vol = volume_coefficient(s, f.k, f.l);
      row.min_volume_coeff = std::min(row.min_volume_coeff, vol);
      row.max_volume_coeff = std::max(row.max_volume_coeff, vol);
      row.max_reeb_residual = std::max(row.max_reeb_residual, solve_reeb(s).residual);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "t,min_volume_coeff,max_volume_coeff,max_reeb_residual\n";
  for (const SweepRow& r : rows)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t, r.min_volume_coeff, r.max_volume_coeff,
                       r.max_reeb_residual);
}

}  // namespace cpair
