#include "cpair/contact.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <memory>

namespace cpair {

namespace {

// Antisymmetric matrix D with D(i, j) = w(e_i, e_j).
Eigen::MatrixXd two_form_matrix(const FormValue& w) {
  const int n = w.dim();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const auto& idx = multi_indices(n, 2);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    d(idx[r][0], idx[r][1]) = w[r];
    d(idx[r][1], idx[r][0]) = -w[r];
  }
  return d;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double max_coordinate_step(const Model& model) {
  double h = 0.0;
  for (const Axis& a : model.axes())
    if (a.is_coordinate()) h = std::max(h, a.step());
  return h;
}

int sign_of(double v) { return (v > 0) - (v < 0); }

}  // namespace

double resolve_tol(const Model& model, const CheckOptions& opts) {
  return opts.tol > 0.0 ? opts.tol : model.default_tol();
}

SampleSpec default_samples(const Model& model) {
  if (model.is_invariant()) return SampleSpec::grid();
  double total = 1.0;
  for (int i = 0; i < model.dim(); ++i)
    if (model.axis(i).is_coordinate()) total *= model.grid_resolution(i);
  if (total <= 4096.0) return SampleSpec::grid();
  return SampleSpec::random(4096, 1);
}

PointSet resolve_points(const Model& model, const CheckOptions& opts) {
  return sample_points(model, opts.samples ? *opts.samples : default_samples(model));
}

PowerMeasures power_measures(const FormValue& alpha, const FormValue& dalpha, int k) {
  const int n = alpha.dim();
  const double na = norm_inf(alpha), nd = norm_inf(dalpha);
  const double tiny = std::numeric_limits<double>::min();
  PowerMeasures m;
  if (k == 0) {
    m.power_ratio = na > 0.0 ? 1.0 : 0.0;
  } else if (2 * k + 1 <= n && na > 0.0 && nd > 0.0) {
    const double denom = na * std::pow(nd, k);
    m.power_ratio = denom > tiny ? norm_inf(wedge(alpha, wedge_power(dalpha, k))) / denom : 0.0;
  }
  if (2 * (k + 1) <= n) {
    const double denom = std::pow(std::max(na, nd), k + 1);
    const double num = k == 0 ? nd : norm_inf(wedge_power(dalpha, k + 1));
    m.next_residual = denom > tiny ? num / denom : 0.0;
  }
  return m;
}

int pointwise_class(const FormValue& alpha, const FormValue& dalpha, double tol) {
  const double na = norm_inf(alpha), nd = norm_inf(dalpha);
  for (int k = (alpha.dim() - 1) / 2; k >= 0; --k) {
    // A negligible d alpha cannot carry a positive power.
    if (k >= 1 && nd <= tol * na) continue;
    const PowerMeasures m = power_measures(alpha, dalpha, k);
    if (m.power_ratio > tol && m.next_residual <= tol) return k;
  }
  return -1;
}

ClassReport cartan_class(const FormField& alpha, const CheckOptions& opts) {
  if (alpha.degree() != 1) throw std::invalid_argument("cartan_class: expected a 1-form");
  const Model& model = *alpha.model();
  const double tol = resolve_tol(model, opts);
  const PointSet pts = resolve_points(model, opts);
  const FormField dalpha = exterior_derivative(alpha);

  std::vector<FormValue> as, ds;
  as.reserve(pts.size());
  ds.reserve(pts.size());
  ClassReport report;
  report.points = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    as.push_back(alpha.at(pts[i]));
    ds.push_back(dalpha.at(pts[i]));
    if (norm_inf(as.back()) <= tol) {
      Witness w{std::vector<double>(pts[i].begin(), pts[i].end()), std::nullopt, norm_inf(as.back())};
      throw DegenerateFormError("1-form vanishes at a sample point", std::move(w));
    }
  }
  if (pts.size() == 0) throw std::invalid_argument("cartan_class: no sample points");

  const int k0 = pointwise_class(as[0], ds[0], tol);
  for (std::size_t i = 1; i < pts.size() && report.constant; ++i) {
    const int ki = pointwise_class(as[i], ds[i], tol);
    if (ki != k0) {
      report.constant = false;
      report.class_change = Witness{std::vector<double>(pts[i].begin(), pts[i].end()), std::nullopt,
                                    static_cast<double>(ki)};
    }
  }
  report.k = report.constant ? k0 : -1;
  const int k = std::max(k0, 0);
  Tracker power = lower(fmt::format("alpha^(dalpha)^{}", k), tol);
  Tracker next = upper(fmt::format("(dalpha)^{}", k + 1), tol);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PowerMeasures m = power_measures(as[i], ds[i], k);
    power.observe(m.power_ratio, pts[i]);
    next.observe(m.next_residual, pts[i]);
  }
  report.power = power.item();
  report.next = next.item();
  report.passed = report.constant && k0 >= 0 && report.power.passed && report.next.passed;
  return report;
}

PairSampler::PairSampler(FormField alpha, FormField beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (alpha_.degree() != 1 || beta_.degree() != 1) throw std::invalid_argument("contact pair: expected 1-forms");
  if (alpha_.model() != beta_.model()) throw std::invalid_argument("contact pair: forms live on different models");
  dalpha_ = exterior_derivative(alpha_);
  dbeta_ = exterior_derivative(beta_);
}

PairSample PairSampler::at(std::span<const double> point) const {
  return {alpha_.at(point), beta_.at(point), dalpha_.at(point), dbeta_.at(point)};
}

double volume_coefficient(const PairSample& s, int k, int l) {
  return wedge(wedge(s.alpha, wedge_power(s.dalpha, k)), wedge(s.beta, wedge_power(s.dbeta, l))).top();
}

double volume_scale(const PairSample& s, int k, int l) {
  return norm_inf(s.alpha) * std::pow(norm_inf(s.dalpha), k) * norm_inf(s.beta) * std::pow(norm_inf(s.dbeta), l);
}

ReebSolve solve_reeb(const PairSample& s) {
  const int n = s.alpha.dim();
  Eigen::MatrixXd m(2 * n + 2, n);
  m.row(0) = s.alpha.as_vector().transpose();
  m.row(1) = s.beta.as_vector().transpose();
  // Row j of i_E w = 0 is column j of the matrix of w.
  m.middleRows(2, n) = two_form_matrix(s.dalpha).transpose();
  m.middleRows(n + 2, n) = two_form_matrix(s.dbeta).transpose();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(2 * n + 2, 2);
  rhs(0, 0) = 1.0;
  rhs(1, 1) = 1.0;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd sol = svd.solve(rhs);
  ReebSolve out;
  out.e_alpha = sol.col(0);
  out.e_beta = sol.col(1);
  const auto& sv = svd.singularValues();
  out.sigma_max = sv.size() ? sv(0) : 0.0;
  out.sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
  const double scale = std::max(1.0, max_abs(m) * max_abs(sol));
  out.residual = max_abs(m * sol - rhs) / scale;
  return out;
}

SingleReebSolve solve_reeb_single(const FormValue& alpha, const FormValue& dalpha) {
  const int n = alpha.dim();
  Eigen::MatrixXd m(n + 1, n);
  m.row(0) = alpha.as_vector().transpose();
  m.bottomRows(n) = two_form_matrix(dalpha).transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(0) = 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingleReebSolve out;
  out.reeb = svd.solve(rhs);
  const auto& sv = svd.singularValues();
  out.sigma_max = sv(0);
  out.sigma_min = sv(sv.size() - 1);
  out.residual = (m * out.reeb - rhs).cwiseAbs().maxCoeff() / std::max(1.0, max_abs(m) * out.reeb.cwiseAbs().maxCoeff());
  return out;
}

std::vector<CheckItem> ContactPairCertificate::items() const {
  return {volume, orientation_constant, dalpha_power, dbeta_power, reeb_residual, reeb_rank, commutator};
}

ContactPairCertificate verify_contact_pair(const FormField& alpha, const FormField& beta, int k, int l,
                                           const CheckOptions& opts) {
  const auto sampler = std::make_shared<PairSampler>(alpha, beta);
  const Model& model = *alpha.model();
  const int n = model.dim();
  if (k < 0 || l < 0 || 2 * k + 2 * l + 2 != n)
    throw std::invalid_argument(fmt::format("type ({}, {}) needs dimension {}, model has {}", k, l, 2 * k + 2 * l + 2, n));

  ContactPairCertificate c;
  c.k = k;
  c.l = l;
  c.tol = resolve_tol(model, opts);
  c.points = resolve_points(model, opts);
  const double tol = c.tol;

  Tracker volume = lower("volume", tol);
  Tracker orient = upper("orientation", 0.0);
  Tracker da = upper(fmt::format("(dalpha)^{}", k + 1), tol);
  Tracker db = upper(fmt::format("(dbeta)^{}", l + 1), tol);
  Tracker res = upper("reeb_residual", tol);
  Tracker rank = lower("reeb_rank", tol);
  c.min_abs_volume = std::numeric_limits<double>::infinity();
  c.min_sigma = std::numeric_limits<double>::infinity();
  c.e_alpha.reserve(c.points.size());
  c.e_beta.reserve(c.points.size());

  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto p = c.points[i];
    const PairSample s = sampler->at(p);
    const double vol = volume_coefficient(s, k, l);
    const double scale = volume_scale(s, k, l);
    volume.observe(scale > 0.0 ? std::abs(vol) / scale : 0.0, p);
    if (i == 0) c.orientation = sign_of(vol);
    orient.observe(sign_of(vol) == c.orientation ? 0.0 : std::abs(vol), p);
    c.min_abs_volume = std::min(c.min_abs_volume, std::abs(vol));
    da.observe(power_measures(s.alpha, s.dalpha, k).next_residual, p);
    db.observe(power_measures(s.beta, s.dbeta, l).next_residual, p);
    const ReebSolve r = solve_reeb(s);
    res.observe(r.residual, p);
    rank.observe(r.sigma_max > 0.0 ? r.sigma_min / r.sigma_max : 0.0, p);
    c.min_sigma = std::min(c.min_sigma, r.sigma_min);
    c.e_alpha.push_back(r.e_alpha);
    c.e_beta.push_back(r.e_beta);
  }

  // Finite differences along coordinate axes carry an O(h^2) error.
  const double h = max_coordinate_step(model);
  Tracker comm = upper("commutator", model.is_invariant() ? tol : tol + h * h);
  const PointwiseVectorField fa = [sampler](std::span<const double> q) { return solve_reeb(sampler->at(q)).e_alpha; };
  const PointwiseVectorField fb = [sampler](std::span<const double> q) { return solve_reeb(sampler->at(q)).e_beta; };
  const std::size_t cap = std::min(c.points.size(), opts.max_commutator_points);
  for (std::size_t i = 0; i < cap; ++i) {
    const auto p = c.points[i];
    const VectorValue br = lie_bracket_at(model, p, fa, fb);
    const double scale = std::max(1.0, c.e_alpha[i].cwiseAbs().maxCoeff() * c.e_beta[i].cwiseAbs().maxCoeff());
    comm.observe(br.cwiseAbs().maxCoeff() / scale, p);
  }

  c.volume = volume.item();
  c.orientation_constant = orient.item();
  c.dalpha_power = da.item();
  c.dbeta_power = db.item();
  c.reeb_residual = res.item();
  c.reeb_rank = rank.item();
  c.commutator = comm.item();
  const auto items = c.items();
  c.passed = all_passed(items);
  return c;
}

ReebPair reeb_pair(const FormField& alpha, const FormField& beta, int k, int l, const CheckOptions& opts) {
  ContactPairCertificate cert = verify_contact_pair(alpha, beta, k, l, opts);
  if (!cert.passed) {
    for (const CheckItem& item : cert.items())
      if (!item.passed) throw ContactPairError("not a contact pair: " + item.name + " failed", item.first);
  }
  const auto sampler = std::make_shared<PairSampler>(alpha, beta);
  ReebPair out;
  out.e_alpha = [sampler](std::span<const double> q) { return solve_reeb(sampler->at(q)).e_alpha; };
  out.e_beta = [sampler](std::span<const double> q) { return solve_reeb(sampler->at(q)).e_beta; };
  out.certificate = std::move(cert);
  return out;
}

PointwiseVectorField single_reeb_field(const FormField& alpha) {
  const auto a = std::make_shared<FormField>(alpha);
  // On a line every 1-form is closed and Z = 1 / alpha.
  if (alpha.dim() == 1)
    return [a](std::span<const double> q) { return VectorValue::Constant(1, 1.0 / a->at(q)[0]); };
  const auto da = std::make_shared<FormField>(exterior_derivative(alpha));
  return [a, da](std::span<const double> q) { return solve_reeb_single(a->at(q), da->at(q)).reeb; };
}

DarbouxModel darboux_model(int k, int resolution) {
  ModelPtr model = Model::darboux(k, resolution);
  std::vector<std::string> c(2 * k + 1, "0");
  for (int i = 0; i < k; ++i) c[2 * i + 1] = fmt::format("x{}", 2 * i);
  c[2 * k] = "1";
  return {model, FormField::parse(model, 1, c)};
}

ProductPair product_contact_pair(const FormField& alpha, const FormField& beta, const std::string& name,
                                 int coarse_resolution, const CheckOptions& opts) {
  const ModelPtr& m1 = alpha.model();
  const ModelPtr& m2 = beta.model();
  const ClassReport ca = cartan_class(alpha, opts);
  const ClassReport cb = cartan_class(beta, opts);
  if (!ca.passed || 2 * ca.k + 1 != m1->dim())
    throw ContactPairError("left factor form is not contact", ca.class_change ? ca.class_change : ca.power.first);
  if (!cb.passed || 2 * cb.k + 1 != m2->dim())
    throw ContactPairError("right factor form is not contact", cb.class_change ? cb.class_change : cb.power.first);
  ProductPair out;
  out.model = Model::product(name.empty() ? m1->name() + " x " + m2->name() : name, m1, m2, coarse_resolution);
  out.alpha = pullback_left(out.model, alpha);
  out.beta = pullback_right(out.model, beta);
  out.k = ca.k;
  out.l = cb.k;
  return out;
}

SingleDeformationReport verify_single_linear_deformation(const FormField& alpha0, const FormField& alpha,
                                                         const std::vector<double>& t_grid,
                                                         const CheckOptions& opts) {
  if (alpha0.degree() != 1 || alpha.degree() != 1) throw std::invalid_argument("single deformation: expected 1-forms");
  if (alpha0.model() != alpha.model()) throw std::invalid_argument("single deformation: forms live on different models");
  const Model& model = *alpha.model();
  const int n = model.dim();
  if (n % 2 == 0) throw std::invalid_argument("single deformation: model dimension must be odd");

  SingleDeformationReport r;
  r.k = (n - 1) / 2;
  r.tol = resolve_tol(model, opts);
  const double tol = r.tol;
  const PointSet pts = resolve_points(model, opts);
  const FormField dalpha0 = exterior_derivative(alpha0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double nd = norm_inf(dalpha0.at(pts[i]));
    if (nd > tol * std::max(1.0, norm_inf(alpha0.at(pts[i]))))
      throw std::invalid_argument(fmt::format("single deformation: alpha0 is not closed (|d alpha0| = {:.3g})", nd));
  }
  r.alpha0_class = cartan_class(alpha0, opts);

  const FormField dalpha = exterior_derivative(alpha);
  Tracker contact = lower("alpha_contact", tol);
  Tracker orient = upper("alpha_orientation", 0.0);
  Tracker pairing = upper("alpha0(Z)", tol);
  int sign0 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = pts[i];
    const FormValue a = alpha.at(p), da = dalpha.at(p), a0 = alpha0.at(p);
    contact.observe(power_measures(a, da, r.k).power_ratio, p);
    const double top = wedge(a, wedge_power(da, r.k)).top();
    if (i == 0) sign0 = sign_of(top);
    orient.observe(sign_of(top) == sign0 ? 0.0 : std::abs(top), p);
    const SingleReebSolve z = solve_reeb_single(a, da);
    pairing.observe(std::abs(a0(z.reeb)) / std::max(1.0, norm_inf(a0) * z.reeb.cwiseAbs().maxCoeff()), p);
  }
  r.alpha_contact = contact.item();
  r.alpha_orientation = orient.item();
  r.alpha0_on_reeb = pairing.item();
  r.condition_ii = r.alpha_contact.passed && r.alpha_orientation.passed && r.alpha0_on_reeb.passed;

  for (double t : t_grid) {
    if (!(t > 0.0)) continue;
    const FormField at = alpha0 + t * alpha;
    const FormField dat = t * dalpha;
    Tracker c = lower("contact", tol);
    Tracker o = upper("orientation", 0.0);
    int s0 = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto p = pts[i];
      const FormValue a = at.at(p), da = dat.at(p);
      c.observe(power_measures(a, da, r.k).power_ratio, p, t);
      const double top = wedge(a, wedge_power(da, r.k)).top();
      if (i == 0) s0 = sign_of(top);
      o.observe(sign_of(top) == s0 ? 0.0 : std::abs(top), p, t);
    }
    SingleDeformationStep step{t, c.item(), o.item(), false};
    step.holds = step.contact.passed && step.orientation.passed;
    if (!step.holds && !r.violation) r.violation = step.contact.passed ? step.orientation.first : step.contact.first;
    r.steps.push_back(std::move(step));
  }
  if (!r.steps.empty()) {
    r.condition_i = std::all_of(r.steps.begin(), r.steps.end(), [](const auto& s) { return s.holds; });
    r.agree = *r.condition_i == r.condition_ii;
  }
  return r;
}

}  // namespace cpair
