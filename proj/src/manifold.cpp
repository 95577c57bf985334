#include "cpair/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace cpair {

Axis Axis::invariant() { return {AxisKind::invariant, 0.0, 0.0, 1}; }

Axis Axis::periodic(int resolution) {
  if (resolution < 4) throw std::invalid_argument("chart resolution must be >= 4");
  return {AxisKind::periodic, 0.0, 2.0 * std::numbers::pi, resolution};
}

Axis Axis::box(double lo, double hi, int resolution) {
  if (resolution < 4) throw std::invalid_argument("chart resolution must be >= 4");
  if (!(hi > lo)) throw std::invalid_argument("box axis needs lo < hi");
  return {AxisKind::box, lo, hi, resolution};
}

double Axis::step() const { return is_coordinate() ? length() / resolution : 0.0; }

StructureConstants::StructureConstants(int n) : n_(n), c_(static_cast<std::size_t>(n) * n * n, 0.0) {}

void StructureConstants::set_bracket(int i, int j, int k, double value) {
  set_raw(i, j, k, value);
  set_raw(j, i, k, -value);
}

double StructureConstants::antisymmetry_defect() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) m = std::max(m, std::abs((*this)(i, j, k) + (*this)(j, i, k)));
  return m;
}

double StructureConstants::jacobi_defect() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          double s = 0.0;
          for (int m = 0; m < n_; ++m)
            s += (*this)(i, j, m) * (*this)(m, k, l) + (*this)(j, k, m) * (*this)(m, i, l) +
                 (*this)(k, i, m) * (*this)(m, j, l);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

ModelPtr Model::lie_group(std::string name, StructureConstants c, bool check_jacobi) {
  if (c.antisymmetry_defect() > 0.0) throw std::invalid_argument("structure constants are not antisymmetric");
  if (check_jacobi && c.jacobi_defect() > 1e-12)
    throw std::invalid_argument(fmt::format("structure constants violate the Jacobi identity (defect {:.3g})",
                                            c.jacobi_defect()));
  auto m = std::shared_ptr<Model>(new Model);
  m->name_ = std::move(name);
  m->axes_.assign(c.dim(), Axis::invariant());
  m->frame_ = c;
  m->shape_ = LieGroupModel{std::move(c)};
  return m;
}

ModelPtr Model::chart(std::string name, std::vector<Axis> axes) {
  for (const Axis& a : axes)
    if (!a.is_coordinate()) throw std::invalid_argument("chart axes must be periodic or box");
  auto m = std::shared_ptr<Model>(new Model);
  m->name_ = std::move(name);
  m->axes_ = axes;
  m->frame_ = StructureConstants(static_cast<int>(axes.size()));
  m->shape_ = ChartModel{std::move(axes)};
  return m;
}

ModelPtr Model::product(std::string name, ModelPtr left, ModelPtr right, int coarse_resolution) {
  if (!left || !right) throw std::invalid_argument("product of a null model");
  if (coarse_resolution < 1) throw std::invalid_argument("coarse resolution must be positive");
  auto m = std::shared_ptr<Model>(new Model);
  m->name_ = std::move(name);
  const int n1 = left->dim();
  const int n = n1 + right->dim();
  m->axes_ = left->axes_;
  m->axes_.insert(m->axes_.end(), right->axes_.begin(), right->axes_.end());
  m->frame_ = StructureConstants(n);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n1; ++k) m->frame_.set_raw(i, j, k, left->frame_(i, j, k));
  for (int i = 0; i < right->dim(); ++i)
    for (int j = 0; j < right->dim(); ++j)
      for (int k = 0; k < right->dim(); ++k) m->frame_.set_raw(n1 + i, n1 + j, n1 + k, right->frame_(i, j, k));
  m->shape_ = ProductModel{std::move(left), std::move(right), coarse_resolution};
  return m;
}

ModelPtr Model::heisenberg3() {
  StructureConstants c(3);
  c.set_bracket(0, 1, 2, 1.0);
  return lie_group("heisenberg3", c);
}

ModelPtr Model::torus(int n, int resolution) {
  return chart(fmt::format("T{}", n), std::vector<Axis>(n, Axis::periodic(resolution)));
}

ModelPtr Model::darboux(int k, int resolution) {
  if (k < 1) throw std::invalid_argument("darboux(k) needs k >= 1");
  return chart(fmt::format("darboux({})", k), std::vector<Axis>(2 * k + 1, Axis::box(-1.0, 1.0, resolution)));
}

bool Model::is_closed() const {
  return std::none_of(axes_.begin(), axes_.end(), [](const Axis& a) { return a.kind == AxisKind::box; });
}

bool Model::is_invariant() const {
  return std::all_of(axes_.begin(), axes_.end(), [](const Axis& a) { return a.kind == AxisKind::invariant; });
}

double Model::default_tol() const { return is_invariant() ? 1e-8 : 1e-6; }

int Model::grid_resolution(int i) const {
  const Axis& a = axes_[i];
  if (!a.is_coordinate()) return 1;
  if (is_product()) return as_product().coarse_resolution;
  return a.resolution;
}

void PointSet::push_back(std::span<const double> p) {
  if (static_cast<int>(p.size()) != n_) throw std::invalid_argument("point dimension mismatch");
  data_.insert(data_.end(), p.begin(), p.end());
  ++count_;
}

std::uint64_t next_random(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(next_random(state) >> 11) * 0x1.0p-53;
}

namespace {

double node_coordinate(const Axis& a, int i, int resolution) {
  if (!a.is_coordinate()) return 0.0;
  const double h = a.length() / resolution;
  return a.kind == AxisKind::periodic ? a.lo + i * h : a.lo + (i + 0.5) * h;
}

// Calls fn(point, cell_volume) for every node of the model's tensor grid.
template <class Fn>
void for_each_node(const Model& model, int resolution_override, Fn&& fn) {
  const int n = model.dim();
  std::vector<int> res(n);
  double cell = 1.0;
  for (int i = 0; i < n; ++i) {
    res[i] = model.axis(i).is_coordinate() && resolution_override > 0 ? resolution_override
                                                                       : model.grid_resolution(i);
    if (model.axis(i).is_coordinate()) cell *= model.axis(i).length() / res[i];
  }
  std::vector<int> idx(n, 0);
  std::vector<double> p(n);
  for (;;) {
    for (int i = 0; i < n; ++i) p[i] = node_coordinate(model.axis(i), idx[i], res[i]);
    fn(std::span<const double>(p), cell);
    int a = n - 1;
    while (a >= 0 && ++idx[a] == res[a]) idx[a--] = 0;
    if (a < 0) break;
  }
}

std::vector<Expr> normalise(const std::vector<Expr>& exprs, const Model& model) {
  const int n = model.dim();
  std::vector<Expr> out;
  out.reserve(exprs.size());
  for (const Expr& e : exprs) {
    if (e.dim() > n) throw std::invalid_argument("expression declared on a larger dimension than the model");
    for (int i = 0; i < n; ++i)
      if (!model.axis(i).is_coordinate() && e.uses_variable(i))
        throw std::invalid_argument(
            fmt::format("coefficient depends on x{}, an invariant (Lie group) axis", i));
    out.push_back(e.dim() == n ? e : e.shifted(0, n));
  }
  return out;
}

// Sign of moving axis i in front of the increasing multi-index idx into sorted position.
double insertion_sign(int i, const MultiIndex& idx) {
  int below = 0;
  for (int j : idx) below += (j < i);
  return (below % 2) ? -1.0 : 1.0;
}

}  // namespace

PointSet sample_points(const Model& model, const SampleSpec& spec) {
  PointSet out(model.dim());
  if (spec.mode == SampleSpec::Mode::grid) {
    for_each_node(model, spec.resolution, [&](std::span<const double> p, double) { out.push_back(p); });
    return out;
  }
  if (spec.count == 0) throw std::invalid_argument("random sampling needs a positive count");
  if (model.is_invariant()) {
    std::vector<double> p(model.dim(), 0.0);
    out.push_back(p);
    return out;
  }
  std::uint64_t state = spec.seed;
  std::vector<double> p(model.dim());
  for (std::size_t s = 0; s < spec.count; ++s) {
    for (int i = 0; i < model.dim(); ++i) {
      const Axis& a = model.axis(i);
      p[i] = a.is_coordinate() ? a.lo + a.length() * uniform01(state) : 0.0;
    }
    out.push_back(p);
  }
  return out;
}

FormField::FormField(ModelPtr model, int degree, std::vector<Expr> coeffs) : model_(std::move(model)), p_(degree) {
  if (!model_) throw std::invalid_argument("form field without a model");
  if (degree < 0 || degree > model_->dim()) throw std::invalid_argument("form degree outside [0, n]");
  if (coeffs.size() != binomial(model_->dim(), degree))
    throw std::invalid_argument(fmt::format("degree-{} form on dimension {} needs {} coefficients, got {}", degree,
                                            model_->dim(), binomial(model_->dim(), degree), coeffs.size()));
  coeffs_ = normalise(coeffs, *model_);
}

FormField FormField::constant(ModelPtr model, const FormValue& value) {
  const int n = model->dim();
  if (value.dim() != n) throw std::invalid_argument("constant form: dimension mismatch");
  std::vector<Expr> c;
  for (double v : value.coeffs()) c.push_back(Expr::constant(v, n));
  return FormField(std::move(model), value.degree(), std::move(c));
}

FormField FormField::parse(ModelPtr model, int degree, const std::vector<std::string>& coeffs) {
  std::vector<Expr> c;
  for (const std::string& s : coeffs) c.push_back(cpair::parse(s, model->dim()));
  return FormField(std::move(model), degree, std::move(c));
}

FormField FormField::volume(ModelPtr model) {
  const int n = model->dim();
  return FormField(std::move(model), n, {Expr::constant(1.0, n)});
}

FormValue FormField::at(std::span<const double> point) const {
  std::vector<double> c(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] = coeffs_[i].eval(point);
  return FormValue(dim(), p_, std::move(c));
}

FormField FormField::operator+(const FormField& o) const {
  if (model_ != o.model_ || p_ != o.p_) throw std::invalid_argument("adding fields of different shape");
  std::vector<Expr> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs_[i] + o.coeffs_[i];
  return FormField(model_, p_, std::move(c));
}

FormField FormField::operator-(const FormField& o) const { return *this + o * -1.0; }

FormField FormField::operator*(double s) const {
  std::vector<Expr> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = s * coeffs_[i];
  return FormField(model_, p_, std::move(c));
}

FormField exterior_derivative(const FormField& w) {
  const Model& m = *w.model();
  const int n = m.dim();
  const int p = w.degree();
  if (p >= n) throw std::invalid_argument("exterior derivative of a top-degree form");
  const auto& in = multi_indices(n, p);
  std::vector<Expr> out(binomial(n, p + 1), Expr::constant(0.0, n));

  // d theta^k for each frame covector.
  std::vector<FormValue> dtheta(n, FormValue(n, 2));
  bool any_bracket = false;
  for (int k = 0; k < n; ++k) {
    std::vector<double> c(binomial(n, 2), 0.0);
    const auto& pairs = multi_indices(n, 2);
    for (std::size_t r = 0; r < pairs.size(); ++r) {
      c[r] = -m.frame()(pairs[r][0], pairs[r][1], k);
      any_bracket = any_bracket || c[r] != 0.0;
    }
    dtheta[k] = FormValue(n, 2, std::move(c));
  }

  for (std::size_t r = 0; r < in.size(); ++r) {
    const Expr& f = w.coeffs()[r];
    if (f.is_zero()) continue;
    const MultiIndex& idx = in[r];
    for (int i = 0; i < n; ++i) {
      if (!m.axis(i).is_coordinate() || std::find(idx.begin(), idx.end(), i) != idx.end()) continue;
      Expr df = f.partial(i);
      if (df.is_zero()) continue;
      MultiIndex k = idx;
      k.insert(std::upper_bound(k.begin(), k.end(), i), i);
      Expr& slot = out[index_of(k, n)];
      slot = slot + insertion_sign(i, idx) * df;
    }
    if (!any_bracket) continue;
    // Leibniz rule on theta^{i1} ^ ... ^ theta^{ip}.
    FormValue dI(n, p + 1);
    for (int s = 0; s < p; ++s) {
      FormValue term = FormValue::scalar(n, (s % 2) ? -1.0 : 1.0);
      for (int t = 0; t < p; ++t) {
        const int one[1] = {idx[t]};
        term = wedge(term, t == s ? dtheta[idx[t]] : FormValue::basis(n, one));
      }
      dI = dI + term;
    }
    for (std::size_t q = 0; q < dI.size(); ++q)
      if (dI[q] != 0.0) out[q] = out[q] + dI[q] * f;
  }
  return FormField(w.model(), p + 1, std::move(out));
}

namespace {

FormField pullback(const ModelPtr& product, const FormField& w, bool left) {
  if (!product->is_product()) throw std::invalid_argument("pullback target is not a product model");
  const ProductModel& pm = product->as_product();
  const ModelPtr& factor = left ? pm.left : pm.right;
  if (w.model() != factor && w.model()->name() != factor->name())
    throw std::invalid_argument("pullback: field does not live on the requested factor");
  if (w.dim() != factor->dim()) throw std::invalid_argument("pullback: factor dimension mismatch");
  const int n = product->dim();
  const int offset = left ? 0 : pm.left->dim();
  const int p = w.degree();
  std::vector<Expr> out(binomial(n, p), Expr::constant(0.0, n));
  const auto& in = multi_indices(w.dim(), p);
  for (std::size_t r = 0; r < in.size(); ++r) {
    MultiIndex k = in[r];
    for (int& i : k) i += offset;
    out[index_of(k, n)] = w.coeffs()[r].shifted(offset, n);
  }
  return FormField(product, p, std::move(out));
}

}  // namespace

FormField pullback_left(const ModelPtr& product, const FormField& w) { return pullback(product, w, true); }
FormField pullback_right(const ModelPtr& product, const FormField& w) { return pullback(product, w, false); }

FormField wedge(const FormField& a, const FormField& b) {
  if (a.model() != b.model()) throw std::invalid_argument("wedge of fields on different models");
  const int n = a.dim();
  const int p = a.degree(), q = b.degree();
  if (p + q > n) throw std::invalid_argument("wedge: degree overflow");
  std::vector<Expr> out(binomial(n, p + q), Expr::constant(0.0, n));
  const auto& ia = multi_indices(n, p);
  const auto& ib = multi_indices(n, q);
  for (std::size_t i = 0; i < ia.size(); ++i) {
    if (a.coeffs()[i].is_zero()) continue;
    for (std::size_t j = 0; j < ib.size(); ++j) {
      if (b.coeffs()[j].is_zero()) continue;
      const FormValue e = cpair::wedge(FormValue::basis(n, ia[i]), FormValue::basis(n, ib[j]));
      for (std::size_t k = 0; k < e.size(); ++k)
        if (e[k] != 0.0) out[k] = out[k] + e[k] * (a.coeffs()[i] * b.coeffs()[j]);
    }
  }
  return FormField(a.model(), p + q, std::move(out));
}

VectorField::VectorField(ModelPtr model, std::vector<Expr> components) : model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("vector field without a model");
  if (static_cast<int>(components.size()) != model_->dim())
    throw std::invalid_argument("vector field component count differs from dimension");
  comps_ = normalise(components, *model_);
}

VectorField VectorField::constant(ModelPtr model, const VectorValue& value) {
  const int n = model->dim();
  std::vector<Expr> c;
  for (int i = 0; i < value.size(); ++i) c.push_back(Expr::constant(value[i], n));
  return VectorField(std::move(model), std::move(c));
}

VectorField VectorField::parse(ModelPtr model, const std::vector<std::string>& components) {
  std::vector<Expr> c;
  for (const std::string& s : components) c.push_back(cpair::parse(s, model->dim()));
  return VectorField(std::move(model), std::move(c));
}

VectorValue VectorField::at(std::span<const double> point) const {
  VectorValue v(static_cast<Eigen::Index>(comps_.size()));
  for (std::size_t i = 0; i < comps_.size(); ++i) v[static_cast<Eigen::Index>(i)] = comps_[i].eval(point);
  return v;
}

Expr frame_derivative(const Model& model, const Expr& f, int axis) {
  if (!model.axis(axis).is_coordinate()) return Expr::constant(0.0, model.dim());
  return f.partial(axis);
}

VectorField lie_bracket_fields(const VectorField& x, const VectorField& y) {
  if (x.model() != y.model()) throw std::invalid_argument("bracket of fields on different models");
  const Model& m = *x.model();
  const int n = m.dim();
  std::vector<Expr> out(n, Expr::constant(0.0, n));
  for (int i = 0; i < n; ++i) {
    Expr s = Expr::constant(0.0, n);
    for (int j = 0; j < n; ++j) {
      s = s + x.components()[j] * frame_derivative(m, y.components()[i], j);
      s = s - y.components()[j] * frame_derivative(m, x.components()[i], j);
      for (int k = 0; k < n; ++k) {
        const double c = m.frame()(j, k, i);
        if (c != 0.0) s = s + c * (x.components()[j] * y.components()[k]);
      }
    }
    out[i] = s;
  }
  return VectorField(x.model(), std::move(out));
}

namespace {

// d/dx_axis of a pointwise field at p: central differences, one-sided
// second-order stencils where a box edge would be crossed.
VectorValue axis_derivative(const Model& model, std::span<const double> p, int axis,
                            const PointwiseVectorField& f) {
  const Axis& a = model.axis(axis);
  const double h = a.step();
  std::vector<double> q(p.begin(), p.end());
  auto at = [&](double offset) {
    q[axis] = p[axis] + offset;
    return f(q);
  };
  if (a.kind == AxisKind::box) {
    if (p[axis] - h < a.lo) return (-3.0 * at(0.0) + 4.0 * at(h) - at(2.0 * h)) / (2.0 * h);
    if (p[axis] + h > a.hi) return (3.0 * at(0.0) - 4.0 * at(-h) + at(-2.0 * h)) / (2.0 * h);
  }
  return (at(h) - at(-h)) / (2.0 * h);
}

}  // namespace

VectorValue lie_bracket_at(const Model& model, std::span<const double> point, const PointwiseVectorField& x,
                           const PointwiseVectorField& y) {
  const int n = model.dim();
  const VectorValue xv = x(point);
  const VectorValue yv = y(point);
  VectorValue out = VectorValue::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (!model.axis(j).is_coordinate()) continue;
    if (xv[j] == 0.0 && yv[j] == 0.0) continue;
    out += xv[j] * axis_derivative(model, point, j, y) - yv[j] * axis_derivative(model, point, j, x);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double c = model.frame()(j, k, i);
        if (c != 0.0) out[i] += c * xv[j] * yv[k];
      }
  return out;
}

double integrate(const Model& model, const std::function<double(std::span<const double>)>& density) {
  double sum = 0.0;
  for_each_node(model, 0, [&](std::span<const double> p, double cell) { sum += density(p) * cell; });
  return sum;
}

double integrate(const FormField& top) {
  if (top.degree() != top.dim()) throw std::invalid_argument("integrate: form is not of top degree");
  const Expr& c = top.coeffs()[0];
  return integrate(*top.model(), [&](std::span<const double> p) { return c.eval(p); });
}

}  // namespace cpair
