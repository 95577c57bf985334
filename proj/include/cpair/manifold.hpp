#pragma once

// Manifold models and the fields that live on them.
//
// Every model is flattened into a global frame of n axes. An axis is either
// an invariant direction of a Lie group factor (frame field e_i with
// [e_i, e_j] = sum_k c_ij^k e_k) or a coordinate axis of a chart factor
// (periodic or box). Coefficient functions are expressions in the chart
// coordinates and are constant along invariant axes, so a single exterior
// derivative serves the Lie, chart and product backends:
//
//   d(f theta^I) = sum_{chart i} (d_i f) theta^i ^ theta^I + f d(theta^I),
//   d theta^k    = - sum_{i<j} c_ij^k theta^i ^ theta^j.

#include "cpair/exterior.hpp"
#include "cpair/expr.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cpair {

enum class AxisKind { invariant, periodic, box };

struct Axis {
  AxisKind kind = AxisKind::periodic;
  double lo = 0.0;
  double hi = 0.0;
  int resolution = 32;

  static Axis invariant();
  static Axis periodic(int resolution = 32);  // [0, 2 pi)
  static Axis box(double lo, double hi, int resolution = 32);

  double length() const { return hi - lo; }
  /// Grid spacing length / resolution (zero on invariant axes).
  double step() const;
  bool is_coordinate() const { return kind != AxisKind::invariant; }
};

/// Dense structure constants c[i][j][k] with [e_i, e_j] = sum_k c[i][j][k] e_k.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int n);

  int dim() const { return n_; }
  double operator()(int i, int j, int k) const { return c_[(i * n_ + j) * n_ + k]; }
  /// Sets c_ij^k and c_ji^k = -value.
  void set_bracket(int i, int j, int k, double value);
  void set_raw(int i, int j, int k, double value) { c_[(i * n_ + j) * n_ + k] = value; }

  double antisymmetry_defect() const;
  double jacobi_defect() const;

 private:
  int n_ = 0;
  std::vector<double> c_;
};

class Model;
using ModelPtr = std::shared_ptr<const Model>;

struct LieGroupModel {
  StructureConstants constants;
};

struct ChartModel {
  std::vector<Axis> axes;
};

struct ProductModel {
  ModelPtr left;
  ModelPtr right;
  /// Per-axis resolution of tensor grids and quadrature on the product.
  int coarse_resolution = 8;
};

class Model {
 public:
  using Shape = std::variant<LieGroupModel, ChartModel, ProductModel>;

  /// Throws unless c is antisymmetric; with check_jacobi also unless the Jacobi defect is <= 1e-12.
  static ModelPtr lie_group(std::string name, StructureConstants c, bool check_jacobi = true);
  static ModelPtr chart(std::string name, std::vector<Axis> axes);
  static ModelPtr product(std::string name, ModelPtr left, ModelPtr right, int coarse_resolution = 8);

  /// Heisenberg algebra h3: [e0, e1] = e2.
  static ModelPtr heisenberg3();
  /// Flat torus T^n with periodic axes.
  static ModelPtr torus(int n, int resolution = 32);
  /// Box [-1, 1]^(2k+1) carrying the standard contact form.
  static ModelPtr darboux(int k, int resolution = 32);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(axes_.size()); }
  const Shape& shape() const { return shape_; }
  bool is_lie() const { return std::holds_alternative<LieGroupModel>(shape_); }
  bool is_chart() const { return std::holds_alternative<ChartModel>(shape_); }
  bool is_product() const { return std::holds_alternative<ProductModel>(shape_); }
  const ProductModel& as_product() const { return std::get<ProductModel>(shape_); }

  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(int i) const { return axes_[i]; }
  /// Structure constants of the global frame (zero between coordinate axes and across factors).
  const StructureConstants& frame() const { return frame_; }

  /// True when no coordinate axis is a box (compact without boundary).
  bool is_closed() const;
  /// True when every axis is invariant (exact algebraic backend).
  bool is_invariant() const;
  /// 1e-8 on purely invariant models, 1e-6 otherwise.
  double default_tol() const;
  /// Resolution used by tensor grids and quadrature along axis i.
  int grid_resolution(int i) const;

 private:
  Model() = default;
  std::string name_;
  Shape shape_;
  std::vector<Axis> axes_;
  StructureConstants frame_;
};

/// Flat list of points of a fixed dimension.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int n) : n_(n) {}

  int dim() const { return n_; }
  std::size_t size() const { return n_ == 0 ? count_ : data_.size() / static_cast<std::size_t>(n_); }
  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * n_, static_cast<std::size_t>(n_)}; }
  void push_back(std::span<const double> p);

 private:
  int n_ = 0;
  std::size_t count_ = 0;
  std::vector<double> data_;
};

struct SampleSpec {
  enum class Mode { grid, random };
  Mode mode = Mode::grid;
  /// Grid: per-axis count overriding the model's resolution when > 0.
  int resolution = 0;
  /// Random: number of uniform samples.
  std::size_t count = 10000;
  std::uint64_t seed = 1;

  static SampleSpec grid(int resolution = 0) { return {Mode::grid, resolution, 0, 0}; }
  static SampleSpec random(std::size_t count, std::uint64_t seed) { return {Mode::random, 0, count, seed}; }
};

/// Grid points are ordered row-major (axis 0 slowest); invariant axes contribute the single value 0.
PointSet sample_points(const Model& model, const SampleSpec& spec);

/// Uniform deviate in [0, 1) from 53 random bits; platform independent.
double uniform01(std::uint64_t& state);
/// SplitMix64 step.
std::uint64_t next_random(std::uint64_t& state);

class FormField {
 public:
  FormField() = default;
  FormField(ModelPtr model, int degree, std::vector<Expr> coeffs);

  static FormField constant(ModelPtr model, const FormValue& value);
  /// Parses one expression per multi-index in lexicographic order.
  static FormField parse(ModelPtr model, int degree, const std::vector<std::string>& coeffs);
  /// The coordinate volume element theta^0 ^ ... ^ theta^(n-1).
  static FormField volume(ModelPtr model);

  const ModelPtr& model() const { return model_; }
  int dim() const { return model_ ? model_->dim() : 0; }
  int degree() const { return p_; }
  const std::vector<Expr>& coeffs() const { return coeffs_; }

  FormValue at(std::span<const double> point) const;

  FormField operator+(const FormField& o) const;
  FormField operator-(const FormField& o) const;
  FormField operator*(double s) const;
  friend FormField operator*(double s, const FormField& f) { return f * s; }

 private:
  ModelPtr model_;
  int p_ = 0;
  std::vector<Expr> coeffs_;
};

FormField exterior_derivative(const FormField& w);

/// Pullback of a field on the left (or right) factor of a product model.
FormField pullback_left(const ModelPtr& product, const FormField& w);
FormField pullback_right(const ModelPtr& product, const FormField& w);

/// Wedge of two fields, computed symbolically.
FormField wedge(const FormField& a, const FormField& b);

class VectorField {
 public:
  VectorField() = default;
  VectorField(ModelPtr model, std::vector<Expr> components);
  static VectorField constant(ModelPtr model, const VectorValue& value);
  static VectorField parse(ModelPtr model, const std::vector<std::string>& components);

  const ModelPtr& model() const { return model_; }
  const std::vector<Expr>& components() const { return comps_; }
  VectorValue at(std::span<const double> point) const;

 private:
  ModelPtr model_;
  std::vector<Expr> comps_;
};

/// Frame derivative e_i(f): the partial along coordinate axes, zero along invariant ones.
Expr frame_derivative(const Model& model, const Expr& f, int axis);

/// [X, Y] with symbolic partials and the frame structure constants.
VectorField lie_bracket_fields(const VectorField& x, const VectorField& y);

using PointwiseVectorField = std::function<VectorValue(std::span<const double>)>;

/// [X, Y] at one point for fields known only pointwise: central differences
/// with step axis.step() along coordinate axes (one-sided second order at box
/// edges), zero derivative along invariant axes, plus the structure-constant term.
VectorValue lie_bracket_at(const Model& model, std::span<const double> point,
                           const PointwiseVectorField& x, const PointwiseVectorField& y);

/// Riemann sum over the quadrature grid; invariant factors have unit volume.
double integrate(const FormField& top);
double integrate(const Model& model, const std::function<double(std::span<const double>)>& density);

}  // namespace cpair
