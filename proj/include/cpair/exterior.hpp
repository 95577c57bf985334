#pragma once

// Pointwise alternating multilinear algebra: forms, vectors and bivectors
// at a single tangent space of dimension n.
//
// Conventions used everywhere in the library:
//  * multi-indices of a fixed (n, p) are enumerated lexicographically;
//  * the wedge product follows the shuffle (determinant) convention with no
//    factorial normalisation, so evaluate(dx^I, e_I) == 1.

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace cpair {

using VectorValue = Eigen::VectorXd;

/// Strictly increasing list of axis indices.
using MultiIndex = std::vector<int>;

/// Largest ambient dimension supported by the index tables.
inline constexpr int kMaxDim = 12;

std::size_t binomial(int n, int p);

/// All increasing p-subsets of {0..n-1}, lexicographic order.
const std::vector<MultiIndex>& multi_indices(int n, int p);

/// Position of `idx` in multi_indices(n, idx.size()). Throws on invalid input.
std::size_t index_of(std::span<const int> idx, int n);

class FormValue {
 public:
  FormValue() = default;
  /// Zero p-form on an n-dimensional space.
  FormValue(int n, int p);
  FormValue(int n, int p, std::vector<double> coeffs);

  static FormValue scalar(int n, double value);
  static FormValue basis(int n, std::span<const int> idx, double scale = 1.0);
  static FormValue covector(std::span<const double> components);

  int dim() const { return n_; }
  int degree() const { return p_; }
  std::size_t size() const { return c_.size(); }

  double operator[](std::size_t i) const { return c_[i]; }
  const std::vector<double>& coeffs() const { return c_; }
  double coeff(std::span<const int> idx) const;

  /// Single coefficient of a degree-0 or degree-n value.
  double top() const;

  /// Covector components of a 1-form as a vector.
  VectorValue as_vector() const;

  FormValue operator+(const FormValue& o) const;
  FormValue operator-(const FormValue& o) const;
  FormValue operator-() const;
  FormValue operator*(double s) const;
  friend FormValue operator*(double s, const FormValue& f) { return f * s; }

  /// Pairing of a 1-form with a vector.
  double operator()(const VectorValue& v) const;

 private:
  int n_ = 0;
  int p_ = 0;
  std::vector<double> c_;
};

FormValue wedge(const FormValue& a, const FormValue& b);

/// Contraction i_X w, the first slot filled by X.
FormValue interior(const VectorValue& x, const FormValue& w);

/// Full alternating evaluation w(v_1, ..., v_p).
double evaluate(const FormValue& w, std::span<const VectorValue> vectors);

/// k-fold wedge power of a 2-form; k == 0 gives the scalar 1.
FormValue wedge_power(const FormValue& w, int k);

double norm_inf(const FormValue& w);

/// Antisymmetric bivector stored on increasing pairs (i, j).
class BivectorValue {
 public:
  BivectorValue() = default;
  explicit BivectorValue(int n);

  int dim() const { return n_; }
  std::size_t size() const { return c_.size(); }
  const std::vector<double>& coeffs() const { return c_; }

  /// Lambda^{ij}; returns -Lambda^{ji} when i > j and 0 on the diagonal.
  double operator()(int i, int j) const;
  void set(int i, int j, double value);

  /// Lambda(a, b) for two covectors.
  double pair(const VectorValue& a, const VectorValue& b) const;

 private:
  int n_ = 0;
  std::vector<double> c_;
};

}  // namespace cpair
