#pragma once

// Jacobi structures induced on the leaves of a contact pair.
//
// The alpha side lives on the leaf of ker beta ^ ker d beta through a base
// point (dimension 2k+1), where alpha restricts to a contact form; the beta
// side is symmetric. Functions are sampled on a tensor grid over the
// coordinate axes spanned by the leaf, with the other coordinates fixed.

#include "cpair/contact.hpp"

#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

namespace cpair {

class JacobiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SideTag { alpha, beta };

/// Tensor grid over the active (leaf) axes. Periodic axes use nodes lo + i h,
/// box axes cell midpoints; row-major with the first active axis slowest.
class LeafGrid {
 public:
  LeafGrid() = default;
  LeafGrid(const Model& model, std::vector<int> active, int resolution, std::vector<double> base);

  int dim() const { return static_cast<int>(active_.size()); }
  int model_dim() const { return static_cast<int>(base_.size()); }
  std::size_t size() const { return nodes_; }
  int resolution() const { return n_; }
  const std::vector<int>& active() const { return active_; }
  double step(int c) const { return h_[c]; }
  bool periodic(int c) const { return periodic_[c]; }
  double max_step() const;

  std::vector<int> index(std::size_t node) const;
  std::size_t flat(const std::vector<int>& idx) const;
  /// Full model coordinates of a node.
  std::vector<double> point(std::size_t node) const;
  /// Excludes the outermost layer along box axes.
  bool interior(std::size_t node) const;

  struct Tap {
    std::size_t node;
    double weight;
  };
  /// Derivative stencil along active axis c: fourth-order central with wrap on periodic axes;
  /// second-order central on box axes, one-sided at the edges.
  std::vector<Tap> stencil(std::size_t node, int c) const;
  /// Same stencil as offsets along axis c, for fields known only near one node.
  std::vector<std::pair<int, double>> stencil_offsets(int idx, int c) const;

 private:
  std::vector<int> active_;
  std::vector<bool> periodic_;
  std::vector<double> lo_, h_;
  std::vector<double> base_;
  int n_ = 0;
  std::size_t nodes_ = 0;
};

/// Values on the leaf grid, with an optional exact gradient (nodes x dim, active axes).
struct GridFunction {
  std::vector<double> values;
  std::vector<double> gradient;
};

/// Expression over model coordinates (exact partials) or grid samples.
using ScalarField = std::variant<Expr, GridFunction>;

/// Field on the leaf grid, active components only (nodes x dim).
struct GridVectorField {
  int dim = 0;
  std::vector<double> data;
  double max_residual = 0.0;
  double at(std::size_t node, int c) const { return data[node * dim + c]; }
};

class JacobiSide {
 public:
  /// Certifies the pair, finds the leaf axes at `base`, and prepares per-node solves.
  /// Throws JacobiError for models with invariant axes or when the leaf is not a
  /// coordinate subspace of dimension 2k+1 (2l+1) at every node.
  static JacobiSide make(const FormField& alpha, const FormField& beta, int k, int l, SideTag side, int resolution,
                         std::vector<double> base, const CheckOptions& opts = {});

  SideTag tag() const { return tag_; }
  const ModelPtr& model() const { return model_; }
  const LeafGrid& grid() const { return grid_; }
  const ContactPairCertificate& certificate() const { return cert_; }
  double tol() const { return tol_; }
  int dim() const { return grid_.dim(); }
  /// Side 1-form and Reeb field, active components.
  double theta(std::size_t node, int c) const { return theta_[node * grid_.dim() + c]; }
  double reeb(std::size_t node, int c) const { return reeb_[node * grid_.dim() + c]; }
  /// Other side's 1-form on the active axes.
  double other(std::size_t node, int c) const { return other_[node * grid_.dim() + c]; }

  /// Least-squares solve of theta(X) = f, i_X d theta = (E f) theta - df on the leaf.
  /// Returns the solution and writes the relative residual.
  std::vector<double> solve(std::size_t node, double f, const double* grad, double& residual) const;

 private:
  SideTag tag_ = SideTag::alpha;
  ModelPtr model_;
  LeafGrid grid_;
  ContactPairCertificate cert_;
  double tol_ = 0.0;
  std::vector<double> theta_, reeb_, other_;
  std::vector<double> system_;  // per node (dim+1) x dim, row-major
  std::vector<double> pinv_;    // per node dim x (dim+1)
};

/// Values and active-axis gradient at every node (finite differences when no gradient is known).
GridFunction sample(const ScalarField& f, const JacobiSide& side);

/// E f at every node.
GridFunction reeb_derivative(const ScalarField& f, const JacobiSide& side);

/// Throws JacobiError when a leaf solve has residual > tol.
GridVectorField hamiltonian_field(const ScalarField& f, const JacobiSide& side);

/// {f, g} = theta([X_f, X_g]) with finite-difference commutators.
GridFunction jacobi_bracket(const ScalarField& f, const ScalarField& g, const JacobiSide& side);

struct BivectorField {
  ModelPtr model;
  std::vector<BivectorValue> values;  // one per leaf node, model dimension
};

/// Lambda^{ij}(m) = {x^i - x^i(m), x^j - x^j(m)}(m) with linear probes solved on the stencil around m.
BivectorField build_bivector(const JacobiSide& side);

/// max over interior nodes of |Lambda(df, dg) + f E g - g E f - {f, g}|.
double bivector_consistency_defect(const ScalarField& f, const ScalarField& g, const JacobiSide& side,
                                   const BivectorField& lambda);

/// max over nodes and j of |sum_i other_i Lambda^{ij}|.
double degenerate_direction_defect(const JacobiSide& side, const BivectorField& lambda);

/// max over interior nodes of |{{f,g},h} + {{g,h},f} + {{h,f},g}|.
double jacobi_identity_defect(const ScalarField& f, const ScalarField& g, const ScalarField& h,
                              const JacobiSide& side);

/// max over interior nodes of |{1, g} - E g|.
double unit_bracket_defect(const ScalarField& g, const JacobiSide& side);

/// Compactly supported bump exp(1 - 1/(1 - r^2)), r = distance / (radius cells), with exact gradient.
GridFunction grid_bump(const JacobiSide& side, const std::vector<int>& center, double radius_cells);

/// max over interior nodes of |values|.
double sup_interior(const GridFunction& f, const JacobiSide& side);

}  // namespace cpair
