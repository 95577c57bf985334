#pragma once

// Cartan class, contact-pair certificates and Reeb vector fields.

#include "cpair/check.hpp"
#include "cpair/manifold.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace cpair {

struct CheckOptions {
  /// 0 selects the model default.
  double tol = 0.0;
  /// Unset selects default_samples(model).
  std::optional<SampleSpec> samples;
  /// Points at which the Reeb commutator is differenced (it costs 4n extra solves per point).
  std::size_t max_commutator_points = 512;
};

double resolve_tol(const Model& model, const CheckOptions& opts);
/// Full grid on invariant models and small grids, otherwise 4096 seeded random points.
SampleSpec default_samples(const Model& model);
PointSet resolve_points(const Model& model, const CheckOptions& opts);

class DegenerateFormError : public std::runtime_error {
 public:
  DegenerateFormError(const std::string& what, Witness w) : std::runtime_error(what), witness_(std::move(w)) {}
  const Witness& witness() const { return witness_; }

 private:
  Witness witness_;
};

/// Relative measures used by every "nonzero" and "vanishes" test.
struct PowerMeasures {
  /// |alpha ^ (d alpha)^k| / (|alpha| |d alpha|^k).
  double power_ratio = 0.0;
  /// |(d alpha)^(k+1)| / max(|alpha|, |d alpha|)^(k+1); zero when 2(k+1) > n.
  double next_residual = 0.0;
};
PowerMeasures power_measures(const FormValue& alpha, const FormValue& dalpha, int k);

/// Largest k with both tests passing at one point, or -1 (even class).
int pointwise_class(const FormValue& alpha, const FormValue& dalpha, double tol);

struct ClassReport {
  /// Maximal power k (class 2k+1); -1 when no uniform k exists.
  int k = -1;
  bool constant = true;
  bool passed = false;
  std::size_t points = 0;
  CheckItem power;  // lower: alpha ^ (d alpha)^k ratio
  CheckItem next;   // upper: (d alpha)^(k+1) residual
  std::optional<Witness> class_change;  // first point whose class differs from the first point's
};

/// Throws DegenerateFormError when alpha vanishes at a sample point.
ClassReport cartan_class(const FormField& alpha, const CheckOptions& opts = {});

struct PairSample {
  FormValue alpha, beta, dalpha, dbeta;
};

class PairSampler {
 public:
  PairSampler(FormField alpha, FormField beta);
  PairSample at(std::span<const double> point) const;
  const ModelPtr& model() const { return alpha_.model(); }
  const FormField& alpha() const { return alpha_; }
  const FormField& beta() const { return beta_; }

 private:
  FormField alpha_, beta_, dalpha_, dbeta_;
};

/// Coefficient of alpha ^ (d alpha)^k ^ beta ^ (d beta)^l in the coordinate volume.
double volume_coefficient(const PairSample& s, int k, int l);
/// |alpha| |d alpha|^k |beta| |d beta|^l.
double volume_scale(const PairSample& s, int k, int l);

struct ReebSolve {
  VectorValue e_alpha, e_beta;
  /// Largest relative residual of the two stacked solves.
  double residual = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Least-squares solve of the (2n+2) x n system
///   alpha(E) = 1 or 0, beta(E) = 0 or 1, i_E d alpha = 0, i_E d beta = 0.
ReebSolve solve_reeb(const PairSample& s);

struct SingleReebSolve {
  VectorValue reeb;
  double residual = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};
/// alpha(Z) = 1, i_Z d alpha = 0.
SingleReebSolve solve_reeb_single(const FormValue& alpha, const FormValue& dalpha);

struct ContactPairCertificate {
  int k = 0, l = 0;
  bool passed = false;
  double tol = 0.0;
  double min_abs_volume = 0.0;
  /// Sign of the volume coefficient at the first sample point.
  int orientation = 0;
  CheckItem volume;       // lower: relative volume ratio
  CheckItem orientation_constant;
  CheckItem dalpha_power;  // upper: (d alpha)^(k+1)
  CheckItem dbeta_power;   // upper: (d beta)^(l+1)
  CheckItem reeb_residual;
  CheckItem reeb_rank;     // lower: sigma_min / sigma_max
  CheckItem commutator;    // upper: |[E_alpha, E_beta]|
  double min_sigma = 0.0;
  PointSet points;
  std::vector<VectorValue> e_alpha, e_beta;

  std::vector<CheckItem> items() const;
};

/// Throws std::invalid_argument when 2k + 2l + 2 != n.
ContactPairCertificate verify_contact_pair(const FormField& alpha, const FormField& beta, int k, int l,
                                           const CheckOptions& opts = {});

class ContactPairError : public std::runtime_error {
 public:
  ContactPairError(const std::string& what, std::optional<Witness> w)
      : std::runtime_error(what), witness_(std::move(w)) {}
  const std::optional<Witness>& witness() const { return witness_; }

 private:
  std::optional<Witness> witness_;
};

struct ReebPair {
  PointwiseVectorField e_alpha, e_beta;
  ContactPairCertificate certificate;
};

/// Certifies the pair and returns pointwise Reeb solvers; throws ContactPairError on failure.
ReebPair reeb_pair(const FormField& alpha, const FormField& beta, int k, int l, const CheckOptions& opts = {});

/// Pointwise Reeb field of a single contact form.
PointwiseVectorField single_reeb_field(const FormField& alpha);

struct DarbouxModel {
  ModelPtr model;
  FormField alpha;
};
/// Box [-1,1]^(2k+1), axes (x1, y1, ..., xk, yk, z), alpha = dz + sum x_i dy_i.
DarbouxModel darboux_model(int k, int resolution = 32);

struct ProductPair {
  ModelPtr model;
  FormField alpha, beta;
  int k = 0, l = 0;
};

/// Pulls back contact forms of the two factors; throws ContactPairError if a factor is not contact.
ProductPair product_contact_pair(const FormField& alpha, const FormField& beta, const std::string& name = "",
                                 int coarse_resolution = 8, const CheckOptions& opts = {});

struct SingleDeformationStep {
  double t = 0.0;
  CheckItem contact;      // lower: alpha_t ^ (d alpha_t)^k ratio
  CheckItem orientation;  // the top coefficient keeps one sign
  bool holds = false;
};

struct SingleDeformationReport {
  int k = 0;
  double tol = 0.0;
  ClassReport alpha0_class;
  CheckItem alpha_contact;
  CheckItem alpha_orientation;
  CheckItem alpha0_on_reeb;  // upper: |alpha0(Z)|
  bool condition_ii = false;
  std::vector<SingleDeformationStep> steps;
  /// Unset when t_grid has no positive value.
  std::optional<bool> condition_i;
  std::optional<Witness> violation;
  std::optional<bool> agree;
};

/// Compares the two sides of the single-form criterion for alpha_t = alpha0 + t alpha.
/// Throws std::invalid_argument on even dimension or non-closed alpha0.
SingleDeformationReport verify_single_linear_deformation(const FormField& alpha0, const FormField& alpha,
                                                         const std::vector<double>& t_grid,
                                                         const CheckOptions& opts = {});

}  // namespace cpair
