#pragma once

// Linear deformations alpha_t = alpha0 + t alpha, beta_t = beta0 + t beta of a
// pair of closed 1-forms, and the checks built on them.

#include "cpair/contact.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cpair {

class InvalidFamily : public std::invalid_argument {
 public:
  InvalidFamily(const std::string& what, std::optional<Witness> w = std::nullopt)
      : std::invalid_argument(what), witness_(std::move(w)) {}
  const std::optional<Witness>& witness() const { return witness_; }

 private:
  std::optional<Witness> witness_;
};

struct DeformationFamily {
  ModelPtr model;
  FormField alpha0, beta0, alpha, beta;
  int k = 0, l = 0;

  /// Checks dimensions, closedness of alpha0 and beta0, and alpha0 ^ beta0 != 0 on the samples.
  static DeformationFamily make(FormField alpha0, FormField beta0, FormField alpha, FormField beta, int k, int l,
                                const CheckOptions& opts = {});
};

std::pair<FormField, FormField> family_at(const DeformationFamily& f, double t);

struct ABCReport {
  PointSet points;
  std::vector<double> a, b, c;
  double min_a = 0, max_a = 0, min_b = 0, max_b = 0, max_abs_b = 0, max_abs_c = 0;
};

/// A, B, C as multiples of omega (the coordinate volume when unset).
/// Throws std::invalid_argument when omega vanishes at a sample.
ABCReport compute_abc(const DeformationFamily& f, const std::optional<FormField>& omega = std::nullopt,
                      const CheckOptions& opts = {});

/// max over samples and t of |vol(alpha_t, beta_t) - t^(k+l) (t^2 A + t B + C) omega| / scale.
double volume_identity_defect(const DeformationFamily& f, const std::vector<double>& t_samples,
                              const std::optional<FormField>& omega = std::nullopt, const CheckOptions& opts = {});

/// Supplies one 1-form per call at a point.
using OneFormSource = std::function<FormValue(std::span<const double> point)>;
OneFormSource field_source(const FormField& w);
/// Independent covectors with coefficients uniform in [-1, 1]; deterministic in the seed.
OneFormSource random_source(int n, std::uint64_t seed);

struct LemmaDefects {
  double p1 = 0.0;
  double p2 = 0.0;
};

/// Relative defects of
///   w ^ (d alpha)^k ^ beta ^ (d beta)^l - w(E_alpha) vol,
///   w ^ alpha ^ (d alpha)^k ^ (d beta)^l + w(E_beta) vol,
/// over `count` inputs cycling through the sample points.
LemmaDefects lemma_p1_p2_check(const FormField& alpha, const FormField& beta, int k, int l, const OneFormSource& w,
                               std::size_t count, const CheckOptions& opts = {});

/// max |w ^ (d alpha)^k ^ v ^ (d beta)^l| / scale; with project, w and v are first
/// replaced by w - w(E_beta) beta so that both vanish on E_beta.
double lemma_p3_check(const FormField& alpha, const FormField& beta, int k, int l, const OneFormSource& w,
                      const OneFormSource& v, std::size_t count, bool project, const CheckOptions& opts = {});

enum class Outcome { pass, not_applicable, falsified };
const char* to_string(Outcome o);

struct TStep {
  double t = 0.0;
  std::vector<CheckItem> items;
};

struct TheoremVerdict {
  std::string direction;
  std::vector<CheckItem> hypotheses;
  std::vector<CheckItem> conclusions;
  /// Reported values that do not enter the outcome.
  std::vector<CheckItem> facts;
  /// Per-t certificate items behind the merged entries above.
  std::vector<TStep> steps;
  Outcome outcome = Outcome::falsified;
};

std::vector<double> default_forward_grid();   // +-10^j, j = -2..1
std::vector<double> default_converse_grid();  // 10^j, j = -2..1

/// Hypotheses: (alpha, beta) is a contact pair of type (k, l) and the four pairings
/// alpha0(E_alpha), alpha0(E_beta), beta0(E_alpha), beta0(E_beta) vanish.
/// Conclusions for each nonzero t: (alpha_t, beta_t) is a contact pair of type (k, l)
/// with Reeb pair (E_alpha / t, E_beta / t).
TheoremVerdict verify_forward(const DeformationFamily& f, const std::vector<double>& t_grid,
                              const CheckOptions& opts = {});

/// Hypotheses: (alpha_t, beta_t) is a contact pair for every t and t E_{alpha_t}, t E_{beta_t}
/// do not depend on t. Conclusions: (alpha, beta) is a contact pair with Reeb pair (X, Y)
/// and the four pairings vanish. Facts: max |C|, max |B|, min B, and with integrals the two
/// Stokes integrals.
/// Throws std::invalid_argument unless t_grid has >= 4 positive values spanning a factor >= 100,
/// or when integrals are requested on a model with boundary.
TheoremVerdict verify_converse(const DeformationFamily& f, const std::vector<double>& t_grid,
                               const CheckOptions& opts = {}, bool integrals = true);

/// |integral of alpha0 ^ (d alpha)^k ^ beta ^ (d beta)^l| and |integral of alpha ^ (d alpha)^k ^ beta0 ^ (d beta)^l|.
std::pair<double, double> stokes_vanishing_check(const DeformationFamily& f);

struct SweepRow {
  double t = 0.0;
  double min_volume_coeff = 0.0;
  double max_volume_coeff = 0.0;
  double max_reeb_residual = 0.0;
};
std::vector<SweepRow> sweep(const DeformationFamily& f, const std::vector<double>& t_grid, const CheckOptions& opts = {});
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace cpair
