#include <doctest.h>

#include "cpair/manifold.hpp"
#include "oracles.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

using namespace cpair;

namespace {

constexpr double kPi = std::numbers::pi;

ModelPtr so3() {
  StructureConstants c(3);
  c.set_bracket(0, 1, 2, 1.0);
  c.set_bracket(1, 2, 0, 1.0);
  c.set_bracket(2, 0, 1, 1.0);
  return Model::lie_group("so3", c);
}

ModelPtr h3xh3() { return Model::product("h3xh3", Model::heisenberg3(), Model::heisenberg3()); }

// Chevalley-Eilenberg formula evaluated on frame vectors:
// (dw)(X0..Xp) = sum_{r<s} (-1)^{r+s} w([Xr, Xs], X0..^r..^s..Xp).
double chevalley_eilenberg(const StructureConstants& c, const FormValue& w, const std::vector<int>& args) {
  const int n = c.dim();
  double total = 0.0;
  const int m = static_cast<int>(args.size());
  for (int r = 0; r < m; ++r)
    for (int s = r + 1; s < m; ++s) {
      VectorValue br = VectorValue::Zero(n);
      for (int k = 0; k < n; ++k) br[k] = c(args[r], args[s], k);
      std::vector<VectorValue> vs{br};
      for (int t = 0; t < m; ++t)
        if (t != r && t != s) vs.push_back(VectorValue::Unit(n, args[t]));
      total += (((r + s) % 2) ? -1.0 : 1.0) * oracle::evaluate_det(w, vs);
    }
  return total;
}

std::string random_trig(oracle::Rng& rng, int n, int terms) {
  std::string s = fmt::format("{:.6f}", rng.uniform());
  for (int t = 0; t < terms; ++t) {
    const int i = rng.integer(0, n - 1), j = rng.integer(0, n - 1);
    const int a = rng.integer(1, 2), b = rng.integer(0, 2);
    s += fmt::format(" + {:.6f}*sin({}*x{})*cos({}*x{})", rng.uniform(), a, i, b, j);
  }
  return s;
}

FormField random_chart_form(oracle::Rng& rng, const ModelPtr& m, int p) {
  std::vector<std::string> c(binomial(m->dim(), p));
  for (auto& s : c) s = random_trig(rng, m->dim(), 3);
  return FormField::parse(m, p, c);
}

double max_abs_over(const FormField& f, const PointSet& pts) {
  double m = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) m = std::max(m, norm_inf(f.at(pts[i])));
  return m;
}

}  // namespace

TEST_CASE("structure constant invariants") {
  const ModelPtr h = Model::heisenberg3();
  CHECK(h->frame().antisymmetry_defect() == 0.0);
  CHECK(h->frame().jacobi_defect() < 1e-12);
  CHECK(so3()->frame().jacobi_defect() < 1e-12);

  StructureConstants bad(3);
  bad.set_raw(0, 1, 2, 1.0);
  CHECK_THROWS(Model::lie_group("bad", bad));

  StructureConstants non_jacobi(3);
  non_jacobi.set_bracket(0, 1, 0, 1.0);
  non_jacobi.set_bracket(1, 2, 1, 1.0);
  non_jacobi.set_bracket(2, 0, 2, 1.0);
  CHECK(non_jacobi.jacobi_defect() > 0.1);
  CHECK_THROWS(Model::lie_group("nj", non_jacobi));
  CHECK_NOTHROW(Model::lie_group("nj", non_jacobi, false));
}

TEST_CASE("Heisenberg exterior derivative") {
  const ModelPtr h = Model::heisenberg3();
  const PointSet pt = sample_points(*h, SampleSpec::grid());
  REQUIRE(pt.size() == 1);
  const int i0[1] = {0}, i1[1] = {1}, i2[1] = {2}, i01[2] = {0, 1};
  const FormValue d2 = exterior_derivative(FormField::constant(h, FormValue::basis(3, i2))).at(pt[0]);
  CHECK(d2.coeff(i01) == -1.0);
  CHECK(norm_inf(d2) == 1.0);
  CHECK(norm_inf(exterior_derivative(FormField::constant(h, FormValue::basis(3, i0))).at(pt[0])) == 0.0);
  CHECK(norm_inf(exterior_derivative(FormField::constant(h, FormValue::basis(3, i1))).at(pt[0])) == 0.0);
}

TEST_CASE("invariant d agrees with the Chevalley-Eilenberg formula") {
  oracle::Rng rng(21);
  for (const ModelPtr& m : {Model::heisenberg3(), so3(), h3xh3()}) {
    const int n = m->dim();
    const PointSet pt = sample_points(*m, SampleSpec::grid());
    for (int p = 0; p < n; ++p) {
      for (int trial = 0; trial < 5; ++trial) {
        const FormValue w = rng.form(n, p);
        const FormValue dw = exterior_derivative(FormField::constant(m, w)).at(pt[0]);
        const auto& idx = multi_indices(n, p + 1);
        for (std::size_t r = 0; r < idx.size(); ++r)
          CHECK(dw[r] == doctest::Approx(chevalley_eilenberg(m->frame(), w, idx[r])).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("chart exterior derivative of the torus contact form") {
  const ModelPtr t3 = Model::torus(3);
  const FormField w = FormField::parse(t3, 1, {"0", "cos(x0)", "sin(x0)"});
  const FormField dw = exterior_derivative(w);
  const FormField expected = FormField::parse(t3, 2, {"-sin(x0)", "cos(x0)", "0"});
  oracle::Rng rng(22);
  for (int i = 0; i < 50; ++i) {
    const double p[3] = {rng.uniform(0, 2 * kPi), rng.uniform(0, 2 * kPi), rng.uniform(0, 2 * kPi)};
    CHECK(norm_inf(dw.at(p) - expected.at(p)) < 1e-15);
  }
}

TEST_CASE("d of d vanishes") {
  oracle::Rng rng(23);
  SUBCASE("invariant backends") {
    for (const ModelPtr& m : {so3(), h3xh3()}) {
      const PointSet pt = sample_points(*m, SampleSpec::grid());
      for (int p = 0; p + 2 <= m->dim(); ++p)
        for (int trial = 0; trial < 20; ++trial) {
          const FormField w = FormField::constant(m, rng.form(m->dim(), p));
          CHECK(norm_inf(exterior_derivative(exterior_derivative(w)).at(pt[0])) <= 1e-12);
        }
    }
  }
  SUBCASE("chart backend") {
    const ModelPtr t4 = Model::torus(4, 8);
    const PointSet pts = sample_points(*t4, SampleSpec::random(50, 5));
    for (int p = 0; p + 2 <= 4; ++p)
      for (int trial = 0; trial < 5; ++trial) {
        const FormField w = random_chart_form(rng, t4, p);
        CHECK(max_abs_over(exterior_derivative(exterior_derivative(w)), pts) <= 1e-10);
      }
  }
  SUBCASE("failing Jacobi identity breaks d^2 = 0") {
    StructureConstants nj(3);
    nj.set_bracket(0, 1, 0, 1.0);
    nj.set_bracket(1, 2, 1, 1.0);
    nj.set_bracket(2, 0, 2, 1.0);
    const ModelPtr m = Model::lie_group("nj", nj, false);
    const PointSet pt = sample_points(*m, SampleSpec::grid());
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int idx[1] = {k};
      const FormField w = FormField::constant(m, FormValue::basis(3, idx));
      worst = std::max(worst, norm_inf(exterior_derivative(exterior_derivative(w)).at(pt[0])));
    }
    CHECK(worst > 0.1);
  }
}

TEST_CASE("sample points") {
  const ModelPtr t1 = Model::torus(1, 4);
  const PointSet pts = sample_points(*t1, SampleSpec::grid());
  REQUIRE(pts.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(pts[i][0] == doctest::Approx(i * kPi / 2));

  CHECK(sample_points(*Model::heisenberg3(), SampleSpec::grid()).size() == 1);
  CHECK(sample_points(*Model::heisenberg3(), SampleSpec::random(100, 1)).size() == 1);

  const ModelPtr t6 = Model::product("T3xT3", Model::torus(3), Model::torus(3));
  CHECK(sample_points(*t6, SampleSpec::grid()).size() == 262144);

  const PointSet r1 = sample_points(*t6, SampleSpec::random(100, 9));
  const PointSet r2 = sample_points(*t6, SampleSpec::random(100, 9));
  REQUIRE(r1.size() == 100);
  for (std::size_t i = 0; i < r1.size(); ++i)
    for (int a = 0; a < 6; ++a) {
      CHECK(r1[i][a] == r2[i][a]);
      CHECK(r1[i][a] >= 0.0);
      CHECK(r1[i][a] < 2 * kPi);
    }

  // Box axes sample cell midpoints.
  const PointSet d = sample_points(*Model::darboux(1, 4), SampleSpec::grid());
  CHECK(d.size() == 64);
  CHECK(d[0][0] == doctest::Approx(-0.75));
}

TEST_CASE("integration") {
  const ModelPtr t1 = Model::torus(1, 32);
  CHECK(std::abs(integrate(FormField::parse(t1, 1, {"cos(x0)"}))) < 1e-12);
  const ModelPtr t3 = Model::torus(3, 32);
  CHECK(integrate(FormField::volume(t3)) == doctest::Approx(std::pow(2 * kPi, 3)).epsilon(1e-12));
  CHECK_THROWS(integrate(FormField::parse(t3, 1, {"1", "0", "0"})));
  // Invariant factors carry unit volume.
  CHECK(integrate(FormField::volume(Model::heisenberg3())) == 1.0);
}

TEST_CASE("Stokes oracle: integral of d(eta) vanishes on closed models") {
  oracle::Rng rng(24);
  const ModelPtr t3 = Model::torus(3, 32);
  const ModelPtr t2 = Model::torus(2, 32);
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(std::abs(integrate(exterior_derivative(random_chart_form(rng, t3, 2)))) < 1e-8);
    CHECK(std::abs(integrate(exterior_derivative(random_chart_form(rng, t2, 1)))) < 1e-8);
  }
}

TEST_CASE("lie brackets of fields") {
  const ModelPtr h = Model::heisenberg3();
  const VectorField e0 = VectorField::constant(h, VectorValue::Unit(3, 0));
  const VectorField e1 = VectorField::constant(h, VectorValue::Unit(3, 1));
  const double origin[3] = {0, 0, 0};
  CHECK((lie_bracket_fields(e0, e1).at(origin) - VectorValue::Unit(3, 2)).norm() == 0.0);

  const ModelPtr box = Model::chart("R2", {Axis::box(-1, 1), Axis::box(-1, 1)});
  const VectorField dx = VectorField::parse(box, {"1", "0"});
  const VectorField xdy = VectorField::parse(box, {"0", "x0"});
  const double p[2] = {0.3, -0.2};
  CHECK((lie_bracket_fields(dx, xdy).at(p) - VectorValue::Unit(2, 1)).norm() == 0.0);

  // Finite-difference variant at a point, including a box edge.
  auto fx = [&](std::span<const double> q) { return dx.at(q); };
  auto fy = [&](std::span<const double> q) { return xdy.at(q); };
  const double edge[2] = {0.99, 0.0};
  CHECK((lie_bracket_at(*box, p, fx, fy) - VectorValue::Unit(2, 1)).norm() < 1e-12);
  CHECK((lie_bracket_at(*box, edge, fx, fy) - VectorValue::Unit(2, 1)).norm() < 1e-12);

  const VectorField x = VectorField::parse(Model::torus(3), {"sin(x1)", "cos(x0)*x2", "1"});
  const double q[3] = {0.1, 0.2, 0.3};
  CHECK(lie_bracket_fields(x, x).at(q).norm() == 0.0);
}

TEST_CASE("pullback commutes with d on products") {
  oracle::Rng rng(25);
  const ModelPtr t3 = Model::torus(3, 8);
  const ModelPtr h = Model::heisenberg3();
  const ModelPtr mixed = Model::product("h3xT3", h, t3);
  const ModelPtr t6 = Model::product("T3xT3", t3, t3);
  const PointSet pts = sample_points(*t6, SampleSpec::random(40, 3));
  const PointSet mpts = sample_points(*mixed, SampleSpec::random(40, 4));
  for (int trial = 0; trial < 5; ++trial) {
    const FormField w = random_chart_form(rng, t3, 1);
    CHECK(max_abs_over(exterior_derivative(pullback_right(t6, w)) - pullback_right(t6, exterior_derivative(w)),
                       pts) < 1e-13);
    CHECK(max_abs_over(exterior_derivative(pullback_left(t6, w)) - pullback_left(t6, exterior_derivative(w)),
                       pts) < 1e-13);
    CHECK(max_abs_over(exterior_derivative(pullback_right(mixed, w)) -
                           pullback_right(mixed, exterior_derivative(w)),
                       mpts) < 1e-13);
    const FormField lw = FormField::constant(h, rng.form(3, 1));
    CHECK(max_abs_over(exterior_derivative(pullback_left(mixed, lw)) - pullback_left(mixed, exterior_derivative(lw)),
                       mpts) < 1e-13);
  }
  // Coefficients may not depend on invariant axes.
  CHECK_THROWS(FormField::parse(mixed, 1, {"x0", "0", "0", "0", "0", "0"}));
}

TEST_CASE("symbolic wedge of fields matches the pointwise wedge") {
  oracle::Rng rng(26);
  const ModelPtr t3 = Model::torus(3, 8);
  const FormField a = random_chart_form(rng, t3, 1), b = random_chart_form(rng, t3, 2);
  const PointSet pts = sample_points(*t3, SampleSpec::random(20, 2));
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(norm_inf(wedge(a, b).at(pts[i]) - wedge(a.at(pts[i]), b.at(pts[i]))) < 1e-14);
}
