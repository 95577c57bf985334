#include <doctest.h>

#include "cpair/exterior.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace cpair;

namespace {

VectorValue unit(int n, int i) { return VectorValue::Unit(n, i); }

double max_diff(const FormValue& a, const FormValue& b) { return norm_inf(a - b); }

}  // namespace

TEST_CASE("multi-index enumeration is lexicographic and ranked") {
  const auto& idx = multi_indices(4, 2);
  REQUIRE(idx.size() == 6);
  CHECK(idx[0] == MultiIndex{0, 1});
  CHECK(idx[2] == MultiIndex{0, 3});
  CHECK(idx[5] == MultiIndex{2, 3});
  for (int n = 0; n <= 6; ++n)
    for (int p = 0; p <= n; ++p) {
      const auto& list = multi_indices(n, p);
      CHECK(list.size() == binomial(n, p));
      CHECK(std::is_sorted(list.begin(), list.end()));
      for (std::size_t r = 0; r < list.size(); ++r) CHECK(index_of(list[r], n) == r);
    }
  const int bad[2] = {1, 1};
  CHECK_THROWS(index_of(bad, 3));
}

TEST_CASE("wedge of basis covectors") {
  const int i0[1] = {0}, i1[1] = {1}, i01[2] = {0, 1};
  const FormValue dx0 = FormValue::basis(3, i0), dx1 = FormValue::basis(3, i1);
  const FormValue w = wedge(dx0, dx1);
  CHECK(w.degree() == 2);
  CHECK(w.coeff(i01) == 1.0);
  CHECK(norm_inf(w) == 1.0);
  CHECK(max_diff(wedge(dx1, dx0), -w) == 0.0);
}

TEST_CASE("(dz + x dy) ^ (dx ^ dy) is the volume element") {
  const double x = 0.7;
  const FormValue alpha = FormValue::covector(std::vector<double>{0.0, x, 1.0});
  const int i01[2] = {0, 1};
  const FormValue w = wedge(alpha, FormValue::basis(3, i01));
  CHECK(w.top() == 1.0);
}

TEST_CASE("wedge errors") {
  CHECK_THROWS(wedge(FormValue(3, 1), FormValue(4, 1)));
  CHECK_THROWS(wedge(FormValue(3, 2), FormValue(3, 2)));
}

TEST_CASE("interior product examples") {
  const VectorValue dz = unit(3, 2);
  const FormValue alpha = FormValue::covector(std::vector<double>{0.0, 2.0, 1.0});
  CHECK(interior(dz, alpha).top() == 1.0);
  const int i01[2] = {0, 1};
  CHECK(norm_inf(interior(dz, FormValue::basis(3, i01))) == 0.0);
  CHECK_THROWS(interior(dz, FormValue::scalar(3, 1.0)));

  oracle::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(2, 7);
    const int p = rng.integer(2, n);
    const VectorValue x = rng.vector(n);
    CHECK(norm_inf(interior(x, interior(x, rng.form(n, p)))) < 1e-14);
  }
}

TEST_CASE("evaluate matches orientation and alternation") {
  const int i01[2] = {0, 1};
  const FormValue w = FormValue::basis(3, i01);
  const VectorValue e0 = unit(3, 0), e1 = unit(3, 1);
  const VectorValue args[2] = {e0, e1};
  const VectorValue swapped[2] = {e1, e0};
  CHECK(evaluate(w, args) == 1.0);
  CHECK(evaluate(w, swapped) == -1.0);
  CHECK_THROWS(evaluate(w, std::span<const VectorValue>(args, 1)));

  oracle::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(2, 6);
    const int p = rng.integer(1, n);
    const FormValue f = rng.form(n, p);
    std::vector<VectorValue> vs;
    for (int i = 0; i < p; ++i) vs.push_back(rng.vector(n));
    // Independent determinant formula.
    CHECK(evaluate(f, vs) == doctest::Approx(oracle::evaluate_det(f, vs)).epsilon(1e-12));
    if (p >= 2) {
      auto rep = vs;
      rep[1] = rep[0];
      CHECK(std::abs(evaluate(f, rep)) < 1e-13);
    }
  }
}

TEST_CASE("wedge agrees with the shuffle-sum oracle") {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(2, 6);
    const int p = rng.integer(0, n);
    const int q = rng.integer(0, n - p);
    const FormValue a = rng.form(n, p), b = rng.form(n, q);
    std::vector<VectorValue> vs;
    for (int i = 0; i < p + q; ++i) vs.push_back(rng.vector(n));
    const double got = evaluate(wedge(a, b), vs);
    CHECK(got == doctest::Approx(oracle::shuffle_wedge_eval(a, b, vs)).epsilon(1e-12));
  }
}

TEST_CASE("wedge_power") {
  const int i01[2] = {0, 1}, i23[2] = {2, 3}, i0123[4] = {0, 1, 2, 3};
  const FormValue w = FormValue::basis(4, i01) + FormValue::basis(4, i23);
  CHECK(max_diff(wedge_power(FormValue::basis(3, i01), 1), FormValue::basis(3, i01)) == 0.0);
  CHECK(wedge_power(w, 0).top() == 1.0);

  // Oracle: shuffle-sum evaluation of w ^ w on (e0, e1, e2, e3).
  std::vector<VectorValue> basis;
  for (int i = 0; i < 4; ++i) basis.push_back(unit(4, i));
  const double expected = oracle::shuffle_wedge_eval(w, w, basis);
  CHECK(expected == 2.0);
  CHECK(wedge_power(w, 2).coeff(i0123) == expected);

  CHECK_THROWS(wedge_power(w, 3));
  CHECK_THROWS(wedge_power(FormValue(4, 1), 1));
}

TEST_CASE("norm_inf") {
  CHECK(norm_inf(FormValue(4, 2)) == 0.0);
  CHECK(norm_inf(FormValue::covector(std::vector<double>{0.0, 2.0, 1.0})) == 2.0);

  // Sanity bound: each output coefficient collects at most C(p+q, p) shuffle terms.
  oracle::Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(2, 6);
    const int p = rng.integer(0, n);
    const int q = rng.integer(0, n - p);
    const FormValue a = rng.form(n, p), b = rng.form(n, q);
    CHECK(norm_inf(wedge(a, b)) <= binomial(p + q, p) * norm_inf(a) * norm_inf(b) + 1e-15);
  }
}

TEST_CASE("exterior algebra properties over 1000 random cases") {
  oracle::Rng rng(2024);
  double worst_comm = 0, worst_assoc = 0, worst_anti = 0, worst_bilin = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.integer(2, 7);
    const int p = rng.integer(0, n);
    const int q = rng.integer(0, n - p);
    const int r = rng.integer(0, n - p - q);
    const FormValue a = rng.form(n, p), b = rng.form(n, q), c = rng.form(n, r);
    const double sign = ((p * q) % 2) ? -1.0 : 1.0;
    worst_comm = std::max(worst_comm, max_diff(wedge(a, b), sign * wedge(b, a)));
    worst_assoc = std::max(worst_assoc, max_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))));
    if (p + q >= 1) {
      const VectorValue x = rng.vector(n);
      const FormValue lhs = interior(x, wedge(a, b));
      FormValue rhs(n, p + q - 1);
      if (p >= 1) rhs = rhs + wedge(interior(x, a), b);
      if (q >= 1) rhs = rhs + ((p % 2) ? -1.0 : 1.0) * wedge(a, interior(x, b));
      worst_anti = std::max(worst_anti, max_diff(lhs, rhs));
    }
    const FormValue a2 = rng.form(n, p);
    const double s = rng.uniform();
    worst_bilin = std::max(worst_bilin, max_diff(wedge(a + s * a2, b), wedge(a, b) + s * wedge(a2, b)));
  }
  CHECK(worst_comm < 1e-14);
  CHECK(worst_assoc < 1e-13);
  CHECK(worst_anti < 1e-13);
  CHECK(worst_bilin < 1e-13);
}

TEST_CASE("bivector storage is antisymmetric") {
  BivectorValue b(4);
  b.set(2, 1, 3.0);
  CHECK(b(1, 2) == -3.0);
  CHECK(b(2, 1) == 3.0);
  CHECK(b(0, 0) == 0.0);
  CHECK(b.size() == 6);
  const VectorValue e1 = unit(4, 1), e2 = unit(4, 2);
  CHECK(b.pair(e1, e2) == -3.0);
  CHECK(b.pair(e2, e1) == 3.0);
}
