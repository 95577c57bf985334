#include "cpair/exterior.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace cpair {

namespace {

// Per-dimension index data: the lexicographic lists for every degree and the
// rank of each subset (as a bitmask) inside its degree.
struct DimTables {
  std::vector<std::vector<MultiIndex>> lists;  // by degree
  std::vector<std::vector<unsigned>> masks;    // by degree, parallel to lists
  std::vector<int> rank;                       // by mask
};

struct WedgeEntry {
  int a, b, out;
  double sign;
};

struct InteriorEntry {
  int in, out, axis;
  double sign;
};

void enumerate(int n, int p, int start, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (static_cast<int>(cur.size()) == p) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    enumerate(n, p, i + 1, cur, out);
    cur.pop_back();
  }
}

void check_dim(int n) {
  if (n < 0 || n > kMaxDim)
    throw std::invalid_argument("dimension " + std::to_string(n) + " outside [0, " +
                                std::to_string(kMaxDim) + "]");
}

std::mutex& table_mutex() {
  static std::mutex m;
  return m;
}

const DimTables& dim_tables(int n) {
  check_dim(n);
  static std::array<std::atomic<const DimTables*>, kMaxDim + 1> cache{};
  if (auto* t = cache[n].load(std::memory_order_acquire)) return *t;
  std::lock_guard lock(table_mutex());
  if (auto* t = cache[n].load(std::memory_order_relaxed)) return *t;
  auto* t = new DimTables;
  t->lists.resize(n + 1);
  t->masks.resize(n + 1);
  t->rank.assign(std::size_t{1} << n, -1);
  for (int p = 0; p <= n; ++p) {
    MultiIndex cur;
    enumerate(n, p, 0, cur, t->lists[p]);
    for (std::size_t r = 0; r < t->lists[p].size(); ++r) {
      unsigned m = 0;
      for (int i : t->lists[p][r]) m |= 1u << i;
      t->masks[p].push_back(m);
      t->rank[m] = static_cast<int>(r);
    }
  }
  cache[n].store(t, std::memory_order_release);
  return *t;
}

const std::vector<WedgeEntry>& wedge_table(int n, int p, int q) {
  constexpr int S = kMaxDim + 1;
  static std::array<std::atomic<const std::vector<WedgeEntry>*>, S * S * S> cache{};
  const int key = (n * S + p) * S + q;
  if (auto* t = cache[key].load(std::memory_order_acquire)) return *t;
  const DimTables& d = dim_tables(n);
  std::lock_guard lock(table_mutex());
  if (auto* t = cache[key].load(std::memory_order_relaxed)) return *t;
  auto* t = new std::vector<WedgeEntry>;
  const auto& ma = d.masks[p];
  const auto& mb = d.masks[q];
  for (std::size_t i = 0; i < ma.size(); ++i) {
    for (std::size_t j = 0; j < mb.size(); ++j) {
      if (ma[i] & mb[j]) continue;
      // Sign of the permutation sorting I ++ J: count pairs a in I, b in J, a > b.
      int inversions = 0;
      for (int b : d.lists[q][j]) {
        const unsigned above = ma[i] & ~((2u << b) - 1u);
        inversions += std::popcount(above);
      }
      t->push_back({static_cast<int>(i), static_cast<int>(j), d.rank[ma[i] | mb[j]],
                    (inversions % 2) ? -1.0 : 1.0});
    }
  }
  cache[key].store(t, std::memory_order_release);
  return *t;
}

const std::vector<InteriorEntry>& interior_table(int n, int p) {
  constexpr int S = kMaxDim + 1;
  static std::array<std::atomic<const std::vector<InteriorEntry>*>, S * S> cache{};
  const int key = n * S + p;
  if (auto* t = cache[key].load(std::memory_order_acquire)) return *t;
  const DimTables& d = dim_tables(n);
  std::lock_guard lock(table_mutex());
  if (auto* t = cache[key].load(std::memory_order_relaxed)) return *t;
  auto* t = new std::vector<InteriorEntry>;
  for (std::size_t k = 0; k < d.lists[p].size(); ++k) {
    const MultiIndex& idx = d.lists[p][k];
    for (int r = 0; r < p; ++r) {
      const unsigned rest = d.masks[p][k] & ~(1u << idx[r]);
      t->push_back({static_cast<int>(k), d.rank[rest], idx[r], (r % 2) ? -1.0 : 1.0});
    }
  }
  cache[key].store(t, std::memory_order_release);
  return *t;
}

void require_same_dim(const FormValue& a, const FormValue& b, const char* op) {
  if (a.dim() != b.dim())
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace

std::size_t binomial(int n, int p) {
  if (p < 0 || p > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= p; ++i) r = r * static_cast<std::size_t>(n - p + i) / static_cast<std::size_t>(i);
  return r;
}

const std::vector<MultiIndex>& multi_indices(int n, int p) {
  const DimTables& d = dim_tables(n);
  if (p < 0 || p > n) throw std::invalid_argument("degree outside [0, n]");
  return d.lists[p];
}

std::size_t index_of(std::span<const int> idx, int n) {
  const DimTables& d = dim_tables(n);
  unsigned m = 0;
  int prev = -1;
  for (int i : idx) {
    if (i <= prev || i >= n) throw std::invalid_argument("multi-index must be strictly increasing in [0, n)");
    m |= 1u << i;
    prev = i;
  }
  return static_cast<std::size_t>(d.rank[m]);
}

FormValue::FormValue(int n, int p) : n_(n), p_(p) {
  check_dim(n);
  if (p < 0 || p > n) throw std::invalid_argument("form degree outside [0, n]");
  c_.assign(binomial(n, p), 0.0);
}

FormValue::FormValue(int n, int p, std::vector<double> coeffs) : FormValue(n, p) {
  if (coeffs.size() != c_.size())
    throw std::invalid_argument("expected " + std::to_string(c_.size()) + " coefficients, got " +
                                std::to_string(coeffs.size()));
  c_ = std::move(coeffs);
}

FormValue FormValue::scalar(int n, double value) { return FormValue(n, 0, {value}); }

FormValue FormValue::basis(int n, std::span<const int> idx, double scale) {
  FormValue f(n, static_cast<int>(idx.size()));
  f.c_[index_of(idx, n)] = scale;
  return f;
}

FormValue FormValue::covector(std::span<const double> components) {
  const int n = static_cast<int>(components.size());
  return FormValue(n, 1, std::vector<double>(components.begin(), components.end()));
}

double FormValue::coeff(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != p_) throw std::invalid_argument("multi-index length differs from degree");
  return c_[index_of(idx, n_)];
}

double FormValue::top() const {
  if (c_.size() != 1) throw std::invalid_argument("top(): form has more than one coefficient");
  return c_[0];
}

VectorValue FormValue::as_vector() const {
  if (p_ != 1) throw std::invalid_argument("as_vector(): not a 1-form");
  return Eigen::Map<const VectorValue>(c_.data(), n_);
}

FormValue FormValue::operator+(const FormValue& o) const {
  require_same_dim(*this, o, "add");
  if (p_ != o.p_) throw std::invalid_argument("add: degree mismatch");
  FormValue r = *this;
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
  return r;
}

FormValue FormValue::operator-(const FormValue& o) const { return *this + (-o); }

FormValue FormValue::operator-() const { return *this * -1.0; }

FormValue FormValue::operator*(double s) const {
  FormValue r = *this;
  for (double& c : r.c_) c *= s;
  return r;
}

double FormValue::operator()(const VectorValue& v) const {
  if (p_ != 1 || v.size() != n_) throw std::invalid_argument("1-form pairing: shape mismatch");
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += c_[i] * v[i];
  return s;
}

FormValue wedge(const FormValue& a, const FormValue& b) {
  require_same_dim(a, b, "wedge");
  const int n = a.dim();
  if (a.degree() + b.degree() > n)
    throw std::invalid_argument("wedge: degree " + std::to_string(a.degree() + b.degree()) +
                                " exceeds dimension " + std::to_string(n));
  std::vector<double> out(binomial(n, a.degree() + b.degree()), 0.0);
  const auto& ca = a.coeffs();
  const auto& cb = b.coeffs();
  for (const WedgeEntry& e : wedge_table(n, a.degree(), b.degree())) {
    const double x = ca[e.a];
    if (x == 0.0) continue;
    out[e.out] += e.sign * x * cb[e.b];
  }
  return FormValue(n, a.degree() + b.degree(), std::move(out));
}

FormValue interior(const VectorValue& x, const FormValue& w) {
  if (x.size() != w.dim()) throw std::invalid_argument("interior: dimension mismatch");
  if (w.degree() == 0) throw std::invalid_argument("interior: cannot contract a scalar");
  std::vector<double> out(binomial(w.dim(), w.degree() - 1), 0.0);
  const auto& c = w.coeffs();
  for (const InteriorEntry& e : interior_table(w.dim(), w.degree()))
    out[e.out] += e.sign * x[e.axis] * c[e.in];
  return FormValue(w.dim(), w.degree() - 1, std::move(out));
}

double evaluate(const FormValue& w, std::span<const VectorValue> vectors) {
  if (static_cast<int>(vectors.size()) != w.degree())
    throw std::invalid_argument("evaluate: expected " + std::to_string(w.degree()) + " vectors, got " +
                                std::to_string(vectors.size()));
  FormValue cur = w;
  for (const VectorValue& v : vectors) cur = interior(v, cur);
  return cur.top();
}

FormValue wedge_power(const FormValue& w, int k) {
  if (w.degree() != 2) throw std::invalid_argument("wedge_power: form must have degree 2");
  if (k < 0 || 2 * k > w.dim())
    throw std::invalid_argument("wedge_power: power " + std::to_string(k) + " overflows dimension " +
                                std::to_string(w.dim()));
  FormValue r = FormValue::scalar(w.dim(), 1.0);
  for (int i = 0; i < k; ++i) r = wedge(r, w);
  return r;
}

double norm_inf(const FormValue& w) {
  double m = 0.0;
  for (double c : w.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

BivectorValue::BivectorValue(int n) : n_(n) {
  check_dim(n);
  c_.assign(binomial(n, 2), 0.0);
}

double BivectorValue::operator()(int i, int j) const {
  if (i == j) return 0.0;
  if (i > j) return -(*this)(j, i);
  const int idx[2] = {i, j};
  return c_[index_of(idx, n_)];
}

void BivectorValue::set(int i, int j, double value) {
  if (i == j) throw std::invalid_argument("bivector: diagonal entry");
  if (i > j) {
    std::swap(i, j);
    value = -value;
  }
  const int idx[2] = {i, j};
  c_[index_of(idx, n_)] = value;
}

double BivectorValue::pair(const VectorValue& a, const VectorValue& b) const {
  double s = 0.0;
  const auto& pairs = multi_indices(n_, 2);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const int i = pairs[r][0], j = pairs[r][1];
    s += c_[r] * (a[i] * b[j] - a[j] * b[i]);
  }
  return s;
}

}  // namespace cpair
