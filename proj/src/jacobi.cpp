#include "cpair/jacobi.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace cpair {

namespace {

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

// Active-axis derivative of a strided nodal array.
template <class Get>
double grid_derivative(const LeafGrid& grid, std::size_t node, int c, Get&& get) {
  double s = 0.0;
  for (const auto& tap : grid.stencil(node, c)) s += tap.weight * get(tap.node);
  return s;
}

// sum_b X^b d_b Y^a at one node.
double directional(const LeafGrid& grid, const GridVectorField& x, const GridVectorField& y, std::size_t node, int a) {
  double s = 0.0;
  for (int b = 0; b < grid.dim(); ++b)
    s += x.at(node, b) * grid_derivative(grid, node, b, [&](std::size_t q) { return y.at(q, a); });
  return s;
}

GridFunction bracket_of_fields(const GridVectorField& x, const GridVectorField& y, const JacobiSide& side) {
  const LeafGrid& grid = side.grid();
  GridFunction out;
  out.values.resize(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    double v = 0.0;
    for (int a = 0; a < grid.dim(); ++a)
      v += side.theta(node, a) * (directional(grid, x, y, node, a) - directional(grid, y, x, node, a));
    out.values[node] = v;
  }
  return out;
}

}  // namespace

LeafGrid::LeafGrid(const Model& model, std::vector<int> active, int resolution, std::vector<double> base)
    : active_(std::move(active)), base_(std::move(base)), n_(resolution) {
  if (resolution < 3) throw std::invalid_argument("leaf grid: resolution must be >= 3");
  if (static_cast<int>(base_.size()) != model.dim()) throw std::invalid_argument("leaf grid: base point dimension");
  nodes_ = 1;
  for (int a : active_) {
    const Axis& ax = model.axis(a);
    if (!ax.is_coordinate()) throw JacobiError("leaf grid: invariant axes are not supported");
    periodic_.push_back(ax.kind == AxisKind::periodic);
    lo_.push_back(ax.lo);
    h_.push_back(ax.length() / resolution);
    nodes_ *= static_cast<std::size_t>(resolution);
  }
}

double LeafGrid::max_step() const { return h_.empty() ? 0.0 : *std::max_element(h_.begin(), h_.end()); }

std::vector<int> LeafGrid::index(std::size_t node) const {
  std::vector<int> idx(dim());
  for (int c = dim() - 1; c >= 0; --c) {
    idx[c] = static_cast<int>(node % n_);
    node /= n_;
  }
  return idx;
}

std::size_t LeafGrid::flat(const std::vector<int>& idx) const {
  std::size_t node = 0;
  for (int c = 0; c < dim(); ++c) node = node * n_ + static_cast<std::size_t>(idx[c]);
  return node;
}

std::vector<double> LeafGrid::point(std::size_t node) const {
  std::vector<double> p = base_;
  const std::vector<int> idx = index(node);
  for (int c = 0; c < dim(); ++c) p[active_[c]] = lo_[c] + (idx[c] + (periodic_[c] ? 0.0 : 0.5)) * h_[c];
  return p;
}

bool LeafGrid::interior(std::size_t node) const {
  const std::vector<int> idx = index(node);
  for (int c = 0; c < dim(); ++c)
    if (!periodic_[c] && (idx[c] == 0 || idx[c] == n_ - 1)) return false;
  return true;
}

std::vector<std::pair<int, double>> LeafGrid::stencil_offsets(int i, int c) const {
  const double h = h_[c];
  if (periodic_[c]) return {{-2, 1.0 / (12 * h)}, {-1, -8.0 / (12 * h)}, {1, 8.0 / (12 * h)}, {2, -1.0 / (12 * h)}};
  if (i > 0 && i < n_ - 1) return {{-1, -0.5 / h}, {1, 0.5 / h}};
  if (i == 0) return {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
  return {{0, 1.5 / h}, {-1, -2.0 / h}, {-2, 0.5 / h}};
}

std::vector<LeafGrid::Tap> LeafGrid::stencil(std::size_t node, int c) const {
  std::vector<int> idx = index(node);
  const int i = idx[c];
  std::vector<Tap> taps;
  for (const auto& [off, w] : stencil_offsets(i, c)) {
    idx[c] = ((i + off) % n_ + n_) % n_;
    taps.push_back({flat(idx), w});
  }
  return taps;
}

JacobiSide JacobiSide::make(const FormField& alpha, const FormField& beta, int k, int l, SideTag side, int resolution,
                            std::vector<double> base, const CheckOptions& opts) {
  const Model& model = *alpha.model();
  for (const Axis& a : model.axes())
    if (!a.is_coordinate()) throw JacobiError("Jacobi structures need chart coordinates on every axis");
  const int n = model.dim();

  JacobiSide s;
  s.tag_ = side;
  s.model_ = alpha.model();
  s.tol_ = resolve_tol(model, opts);
  s.cert_ = verify_contact_pair(alpha, beta, k, l, opts);
  if (!s.cert_.passed) throw JacobiError("Jacobi side: the forms are not a contact pair of the declared type");
  const int d = side == SideTag::alpha ? 2 * k + 1 : 2 * l + 1;
  const double tol = s.tol_;
  const PairSampler sampler(alpha, beta);

  // Leaf distribution: kernel of [other; i_. d other].
  auto constraints = [&](const PairSample& ps) {
    const FormValue& other = side == SideTag::alpha ? ps.beta : ps.alpha;
    const FormValue& dother = side == SideTag::alpha ? ps.dbeta : ps.dalpha;
    Eigen::MatrixXd m(n + 1, n);
    m.row(0) = other.as_vector().transpose();
    m.bottomRows(n) = two_form_matrix(dother).transpose();
    return m;
  };
  auto null_space = [&](const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = tol * std::max(sv(0), 1e-300);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    return Eigen::MatrixXd(svd.matrixV().rightCols(n - rank));
  };

  if (static_cast<int>(base.size()) != n) throw std::invalid_argument("Jacobi side: base point dimension");
  const Eigen::MatrixXd v0 = null_space(constraints(sampler.at(base)));
  if (v0.cols() != d) throw JacobiError(fmt::format("leaf distribution has dimension {} at the base point, expected {}", v0.cols(), d));
  std::vector<int> active;
  for (int a = 0; a < n; ++a)
    if (v0.row(a).norm() > 1e-6) active.push_back(a);
  if (static_cast<int>(active.size()) != d) throw JacobiError("leaf distribution is not a coordinate subspace");
  s.grid_ = LeafGrid(model, active, resolution, std::move(base));

  const std::size_t nodes = s.grid_.size();
  s.theta_.resize(nodes * d);
  s.reeb_.resize(nodes * d);
  s.other_.resize(nodes * d);
  s.system_.resize(nodes * (d + 1) * d);
  s.pinv_.resize(nodes * d * (d + 1));
  for (std::size_t node = 0; node < nodes; ++node) {
    const std::vector<double> p = s.grid_.point(node);
    const PairSample ps = sampler.at(p);
    const Eigen::MatrixXd v = null_space(constraints(ps));
    if (v.cols() != d) throw JacobiError(fmt::format("leaf dimension changes at node {}", node));
    // The kernel must be the active coordinate span.
    double off = 0.0;
    for (int a = 0; a < n; ++a)
      if (std::find(active.begin(), active.end(), a) == active.end()) off = std::max(off, v.row(a).norm());
    if (off > 1e-6) throw JacobiError(fmt::format("leaf leaves the active axes at node {}", node));

    const FormValue& own = side == SideTag::alpha ? ps.alpha : ps.beta;
    const FormValue& other = side == SideTag::alpha ? ps.beta : ps.alpha;
    const Eigen::MatrixXd dm = two_form_matrix(side == SideTag::alpha ? ps.dalpha : ps.dbeta);
    const ReebSolve r = solve_reeb(ps);
    const VectorValue& e = side == SideTag::alpha ? r.e_alpha : r.e_beta;
    Eigen::MatrixXd sys(d + 1, d);
    for (int i = 0; i < d; ++i) {
      s.theta_[node * d + i] = own[active[i]];
      s.reeb_[node * d + i] = e[active[i]];
      s.other_[node * d + i] = other[active[i]];
      sys(0, i) = own[active[i]];
      for (int j = 0; j < d; ++j) sys(1 + j, i) = dm(active[i], active[j]);
    }
    double e_off = 0.0;
    for (int a = 0; a < n; ++a)
      if (std::find(active.begin(), active.end(), a) == active.end()) e_off = std::max(e_off, std::abs(e[a]));
    if (e_off > tol * std::max(1.0, e.cwiseAbs().maxCoeff()))
      throw JacobiError(fmt::format("Reeb field is not tangent to the leaf at node {}", node));

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(d - 1) > tol * sv(0))) throw JacobiError(fmt::format("side form is not contact on the leaf at node {}", node));
    const Eigen::MatrixXd pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j < d; ++j) s.system_[node * (d + 1) * d + i * d + j] = sys(i, j);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j <= d; ++j) s.pinv_[node * d * (d + 1) + i * (d + 1) + j] = pinv(i, j);
  }
  return s;
}

std::vector<double> JacobiSide::solve(std::size_t node, double f, const double* grad, double& residual) const {
  const int d = grid_.dim();
  double ef = 0.0;
  for (int c = 0; c < d; ++c) ef += reeb(node, c) * grad[c];
  std::vector<double> rhs(d + 1);
  rhs[0] = f;
  for (int j = 0; j < d; ++j) rhs[1 + j] = ef * theta(node, j) - grad[j];
  std::vector<double> x(d, 0.0);
  const double* pinv = &pinv_[node * d * (d + 1)];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= d; ++j) x[i] += pinv[i * (d + 1) + j] * rhs[j];
  const double* sys = &system_[node * (d + 1) * d];
  double res = 0.0, scale = 1.0;
  for (int i = 0; i <= d; ++i) {
    double row = -rhs[i];
    for (int j = 0; j < d; ++j) row += sys[i * d + j] * x[j];
    res = std::max(res, std::abs(row));
    scale = std::max(scale, std::abs(rhs[i]));
  }
  residual = res / scale;
  return x;
}

GridFunction sample(const ScalarField& f, const JacobiSide& side) {
  const LeafGrid& grid = side.grid();
  const int d = grid.dim();
  GridFunction out;
  if (const Expr* e = std::get_if<Expr>(&f)) {
    if (e->dim() != grid.model_dim()) throw std::invalid_argument("scalar expression has the wrong dimension");
    std::vector<Expr> partials;
    for (int a : grid.active()) partials.push_back(e->partial(a));
    out.values.resize(grid.size());
    out.gradient.resize(grid.size() * d);
    for (std::size_t node = 0; node < grid.size(); ++node) {
      const std::vector<double> p = grid.point(node);
      out.values[node] = e->eval(p);
      for (int c = 0; c < d; ++c) out.gradient[node * d + c] = partials[c].eval(p);
    }
    return out;
  }
  out = std::get<GridFunction>(f);
  if (out.values.size() != grid.size()) throw std::invalid_argument("grid function has the wrong number of values");
  if (out.gradient.empty()) {
    out.gradient.resize(grid.size() * d);
    for (std::size_t node = 0; node < grid.size(); ++node)
      for (int c = 0; c < d; ++c)
        out.gradient[node * d + c] = grid_derivative(grid, node, c, [&](std::size_t q) { return out.values[q]; });
  } else if (out.gradient.size() != grid.size() * d) {
    throw std::invalid_argument("grid function gradient has the wrong size");
  }
  return out;
}

GridFunction reeb_derivative(const ScalarField& f, const JacobiSide& side) {
  const GridFunction s = sample(f, side);
  const int d = side.dim();
  GridFunction out;
  out.values.resize(s.values.size());
  for (std::size_t node = 0; node < s.values.size(); ++node) {
    double v = 0.0;
    for (int c = 0; c < d; ++c) v += side.reeb(node, c) * s.gradient[node * d + c];
    out.values[node] = v;
  }
  return out;
}

GridVectorField hamiltonian_field(const ScalarField& f, const JacobiSide& side) {
  const GridFunction s = sample(f, side);
  const int d = side.dim();
  GridVectorField x;
  x.dim = d;
  x.data.resize(s.values.size() * d);
  for (std::size_t node = 0; node < s.values.size(); ++node) {
    double res = 0.0;
    const std::vector<double> v = side.solve(node, s.values[node], &s.gradient[node * d], res);
    std::copy(v.begin(), v.end(), x.data.begin() + static_cast<std::ptrdiff_t>(node * d));
    x.max_residual = std::max(x.max_residual, res);
    if (res > side.tol())
      throw JacobiError(fmt::format("Hamiltonian solve residual {:.3g} at node {}", res, node));
  }
  return x;
}

GridFunction jacobi_bracket(const ScalarField& f, const ScalarField& g, const JacobiSide& side) {
  return bracket_of_fields(hamiltonian_field(f, side), hamiltonian_field(g, side), side);
}

BivectorField build_bivector(const JacobiSide& side) {
  const LeafGrid& grid = side.grid();
  const int d = grid.dim();
  const auto& active = grid.active();
  BivectorField out;
  out.model = side.model();
  out.values.assign(grid.size(), BivectorValue(grid.model_dim()));

  // Probe c is x^c - x^c(m): value (offset along c) * h_c, gradient e_c.
  auto probe_field = [&](std::size_t q, int c, double value) {
    std::vector<double> grad(d, 0.0);
    grad[c] = 1.0;
    double res = 0.0;
    return side.solve(q, value, grad.data(), res);
  };

  for (std::size_t m = 0; m < grid.size(); ++m) {
    const std::vector<int> idx = grid.index(m);
    std::vector<std::vector<double>> at_m(d);
    for (int c = 0; c < d; ++c) at_m[c] = probe_field(m, c, 0.0);
    // d_b X_c^a(m) for every probe c.
    std::vector<double> jac(static_cast<std::size_t>(d) * d * d, 0.0);  // [c][b][a]
    for (int b = 0; b < d; ++b) {
      for (const auto& [off, w] : grid.stencil_offsets(idx[b], b)) {
        std::vector<int> qi = idx;
        qi[b] = ((idx[b] + off) % grid.resolution() + grid.resolution()) % grid.resolution();
        const std::size_t q = grid.flat(qi);
        for (int c = 0; c < d; ++c) {
          const std::vector<double> xq = off == 0 ? at_m[c] : probe_field(q, c, c == b ? off * grid.step(b) : 0.0);
          for (int a = 0; a < d; ++a) jac[(c * d + b) * d + a] += w * xq[a];
        }
      }
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        double v = 0.0;
        for (int a = 0; a < d; ++a) {
          double u = 0.0, z = 0.0;
          for (int b = 0; b < d; ++b) {
            u += at_m[i][b] * jac[(j * d + b) * d + a];
            z += at_m[j][b] * jac[(i * d + b) * d + a];
          }
          v += side.theta(m, a) * (u - z);
        }
        out.values[m].set(active[i], active[j], v);
      }
  }
  return out;
}

double bivector_consistency_defect(const ScalarField& f, const ScalarField& g, const JacobiSide& side,
                                   const BivectorField& lambda) {
  const LeafGrid& grid = side.grid();
  const int d = grid.dim();
  const auto& active = grid.active();
  const GridFunction sf = sample(f, side), sg = sample(g, side);
  const GridFunction ef = reeb_derivative(sf, side), eg = reeb_derivative(sg, side);
  const GridFunction br = jacobi_bracket(sf, sg, side);
  double worst = 0.0;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    if (!grid.interior(node)) continue;
    double lam = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        lam += lambda.values[node](active[i], active[j]) * sf.gradient[node * d + i] * sg.gradient[node * d + j];
    const double rhs = lam + sf.values[node] * eg.values[node] - sg.values[node] * ef.values[node];
    worst = std::max(worst, std::abs(rhs - br.values[node]));
  }
  return worst;
}

double degenerate_direction_defect(const JacobiSide& side, const BivectorField& lambda) {
  const LeafGrid& grid = side.grid();
  const int d = grid.dim();
  const auto& active = grid.active();
  double worst = 0.0;
  for (std::size_t node = 0; node < grid.size(); ++node)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += side.other(node, i) * lambda.values[node](active[i], active[j]);
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

double jacobi_identity_defect(const ScalarField& f, const ScalarField& g, const ScalarField& h,
                              const JacobiSide& side) {
  const GridVectorField xf = hamiltonian_field(f, side), xg = hamiltonian_field(g, side),
                        xh = hamiltonian_field(h, side);
  const GridFunction fg = bracket_of_fields(xf, xg, side);
  const GridFunction gh = bracket_of_fields(xg, xh, side);
  const GridFunction hf = bracket_of_fields(xh, xf, side);
  const GridFunction a = bracket_of_fields(hamiltonian_field(fg, side), xh, side);
  const GridFunction b = bracket_of_fields(hamiltonian_field(gh, side), xf, side);
  const GridFunction c = bracket_of_fields(hamiltonian_field(hf, side), xg, side);
  double worst = 0.0;
  for (std::size_t node = 0; node < side.grid().size(); ++node)
    if (side.grid().interior(node))
      worst = std::max(worst, std::abs(a.values[node] + b.values[node] + c.values[node]));
  return worst;
}

double unit_bracket_defect(const ScalarField& g, const JacobiSide& side) {
  const Expr one = Expr::constant(1.0, side.grid().model_dim());
  const GridFunction br = jacobi_bracket(one, g, side);
  const GridFunction eg = reeb_derivative(g, side);
  double worst = 0.0;
  for (std::size_t node = 0; node < side.grid().size(); ++node)
    if (side.grid().interior(node)) worst = std::max(worst, std::abs(br.values[node] - eg.values[node]));
  return worst;
}

GridFunction grid_bump(const JacobiSide& side, const std::vector<int>& center, double radius_cells) {
  const LeafGrid& grid = side.grid();
  const int d = grid.dim();
  const int n = grid.resolution();
  if (static_cast<int>(center.size()) != d) throw std::invalid_argument("bump center has the wrong dimension");
  GridFunction out;
  out.values.assign(grid.size(), 0.0);
  out.gradient.assign(grid.size() * d, 0.0);
  const double r2 = radius_cells * radius_cells;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const std::vector<int> idx = grid.index(node);
    std::vector<double> delta(d);
    double s = 0.0;
    for (int c = 0; c < d; ++c) {
      int off = idx[c] - center[c];
      // Nearest periodic image; box axes are never wrapped because the bump stays inside.
      if (off > n / 2) off -= n;
      if (off < -n / 2) off += n;
      delta[c] = off;
      s += off * off / r2;
    }
    if (s >= 1.0) continue;
    const double phi = std::exp(1.0 - 1.0 / (1.0 - s));
    out.values[node] = phi;
    for (int c = 0; c < d; ++c)
      out.gradient[node * d + c] = -phi / ((1.0 - s) * (1.0 - s)) * 2.0 * delta[c] / (r2 * grid.step(c));
  }
  return out;
}

double sup_interior(const GridFunction& f, const JacobiSide& side) {
  double worst = 0.0;
  for (std::size_t node = 0; node < f.values.size(); ++node)
    if (side.grid().interior(node)) worst = std::max(worst, std::abs(f.values[node]));
  return worst;
}

}  // namespace cpair
