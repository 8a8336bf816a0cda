#include "carnotflow/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace carnotflow {

Grid::Grid(Box box, const GroupDescriptor& g) : box_(std::move(box)) {
  const int n = static_cast<int>(box_.lo.size());
  if (box_.hi.size() != n || box_.h.size() != n)
    throw ConfigError("grid: lo/hi/h dimension mismatch");
  if (n != g.dim()) throw ConfigError("grid: box dimension does not match group");
  dims_.resize(n);
  layers_.resize(n);
  for (int k = 0; k < n; ++k) {
    if (!(box_.lo(k) < box_.hi(k))) throw ConfigError("grid: requires lo < hi");
    if (!(box_.h(k) > 0.0)) throw ConfigError("grid: requires h > 0");
    const double cells = (box_.hi(k) - box_.lo(k)) / box_.h(k);
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-6 * std::max(1.0, rounded))
      throw ConfigError("grid: (hi - lo)/h is not integral on axis " + std::to_string(k));
    dims_[k] = static_cast<int>(rounded) + 1;
    if (dims_[k] < 2) throw ConfigError("grid: needs at least 2 nodes per axis");
    layers_[k] = g.layer_of_coordinate(k);
  }
  strides_.assign(n, 1);
  for (int k = n - 2; k >= 0; --k) strides_[k] = strides_[k + 1] * dims_[k + 1];
  count_ = strides_[0] * dims_[0];
}

Vec Grid::node_point(std::int64_t flat) const {
  const int n = dim();
  Vec p(n);
  for (int k = 0; k < n; ++k) {
    const std::int64_t i = flat / strides_[k];
    flat -= i * strides_[k];
    p(k) = box_.lo(k) + static_cast<double>(i) * box_.h(k);
  }
  return p;
}

void Grid::node_index(std::int64_t flat, int* idx) const {
  for (int k = 0; k < dim(); ++k) {
    idx[k] = static_cast<int>(flat / strides_[k]);
    flat -= static_cast<std::int64_t>(idx[k]) * strides_[k];
  }
}

std::int64_t Grid::flat_index(const int* idx) const {
  std::int64_t f = 0;
  for (int k = 0; k < dim(); ++k) f += static_cast<std::int64_t>(idx[k]) * strides_[k];
  return f;
}

bool Grid::contains(const Vec& p) const {
  for (int k = 0; k < dim(); ++k)
    if (p(k) < box_.lo(k) || p(k) > box_.hi(k)) return false;
  return true;
}

ValueLayer build_layer(std::shared_ptr<const Grid> grid,
                       const std::function<double(const Vec&)>& psi, double far_field,
                       BuildDiagnostics* diag) {
  ValueLayer layer;
  layer.grid = grid;
  layer.t = 0.0;
  layer.far_field = far_field;
  layer.values.resize(grid->node_count());
  const int n = grid->dim();
  int idx[kMaxDim];
  std::int64_t vertical_mismatches = 0;
  for (std::int64_t f = 0; f < grid->node_count(); ++f) {
    const Vec p = grid->node_point(f);
    const double v = psi(p);
    if (!std::isfinite(v)) throw ConfigError("initial datum is not finite at a node");
    layer.values(f) = v;
    if (std::abs(v - far_field) > 1e-9) {
      grid->node_index(f, idx);
      bool on_h_face = false, on_v_face = false;
      for (int k = 0; k < n; ++k) {
        if (idx[k] == 0 || idx[k] == grid->nodes_along(k) - 1) {
          if (grid->coordinate_layer(k) == 1)
            on_h_face = true;
          else
            on_v_face = true;
        }
      }
      if (on_h_face)
        throw ConfigError(
            "initial datum does not equal far_field on the boundary shell; "
            "truncation would be inconsistent");
      if (on_v_face) ++vertical_mismatches;
    }
  }
  if (diag) diag->vertical_shell_mismatches = vertical_mismatches;
  return layer;
}

double sample(const ValueLayer& layer, const Vec& p, bool* outside) {
  const Grid& g = *layer.grid;
  const int n = g.dim();
  const Box& box = g.box();
  int cell[kMaxDim];
  double w[kMaxDim];
  for (int k = 0; k < n; ++k) {
    if (p(k) < box.lo(k) || p(k) > box.hi(k)) {
      if (outside) *outside = true;
      return layer.far_field;
    }
    const double s = (p(k) - box.lo(k)) / box.h(k);
    int i = static_cast<int>(s);
    if (i > g.nodes_along(k) - 2) i = g.nodes_along(k) - 2;
    cell[k] = i;
    w[k] = s - static_cast<double>(i);
  }
  if (outside) *outside = false;
  double acc = 0.0;
  const unsigned corners = 1u << n;
  int idx[kMaxDim];
  for (unsigned c = 0; c < corners; ++c) {
    double weight = 1.0;
    for (int k = 0; k < n; ++k) {
      const bool hi = (c >> k) & 1u;
      weight *= hi ? w[k] : (1.0 - w[k]);
      idx[k] = cell[k] + (hi ? 1 : 0);
    }
    if (weight != 0.0) acc += weight * layer.values(g.flat_index(idx));
  }
  return acc;
}

double sample(const ValueLayer& layer, const Vec& p) { return sample(layer, p, nullptr); }

HorizontalDerivatives horizontal_derivatives(const ValueLayer& layer, const Vec& p,
                                             double delta, const GroupDescriptor& g) {
  if (!(delta > 0.0)) throw std::invalid_argument("horizontal_derivatives: delta > 0");
  const int m1 = g.horizontal_dim();
  HorizontalDerivatives out;
  out.eta.resize(m1);
  out.hess.resize(m1, m1);
  bool breach = false;
  auto probe = [&](const Vec& q) {
    bool outside = false;
    const double v = sample(layer, q, &outside);
    breach = breach || outside;
    return v;
  };

  const double u0 = probe(p);
  Vec shift[2][kMaxDim];  // group elements exp(-+delta X_i)
  for (int i = 0; i < m1; ++i) {
    Vec nu = Vec::Zero(m1);
    nu(i) = delta;
    shift[1][i] = horizontal_point(g, nu);
    shift[0][i] = horizontal_point(g, -nu);
  }

  out.eta_steep.resize(m1);
  double up[kMaxDim], um[kMaxDim];
  for (int i = 0; i < m1; ++i) {
    up[i] = probe(multiply(g, p, shift[1][i]));
    um[i] = probe(multiply(g, p, shift[0][i]));
    out.eta(i) = (up[i] - um[i]) / (2.0 * delta);
    out.hess(i, i) = (up[i] - 2.0 * u0 + um[i]) / (delta * delta);
    const double fwd = (up[i] - u0) / delta;
    const double bwd = (u0 - um[i]) / delta;
    // one-sided slopes only where the data is monotone through the stencil;
    // at a crest or trough they disagree in sign and the central value is the
    // honest derivative
    out.eta_steep(i) =
        fwd * bwd > 0.0 ? (std::abs(fwd) >= std::abs(bwd) ? fwd : bwd) : out.eta(i);
  }
  for (int i = 0; i < m1; ++i) {
    for (int j = i + 1; j < m1; ++j) {
      // X_i X_j u: i-translation applied first, j inside
      auto mixed = [&](int a, int b) {
        const Vec pa_p = multiply(g, p, shift[1][a]);
        const Vec pa_m = multiply(g, p, shift[0][a]);
        return (probe(multiply(g, pa_p, shift[1][b])) - probe(multiply(g, pa_p, shift[0][b])) -
                probe(multiply(g, pa_m, shift[1][b])) + probe(multiply(g, pa_m, shift[0][b]))) /
               (4.0 * delta * delta);
      };
      const double sym = 0.5 * (mixed(i, j) + mixed(j, i));
      out.hess(i, j) = sym;
      out.hess(j, i) = sym;
    }
  }
  out.stencil_breach = breach;
  return out;
}

void write_layer_csv(const ValueLayer& layer, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const Grid& g = *layer.grid;
  std::fputs("t", f);
  for (int k = 0; k < g.dim(); ++k) std::fprintf(f, ",x%d", k + 1);
  std::fputs(",u\n", f);
  for (std::int64_t i = 0; i < g.node_count(); ++i) {
    const Vec p = g.node_point(i);
    std::fprintf(f, "%.17g", layer.t);
    for (int k = 0; k < g.dim(); ++k) std::fprintf(f, ",%.17g", p(k));
    std::fprintf(f, ",%.17g\n", layer.values(i));
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

}  // namespace carnotflow
