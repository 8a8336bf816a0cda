#include "carnotflow/oracles.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace carnotflow {

void write_profile_csv(const RadialProfile& prof, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  std::fputs("t,r_measured,r_exact,rel_err\n", f);
  for (std::size_t i = 0; i < prof.times.size(); ++i) {
    const double ex = prof.exact[i];
    const double rel = (std::isfinite(ex) && ex != 0.0)
                           ? std::abs(prof.measured[i] - ex) / ex
                           : std::numeric_limits<double>::quiet_NaN();
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", prof.times[i], prof.measured[i], ex, rel);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

double euclidean_sphere_radius(double t, double r0, int m1) {
  if (m1 < 2) throw std::invalid_argument("euclidean_sphere_radius: m1 >= 2");
  const double r2 = r0 * r0 - 2.0 * static_cast<double>(m1 - 1) * t;
  if (r2 < 0.0) throw std::domain_error("euclidean_sphere_radius: past extinction");
  return std::sqrt(r2);
}

double heisenberg_cylinder_radius(double t, double r0) {
  const double r2 = r0 * r0 - 2.0 * t;
  if (r2 < 0.0) throw std::domain_error("heisenberg_cylinder_radius: past extinction");
  return std::sqrt(r2);
}

double pil_exact(double t, const Vec& p) {
  return p(0) * p(0) + p(1) * p(1) + 2.0 * t;
}

double measure_zero_level_radius(const ValueLayer& layer, const Vec& center, int n_rays,
                                 int* excluded_rays) {
  if (n_rays < 1) throw std::invalid_argument("measure_zero_level_radius: n_rays >= 1");
  const Grid& grid = *layer.grid;
  const int n = grid.dim();
  if (n < 2) throw std::invalid_argument("measure_zero_level_radius: needs dim >= 2");
  const double step = 0.5 * std::min(grid.box().h(0), grid.box().h(1));
  const double rmax = std::min(grid.box().hi(0) - center(0), grid.box().hi(1) - center(1));
  double sum = 0.0;
  int used = 0, excluded = 0;
  for (int k = 0; k < n_rays; ++k) {
    const double a = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n_rays);
    const double cx = std::cos(a), sy = std::sin(a);
    Vec p = center;
    double prev_r = 0.0;
    p(0) = center(0);
    p(1) = center(1);
    double prev_v = sample(layer, p);
    bool found = false;
    for (double r = step; r <= rmax; r += step) {
      p(0) = center(0) + r * cx;
      p(1) = center(1) + r * sy;
      const double v = sample(layer, p);
      if ((prev_v < 0.0 && v >= 0.0) || (prev_v > 0.0 && v <= 0.0)) {
        const double root = prev_r + (r - prev_r) * prev_v / (prev_v - v);
        sum += root;
        ++used;
        found = true;
        break;
      }
      prev_r = r;
      prev_v = v;
    }
    if (!found) ++excluded;
  }
  if (excluded_rays) *excluded_rays = excluded;
  if (used == 0)
    throw std::runtime_error("measure_zero_level_radius: no sign change on any ray");
  return sum / static_cast<double>(used);
}

double bruteforce_dpp_step(const ValueLayer& prev, const OperatorDescriptor& op,
                           const GameConfig& cfg, const GroupDescriptor& g,
                           const Vec& node_p, double t) {
  const int m1 = g.horizontal_dim();
  const std::vector<Control> controls = player1_controls(prev, node_p, cfg, op, g);
  std::vector<Move> moves = move_lattice(cfg, m1);
  double best = std::numeric_limits<double>::infinity();
  for (const Control& c : controls) {
    std::vector<Move> all = moves;
    for (Move& mv : control_moves(cfg, op, c)) all.push_back(mv);
    double sup = -std::numeric_limits<double>::infinity();
    for (const Move& mv : all) {
      const Vec target =
          multiply(g, node_p, dilate(g, horizontal_point(g, mv.nu), cfg.epsilon));
      const double v = sample(prev, target) + move_cost(op, cfg.epsilon, t, node_p, mv, c);
      if (v > sup) sup = v;
    }
    if (sup < best) best = sup;
  }
  return cfg.discount() * best;
}

LipschitzEstimate measure_lipschitz(const std::vector<ValueLayer>& layers,
                                    const GroupDescriptor& g, int n_pairs,
                                    std::uint64_t seed) {
  if (layers.size() < 2)
    throw std::invalid_argument("measure_lipschitz: needs at least 2 layers");
  LipschitzEstimate est;
  Rng rng(seed);
  const Grid& grid = *layers.front().grid;
  for (const ValueLayer& layer : layers) {
    for (int s = 0; s < n_pairs; ++s) {
      const std::int64_t a =
          static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(grid.node_count()));
      const std::int64_t b =
          static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(grid.node_count()));
      if (a == b) continue;  // zero gauge denominator
      const Vec pa = grid.node_point(a), pb = grid.node_point(b);
      const double dist = gauge(g, multiply(g, pa, inverse(g, pb)));
      if (dist < 1e-12) continue;
      const double ratio = std::abs(layer.values(a) - layer.values(b)) / dist;
      if (ratio > est.c_space) est.c_space = ratio;
    }
  }
  for (std::size_t k = 1; k < layers.size(); ++k) {
    const double dt = layers[k].t - layers[k - 1].t;
    if (!(dt > 0.0)) continue;
    const double diff = (layers[k].values - layers[k - 1].values).abs().maxCoeff();
    const double ratio = diff / dt;
    if (ratio > est.c_time) est.c_time = ratio;
  }
  return est;
}

}  // namespace carnotflow
