#include "carnotflow/game.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <Eigen/Eigenvalues>

namespace carnotflow {

namespace {

double sgn_or_one(double x) { return x < 0.0 ? -1.0 : 1.0; }

Vec clamp_l1(const Vec& nu, double bound) {
  const double n = nu.lpNorm<1>();
  if (n <= bound || n == 0.0) return nu;
  return nu * (bound / n);
}

// Shared fast path: cost of (move, control) with F already evaluated.
// Must stay arithmetically identical to running_cost / running_cost_envelope.
double pair_cost(double eps, const Move& q, const Control& c, double f_value) {
  double cost = 0.0;
  if (!c.zero_gradient) cost -= eps * c.eta.dot(q.nu);
  cost -= 0.5 * eps * eps * q.nu.dot(c.hess * q.nu);
  cost -= eps * eps * f_value;
  return cost;
}

double control_f(const OperatorDescriptor& op, double t, const Vec& p, const Control& c) {
  return c.zero_gradient ? upper_envelope_at_zero(op, t, p, c.hess)
                         : evaluate(op, t, p, c.eta, c.hess);
}

}  // namespace

int GameConfig::steps() const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("game: epsilon must lie in (0,1)");
  if (mu < 0.0) throw std::invalid_argument("game: mu must be nonnegative");
  if (horizon < 0.0) throw std::invalid_argument("game: T must be nonnegative");
  return static_cast<int>(std::floor(horizon / (epsilon * epsilon) * (1.0 + 1e-12)));
}

double GameConfig::eta_bound() const { return std::pow(epsilon, -0.25); }
double GameConfig::x_bound() const { return std::pow(epsilon, -0.5); }
double GameConfig::move_bound() const { return std::pow(epsilon, -0.25); }

double running_cost(const OperatorDescriptor& op, double eps, double t, const Vec& p,
                    const Move& q, const Control& c) {
  if (c.zero_gradient)
    throw std::invalid_argument("running_cost: zero-gradient control must be priced "
                                "through running_cost_envelope");
  return pair_cost(eps, q, c, evaluate(op, t, p, c.eta, c.hess));
}

double running_cost_envelope(const OperatorDescriptor& op, double eps, double t,
                             const Vec& p, const Move& q, const Mat& X, Envelope which) {
  const double f = which == Envelope::Lower ? lower_envelope_at_zero(op, t, p, X)
                                            : upper_envelope_at_zero(op, t, p, X);
  Control c;
  c.zero_gradient = true;
  c.hess = X;
  return pair_cost(eps, q, c, f);
}

double move_cost(const OperatorDescriptor& op, double eps, double t, const Vec& p,
                 const Move& q, const Control& c) {
  return pair_cost(eps, q, c, control_f(op, t, p, c));
}

Move adversary_response(double eps, const Vec& eta, const Vec& eta_hat, const Mat& X,
                        const Mat& X_hat, double lambda1, int K, double R0) {
  (void)R0;  // enters only through the caller's admissibility of (eta_hat, X_hat)
  const int m1 = static_cast<int>(X.rows());
  const double move_bound = std::pow(eps, -0.25);
  const double e14 = std::pow(eps, 0.25);
  const double e12 = std::sqrt(eps);

  Move out;
  out.nu = Vec::Zero(m1);
  if (lambda1 <= 0.0) return out;  // operator insensitive to X; nothing to compensate

  // The proof handles eta = eta_hat / X = X_hat by limiting sequences; here a
  // fixed 1e-10 perturbation stands in for them.
  Vec eta_eff = eta;
  if ((eta_hat - eta_eff).norm() < 1e-10) eta_eff(0) += 1e-10;
  Mat M = X_hat - X;
  if (spectral_norm(M) < 1e-10) M(0, 0) += 1e-10;

  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  const int top = m1 - 1;  // eigenvalues ascending
  const Vec xi0 = es.eigenvectors().col(top);
  const double top_ev = es.eigenvalues()(top);  // E(X_hat - X), signed

  const bool part1 = eta_hat.norm() >= 1.0 / static_cast<double>(K);
  const Vec d = part1 ? Vec(eta_hat - eta_eff) : Vec(-eta_eff);

  const double inner0 = d.dot(xi0);
  double s0 = 0.0;
  double sj = 0.0;
  int j0 = -1;

  if (d.norm() <= e14) {
    if (top_ev > 0.0) s0 = lambda1 * sgn_or_one(inner0);
  } else if (m1 == 1 || std::abs(inner0) >= e12 / lambda1) {
    s0 = (top_ev > 0.0 ? lambda1 : e14 * lambda1) * sgn_or_one(inner0);
  } else {
    double best = -1.0;
    for (int i = 0; i < top; ++i) {
      const double a = std::abs(d.dot(es.eigenvectors().col(i)));
      if (a > best) {
        best = a;
        j0 = i;
      }
    }
    sj = e14 * lambda1 * sgn_or_one(d.dot(es.eigenvectors().col(j0)));
    if (top_ev > 0.0) s0 = lambda1 * sgn_or_one(inner0);
  }

  Vec nu = s0 * xi0;
  if (j0 >= 0) nu += sj * es.eigenvectors().col(j0);
  out.nu = clamp_l1(nu, move_bound);
  return out;
}

std::vector<Vec> unit_directions(int m1, int n_dir) {
  std::vector<Vec> dirs;
  dirs.reserve(n_dir);
  if (m1 == 1) {
    for (int i = 0; i < n_dir && i < 2; ++i) {
      Vec d(1);
      d(0) = (i == 0) ? 1.0 : -1.0;
      dirs.push_back(d);
    }
    return dirs;
  }
  if (m1 == 2) {
    for (int i = 0; i < n_dir; ++i) {
      const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n_dir);
      Vec d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(d);
    }
    return dirs;
  }
  // axes first, then a reproducible pseudo-random fill
  for (int i = 0; i < m1 && static_cast<int>(dirs.size()) < n_dir; ++i) {
    Vec d = Vec::Zero(m1);
    d(i) = 1.0;
    dirs.push_back(d);
    if (static_cast<int>(dirs.size()) < n_dir) dirs.push_back(Vec(-d));
  }
  Rng rng(0x6b74e0d1c3a5f897ULL ^ (static_cast<std::uint64_t>(m1) << 32) ^
          static_cast<std::uint64_t>(n_dir));
  while (static_cast<int>(dirs.size()) < n_dir) dirs.push_back(rng.unit_vector(m1));
  return dirs;
}

std::vector<Move> move_lattice(const GameConfig& cfg, int m1) {
  std::vector<Move> moves;
  moves.push_back(Move{Vec::Zero(m1)});
  const double bound = cfg.move_bound();
  const auto dirs = unit_directions(m1, cfg.n_dir);
  for (const Vec& d : dirs) {
    const Vec d1 = d / d.lpNorm<1>();  // gauge of a horizontal point is the l1 norm
    for (int k = 1; k <= cfg.n_mag; ++k) {
      const double mag = bound * static_cast<double>(k) / static_cast<double>(cfg.n_mag);
      moves.push_back(Move{Vec(mag * d1)});
    }
  }
  return moves;
}

std::vector<Move> control_moves(const GameConfig& cfg, const OperatorDescriptor& op,
                                const Control& c) {
  std::vector<Move> moves;
  if (op.lambda1 <= 0.0) return moves;
  const int m1 = static_cast<int>(c.hess.rows());
  const double e14 = std::pow(cfg.epsilon, 0.25);
  // Both signs: the lemma fixes the sign of the eigenvector response through
  // <eta_hat - eta, xi>, which degenerates when eta is orthogonal to xi; the
  // sup needs the mirrored move available in that case.
  auto push_pair = [&](const Vec& nu) {
    moves.push_back(Move{clamp_l1(nu, cfg.move_bound())});
    moves.push_back(Move{clamp_l1(Vec(-nu), cfg.move_bound())});
  };
  if (c.zero_gradient) {
    auto [ev, xi] = min_eigenpair(c.hess);
    if (ev < 0.0) {
      push_pair(op.lambda1 * xi);
      push_pair(e14 * op.lambda1 * xi);
    }
  } else {
    const Move q = adversary_response(cfg.epsilon, c.eta, Vec::Zero(m1), c.hess,
                                      Mat::Zero(m1, m1), op.lambda1, 1, 1.0);
    if (q.nu.norm() > 0.0)
      push_pair(q.nu);
    else
      moves.push_back(q);
  }
  return moves;
}

double default_fd_delta(double epsilon, double h_min) {
  const double reach = std::pow(epsilon, 0.75);
  if (reach <= h_min) return h_min;
  return h_min * std::ceil(reach / h_min * (1.0 - 1e-12));
}

std::vector<Control> player1_controls(const ValueLayer& prev, const Vec& p,
                                      const GameConfig& cfg, const OperatorDescriptor& op,
                                      const GroupDescriptor& g) {
  const int m1 = g.horizontal_dim();
  std::vector<Control> controls;
  if (cfg.strategy == Strategy::Guided) {
    const double delta =
        cfg.fd_delta > 0.0
            ? cfg.fd_delta
            : default_fd_delta(cfg.epsilon, prev.grid->box().h.minCoeff());
    const HorizontalDerivatives fd = horizontal_derivatives(prev, p, delta, g);
    // clip, don't rescale: a kink inflates one eigenvalue and rescaling would
    // corrupt the well-resolved curvature directions with it
    const Mat x0 = clip_eigenvalues(fd.hess, cfg.x_bound());
    // Rank-one stiffeners along eta penalize exactly the moves a chord-scale
    // gradient misprices, at zero MCF cost; b-values sized to the X bound.
    auto push_eta_family = [&](const Vec& eta_raw) {
      if (eta_raw.norm() == 0.0) return;
      const Vec eta = clamp_norm(eta_raw, cfg.eta_bound());
      controls.push_back(Control{false, eta, x0});
      const Vec u = eta / eta.norm();
      const Mat uu = u * u.transpose();
      for (double b : {0.3, 0.9, 2.0})
        controls.push_back(Control{
            false, eta, clip_eigenvalues(Mat(x0 + b * cfg.x_bound() * uu), cfg.x_bound())});
    };
    push_eta_family(fd.eta);
    if (fd.eta.norm() > 0.0) {
      const Vec eta = clamp_norm(fd.eta, cfg.eta_bound());
      const Mat id = Mat::Identity(m1, m1);
      for (double a : cfg.x_dict.guided_perturb) {
        controls.push_back(Control{false, eta, clip_eigenvalues(x0 + a * id, cfg.x_bound())});
        controls.push_back(Control{false, eta, clip_eigenvalues(x0 - a * id, cfg.x_bound())});
      }
    }
    if ((fd.eta_steep - fd.eta).norm() > 1e-14) {
      // defends sub-grid kinks, where the central slope underestimates
      push_eta_family(fd.eta_steep);
    }
    controls.push_back(Control{true, Vec(), x0});
    controls.push_back(Control{true, Vec(), Mat::Zero(m1, m1)});
    return controls;
  }

  // Generic mode: direction x magnitude lattice with a Hessian dictionary.
  const auto dirs = unit_directions(m1, cfg.n_dir);
  std::vector<double> mags(cfg.n_mag);
  if (cfg.n_mag == 1) {
    mags[0] = cfg.eta_bound();
  } else {
    const double ratio = cfg.eta_bound() / cfg.eta_min;
    for (int k = 0; k < cfg.n_mag; ++k)
      mags[k] = cfg.eta_min *
                std::pow(ratio, static_cast<double>(k) / static_cast<double>(cfg.n_mag - 1));
  }
  std::vector<double> a_grid(cfg.x_dict.n_a), b_grid(cfg.x_dict.n_b);
  for (int i = 0; i < cfg.x_dict.n_a; ++i)
    a_grid[i] = cfg.x_dict.n_a == 1
                    ? 0.0
                    : -cfg.x_dict.a_max + 2.0 * cfg.x_dict.a_max * i / (cfg.x_dict.n_a - 1);
  for (int i = 0; i < cfg.x_dict.n_b; ++i)
    b_grid[i] = cfg.x_dict.n_b == 1
                    ? 0.0
                    : -cfg.x_dict.b_max + 2.0 * cfg.x_dict.b_max * i / (cfg.x_dict.n_b - 1);
  const Mat id = Mat::Identity(m1, m1);
  for (const Vec& d : dirs) {
    for (double m : mags) {
      const Vec eta = m * d;
      for (double a : a_grid)
        for (double b : b_grid)
          controls.push_back(Control{
              false, eta, clip_eigenvalues(Mat(a * id + b * (d * d.transpose())), cfg.x_bound())});
    }
  }
  for (double a : a_grid)
    controls.push_back(Control{true, Vec(), clip_eigenvalues(Mat(a * id), cfg.x_bound())});
  return controls;
}

std::pair<double, Move> bruteforce_sup(const ValueLayer& prev, const Vec& p,
                                       const Control& c, const GameConfig& cfg,
                                       const OperatorDescriptor& op,
                                       const GroupDescriptor& g, double t) {
  const int m1 = g.horizontal_dim();
  std::vector<Move> moves = move_lattice(cfg, m1);
  for (Move& mv : control_moves(cfg, op, c)) moves.push_back(mv);
  double best = -std::numeric_limits<double>::infinity();
  Move arg = moves.front();
  for (const Move& mv : moves) {
    const Vec target = multiply(g, p, horizontal_point(g, Vec(cfg.epsilon * mv.nu)));
    const double v = sample(prev, target) + move_cost(op, cfg.epsilon, t, p, mv, c);
    if (v > best) {
      best = v;
      arg = mv;
    }
  }
  return {best, arg};
}

ValueLayer dpp_step(const ValueLayer& prev, const OperatorDescriptor& op,
                    const GameConfig& cfg, const GroupDescriptor& g, double t,
                    int threads, StepDiagnostics* diag) {
  const Grid& grid = *prev.grid;
  const int m1 = g.horizontal_dim();
  const double eps = cfg.epsilon;
  const double disc = cfg.discount();

  const std::vector<Move> lattice = move_lattice(cfg, m1);
  std::vector<Vec> lattice_shift(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i)
    lattice_shift[i] = horizontal_point(g, Vec(eps * lattice[i].nu));

  ValueLayer out;
  out.grid = prev.grid;
  out.t = t;
  out.far_field = disc * prev.far_field;
  out.values.resize(grid.node_count());

  const double bound_prev = prev.sup_norm();
  std::atomic<std::uint64_t> breaches{0};

  auto worker = [&](std::int64_t begin, std::int64_t end) {
    std::uint64_t local_breach = 0;
    std::vector<double> lattice_val(lattice.size());
    for (std::int64_t f = begin; f < end; ++f) {
      const Vec p = grid.node_point(f);
      const std::vector<Control> controls = player1_controls(prev, p, cfg, op, g);
      for (std::size_t i = 0; i < lattice.size(); ++i) {
        bool outside = false;
        lattice_val[i] = sample(prev, multiply(g, p, lattice_shift[i]), &outside);
        if (outside) ++local_breach;
      }
      double best = std::numeric_limits<double>::infinity();
      for (const Control& c : controls) {
        const double fval = control_f(op, t, p, c);
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lattice.size(); ++i) {
          const double v = lattice_val[i] + pair_cost(eps, lattice[i], c, fval);
          if (v > sup) sup = v;
        }
        for (const Move& mv : control_moves(cfg, op, c)) {
          bool outside = false;
          const Vec target = multiply(g, p, horizontal_point(g, Vec(eps * mv.nu)));
          const double v =
              sample(prev, target, &outside) + pair_cost(eps, mv, c, fval);
          if (outside) ++local_breach;
          if (v > sup) sup = v;
        }
        if (sup < best) best = sup;
      }
      out.values(f) = disc * best;
    }
    breaches.fetch_add(local_breach, std::memory_order_relaxed);
  };

  const int nthreads = std::max(1, threads);
  if (nthreads == 1 || grid.node_count() < 2 * nthreads) {
    worker(0, grid.node_count());
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (grid.node_count() + nthreads - 1) / nthreads;
    for (int i = 0; i < nthreads; ++i) {
      const std::int64_t b = i * chunk;
      const std::int64_t e = std::min<std::int64_t>(b + chunk, grid.node_count());
      if (b < e) pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }

  if (diag) diag->box_breaches += breaches.load();
  const double bound_out = out.sup_norm();
  if (bound_out > bound_prev + 1e-9)
    throw std::runtime_error("uniform bound violated: ||u|| grew from " +
                             std::to_string(bound_prev) + " to " + std::to_string(bound_out));
  return out;
}

SolveResult solve(const GameConfig& cfg, const OperatorDescriptor& op,
                  const GroupDescriptor& g, std::shared_ptr<const Grid> grid,
                  const std::function<double(const Vec&)>& psi, double far_field,
                  int threads,
                  const std::function<void(const ValueLayer&, int)>& on_layer) {
  SolveResult res;
  const int m = cfg.steps();
  res.layers.reserve(m + 1);
  res.layers.push_back(build_layer(std::move(grid), psi, far_field));
  if (on_layer) on_layer(res.layers.back(), 0);
  const double psi_inf = res.layers.front().sup_norm();
  for (int k = 1; k <= m; ++k) {
    const double t = static_cast<double>(k) * cfg.epsilon * cfg.epsilon;
    res.layers.push_back(
        dpp_step(res.layers.back(), op, cfg, g, t, threads, &res.diag));
    if (res.layers.back().sup_norm() > psi_inf + 1e-9)
      throw std::runtime_error("uniform bound violated against the initial datum");
    if (on_layer) on_layer(res.layers.back(), k);
  }
  return res;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace carnotflow
