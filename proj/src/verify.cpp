#include "carnotflow/verify.hpp"

#include <cmath>
#include <sstream>

#include "carnotflow/config.hpp"
#include "carnotflow/oracles.hpp"

namespace carnotflow {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

CheckResult make_check(const std::string& name, bool pass, const std::string& detail) {
  return CheckResult{name, pass, detail};
}

Vec random_point(Rng& rng, const GroupDescriptor& g, double scale) {
  Vec p(g.dim());
  for (int i = 0; i < g.dim(); ++i) p(i) = rng.uniform(-scale, scale);
  return p;
}

// ---------------------------------------------------------------------------
// algebra

void check_group(SuiteReport& rep, const GroupDescriptor& g, Rng& rng) {
  const int n_samples = 1000;
  double worst_assoc = 0.0, worst_inv = 0.0, worst_auto = 0.0, worst_gauge = 0.0;
  bool identity_exact = true, inverse_is_negation = true;
  for (int s = 0; s < n_samples; ++s) {
    const Vec p = random_point(rng, g, 2.0);
    const Vec q = random_point(rng, g, 2.0);
    const Vec r = random_point(rng, g, 2.0);
    worst_assoc = std::max(worst_assoc, (multiply(g, multiply(g, p, q), r) -
                                         multiply(g, p, multiply(g, q, r)))
                                            .cwiseAbs()
                                            .maxCoeff());
    const Vec e = identity_point(g);
    if (multiply(g, p, e) != p || multiply(g, e, p) != p) identity_exact = false;
    worst_inv = std::max(worst_inv,
                         multiply(g, p, inverse(g, p)).cwiseAbs().maxCoeff());
    if (inverse(g, p) != Vec(-p)) inverse_is_negation = false;
    const double lambda = rng.uniform(0.0, 3.0);
    worst_auto = std::max(worst_auto, (dilate(g, multiply(g, p, q), lambda) -
                                       multiply(g, dilate(g, p, lambda), dilate(g, q, lambda)))
                                          .cwiseAbs()
                                          .maxCoeff());
    const double lg = rng.uniform(0.0, 10.0);
    worst_gauge = std::max(worst_gauge,
                           std::abs(gauge(g, dilate(g, p, lg)) - lg * gauge(g, p)));
  }
  const std::string tag = g.name();
  rep.checks.push_back(make_check(tag + ".associativity", worst_assoc <= 1e-10,
                                  "max_err=" + fmt(worst_assoc)));
  rep.checks.push_back(make_check(tag + ".identity", identity_exact, "exact"));
  rep.checks.push_back(
      make_check(tag + ".inverse", worst_inv <= 1e-12 && inverse_is_negation,
                 "max_err=" + fmt(worst_inv)));
  rep.checks.push_back(make_check(tag + ".dilation_automorphism", worst_auto <= 1e-10,
                                  "max_err=" + fmt(worst_auto)));
  rep.checks.push_back(make_check(tag + ".gauge_homogeneity", worst_gauge <= 1e-12,
                                  "max_err=" + fmt(worst_gauge)));

  // Bracket closure: finite-difference commutators of the full frame columns
  // against the structure constants. Frame coefficients are polynomial of
  // degree <= 2, so central differences are exact up to roundoff.
  double worst_bracket = 0.0;
  const double h = 1e-3;
  const int n = g.dim();
  for (int s = 0; s < 50; ++s) {
    const Vec p = random_point(rng, g, 1.5);
    const Mat frame = full_frame(g, p);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Vec commutator = Vec::Zero(n);
        for (int mth = 0; mth < n; ++mth) {
          Vec ep = p, em = p;
          ep(mth) += h;
          em(mth) -= h;
          const Mat fp = full_frame(g, ep);
          const Mat fm = full_frame(g, em);
          const Vec dcol_j = (fp.col(j) - fm.col(j)) / (2.0 * h);
          const Vec dcol_i = (fp.col(i) - fm.col(i)) / (2.0 * h);
          commutator += frame(mth, i) * dcol_j - frame(mth, j) * dcol_i;
        }
        Vec expected = Vec::Zero(n);
        for (const BracketTerm& t : g.brackets())
          if (t.i == i && t.j == j) expected += t.c * frame.col(t.k);
        worst_bracket =
            std::max(worst_bracket, (commutator - expected).cwiseAbs().maxCoeff());
      }
    }
  }
  rep.checks.push_back(make_check(tag + ".bracket_closure", worst_bracket <= 1e-8,
                                  "max_err=" + fmt(worst_bracket)));
}

// ---------------------------------------------------------------------------
// operators

void check_operator(SuiteReport& rep, const OperatorDescriptor& op, Rng& rng) {
  const std::string tag = op.name + ".m1=" + std::to_string(op.m1);
  const Vec origin = Vec::Zero(op.m1);

  const AssumptionReport ar = check_assumptions(op, 100000, rng.next_u64());
  rep.checks.push_back(make_check(
      tag + ".assumption_sweep", ar.ok(),
      "violations=" + std::to_string(ar.violations) + " f3_ratio=" + fmt(ar.max_f3_ratio) +
          " f4_ratio=" + fmt(ar.max_f4_ratio) + (ar.witness.empty() ? "" : " " + ar.witness)));
  rep.checks.push_back(make_check(tag + ".omega_coefficient_valid",
                                  ar.max_f4_ratio <= op.omega_coeff,
                                  "measured=" + fmt(ar.max_f4_ratio) +
                                      " budget=" + fmt(op.omega_coeff)));

  if (op.m1 == 2) {
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      const Mat X = rng.symmetric_matrix(2, 2.0);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      Vec d(2);
      for (int k = 0; k < 10000; ++k) {
        const double a = 2.0 * M_PI * k / 10000.0;
        d << std::cos(a), std::sin(a);
        const double v = evaluate(op, 0.0, origin, d, X);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, std::abs(lo - lower_envelope_at_zero(op, 0.0, origin, X)));
      worst = std::max(worst, std::abs(hi - upper_envelope_at_zero(op, 0.0, origin, X)));
    }
    rep.checks.push_back(make_check(tag + ".envelope_bruteforce", worst <= 1e-6,
                                    "max_err=" + fmt(worst)));
  }

  double worst_homog = 0.0, worst_ellip = 0.0, worst_growth = 0.0, worst_sandwich = 0.0;
  const double growth_c = growth_constant(op);
  for (int s = 0; s < 1000; ++s) {
    const Mat X = rng.symmetric_matrix(op.m1, 3.0);
    const Vec eta = rng.uniform(1e-4, 2.0) * rng.unit_vector(op.m1);
    const double c = rng.uniform(1e-3, 100.0);
    const double f = evaluate(op, 0.0, origin, eta, X);
    worst_homog = std::max(worst_homog,
                           std::abs(evaluate(op, 0.0, origin, Vec(c * eta), X) - f));
    Mat b = rng.symmetric_matrix(op.m1, 1.0);
    const Mat psd = Mat(b * b.transpose());
    worst_ellip = std::max(worst_ellip,
                           evaluate(op, 0.0, origin, eta, Mat(X + psd)) - f);
    worst_growth = std::max(worst_growth,
                            std::abs(f) - growth_c * (1.0 + spectral_norm(X)));
    const double flo = lower_envelope_at_zero(op, 0.0, origin, X);
    const double fhi = upper_envelope_at_zero(op, 0.0, origin, X);
    worst_sandwich = std::max({worst_sandwich, flo - f, f - fhi});
  }
  rep.checks.push_back(
      make_check(tag + ".zero_homogeneity", worst_homog <= 1e-12, "max_err=" + fmt(worst_homog)));
  rep.checks.push_back(make_check(tag + ".degenerate_ellipticity", worst_ellip <= 1e-10,
                                  "max_gap=" + fmt(worst_ellip)));
  rep.checks.push_back(make_check(tag + ".linear_growth", worst_growth <= 1e-10,
                                  "max_excess=" + fmt(worst_growth)));
  rep.checks.push_back(make_check(tag + ".envelope_sandwich", worst_sandwich <= 1e-10,
                                  "max_gap=" + fmt(worst_sandwich)));

  const Mat zero = Mat::Zero(op.m1, op.m1);
  const bool f5 = lower_envelope_at_zero(op, 0.0, origin, zero) == 0.0 &&
                  upper_envelope_at_zero(op, 0.0, origin, zero) == 0.0;
  rep.checks.push_back(make_check(tag + ".envelopes_vanish_at_zero", f5, "exact"));
}

// ---------------------------------------------------------------------------
// adversary

struct AdversaryDraw {
  Vec eta, eta_hat;
  Mat X, X_hat;
};

// Targets one branch of the case analysis: part selects the reference pair
// regime, near selects ||d|| <= eps^{1/4}, small_inner the |<d,xi0>| split,
// positive_top the sign of E(X_hat - X).
AdversaryDraw make_draw(Rng& rng, int m1, double lambda1, int part, int K, double R0,
                        double eps, bool near, bool small_inner, bool positive_top) {
  AdversaryDraw d;
  const double eb = std::pow(eps, -0.25);
  const double e14 = std::pow(eps, 0.25);
  const double e12 = std::sqrt(eps);
  const double xb = std::pow(eps, -0.5);

  d.X_hat = rng.symmetric_matrix(m1, R0);
  const double room = 0.98 * (xb - R0);
  if (positive_top) {
    Mat M = rng.symmetric_matrix(m1, room);
    if (top_eigenvalue(M) < 1e-6) M = -M;
    if (top_eigenvalue(M) < 1e-6) M(0, 0) += 1e-3;
    d.X = d.X_hat - M;
  } else {
    Mat b = rng.symmetric_matrix(m1, 1.0);
    Mat q = Mat(b * b.transpose());
    const double qs = spectral_norm(q);
    if (qs > 0.0) q *= rng.uniform(0.0, 1.0) * room / qs;
    d.X = d.X_hat + q;
  }

  if (part == 1) {
    const double lo = 1.0 / K;
    const double hi = std::min(R0, eb - 2.0 * e14);
    d.eta_hat = rng.uniform(lo, std::max(lo, hi)) * rng.unit_vector(m1);
    // keep the norm strictly above the part-1 threshold; for K = R0 = 1 the
    // admissible set is exactly the unit sphere and rounding must not drop
    // the draw into the other branch of the case analysis
    if (d.eta_hat.norm() < lo) d.eta_hat *= lo * (1.0 + 1e-9) / d.eta_hat.norm();
  } else {
    d.eta_hat = rng.uniform(0.0, std::min(1.0 / K, R0)) * rng.unit_vector(m1);
  }

  const double rho_max =
      0.98 * (part == 1 ? std::max(2.0 * e14, eb - d.eta_hat.norm()) : eb);
  Vec diff(m1);
  if (near) {
    diff = rng.uniform(0.0, 0.99 * e14) * rng.unit_vector(m1);
  } else {
    // split along the top eigenvector of X_hat - X to hit the inner-product branch
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(d.X_hat - d.X));
    const Vec xi0 = es.eigenvectors().col(m1 - 1);
    const Vec xiperp = es.eigenvectors().col(0);
    double alpha;
    if (small_inner)
      alpha = rng.uniform(0.0, 0.95 * e12 / lambda1);
    else
      alpha = rng.uniform(1.05 * e12 / lambda1, std::max(2.1 * e12 / lambda1, 0.5 * rho_max));
    if (rng.uniform() < 0.5) alpha = -alpha;
    const double beta = rng.uniform(1.01 * e14, std::max(1.02 * e14, rho_max));
    diff = alpha * xi0 + beta * xiperp;
  }
  d.eta = part == 1 ? Vec(d.eta_hat - diff) : Vec(-diff);
  if (d.eta.norm() < 1e-8) d.eta(0) += 1e-6;
  if (d.eta.norm() > eb) d.eta *= 0.999 * eb / d.eta.norm();
  return d;
}

void check_adversary(SuiteReport& rep, const OperatorDescriptor& op, Rng& rng, int K,
                     double R0, double eps) {
  const int m1 = op.m1;
  const Vec origin = Vec::Zero(m1);
  const double hk = omega_rr(op, 1.0 / (2.0 * K), R0, std::pow(eps, 0.25));
  int violations = 0, gauge_violations = 0;
  double worst_deficit = 0.0;
  const int draws_per_branch = 1000;
  for (int part = 1; part <= 2; ++part) {
    for (int branch = 0; branch < 6; ++branch) {
      const bool near = branch < 2;
      const bool positive_top = (branch % 2) == 0;
      const bool small_inner = branch >= 4;
      for (int s = 0; s < draws_per_branch; ++s) {
        const AdversaryDraw d =
            make_draw(rng, m1, op.lambda1, part, K, R0, eps, near, small_inner, positive_top);
        const Move q = adversary_response(eps, d.eta, part == 1 ? d.eta_hat : Vec(Vec::Zero(m1)),
                                          d.X, d.X_hat, op.lambda1, K, R0);
        if (q.nu.lpNorm<1>() > std::pow(eps, -0.25) + 1e-12) ++gauge_violations;
        Control c{false, d.eta, d.X};
        const double lhs = running_cost(op, eps, 0.0, origin, q, c);
        double rhs, slack;
        if (part == 1) {
          Control chat{false, d.eta_hat, d.X_hat};
          rhs = running_cost(op, eps, 0.0, origin, q, chat);  // F = F* away from 0
          slack = eps * eps * hk;
        } else {
          rhs = running_cost_envelope(op, eps, 0.0, origin, q, d.X_hat, Envelope::Upper);
          slack = 0.0;
        }
        const double deficit = rhs - slack - lhs;
        if (deficit > 1e-10) {
          ++violations;
          worst_deficit = std::max(worst_deficit, deficit);
        }
      }
    }
  }
  std::ostringstream name;
  name << op.name << ".K=" << K << ".R0=" << R0 << ".eps=" << eps;
  rep.checks.push_back(make_check(
      name.str(), violations == 0 && gauge_violations == 0,
      "violations=" + std::to_string(violations) + " gauge_violations=" +
          std::to_string(gauge_violations) +
          (violations ? " worst_deficit=" + fmt(worst_deficit) : "")));
}

RunConfig bump_config(double eps) {
  RunConfig cfg;
  cfg.group_name = "euclidean:2";
  cfg.operator_name = "mcf";
  cfg.game.epsilon = eps;
  cfg.game.horizon = 0.2;
  cfg.game.strategy = Strategy::Guided;
  cfg.box_lo = Vec(2);
  cfg.box_hi = Vec(2);
  cfg.box_h = Vec(2);
  cfg.box_lo << -1.5, -1.5;
  cfg.box_hi << 1.5, 1.5;
  cfg.box_h << 0.05, 0.05;
  // The Lipschitz lemmas need C0[psi] = max(|psi|, |grad psi|, |hess psi|)
  // below eps^{-1/4} at the coarsest eps in the sweep (here 0.2 -> 1.495);
  // this bump has C0 about 1.2.
  cfg.data.name = "smooth-bump";
  cfg.data.amplitude = 0.08;
  cfg.data.rho = 1.2;
  return cfg;
}

}  // namespace

SuiteReport verify_algebra(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "algebra";
  Rng rng(seed);
  check_group(rep, GroupDescriptor::euclidean(2), rng);
  check_group(rep, GroupDescriptor::heisenberg(1), rng);
  check_group(rep, GroupDescriptor::heisenberg(2), rng);
  check_group(rep, GroupDescriptor::engel(), rng);
  return rep;
}

SuiteReport verify_operators(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "operators";
  Rng rng(seed);
  check_operator(rep, make_mcf(2), rng);
  check_operator(rep, make_pil(2), rng);
  check_operator(rep, make_mcf(3), rng);
  check_operator(rep, make_pil(3), rng);
  return rep;
}

SuiteReport verify_adversary(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "adversary";
  Rng rng(seed);
  for (const char* opname : {"mcf", "pil"}) {
    const OperatorDescriptor op = make_operator(opname, 2);
    for (int K : {1, 2, 5})
      for (double R0 : {1.0, 5.0})
        for (double eps : {1e-2, 1e-3, 1e-4}) check_adversary(rep, op, rng, K, R0, eps);
  }
  return rep;
}

SuiteReport verify_regularity(int threads) {
  SuiteReport rep;
  rep.suite = "regularity";
  const GroupDescriptor g = GroupDescriptor::euclidean(2);
  const OperatorDescriptor op = make_mcf(2);
  std::vector<double> cs, ct;
  for (double eps : {0.2, 0.1, 0.05}) {
    RunConfig cfg = bump_config(eps);
    const InitialDatum datum = make_initial_datum(cfg.data, g);
    auto grid = std::make_shared<const Grid>(Box{cfg.box_lo, cfg.box_hi, cfg.box_h}, g);
    SolveResult sr = solve(cfg.game, op, g, grid, datum.fn, datum.far_field, threads);
    const LipschitzEstimate est = measure_lipschitz(sr.layers, g, 400, 2024);
    cs.push_back(est.c_space);
    ct.push_back(est.c_time);
  }
  auto stable = [](const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return lo > 0.0 && hi <= 2.0 * lo;
  };
  rep.checks.push_back(make_check(
      "c_space_stable", stable(cs),
      "eps={0.2,0.1,0.05} -> {" + fmt(cs[0]) + "," + fmt(cs[1]) + "," + fmt(cs[2]) + "}"));
  rep.checks.push_back(make_check(
      "c_time_stable", stable(ct),
      "eps={0.2,0.1,0.05} -> {" + fmt(ct[0]) + "," + fmt(ct[1]) + "," + fmt(ct[2]) + "}"));
  return rep;
}

SuiteReport verify_oracle(std::uint64_t seed, int threads) {
  SuiteReport rep;
  rep.suite = "oracle";
  Rng rng(seed);

  // exact-solution residuals via the finite-difference derivatives
  {
    const GroupDescriptor g = GroupDescriptor::heisenberg(1);
    Box box;
    box.lo = Vec(3);
    box.hi = Vec(3);
    box.h = Vec(3);
    box.lo << -2.0, -2.0, -2.0;
    box.hi << 2.0, 2.0, 2.0;
    box.h << 0.05, 0.05, 0.05;
    auto grid = std::make_shared<const Grid>(box, g);
    ValueLayer layer;
    layer.grid = grid;
    layer.t = 0.0;
    layer.far_field = 0.0;
    layer.values.resize(grid->node_count());
    for (std::int64_t f = 0; f < grid->node_count(); ++f) {
      const Vec p = grid->node_point(f);
      layer.values(f) = pil_exact(0.0, p);
    }
    const OperatorDescriptor pil = make_pil(2);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
      Vec p(3);
      p << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
      if (p(0) * p(0) + p(1) * p(1) < 0.25) continue;
      const HorizontalDerivatives fd = horizontal_derivatives(layer, p, 0.05, g);
      // u_t = -F_PIL(eta, X) and u_t = 2 for the exact solution
      const double residual = 2.0 + evaluate(pil, 0.0, p, fd.eta, fd.hess);
      worst = std::max(worst, std::abs(residual));
    }
    rep.checks.push_back(
        make_check("pil_exact_residual", worst <= 1e-8, "max=" + fmt(worst)));

    ValueLayer circle;
    circle.grid = grid;
    circle.far_field = 1.0;
    circle.values.resize(grid->node_count());
    for (std::int64_t f = 0; f < grid->node_count(); ++f) {
      const Vec p = grid->node_point(f);
      circle.values(f) = std::min(p(0) * p(0) + p(1) * p(1) - 1.0, 1.0);
    }
    const double r = measure_zero_level_radius(circle, identity_point(g), 16);
    rep.checks.push_back(make_check("radius_on_exact_data", std::abs(r - 1.0) <= 0.05,
                                    "r=" + fmt(r)));
    ValueLayer shifted = circle;
    shifted.values += 0.1;
    shifted.far_field += 0.1;
    const double rs = measure_zero_level_radius(shifted, identity_point(g), 16);
    rep.checks.push_back(make_check("radius_monotone_shift", rs < r, "r_shifted=" + fmt(rs)));
  }

  // dpp_step against the naive enumeration on random small configurations
  {
    double worst = 0.0;
    bool constants_ok = true, bound_ok = true;
    for (int trial = 0; trial < 3; ++trial) {
      const char* groups[3] = {"euclidean:2", "heisenberg:1", "engel"};
      const GroupDescriptor g = GroupDescriptor::parse(groups[trial]);
      const OperatorDescriptor op =
          make_operator(trial % 2 == 0 ? "mcf" : "pil", g.horizontal_dim());
      GameConfig cfg;
      cfg.epsilon = rng.uniform(0.03, 0.06);
      cfg.mu = trial == 2 ? 0.5 : 0.0;
      cfg.horizon = 4.0 * cfg.epsilon * cfg.epsilon;
      cfg.strategy = trial == 1 ? Strategy::Guided : Strategy::Generic;
      cfg.n_dir = 4;
      cfg.n_mag = 2;
      cfg.x_dict.n_a = 3;
      cfg.x_dict.n_b = 3;
      Box box;
      box.lo = Vec(g.dim());
      box.hi = Vec(g.dim());
      box.h = Vec(g.dim());
      box.lo.setConstant(-1.0);
      box.hi.setConstant(1.0);
      box.h.setConstant(0.125);
      auto grid = std::make_shared<const Grid>(box, g);
      auto psi = [](const Vec& p) {
        return std::min(p(0) * p(0) + p(1) * p(1) - 0.25, 0.5);
      };
      ValueLayer u0 = build_layer(grid, psi, 0.5);
      StepDiagnostics diag;
      ValueLayer u1 = dpp_step(u0, op, cfg, g, cfg.epsilon * cfg.epsilon, threads, &diag);
      for (int s = 0; s < 100; ++s) {
        const std::int64_t f = static_cast<std::int64_t>(
            rng.next_u64() % static_cast<std::uint64_t>(grid->node_count()));
        const double ref =
            bruteforce_dpp_step(u0, op, cfg, g, grid->node_point(f), u1.t);
        worst = std::max(worst, std::abs(ref - u1.values(f)));
      }
      // constant data stays constant (mu = 0) and the uniform bound holds
      GameConfig ccfg = cfg;
      ccfg.mu = 0.0;
      const double c0 = 0.75;
      SolveResult sr = solve(ccfg, op, g, grid, [c0](const Vec&) { return c0; }, c0, threads);
      for (const ValueLayer& layer : sr.layers) {
        if ((layer.values - c0).abs().maxCoeff() > 1e-8) constants_ok = false;
        if (layer.sup_norm() > c0 + 1e-9) bound_ok = false;
      }
    }
    rep.checks.push_back(
        make_check("dpp_matches_bruteforce", worst <= 1e-12, "max_err=" + fmt(worst)));
    rep.checks.push_back(make_check("constant_preservation", constants_ok, "tol=1e-8"));
    rep.checks.push_back(make_check("uniform_bound", bound_ok, "tol=1e-9"));
  }
  return rep;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int threads) {
  if (name == "algebra") return verify_algebra(seed);
  if (name == "operators") return verify_operators(seed);
  if (name == "adversary") return verify_adversary(seed);
  if (name == "regularity") return verify_regularity(threads);
  if (name == "oracle") return verify_oracle(seed, threads);
  throw ConfigError("unknown verification suite: " + name);
}

}  // namespace carnotflow
