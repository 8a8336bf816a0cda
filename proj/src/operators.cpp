#include "carnotflow/operators.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace carnotflow {

namespace {

void require_eta(const Vec& eta) {
  if (eta.norm() == 0.0)
    throw std::invalid_argument("evaluate: eta = 0; use the envelope operations");
}

std::pair<double, double> eigen_range(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(x, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace

OperatorDescriptor make_mcf(int m1) {
  if (m1 < 1) throw std::invalid_argument("make_mcf: m1 must be positive");
  OperatorDescriptor op;
  op.kind = OperatorKind::Mcf;
  op.name = "mcf";
  op.m1 = m1;
  op.lambda0 = 0.0;
  op.lambda1 = std::sqrt(2.0 * (m1 - 1));
  op.omega_coeff = 4.0 * m1;
  return op;
}

OperatorDescriptor make_pil(int m1) {
  if (m1 < 1) throw std::invalid_argument("make_pil: m1 must be positive");
  OperatorDescriptor op;
  op.kind = OperatorKind::Pil;
  op.name = "pil";
  op.m1 = m1;
  op.lambda0 = 0.0;
  op.lambda1 = std::sqrt(2.0);
  op.omega_coeff = 4.0 * m1;
  return op;
}

OperatorDescriptor make_operator(std::string_view name, int m1) {
  if (name == "mcf") return make_mcf(m1);
  if (name == "pil") return make_pil(m1);
  throw std::invalid_argument("unknown operator: " + std::string(name));
}

double evaluate(const OperatorDescriptor& op, double t, const Vec& p, const Vec& eta,
                const Mat& X) {
  require_eta(eta);
  switch (op.kind) {
    case OperatorKind::Mcf: {
      // -tr[(I - u u^T) X] with u = eta/|eta|
      const Vec u = eta / eta.norm();
      return -(X.trace() - u.dot(X * u));
    }
    case OperatorKind::Pil: {
      const Vec u = eta / eta.norm();
      return -u.dot(X * u);
    }
    case OperatorKind::Custom:
      if (!op.eval_fn) throw std::invalid_argument("custom operator without eval_fn");
      return op.eval_fn(t, p, eta, X);
  }
  throw std::logic_error("evaluate: unreachable");
}

double lower_envelope_at_zero(const OperatorDescriptor& op, double t, const Vec& p,
                              const Mat& X) {
  switch (op.kind) {
    case OperatorKind::Mcf: {
      auto [lo, hi] = eigen_range(X);
      return -X.trace() + lo;
    }
    case OperatorKind::Pil: {
      auto [lo, hi] = eigen_range(X);
      return -hi;
    }
    case OperatorKind::Custom:
      if (!op.lower0_fn) throw std::invalid_argument("custom operator without lower0_fn");
      return op.lower0_fn(t, p, X);
  }
  throw std::logic_error("lower_envelope_at_zero: unreachable");
}

double upper_envelope_at_zero(const OperatorDescriptor& op, double t, const Vec& p,
                              const Mat& X) {
  switch (op.kind) {
    case OperatorKind::Mcf: {
      auto [lo, hi] = eigen_range(X);
      return -X.trace() + hi;
    }
    case OperatorKind::Pil: {
      auto [lo, hi] = eigen_range(X);
      return -lo;
    }
    case OperatorKind::Custom:
      if (!op.upper0_fn) throw std::invalid_argument("custom operator without upper0_fn");
      return op.upper0_fn(t, p, X);
  }
  throw std::logic_error("upper_envelope_at_zero: unreachable");
}

double omega_rr(const OperatorDescriptor& op, double r, double R, double s) {
  if (r <= 0.0 || R <= 0.0) throw std::invalid_argument("omega_rr: r, R must be positive");
  return op.omega_coeff * R * s / r;
}

double growth_constant(const OperatorDescriptor& op) {
  return 0.5 * op.lambda1 * op.lambda1 * op.m1 + op.lambda0;
}

AssumptionReport check_assumptions(const OperatorDescriptor& op, int n_samples,
                                   std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("check_assumptions: n_samples >= 1");
  AssumptionReport rep;
  rep.samples = n_samples;
  Rng rng(seed);
  const Vec origin = Vec::Zero(op.m1);
  const double half_l1sq = 0.5 * op.lambda1 * op.lambda1;
  const double tol = 1e-10;
  for (int s = 0; s < n_samples; ++s) {
    const double t = rng.uniform();
    const Mat X = rng.symmetric_matrix(op.m1, 10.0);
    const Mat Xh = rng.symmetric_matrix(op.m1, 10.0);
    const Vec eta = rng.uniform(1e-3, 3.0) * rng.unit_vector(op.m1);

    // (F3): F(eta, X) - F(eta, Xhat) <= (lambda1^2/2) E+(Xhat - X)
    const double lhs3 = evaluate(op, t, origin, eta, X) - evaluate(op, t, origin, eta, Xh);
    const double rhs3 = half_l1sq * positive_top_eigenvalue(Xh - X);
    if (lhs3 > rhs3 + tol) {
      ++rep.violations;
      if (rep.witness.empty()) {
        std::ostringstream os;
        os << "F3 violated: lhs=" << lhs3 << " rhs=" << rhs3;
        rep.witness = os.str();
      }
    }
    if (rhs3 > tol) rep.max_f3_ratio = std::max(rep.max_f3_ratio, lhs3 / rhs3);

    // (F4) with r = min norm, R = ||X||: difference in eta at fixed X
    const double r = rng.uniform(0.05, 1.0);
    const double R = rng.uniform(0.1, 5.0);
    const Vec ea = rng.uniform(r, 3.0 * r) * rng.unit_vector(op.m1);
    Vec eb = ea + rng.uniform(0.0, r) * rng.unit_vector(op.m1);
    if (eb.norm() < r) eb *= (r / eb.norm()) * (1.0 + 1e-12);
    const Mat Xr = clamp_spectral(rng.symmetric_matrix(op.m1, R), R);
    const double lhs4 =
        std::abs(evaluate(op, t, origin, eb, Xr) - evaluate(op, t, origin, ea, Xr));
    const double rhs4 = omega_rr(op, r, R, (eb - ea).norm());
    if (lhs4 > rhs4 + tol) {
      ++rep.violations;
      if (rep.witness.empty()) {
        std::ostringstream os;
        os << "F4 violated: lhs=" << lhs4 << " rhs=" << rhs4;
        rep.witness = os.str();
      }
    }
    const double scale4 = R * (eb - ea).norm() / r;
    if (scale4 > 1e-14) rep.max_f4_ratio = std::max(rep.max_f4_ratio, lhs4 / scale4);
  }
  return rep;
}

}  // namespace carnotflow
