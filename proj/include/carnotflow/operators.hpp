#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "carnotflow/types.hpp"

namespace carnotflow {

enum class OperatorKind { Mcf, Pil, Custom };

/// A singular second-order operator F(t, p, eta, X) defined for eta != 0,
/// together with the constants of its structure assumptions:
///   lambda0  = sup_eta |F(t, p, eta, O)|
///   lambda1  : F(.,X) - F(.,Xhat) <= (lambda1^2/2) E+(Xhat - X)
///   omega_{r,R}(s) = omega_coeff * R * s / r, the eta-continuity modulus away
///                    from the singularity (validated, not assumed, by sweeps)
/// Built-in kinds are (t,p)-independent and positively 0-homogeneous in eta.
struct OperatorDescriptor {
  OperatorKind kind = OperatorKind::Mcf;
  std::string name;
  int m1 = 2;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double omega_coeff = 0.0;

  // Custom operators supply these; built-ins leave them empty.
  std::function<double(double, const Vec&, const Vec&, const Mat&)> eval_fn;
  std::function<double(double, const Vec&, const Mat&)> lower0_fn;
  std::function<double(double, const Vec&, const Mat&)> upper0_fn;
};

OperatorDescriptor make_mcf(int m1);
OperatorDescriptor make_pil(int m1);

// "mcf" | "pil"
OperatorDescriptor make_operator(std::string_view name, int m1);

// F(t, p, eta, X); eta must be nonzero (use the envelope functions at eta = 0).
double evaluate(const OperatorDescriptor& op, double t, const Vec& p, const Vec& eta,
                const Mat& X);

// Semicontinuous envelopes of F at eta = 0, from the eigenvalue formulas:
//   MCF: F_* = -tr X + min eig,  F^* = -tr X + max eig
//   PIL: F_* = -max eig,         F^* = -min eig
double lower_envelope_at_zero(const OperatorDescriptor& op, double t, const Vec& p,
                              const Mat& X);
double upper_envelope_at_zero(const OperatorDescriptor& op, double t, const Vec& p,
                              const Mat& X);

// omega_{r,R}(s)
double omega_rr(const OperatorDescriptor& op, double r, double R, double s);

// Linear-growth constant: |F| <= C (1 + ||X||).
double growth_constant(const OperatorDescriptor& op);

struct AssumptionReport {
  int samples = 0;
  int violations = 0;
  double max_f3_ratio = 0.0;    // observed lhs / rhs for the one-sided matrix bound
  double max_f4_ratio = 0.0;    // observed lhs / (R s / r); must stay <= omega_coeff
  std::string witness;          // description of the first violation, if any
  bool ok() const { return violations == 0; }
};

// Random sweep of the structure inequalities with the descriptor's constants.
AssumptionReport check_assumptions(const OperatorDescriptor& op, int n_samples,
                                   std::uint64_t seed);

}  // namespace carnotflow
