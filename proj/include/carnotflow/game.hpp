#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "carnotflow/grid.hpp"
#include "carnotflow/operators.hpp"

namespace carnotflow {

enum class Strategy { Generic, Guided };

struct XDict {
  // Generic mode: Hessian dictionary {a I + b u u^T} over these grids.
  double a_max = 2.0;
  int n_a = 5;
  double b_max = 2.0;
  int n_b = 5;
  // Guided mode: +-a I perturbations of the finite-difference Hessian.
  std::vector<double> guided_perturb = {0.5, 1.0};
};

/// Parameters of the two-player game at scale epsilon.
struct GameConfig {
  double epsilon = 0.05;
  double mu = 0.0;
  double horizon = 0.25;  // T
  Strategy strategy = Strategy::Guided;
  int n_dir = 8;
  int n_mag = 2;
  double eta_min = 1e-6;
  XDict x_dict;
  double fd_delta = 0.0;  // 0 -> smallest grid multiple covering the move reach

  int steps() const;                       // m = floor(T / eps^2)
  double eta_bound() const;                // eps^{-1/4}, Euclidean norm
  double x_bound() const;                  // eps^{-1/2}, spectral norm
  double move_bound() const;               // eps^{-1/4}, l1 norm of nu
  double discount() const { return 1.0 / (1.0 + mu * epsilon * epsilon); }
};

/// Player I's choice: either a nonzero horizontal direction with a symmetric
/// matrix, or the zero-gradient sentinel (priced through the upper envelope).
struct Control {
  bool zero_gradient = false;
  Vec eta;   // empty/ignored when zero_gradient
  Mat hess;
};

/// Player II's horizontal move q = (nu, 0).
struct Move {
  Vec nu;
};

// R^eps(t, p, q, eta, X) = -eps<eta,nu> - (eps^2/2)<X nu,nu> - eps^2 F(t,p,eta,X)
double running_cost(const OperatorDescriptor& op, double eps, double t, const Vec& p,
                    const Move& q, const Control& c);

enum class Envelope { Lower, Upper };

// R with eta = 0 and F replaced by the chosen envelope.
double running_cost_envelope(const OperatorDescriptor& op, double eps, double t,
                             const Vec& p, const Move& q, const Mat& X, Envelope which);

// Cost of (control, move) routing the zero sentinel through the upper envelope.
double move_cost(const OperatorDescriptor& op, double eps, double t, const Vec& p,
                 const Move& q, const Control& c);

/// Player II's response from the constructive lemma: given Player I's (eta, X)
/// and reference pair (eta_hat, X_hat), builds nu from eigenvectors of
/// X_hat - X with magnitudes in {0, lambda1, eps^{1/4} lambda1} and signs making
/// the <eta_hat - eta, .> pairings nonnegative. The returned move always
/// satisfies the l1 gauge bound.
Move adversary_response(double eps, const Vec& eta, const Vec& eta_hat, const Mat& X,
                        const Mat& X_hat, double lambda1, int K, double R0);

// Deterministic direction set used by both control and move lattices.
std::vector<Vec> unit_directions(int m1, int n_dir);

// Shared move lattice: nu = 0 plus directions x magnitudes, l1-scaled to the bound.
std::vector<Move> move_lattice(const GameConfig& cfg, int m1);

// Per-control moves guaranteeing sup_q R >= 0 where admissible (the
// uniform-bound response with eta_hat = 0, X_hat = O).
std::vector<Move> control_moves(const GameConfig& cfg, const OperatorDescriptor& op,
                                const Control& c);

// Guided-mode probe length: one move carries the state by up to
// eps * eps^{-1/4} in the horizontal layer, and the finite differences must
// see at least that far or Player I cannot price reachable features.
double default_fd_delta(double epsilon, double h_min);

// Player I's control set at node p (strategy-dependent).
std::vector<Control> player1_controls(const ValueLayer& prev, const Vec& p,
                                      const GameConfig& cfg, const OperatorDescriptor& op,
                                      const GroupDescriptor& g);

// Exhaustive maximizer over the full move set of one control; reference
// implementation for cross-validation of the dpp_step inner loop.
std::pair<double, Move> bruteforce_sup(const ValueLayer& prev, const Vec& p,
                                       const Control& c, const GameConfig& cfg,
                                       const OperatorDescriptor& op,
                                       const GroupDescriptor& g, double t);

struct StepDiagnostics {
  std::uint64_t box_breaches = 0;
};

// One inf-sup update of the whole layer; output stamped t. Deterministic and
// data-parallel over nodes: parallel and serial runs produce identical layers.
ValueLayer dpp_step(const ValueLayer& prev, const OperatorDescriptor& op,
                    const GameConfig& cfg, const GroupDescriptor& g, double t,
                    int threads, StepDiagnostics* diag = nullptr);

struct SolveResult {
  std::vector<ValueLayer> layers;  // t = 0, eps^2, ..., m eps^2
  StepDiagnostics diag;
};

SolveResult solve(const GameConfig& cfg, const OperatorDescriptor& op,
                  const GroupDescriptor& g, std::shared_ptr<const Grid> grid,
                  const std::function<double(const Vec&)>& psi, double far_field,
                  int threads,
                  const std::function<void(const ValueLayer&, int)>& on_layer = {});

int resolve_threads(int requested);  // 0 -> THREADS env var, else hardware count

}  // namespace carnotflow
