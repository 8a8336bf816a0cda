#pragma once

#include <string>
#include <vector>

#include "carnotflow/game.hpp"

namespace carnotflow {

/// Zero-level-set radius of a tracked surface per emitted time.
struct RadialProfile {
  std::vector<double> times;
  std::vector<double> measured;
  std::vector<double> exact;  // NaN where no exact law applies
};

// CSV "t, r_measured, r_exact, rel_err".
void write_profile_csv(const RadialProfile& prof, const std::string& path);

// Radius law for level-set MCF of a sphere in R^{m1}: sqrt(r0^2 - 2(m1-1)t).
double euclidean_sphere_radius(double t, double r0, int m1);

// Radius law for the rotationally symmetric cylinder under horizontal MCF in
// H^1: sqrt(r0^2 - 2t). Derived by substituting u = p1^2 + p2^2 - r(t)^2 into
// the level-set equation with the Heisenberg frame (X1 u = 2 p1, X2 u = 2 p2,
// symmetrized Hessian 2I, so u_t = 2).
double heisenberg_cylinder_radius(double t, double r0);

// Exact classical solution of the parabolic infinite Laplacian on H^1 away
// from the center axis: u(t, p) = p1^2 + p2^2 + 2t.
double pil_exact(double t, const Vec& p);

// Average over horizontal rays through `center` of the interpolated root of u.
// Rays without a sign change are excluded (count reported via excluded_rays);
// throws if every ray is excluded.
double measure_zero_level_radius(const ValueLayer& layer, const Vec& center, int n_rays,
                                 int* excluded_rays = nullptr);

// Naive re-implementation of one DPP node update (full enumeration, no
// caching); must agree with dpp_step on the same lattice.
double bruteforce_dpp_step(const ValueLayer& prev, const OperatorDescriptor& op,
                           const GameConfig& cfg, const GroupDescriptor& g,
                           const Vec& node_p, double t);

struct LipschitzEstimate {
  double c_space = 0.0;  // sup |u(t,p)-u(t,ph)| / |p . ph^-1|_G over sampled pairs
  double c_time = 0.0;   // sup |u(t,p)-u(t-eps^2,p)| / eps^2 over layers
};

LipschitzEstimate measure_lipschitz(const std::vector<ValueLayer>& layers,
                                    const GroupDescriptor& g, int n_pairs,
                                    std::uint64_t seed);

}  // namespace carnotflow
