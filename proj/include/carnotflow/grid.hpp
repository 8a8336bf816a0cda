#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "carnotflow/group.hpp"
#include "carnotflow/types.hpp"

namespace carnotflow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Box {
  Vec lo;
  Vec hi;
  Vec h;  // per-axis spacing
};

/// Uniform node lattice over a box in exponential coordinates.
class Grid {
 public:
  Grid(Box box, const GroupDescriptor& g);

  int dim() const { return static_cast<int>(box_.lo.size()); }
  std::int64_t node_count() const { return count_; }
  int nodes_along(int axis) const { return dims_[axis]; }
  const Box& box() const { return box_; }
  int coordinate_layer(int axis) const { return layers_[axis]; }

  Vec node_point(std::int64_t flat) const;
  void node_index(std::int64_t flat, int* idx) const;
  std::int64_t flat_index(const int* idx) const;

  bool contains(const Vec& p) const;

 private:
  Box box_;
  std::vector<int> dims_;
  std::vector<std::int64_t> strides_;
  std::vector<int> layers_;
  std::int64_t count_ = 0;
};

/// u(t, .) on a grid plus the constant the datum takes outside the box.
struct ValueLayer {
  std::shared_ptr<const Grid> grid;
  Eigen::ArrayXd values;
  double t = 0.0;
  double far_field = 0.0;

  double sup_norm() const {
    return std::max(values.abs().maxCoeff(), std::abs(far_field));
  }
};

struct BuildDiagnostics {
  // Boundary nodes on higher-layer faces whose value differs from far_field.
  // The corresponding mismatch on a horizontal (layer-1) face is a hard error.
  std::int64_t vertical_shell_mismatches = 0;
};

ValueLayer build_layer(std::shared_ptr<const Grid> grid,
                       const std::function<double(const Vec&)>& psi, double far_field,
                       BuildDiagnostics* diag = nullptr);

// Multilinear interpolation inside the box, far_field outside. Monotone:
// the result never leaves the range of the stencil values.
double sample(const ValueLayer& layer, const Vec& p);
double sample(const ValueLayer& layer, const Vec& p, bool* outside);

struct HorizontalDerivatives {
  Vec eta;        // frame-direction central differences
  Vec eta_steep;  // per direction, the one-sided slope of larger magnitude;
                  // equals eta up to O(delta) on smooth data but captures the
                  // full slope when a kink sits inside the stencil
  Mat hess;       // symmetrized second differences
  bool stencil_breach = false;  // some stencil point fell back to far_field
};

// Finite differences along left translations by horizontal exponentials
// exp(+-delta X_i); second-order accurate on smooth u.
HorizontalDerivatives horizontal_derivatives(const ValueLayer& layer, const Vec& p,
                                             double delta, const GroupDescriptor& g);

// CSV with header "t, x1, ..., xN, u", one row per node, %.17g formatting.
void write_layer_csv(const ValueLayer& layer, const std::string& path);

}  // namespace carnotflow
