#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "carnotflow/types.hpp"

namespace carnotflow {

enum class GroupKind { Euclidean, Heisenberg, Engel };

// One nonzero Lie bracket [X_i, X_j] = c * X_k with i < j (0-based indices).
struct BracketTerm {
  int i;
  int j;
  int k;
  double c;
};

/// A Carnot group in exponential coordinates of the first kind: stratification
/// V_1 (+) ... (+) V_l, structure constants of the chosen left-invariant basis,
/// and the closed-form group law where one is available.
class GroupDescriptor {
 public:
  static GroupDescriptor euclidean(int n);
  static GroupDescriptor heisenberg(int n);
  static GroupDescriptor engel();

  // "euclidean:N", "heisenberg:n", "engel"
  static GroupDescriptor parse(std::string_view name);

  GroupKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int step() const { return static_cast<int>(strata_.size()); }
  const std::vector<int>& strata_dims() const { return strata_; }
  int dim() const { return dim_; }
  int horizontal_dim() const { return strata_[0]; }
  int layer_offset(int layer) const { return offsets_[layer - 1]; }  // 1-based layer
  int layer_of_coordinate(int i) const { return coord_layer_[i]; }   // 0-based coord
  const std::vector<BracketTerm>& brackets() const { return brackets_; }

 private:
  GroupDescriptor() = default;

  GroupKind kind_ = GroupKind::Euclidean;
  std::string name_;
  int dim_ = 0;
  std::vector<int> strata_;
  std::vector<int> offsets_;      // coordinate offset of each layer
  std::vector<int> coord_layer_;  // layer (1-based) of each coordinate
  std::vector<BracketTerm> brackets_;
};

Vec identity_point(const GroupDescriptor& g);

// Embeds a horizontal vector as the group element (nu, 0, ..., 0).
Vec horizontal_point(const GroupDescriptor& g, const Vec& nu);

// [a, b] in the Lie algebra, via the structure constants.
Vec lie_bracket(const GroupDescriptor& g, const Vec& a, const Vec& b);

// Group law. Heisenberg uses its closed form, Euclidean adds, Engel goes
// through the truncated BCH series synthesized from the structure constants.
Vec multiply(const GroupDescriptor& g, const Vec& p, const Vec& q);

// p + q + [p,q]/2 + ([p,[p,q]] - [q,[p,q]])/12; exact for step <= 3.
Vec bch_multiply_from_structure(const GroupDescriptor& g, const Vec& p, const Vec& q);

Vec inverse(const GroupDescriptor& g, const Vec& p);

// Anisotropic dilation: layer-j coordinates scale by lambda^j.
Vec dilate(const GroupDescriptor& g, const Vec& p, double lambda);

// Carnot gauge |p|_G = sum_j sum_i |p_{j,i}|^{1/j}.
double gauge(const GroupDescriptor& g, const Vec& p);

Vec layer_component(const GroupDescriptor& g, const Vec& p, int layer);

// Columns are the horizontal frame fields X_1..X_{m1} evaluated at p,
// expressed in coordinate partials.
Mat horizontal_frame(const GroupDescriptor& g, const Vec& p);

// All N left-invariant basis fields at p (Jacobian of q -> p*q at q = 0).
Mat full_frame(const GroupDescriptor& g, const Vec& p);

}  // namespace carnotflow
