#include "carnotflow/group.hpp"

#include <cmath>
#include <charconv>

namespace carnotflow {

namespace {

void check_dim(const GroupDescriptor& g, const Vec& p, const char* where) {
  if (p.size() != g.dim())
    throw std::invalid_argument(std::string(where) + ": point dimension " +
                                std::to_string(p.size()) + " does not match group dimension " +
                                std::to_string(g.dim()));
}

int parse_int_suffix(std::string_view name, std::string_view prefix) {
  std::string_view tail = name.substr(prefix.size());
  int value = 0;
  auto res = std::from_chars(tail.data(), tail.data() + tail.size(), value);
  if (res.ec != std::errc() || res.ptr != tail.data() + tail.size() || value <= 0)
    throw std::invalid_argument("bad group name: " + std::string(name));
  return value;
}

}  // namespace

GroupDescriptor GroupDescriptor::euclidean(int n) {
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("euclidean dimension out of range: " + std::to_string(n));
  GroupDescriptor g;
  g.kind_ = GroupKind::Euclidean;
  g.name_ = "euclidean:" + std::to_string(n);
  g.dim_ = n;
  g.strata_ = {n};
  g.offsets_ = {0};
  g.coord_layer_.assign(n, 1);
  return g;
}

GroupDescriptor GroupDescriptor::heisenberg(int n) {
  if (n < 1 || 2 * n + 1 > kMaxDim)
    throw std::invalid_argument("heisenberg index out of range: " + std::to_string(n));
  GroupDescriptor g;
  g.kind_ = GroupKind::Heisenberg;
  g.name_ = "heisenberg:" + std::to_string(n);
  g.dim_ = 2 * n + 1;
  g.strata_ = {2 * n, 1};
  g.offsets_ = {0, 2 * n};
  g.coord_layer_.assign(2 * n, 1);
  g.coord_layer_.push_back(2);
  for (int i = 0; i < n; ++i) g.brackets_.push_back({i, n + i, 2 * n, 1.0});  // [X_i, Y_i] = T
  return g;
}

GroupDescriptor GroupDescriptor::engel() {
  GroupDescriptor g;
  g.kind_ = GroupKind::Engel;
  g.name_ = "engel";
  g.dim_ = 4;
  g.strata_ = {2, 1, 1};
  g.offsets_ = {0, 2, 3};
  g.coord_layer_ = {1, 1, 2, 3};
  // Brackets of the frame (computed symbolically from the frame's coefficient
  // fields): [X1,X2] = X3, [X1,X3] = X4, [X2,X3] = X4.
  g.brackets_ = {{0, 1, 2, 1.0}, {0, 2, 3, 1.0}, {1, 2, 3, 1.0}};
  return g;
}

GroupDescriptor GroupDescriptor::parse(std::string_view name) {
  if (name == "engel") return engel();
  if (name.rfind("euclidean:", 0) == 0) return euclidean(parse_int_suffix(name, "euclidean:"));
  if (name.rfind("heisenberg:", 0) == 0) return heisenberg(parse_int_suffix(name, "heisenberg:"));
  throw std::invalid_argument("unknown group: " + std::string(name));
}

Vec identity_point(const GroupDescriptor& g) { return Vec::Zero(g.dim()); }

Vec horizontal_point(const GroupDescriptor& g, const Vec& nu) {
  if (nu.size() != g.horizontal_dim())
    throw std::invalid_argument("horizontal_point: wrong horizontal dimension");
  Vec p = Vec::Zero(g.dim());
  p.head(nu.size()) = nu;
  return p;
}

Vec lie_bracket(const GroupDescriptor& g, const Vec& a, const Vec& b) {
  check_dim(g, a, "lie_bracket");
  check_dim(g, b, "lie_bracket");
  Vec out = Vec::Zero(g.dim());
  for (const BracketTerm& t : g.brackets()) {
    const double w = a(t.i) * b(t.j) - a(t.j) * b(t.i);
    if (w != 0.0) out(t.k) += t.c * w;
  }
  return out;
}

Vec bch_multiply_from_structure(const GroupDescriptor& g, const Vec& p, const Vec& q) {
  check_dim(g, p, "bch_multiply_from_structure");
  check_dim(g, q, "bch_multiply_from_structure");
  if (g.step() > 3)
    throw std::invalid_argument("bch_multiply_from_structure: only step <= 3 supported");
  Vec out = p + q;
  if (g.step() >= 2) {
    const Vec pq = lie_bracket(g, p, q);
    out += 0.5 * pq;
    if (g.step() >= 3)
      out += (lie_bracket(g, p, pq) - lie_bracket(g, q, pq)) / 12.0;
  }
  return out;
}

Vec multiply(const GroupDescriptor& g, const Vec& p, const Vec& q) {
  check_dim(g, p, "multiply");
  check_dim(g, q, "multiply");
  switch (g.kind()) {
    case GroupKind::Euclidean:
      return p + q;
    case GroupKind::Heisenberg: {
      const int n = (g.dim() - 1) / 2;
      Vec out = p + q;
      double twist = 0.0;
      for (int i = 0; i < n; ++i) twist += p(i) * q(n + i) - p(n + i) * q(i);
      out(2 * n) += 0.5 * twist;
      return out;
    }
    case GroupKind::Engel:
      return bch_multiply_from_structure(g, p, q);
  }
  throw std::logic_error("multiply: unreachable");
}

Vec inverse(const GroupDescriptor& g, const Vec& p) {
  check_dim(g, p, "inverse");
  // In exponential coordinates exp(v)^-1 = exp(-v) for every shipped group.
  return -p;
}

Vec dilate(const GroupDescriptor& g, const Vec& p, double lambda) {
  check_dim(g, p, "dilate");
  if (lambda < 0.0) throw std::invalid_argument("dilate: negative lambda");
  Vec out(p.size());
  for (int i = 0; i < p.size(); ++i)
    out(i) = std::pow(lambda, g.layer_of_coordinate(i)) * p(i);
  return out;
}

double gauge(const GroupDescriptor& g, const Vec& p) {
  check_dim(g, p, "gauge");
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double a = std::abs(p(i));
    switch (g.layer_of_coordinate(i)) {
      case 1: s += a; break;
      case 2: s += std::sqrt(a); break;
      case 3: s += std::cbrt(a); break;
      default: s += std::pow(a, 1.0 / g.layer_of_coordinate(i)); break;
    }
  }
  return s;
}

Vec layer_component(const GroupDescriptor& g, const Vec& p, int layer) {
  check_dim(g, p, "layer_component");
  if (layer < 1 || layer > g.step())
    throw std::invalid_argument("layer_component: layer out of range");
  return p.segment(g.layer_offset(layer), g.strata_dims()[layer - 1]);
}

Mat full_frame(const GroupDescriptor& g, const Vec& p) {
  check_dim(g, p, "full_frame");
  const int n = g.dim();
  Mat frame(n, n);
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = 1.0;
    // d/dt p * exp(t e_j) at t = 0, from the truncated BCH series.
    Vec col = e;
    if (g.step() >= 2) {
      const Vec pe = lie_bracket(g, p, e);
      col += 0.5 * pe;
      if (g.step() >= 3) col += lie_bracket(g, p, pe) / 12.0;
    }
    frame.col(j) = col;
  }
  return frame;
}

Mat horizontal_frame(const GroupDescriptor& g, const Vec& p) {
  check_dim(g, p, "horizontal_frame");
  const int n = g.dim();
  const int m1 = g.horizontal_dim();
  Mat frame = Mat::Zero(n, m1);
  switch (g.kind()) {
    case GroupKind::Euclidean:
      for (int j = 0; j < m1; ++j) frame(j, j) = 1.0;
      return frame;
    case GroupKind::Heisenberg: {
      const int hn = (n - 1) / 2;
      for (int j = 0; j < hn; ++j) {
        frame(j, j) = 1.0;
        frame(2 * hn, j) = -0.5 * p(hn + j);
        frame(hn + j, hn + j) = 1.0;
        frame(2 * hn, hn + j) = 0.5 * p(j);
      }
      return frame;
    }
    case GroupKind::Engel:
      frame(0, 0) = 1.0;
      frame(2, 0) = -0.5 * p(1);
      frame(3, 0) = -(0.5 * p(2) + p(1) * (p(0) + p(1)) / 12.0);
      frame(1, 1) = 1.0;
      frame(2, 1) = 0.5 * p(0);
      frame(3, 1) = -(0.5 * p(2) - p(0) * (p(0) + p(1)) / 12.0);
      return frame;
  }
  throw std::logic_error("horizontal_frame: unreachable");
}

}  // namespace carnotflow
