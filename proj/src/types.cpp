#include "carnotflow/types.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace carnotflow {

namespace {
using Solver = Eigen::SelfAdjointEigenSolver<Mat>;
}

double top_eigenvalue(const Mat& x) {
  Solver es(x, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double positive_top_eigenvalue(const Mat& x) {
  return std::max(0.0, top_eigenvalue(x));
}

std::pair<double, Vec> min_eigenpair(const Mat& x) {
  Solver es(x);
  // eigenvalues are sorted ascending
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

double spectral_norm(const Mat& x) {
  Solver es(x, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat clamp_spectral(const Mat& x, double bound) {
  const double n = spectral_norm(x);
  if (n <= bound || n == 0.0) return x;
  return x * (bound / n);
}

Mat clip_eigenvalues(const Mat& x, double bound) {
  Solver es(x);
  if (es.eigenvalues().cwiseAbs().maxCoeff() <= bound) return x;
  Vec ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = std::clamp(ev(i), -bound, bound);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Vec clamp_norm(const Vec& v, double bound) {
  const double n = v.norm();
  if (n <= bound || n == 0.0) return v;
  return v * (bound / n);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 1e-300);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Vec Rng::normal_vector(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Vec Rng::unit_vector(int n) {
  for (;;) {
    Vec v = normal_vector(n);
    const double nv = v.norm();
    if (nv > 1e-12) return v / nv;
  }
}

Mat Rng::symmetric_matrix(int n, double bound) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = uniform(-1.0, 1.0);
  const double s = spectral_norm(m);
  if (s > 0.0) m *= uniform(0.0, 1.0) * bound / s;
  return m;
}

}  // namespace carnotflow
