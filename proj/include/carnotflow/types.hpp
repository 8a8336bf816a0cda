#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace carnotflow {

// Largest topological dimension supported (covers Heisenberg up to H^5 and Engel).
inline constexpr int kMaxDim = 12;

// Dynamic-size, stack-allocated vectors/matrices. All group and operator code
// works on these so small dimensions never touch the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

// max(0, largest eigenvalue)
double positive_top_eigenvalue(const Mat& x);

// largest eigenvalue (signed)
double top_eigenvalue(const Mat& x);

// unit eigenvector of the smallest eigenvalue, plus that eigenvalue
std::pair<double, Vec> min_eigenpair(const Mat& x);

double spectral_norm(const Mat& x);

// Scales a symmetric matrix down to the given spectral-norm bound (no-op if inside).
Mat clamp_spectral(const Mat& x, double bound);

// Frobenius projection onto {||X|| <= bound}: clips each eigenvalue into
// [-bound, bound] and leaves the compliant part of the spectrum untouched.
Mat clip_eigenvalues(const Mat& x, double bound);

// Scales a vector down to the given Euclidean-norm bound (no-op if inside).
Vec clamp_norm(const Vec& v, double bound);

// splitmix64-based generator. Deterministic and portable; used by property
// sweeps and verification suites so reports are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive range
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal();

  Vec normal_vector(int n);

  Vec unit_vector(int n);

  // symmetric matrix with spectral norm <= bound
  Mat symmetric_matrix(int n, double bound);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace carnotflow
