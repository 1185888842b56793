#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hlab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Thrown when a documented numeric failure mode is hit (log branch
/// failure, chart exit, non-convergence of a limit, ...). The `code`
/// is a stable machine-readable identifier.
struct NumericError : std::runtime_error {
  std::string code;
  NumericError(std::string c, const std::string& what)
      : std::runtime_error(what), code(std::move(c)) {}
};

struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool ok, const char* msg) {
  if (!ok) throw ContractViolation(msg);
}

// Deterministic 64-bit stream derivation (splitmix64). Used to seed
// per-task substreams so results do not depend on worker scheduling.
inline uint64_t split_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small deterministic RNG (xorshift-star core) with uniform doubles in
/// [0,1). Bit-stable across platforms, unlike std distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(split_seed(seed, 0x5deece66dULL)) {
    if (state_ == 0) state_ = 0x106689d45497fdb5ULL;
  }
  uint64_t next_u64() {
    uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
  }
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Standard normal via Box-Muller (deterministic pairing).
  double normal() {
    double u1 = uniform(), u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  Vec normal_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

 private:
  uint64_t state_;
};

}  // namespace hlab
