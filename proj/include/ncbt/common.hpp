#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncbt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// A lattice vector in Z^d.
using IntVec = std::vector<int>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr Complex kI{0.0, 1.0};

/// Numerical failure (gapless spectrum, non-Hermitian input, failed solve, ...).
/// Distinct from std::invalid_argument, which flags contract violations.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration / schema error, surfaced by the CLI with its own exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline IntVec zero_vec(int d) { return IntVec(static_cast<size_t>(d), 0); }

inline IntVec unit_vec(int d, int axis) {
  IntVec e = zero_vec(d);
  e[static_cast<size_t>(axis)] = 1;
  return e;
}

inline IntVec add(const IntVec& a, const IntVec& b) {
  IntVec r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline IntVec sub(const IntVec& a, const IntVec& b) {
  IntVec r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline IntVec negate(const IntVec& a) {
  IntVec r = a;
  for (auto& v : r) v = -v;
  return r;
}

inline std::string to_string(const IntVec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

/// Largest singular value of a small dense block (coefficient-sized matrices).
inline double block_op_norm(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

// SplitMix64: counter-based, so every (seed, index, site, coordinate) cell is
// an independent deterministic draw regardless of evaluation order.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) {
  return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

/// Uniform draw in [0, 1) from a 64-bit hash state.
inline double uniform01(uint64_t state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

/// FNV-1a over raw bytes; used to fingerprint matrices.
inline uint64_t fnv1a(const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t matrix_hash(const Matrix& m) {
  return fnv1a(m.data(), sizeof(Complex) * static_cast<size_t>(m.size()));
}

}  // namespace ncbt
