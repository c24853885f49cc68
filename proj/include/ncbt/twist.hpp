#pragma once

#include "ncbt/common.hpp"

namespace ncbt {

/// Phase matrix of the 2-cocycle zeta(x, y) = exp(i x^T Theta y) on Z^d.
/// Theta is lower triangular with zeros on the diagonal and entries in
/// [0, 2*pi); the commutation phases live in antisym(Theta) = Theta - Theta^T.
class TwistMatrix {
 public:
  explicit TwistMatrix(RealMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
      throw std::invalid_argument("TwistMatrix: square matrix of dim >= 1 required");
    const int d = static_cast<int>(entries_.rows());
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        if (entries_(i, j) != 0.0)
          throw std::invalid_argument(
              "TwistMatrix: strictly lower triangular matrix required");
      }
    }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < i; ++j)
        if (entries_(i, j) < 0.0 || entries_(i, j) >= 2.0 * kPi)
          throw std::invalid_argument("TwistMatrix: entries must lie in [0, 2*pi)");
  }

  static TwistMatrix zero(int d) { return TwistMatrix(RealMatrix::Zero(d, d)); }

  /// d = 2 with Theta_{21} = angle; the single-flux magnetic twist.
  static TwistMatrix flux2d(double angle) {
    RealMatrix m = RealMatrix::Zero(2, 2);
    m(1, 0) = angle;
    return TwistMatrix(std::move(m));
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const RealMatrix& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  bool operator==(const TwistMatrix& other) const { return entries_ == other.entries_; }

  /// x^T Theta y for integer vectors.
  double bilinear(const IntVec& x, const IntVec& y) const {
    const int d = dim();
    if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
      throw std::invalid_argument("TwistMatrix: dimension mismatch");
    double acc = 0.0;
    for (int i = 1; i < d; ++i)
      for (int j = 0; j < i; ++j) acc += x[static_cast<size_t>(i)] * entries_(i, j) * y[static_cast<size_t>(j)];
    return acc;
  }

 private:
  RealMatrix entries_;
};

/// zeta_Theta(x, y) = exp(i x^T Theta y); unit modulus, satisfies the
/// normalized 2-cocycle identity.
inline Complex cocycle(const TwistMatrix& theta, const IntVec& x, const IntVec& y) {
  return std::exp(kI * theta.bilinear(x, y));
}

/// antisym(Theta) = Theta - Theta^T; the phase exp(i x^T antisym(Theta) y)
/// swaps u^x u^y into u^y u^x.
inline RealMatrix antisym(const TwistMatrix& theta) {
  return theta.entries() - theta.entries().transpose();
}

}  // namespace ncbt
