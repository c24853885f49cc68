#pragma once

#include <functional>
#include <utility>

#include "ncbt/disorder.hpp"

namespace ncbt {

/// Drop threshold for canonical form: constant coefficients below this
/// operator norm are treated as zero.
inline constexpr double kCoefficientZeroTol = 1e-14;

/// One Fourier coefficient value: either a constant n x n matrix (a fixed
/// point of the shift action) or a site-function omega -> M_n(C). The shift
/// action alpha is carried as an integer offset, never baked into closures:
/// this = alpha(shift)(base), evaluated as base(rho(-shift) omega).
class Coefficient {
 public:
  using SiteFunction = std::function<Matrix(const DisorderConfig&)>;

  /* implicit */ Coefficient(Matrix constant)
      : orbital_dim_(static_cast<int>(constant.rows())), constant_(std::move(constant)) {
    if (constant_.rows() != constant_.cols() || constant_.rows() < 1)
      throw std::invalid_argument("Coefficient: square matrix required");
  }

  Coefficient(int orbital_dim, SiteFunction fn, IntVec shift_offset)
      : orbital_dim_(orbital_dim), fn_(std::move(fn)), shift_(std::move(shift_offset)) {
    if (orbital_dim_ < 1) throw std::invalid_argument("Coefficient: orbital_dim >= 1");
  }

  static Coefficient scalar(Complex z) { return Coefficient(Matrix::Constant(1, 1, z)); }

  static Coefficient site_function(int orbital_dim, int dim, SiteFunction fn) {
    return Coefficient(orbital_dim, std::move(fn), zero_vec(dim));
  }

  int orbital_dim() const { return orbital_dim_; }
  bool is_constant() const { return fn_ == nullptr; }
  const IntVec& shift_offset() const { return shift_; }

  /// Constant value; contract violation for site-functions.
  const Matrix& constant_value() const {
    if (!is_constant())
      throw std::invalid_argument("Coefficient: not a constant coefficient");
    return constant_;
  }

  /// Evaluate at omega, applying the accumulated alpha-offset.
  Matrix eval(const DisorderConfig& omega) const {
    if (is_constant()) return constant_;
    Matrix m = fn_(shift(omega, negate(shift_)));
    if (m.rows() != orbital_dim_ || m.cols() != orbital_dim_)
      throw std::invalid_argument("Coefficient: site-function returned a wrong shape");
    return m;
  }

  /// Evaluate the underlying base function at omega directly, ignoring the
  /// stored offset. materialize() uses this after folding the offset into the
  /// total lattice shift, which is what keeps periodic windows consistent.
  Matrix eval_base(const DisorderConfig& omega) const {
    if (is_constant()) return constant_;
    return fn_(omega);
  }

  /// alpha(s): constants are fixed points, site-functions accumulate offset.
  Coefficient shifted(const IntVec& s) const {
    if (is_constant()) return *this;
    return Coefficient(orbital_dim_, fn_, add(shift_, s));
  }

  Coefficient dagger() const {
    if (is_constant()) return Coefficient(constant_.adjoint().eval());
    // alpha commutes with the involution, so the offset is kept as-is.
    SiteFunction base = fn_;
    return Coefficient(
        orbital_dim_, [base](const DisorderConfig& w) { return base(w).adjoint().eval(); },
        shift_);
  }

  Coefficient scaled(Complex z) const {
    if (is_constant()) return Coefficient((z * constant_).eval());
    SiteFunction base = fn_;
    return Coefficient(
        orbital_dim_, [base, z](const DisorderConfig& w) { return (z * base(w)).eval(); },
        shift_);
  }

  Coefficient plus(const Coefficient& other) const {
    require_same_shape(other);
    if (is_constant() && other.is_constant())
      return Coefficient((constant_ + other.constant_).eval());
    const Coefficient a = *this, b = other;
    return Coefficient(
        orbital_dim_,
        [a, b](const DisorderConfig& w) { return (a.eval(w) + b.eval(w)).eval(); },
        zero_vec(static_cast<int>(effective_dim(other))));
  }

  /// Pointwise product (this omega) * (other omega); callers are responsible
  /// for any alpha-shift, per the crossed-product convolution formula.
  Coefficient times(const Coefficient& other) const {
    require_same_shape(other);
    if (is_constant() && other.is_constant())
      return Coefficient((constant_ * other.constant_).eval());
    const Coefficient a = *this, b = other;
    return Coefficient(
        orbital_dim_,
        [a, b](const DisorderConfig& w) { return (a.eval(w) * b.eval(w)).eval(); },
        zero_vec(static_cast<int>(effective_dim(other))));
  }

  /// True when the coefficient is a constant below the canonical-form
  /// threshold. Site-functions are never dropped structurally.
  bool is_negligible() const {
    return is_constant() && block_op_norm(constant_) < kCoefficientZeroTol;
  }

 private:
  size_t effective_dim(const Coefficient& other) const {
    if (!is_constant()) return shift_.size();
    if (!other.is_constant()) return other.shift_.size();
    return 1;
  }

  void require_same_shape(const Coefficient& other) const {
    if (orbital_dim_ != other.orbital_dim_)
      throw std::invalid_argument("Coefficient: orbital dimension mismatch");
  }

  int orbital_dim_;
  Matrix constant_;
  SiteFunction fn_;
  IntVec shift_;
};

/// alpha(s)(c): the induced algebra action, identity on constants.
inline Coefficient act(const IntVec& s, const Coefficient& c) { return c.shifted(s); }

}  // namespace ncbt
