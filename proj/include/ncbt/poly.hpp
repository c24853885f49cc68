#pragma once

#include <map>
#include <optional>

#include "ncbt/coefficient.hpp"
#include "ncbt/twist.hpp"

namespace ncbt {

/// Element of the twisted crossed product at the level of finitely supported
/// Fourier coefficients: p = sum_s Phi_s(p) u^s. Zero coefficients are absent
/// from the map (canonical form); all coefficients share one orbital
/// dimension. Values are immutable after construction; all operations below
/// are pure.
class NcPoly {
 public:
  using CoeffMap = std::map<IntVec, Coefficient>;

  NcPoly(TwistMatrix twist, int orbital_dim, CoeffMap coeffs = {})
      : twist_(std::move(twist)), orbital_dim_(orbital_dim), coeffs_(std::move(coeffs)) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
      if (static_cast<int>(it->first.size()) != dim())
        throw std::invalid_argument("NcPoly: support vector of wrong dimension");
      if (it->second.orbital_dim() != orbital_dim_)
        throw std::invalid_argument("NcPoly: mixed orbital dimensions");
      if (it->second.is_negligible())
        it = coeffs_.erase(it);
      else
        ++it;
    }
  }

  /// a * u^s.
  static NcPoly monomial(const TwistMatrix& twist, const IntVec& s, Coefficient a) {
    CoeffMap m;
    const int n = a.orbital_dim();
    m.emplace(s, std::move(a));
    return NcPoly(twist, n, std::move(m));
  }

  /// Scalar clean monomial z * u^s.
  static NcPoly scalar_monomial(const TwistMatrix& twist, const IntVec& s, Complex z = 1.0) {
    return monomial(twist, s, Coefficient::scalar(z));
  }

  static NcPoly zero(const TwistMatrix& twist, int orbital_dim) {
    return NcPoly(twist, orbital_dim, {});
  }

  /// The unit u^0 (identity coefficient at s = 0).
  static NcPoly unit(const TwistMatrix& twist, int orbital_dim) {
    return monomial(twist, zero_vec(twist.dim()),
                    Coefficient(Matrix::Identity(orbital_dim, orbital_dim)));
  }

  int dim() const { return twist_.dim(); }
  int orbital_dim() const { return orbital_dim_; }
  const TwistMatrix& twist() const { return twist_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  const Coefficient* coeff(const IntVec& s) const {
    auto it = coeffs_.find(s);
    return it == coeffs_.end() ? nullptr : &it->second;
  }

  /// Max |s_j| over the support.
  int support_radius() const {
    int r = 0;
    for (const auto& [s, c] : coeffs_)
      for (int v : s) r = std::max(r, std::abs(v));
    return r;
  }

 private:
  TwistMatrix twist_;
  int orbital_dim_;
  CoeffMap coeffs_;
};

inline void require_compatible(const NcPoly& p, const NcPoly& q) {
  if (p.dim() != q.dim() || !(p.twist() == q.twist()) ||
      p.orbital_dim() != q.orbital_dim())
    throw std::invalid_argument("NcPoly: twist/dimension mismatch between operands");
}

/// Phi_s(pq) = sum_x exp(i x^T Theta (s-x)) Phi_x(p) alpha(x)(Phi_{s-x}(q)).
inline NcPoly nc_mul(const NcPoly& p, const NcPoly& q) {
  require_compatible(p, q);
  NcPoly::CoeffMap out;
  for (const auto& [x, cp] : p.coeffs()) {
    for (const auto& [y, cq] : q.coeffs()) {
      const IntVec s = add(x, y);
      const Complex phase = cocycle(p.twist(), x, y);
      Coefficient term = cp.times(act(x, cq)).scaled(phase);
      auto it = out.find(s);
      if (it == out.end())
        out.emplace(s, std::move(term));
      else
        it->second = it->second.plus(term);
    }
  }
  return NcPoly(p.twist(), p.orbital_dim(), std::move(out));
}

/// Coefficient-wise linear combination, canonical form preserved.
inline NcPoly nc_lincomb(const std::vector<std::pair<Complex, NcPoly>>& terms) {
  if (terms.empty()) throw std::invalid_argument("nc_lincomb: empty term list");
  for (size_t i = 1; i < terms.size(); ++i)
    require_compatible(terms[0].second, terms[i].second);
  NcPoly::CoeffMap out;
  for (const auto& [z, poly] : terms) {
    if (z == Complex(0.0)) continue;
    for (const auto& [s, c] : poly.coeffs()) {
      Coefficient term = c.scaled(z);
      auto it = out.find(s);
      if (it == out.end())
        out.emplace(s, std::move(term));
      else
        it->second = it->second.plus(term);
    }
  }
  return NcPoly(terms[0].second.twist(), terms[0].second.orbital_dim(), std::move(out));
}

inline NcPoly operator+(const NcPoly& p, const NcPoly& q) {
  return nc_lincomb({{1.0, p}, {1.0, q}});
}

inline NcPoly operator-(const NcPoly& p, const NcPoly& q) {
  return nc_lincomb({{1.0, p}, {-1.0, q}});
}

inline NcPoly operator*(Complex z, const NcPoly& p) { return nc_lincomb({{z, p}}); }

inline NcPoly operator*(const NcPoly& p, const NcPoly& q) { return nc_mul(p, q); }

/// Phi_s(p*) = exp(i s^T Theta s) alpha(s)(Phi_{-s}(p)^dagger).
inline NcPoly adjoint(const NcPoly& p) {
  NcPoly::CoeffMap out;
  for (const auto& [ms, c] : p.coeffs()) {
    const IntVec s = negate(ms);
    const Complex phase = std::exp(kI * p.twist().bilinear(s, s));
    out.emplace(s, act(s, c.dagger()).scaled(phase));
  }
  return NcPoly(p.twist(), p.orbital_dim(), std::move(out));
}

/// tau(lambda): Phi_s scaled by the character gamma_s(lambda) = prod lambda_j^{s_j}.
inline NcPoly torus_act(const std::vector<Complex>& lambda, const NcPoly& p) {
  if (static_cast<int>(lambda.size()) != p.dim())
    throw std::invalid_argument("torus_act: lambda of wrong dimension");
  for (Complex l : lambda)
    if (std::abs(std::abs(l) - 1.0) > 1e-9)
      throw std::invalid_argument("torus_act: lambda entries must have unit modulus");
  NcPoly::CoeffMap out;
  for (const auto& [s, c] : p.coeffs()) {
    Complex gamma = 1.0;
    for (int j = 0; j < p.dim(); ++j) {
      const int sj = s[static_cast<size_t>(j)];
      gamma *= std::pow(lambda[static_cast<size_t>(j)], sj);
    }
    out.emplace(s, c.scaled(gamma));
  }
  return NcPoly(p.twist(), p.orbital_dim(), std::move(out));
}

/// Fejer truncation: support restricted to V_n = [-n, n]^d, coefficient at s
/// scaled by prod_j (1 - |s_j| / (n+1)).
inline NcPoly fejer(const NcPoly& p, int n) {
  if (n < 0) throw std::invalid_argument("fejer: order must be >= 0");
  NcPoly::CoeffMap out;
  for (const auto& [s, c] : p.coeffs()) {
    double w = 1.0;
    bool keep = true;
    for (int v : s) {
      if (std::abs(v) > n) {
        keep = false;
        break;
      }
      w *= 1.0 - static_cast<double>(std::abs(v)) / (n + 1);
    }
    if (keep && w != 0.0) out.emplace(s, c.scaled(w));
  }
  return NcPoly(p.twist(), p.orbital_dim(), std::move(out));
}

/// The derivation along axis j (1-based): Phi_s scaled by i * s_j.
inline NcPoly derive(const NcPoly& p, int axis) {
  if (axis < 1 || axis > p.dim()) throw std::invalid_argument("derive: axis out of range");
  NcPoly::CoeffMap out;
  for (const auto& [s, c] : p.coeffs()) {
    const int sj = s[static_cast<size_t>(axis - 1)];
    if (sj == 0) continue;
    out.emplace(s, c.scaled(kI * static_cast<double>(sj)));
  }
  return NcPoly(p.twist(), p.orbital_dim(), std::move(out));
}

/// Worst-case operator norm of one coefficient across the sample set.
inline double coeff_norm(const Coefficient& c, const std::vector<DisorderConfig>& samples) {
  if (c.is_constant()) return block_op_norm(c.constant_value());
  if (samples.empty())
    throw std::invalid_argument("coefficient norm: site-function needs disorder samples");
  double best = 0.0;
  for (const auto& w : samples) best = std::max(best, block_op_norm(c.eval(w)));
  return best;
}

/// l1 norm sum_s ||Phi_s(p)||, an upper bound for the C* norm; site-function
/// coefficients are maximized over the samples.
inline double l1_norm(const NcPoly& p, const std::vector<DisorderConfig>& samples = {}) {
  double acc = 0.0;
  for (const auto& [s, c] : p.coeffs()) acc += coeff_norm(c, samples);
  return acc;
}

enum class NormBackend { l1, operator_estimate };

struct Seminorm {
  int order = 0;
  NormBackend backend = NormBackend::l1;
  double value = 0.0;
};

/// ||p||_n = ||p||_0 + sum_{k=1..n} (1/k!) sum over ordered k-tuples of axes
/// of ||d_{i1} ... d_{ik} p||, with the l1 backend. The operator-estimate
/// backend lives in lattice.hpp next to op_norm_estimate.
inline Seminorm smooth_seminorm_l1(const NcPoly& p, int order,
                                   const std::vector<DisorderConfig>& samples = {}) {
  if (order < 0) throw std::invalid_argument("smooth_seminorm: order must be >= 0");
  double value = l1_norm(p, samples);
  double factorial = 1.0;
  for (int k = 1; k <= order; ++k) {
    factorial *= k;
    // sum over ordered tuples (i_1..i_k): each derivative multiplies
    // ||Phi_s|| by prod |s_{i_t}|, so the tuple sum collapses to ||s||_1^k.
    double tuple_sum = 0.0;
    for (const auto& [s, c] : p.coeffs()) {
      double l1s = 0.0;
      for (int v : s) l1s += std::abs(v);
      tuple_sum += std::pow(l1s, k) * coeff_norm(c, samples);
    }
    value += tuple_sum / factorial;
  }
  return Seminorm{order, NormBackend::l1, value};
}

/// K_{x,p} witness: max_s |s|^x ||Phi_s(p)||, with 0^0 = 1 and 0^k = 0 (k > 0).
inline double decay_profile(const NcPoly& p, const std::vector<int>& exponents,
                            const std::vector<DisorderConfig>& samples = {}) {
  if (static_cast<int>(exponents.size()) != p.dim())
    throw std::invalid_argument("decay_profile: exponent vector of wrong dimension");
  for (int e : exponents)
    if (e < 0) throw std::invalid_argument("decay_profile: exponents must be >= 0");
  double best = 0.0;
  for (const auto& [s, c] : p.coeffs()) {
    double sx = 1.0;
    for (int j = 0; j < p.dim(); ++j) {
      const int a = std::abs(s[static_cast<size_t>(j)]);
      const int e = exponents[static_cast<size_t>(j)];
      if (e > 0) sx *= std::pow(static_cast<double>(a), e);
    }
    best = std::max(best, sx * coeff_norm(c, samples));
  }
  return best;
}

/// Gram identity: Phi_0(p p*) = sum_s Phi_s(p) Phi_s(p)^dagger, returned as a
/// single coefficient.
inline Coefficient gram0(const NcPoly& p) {
  std::optional<Coefficient> acc;
  for (const auto& [s, c] : p.coeffs()) {
    Coefficient term = c.times(c.dagger());
    if (!acc)
      acc = std::move(term);
    else
      acc = acc->plus(term);
  }
  if (!acc) return Coefficient(Matrix::Zero(p.orbital_dim(), p.orbital_dim()));
  return *acc;
}

}  // namespace ncbt
