#pragma once

#include <numeric>
#include <optional>

#include "ncbt/lattice.hpp"

namespace ncbt {

/// Covariant-family Hamiltonian description: H = sum_y W_y u^y with the
/// Peierls half-phase folded in at build time. Hoppings come in (y, -y)
/// pairs; the -y partner of a hopping W is alpha(-y)(W^dagger), which for
/// constant matrices is the plain conjugate transpose.
struct ModelSpec {
  int dim = 1;
  int orbital_dim = 1;
  TwistMatrix twist = TwistMatrix::zero(1);
  std::map<IntVec, Coefficient> hoppings;
  DisorderSpec disorder;
  std::optional<std::pair<int, int>> chiral_split;
};

inline Coefficient hermitian_partner(const Coefficient& w, const IntVec& y) {
  return act(negate(y), w.dagger());
}

namespace detail {

inline bool coefficients_match(const Coefficient& a, const Coefficient& b,
                               const DisorderSpec& disorder, double tol) {
  if (a.is_constant() && b.is_constant())
    return block_op_norm(a.constant_value() - b.constant_value()) <= tol;
  for (uint64_t i = 0; i < 3; ++i) {
    const DisorderConfig w = sample_config(disorder, i);
    if (block_op_norm(a.eval(w) - b.eval(w)) > tol) return false;
  }
  return true;
}

}  // namespace detail

/// Validated constructor: every listed y is either paired with -y (the pair
/// must be Hermitian-consistent) or its partner is auto-completed.
inline ModelSpec from_hoppings(int dim, int orbital_dim, TwistMatrix twist,
                               std::vector<std::pair<IntVec, Coefficient>> pairs,
                               DisorderSpec disorder = {},
                               std::optional<std::pair<int, int>> chiral_split = {}) {
  ModelSpec spec;
  spec.dim = dim;
  spec.orbital_dim = orbital_dim;
  spec.twist = std::move(twist);
  spec.disorder = disorder;
  spec.disorder.dim = dim;
  spec.chiral_split = chiral_split;
  if (spec.twist.dim() != dim) throw std::invalid_argument("from_hoppings: twist dim mismatch");

  for (auto& [y, w] : pairs) {
    if (static_cast<int>(y.size()) != dim)
      throw std::invalid_argument("from_hoppings: hop vector of wrong dimension");
    if (w.orbital_dim() != orbital_dim)
      throw std::invalid_argument("from_hoppings: orbital dimension mismatch");
    if (!spec.hoppings.emplace(y, w).second)
      throw std::invalid_argument("from_hoppings: duplicate hop " + to_string(y));
  }
  for (const auto& [y, w] : spec.hoppings) {
    const Coefficient expected = hermitian_partner(w, y);
    auto it = spec.hoppings.find(negate(y));
    if (it == spec.hoppings.end()) {
      spec.hoppings.emplace(negate(y), expected);
    } else if (!detail::coefficients_match(it->second, expected, spec.disorder, 1e-12)) {
      throw std::invalid_argument("from_hoppings: hoppings at " + to_string(y) + " and " +
                                  to_string(negate(y)) + " are not Hermitian partners");
    }
  }
  return spec;
}

/// H = sum_y exp((i/2) y^T Theta y) W_y u^y. Rejects specs whose hopping map
/// violates the Hermiticity contract, naming the offending hop.
inline NcPoly build_hamiltonian(const ModelSpec& spec) {
  NcPoly::CoeffMap coeffs;
  for (const auto& [y, w] : spec.hoppings) {
    auto partner = spec.hoppings.find(negate(y));
    if (partner == spec.hoppings.end() ||
        !detail::coefficients_match(partner->second, hermitian_partner(w, y), spec.disorder,
                                    1e-10))
      throw std::invalid_argument("build_hamiltonian: non-Hermitian hopping at " +
                                  to_string(y));
    const Complex half_phase = std::exp(0.5 * kI * spec.twist.bilinear(y, y));
    coeffs.emplace(y, w.scaled(half_phase));
  }
  return NcPoly(spec.twist, spec.orbital_dim, std::move(coeffs));
}

/// Square-lattice Hofstadter model at flux 2 pi p / q per plaquette
/// (Theta_{21} = 2 pi p / q), unit nearest-neighbor hoppings, optional
/// uniform on-site disorder strength * (2 omega - 1).
inline ModelSpec hofstadter(int p, int q, double onsite_disorder_strength = 0.0,
                            uint64_t seed = 0, int disorder_radius = 48) {
  if (q < 1 || std::gcd(std::abs(p), q) != 1)
    throw std::invalid_argument("hofstadter: require q >= 1 and gcd(p, q) = 1");
  const double flux = 2.0 * kPi * p / q;
  TwistMatrix twist = TwistMatrix::flux2d(flux - 2.0 * kPi * std::floor(flux / (2.0 * kPi)));

  DisorderSpec disorder;
  disorder.dim = 2;
  disorder.per_site_dim = onsite_disorder_strength != 0.0 ? 1 : 0;
  disorder.window_radius = disorder_radius;
  disorder.seed = seed;

  std::vector<std::pair<IntVec, Coefficient>> pairs;
  pairs.emplace_back(IntVec{1, 0}, Coefficient::scalar(1.0));
  pairs.emplace_back(IntVec{0, 1}, Coefficient::scalar(1.0));
  if (onsite_disorder_strength != 0.0) {
    const double strength = onsite_disorder_strength;
    pairs.emplace_back(IntVec{0, 0},
                       Coefficient::site_function(1, 2, [strength](const DisorderConfig& w) {
                         return Matrix::Constant(1, 1, strength * (2.0 * w.value({0, 0}, 0) - 1.0));
                       }));
  }
  return from_hoppings(2, 1, std::move(twist), std::move(pairs), disorder);
}

/// SSH chain: two orbitals (sublattices A, B) per cell, chiral split (1, 1),
/// intracell hopping t_intra, intercell hopping t_inter; bond disorder
/// perturbs each bond strength by strength * (2 omega - 1), the intercell
/// bond value living on its left cell so both orientations read one number.
inline ModelSpec ssh(double t_intra, double t_inter, double bond_disorder_strength = 0.0,
                     uint64_t seed = 0, int disorder_radius = 96) {
  DisorderSpec disorder;
  disorder.dim = 1;
  disorder.per_site_dim = bond_disorder_strength != 0.0 ? 2 : 0;
  disorder.window_radius = disorder_radius;
  disorder.seed = seed;

  std::vector<std::pair<IntVec, Coefficient>> pairs;
  if (bond_disorder_strength != 0.0) {
    const double s = bond_disorder_strength;
    pairs.emplace_back(IntVec{0},
                       Coefficient::site_function(2, 1, [t_intra, s](const DisorderConfig& w) {
                         const double t = t_intra + s * (2.0 * w.value({0}, 0) - 1.0);
                         Matrix m = Matrix::Zero(2, 2);
                         m(0, 1) = t;
                         m(1, 0) = t;
                         return m;
                       }));
    // W_{+1} carries alpha(1): the bond between x and x+1 reads omega(x).
    pairs.emplace_back(
        IntVec{1}, act(IntVec{1}, Coefficient::site_function(
                                      2, 1, [t_inter, s](const DisorderConfig& w) {
                                        const double t =
                                            t_inter + s * (2.0 * w.value({0}, 1) - 1.0);
                                        Matrix m = Matrix::Zero(2, 2);
                                        m(0, 1) = t;  // A <- B across the cell boundary
                                        return m;
                                      })));
  } else {
    Matrix intra = Matrix::Zero(2, 2);
    intra(0, 1) = t_intra;
    intra(1, 0) = t_intra;
    pairs.emplace_back(IntVec{0}, Coefficient(intra));
    Matrix inter = Matrix::Zero(2, 2);
    inter(0, 1) = t_inter;
    pairs.emplace_back(IntVec{1}, Coefficient(inter));
  }
  return from_hoppings(1, 2, TwistMatrix::zero(1), std::move(pairs), disorder,
                       std::make_pair(1, 1));
}

/// Bloch symbol H(k) = sum_y exp(i <y, k>) Phi_y for clean zero-twist models.
inline std::function<Matrix(const std::vector<double>&)> bloch_symbol(const ModelSpec& spec) {
  if (!spec.disorder.clean())
    throw std::invalid_argument("bloch_symbol: only clean models decompose");
  if (antisym(spec.twist).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("bloch_symbol: twist must vanish");
  const NcPoly h = build_hamiltonian(spec);
  const int n = spec.orbital_dim;
  std::vector<std::pair<IntVec, Matrix>> terms;
  const DisorderConfig w0 = sample_config(spec.disorder, 0);
  for (const auto& [y, c] : h.coeffs()) terms.emplace_back(y, c.eval(w0));
  return [terms, n](const std::vector<double>& k) {
    Matrix m = Matrix::Zero(n, n);
    for (const auto& [y, block] : terms) {
      double phase = 0.0;
      for (size_t j = 0; j < k.size(); ++j) phase += k[j] * y[j];
      m += std::exp(kI * phase) * block;
    }
    return m;
  };
}

/// Magnetic Bloch symbol of the clean Hofstadter model at flux 2 pi p / q:
/// the q x q matrix over [0, 2 pi)^2 whose bands carry the gap invariants
/// once per torus cycle (hopping 1 inside the magnetic cell, exp(i k1) across
/// its seam, diagonal 2 cos(k2 - flux * j)). Derived from the Bloch ansatz
/// psi(y) = exp(i k.y) u(y_1 mod q) of the real-space operator, so its band
/// Chern numbers are the lattice model's.
inline std::function<Matrix(double, double)> hofstadter_bloch(int p, int q) {
  if (q < 1 || std::gcd(std::abs(p), q) != 1)
    throw std::invalid_argument("hofstadter_bloch: require q >= 1 and gcd(p, q) = 1");
  const double flux = 2.0 * kPi * p / q;
  return [flux, q](double k1, double k2) {
    Matrix m = Matrix::Zero(q, q);
    for (int j = 0; j < q; ++j) m(j, j) = 2.0 * std::cos(k2 - flux * j);
    if (q == 1) {
      m(0, 0) += 2.0 * std::cos(k1);
      return m;
    }
    for (int j = 0; j + 1 < q; ++j) {
      m(j + 1, j) += 1.0;
      m(j, j + 1) += 1.0;
    }
    m(q - 1, 0) += std::exp(kI * k1);
    m(0, q - 1) += std::exp(-kI * k1);
    return m;
  };
}

}  // namespace ncbt
