#pragma once

#include <algorithm>
#include <numeric>

#include "ncbt/spectral.hpp"

namespace ncbt {

/// Ordered multi-index I over axes 1..d; distinct entries, order significant
/// (it carries the orientation of the cocycle).
struct MultiIndex {
  std::vector<int> axes;

  explicit MultiIndex(std::vector<int> a) : axes(std::move(a)) {
    for (size_t i = 0; i < axes.size(); ++i) {
      if (axes[i] < 1) throw std::invalid_argument("MultiIndex: axes are 1-based");
      for (size_t j = i + 1; j < axes.size(); ++j)
        if (axes[i] == axes[j]) throw std::invalid_argument("MultiIndex: repeated axis");
    }
  }

  int size() const { return static_cast<int>(axes.size()); }
};

/// Lambda_n: (2 i pi)^{n/2} / (n/2)! for even n, i (i pi)^{(n-1)/2} / n!! for
/// odd n.
inline Complex lambda_const(int n) {
  if (n < 1) throw std::invalid_argument("lambda_const: n >= 1 required");
  if (n % 2 == 0) {
    Complex num = std::pow(2.0 * kI * kPi, n / 2);
    double den = 1.0;
    for (int k = 2; k <= n / 2; ++k) den *= k;
    return num / den;
  }
  Complex num = kI * std::pow(kI * kPi, (n - 1) / 2);
  double den = 1.0;
  for (int k = n; k >= 1; k -= 2) den *= k;
  return num / den;
}

/// Orientation between the literal cyclic-cocycle formulas and the classical
/// conventions served by the numerical oracles, calibrated on the clean
/// Hofstadter and SSH models and frozen by the golden quantization tests.
/// The two parities need opposite signs: with the Berry connection
/// A = -i <u|du>, tr(P [d1 P, d2 P]) = i F_12, so the literal even pairing
/// evaluates to minus the plaquette Berry-flux integer, while the literal odd
/// pairing of the lower-left flat-band block already matches the winding of
/// the upper-right Bloch symbol block.
inline constexpr double kChernOrientationEven = -1.0;
inline constexpr double kChernOrientationOdd = 1.0;

namespace detail {

/// Signed permutations of {0..n-1}; emits (perm, sign).
template <typename F>
void for_each_permutation(int n, F&& f) {
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end());
  do {
    int inversions = 0;
    for (size_t i = 0; i < perm.size(); ++i)
      for (size_t j = i + 1; j < perm.size(); ++j)
        if (perm[i] > perm[j]) ++inversions;
    f(perm, inversions % 2 == 0 ? 1.0 : -1.0);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace detail

/// Even invariant for one disorder sample:
/// Lambda_n sum_rho sgn(rho) vol_trace(P prod_j i[X_{rho(j)}, P]).
inline Complex chern_even(const LatticeOperator& projection, const MultiIndex& index,
                          int margin = 0) {
  const int n = index.size();
  if (n == 0 || n % 2 != 0)
    throw std::invalid_argument("chern_even: multi-index of even positive size required");
  const double scale = std::max(1.0, projection.data.cwiseAbs().maxCoeff());
  if (hermiticity_residual(projection.data) > 1e-8 * scale ||
      (projection.data * projection.data - projection.data).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("chern_even: input is not a Hermitian projection");

  std::vector<Matrix> derived(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    derived[static_cast<size_t>(j)] =
        position_commutator(projection, index.axes[static_cast<size_t>(j)]).data;

  Complex acc = 0.0;
  detail::for_each_permutation(n, [&](const std::vector<int>& perm, double sign) {
    Matrix prod = projection.data;
    for (int j : perm) prod = prod * derived[static_cast<size_t>(j)];
    acc += sign * volume_trace(LatticeOperator(projection.window, std::move(prod), false),
                               margin);
  });
  return kChernOrientationEven * lambda_const(n) * acc;
}

/// Odd invariant for one disorder sample:
/// Lambda_n sum_rho sgn(rho) vol_trace(prod_l U^dagger i[X_{rho(l)}, U]).
inline Complex chern_odd(const LatticeOperator& unitary, const MultiIndex& index,
                         int margin = 0) {
  const int n = index.size();
  if (n % 2 != 1)
    throw std::invalid_argument("chern_odd: multi-index of odd size required");
  const long m = unitary.data.rows();
  if ((unitary.data.adjoint() * unitary.data - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() >
      1e-8)
    throw std::invalid_argument("chern_odd: input is not unitary");

  std::vector<Matrix> derived(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    derived[static_cast<size_t>(j)] =
        position_commutator(unitary, index.axes[static_cast<size_t>(j)]).data;

  const Matrix udag = unitary.data.adjoint();
  Complex acc = 0.0;
  detail::for_each_permutation(n, [&](const std::vector<int>& perm, double sign) {
    Matrix prod = Matrix::Identity(m, m);
    for (int j : perm) prod = prod * (udag * derived[static_cast<size_t>(j)]);
    acc += sign *
           volume_trace(LatticeOperator(unitary.window, std::move(prod), false), margin);
  });
  return kChernOrientationOdd * lambda_const(n) * acc;
}

/// Pfaffian of a real antisymmetric matrix by recursive first-row expansion;
/// Pf of the empty matrix is 1.
inline double pfaffian(const RealMatrix& a) {
  const long n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("pfaffian: square matrix required");
  if (n % 2 != 0) throw std::invalid_argument("pfaffian: even dimension required");
  if (n > 0 && (a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("pfaffian: matrix is not antisymmetric");
  if (n == 0) return 1.0;
  if (n == 2) return a(0, 1);

  // Expansion along row 0: Pf(A) = sum_j (-1)^j a_{0j} Pf(A_{\hat0\hat j}).
  double acc = 0.0;
  for (long j = 1; j < n; ++j) {
    if (a(0, j) == 0.0) continue;
    RealMatrix minor(n - 2, n - 2);
    long rr = 0;
    for (long r = 1; r < n; ++r) {
      if (r == j) continue;
      long cc = 0;
      for (long c = 1; c < n; ++c) {
        if (c == j) continue;
        minor(rr, cc) = a(r, c);
        ++cc;
      }
      ++rr;
    }
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    acc += sign * a(0, j) * pfaffian(minor);
  }
  return acc;
}

/// One term of the range formula: the coefficient and the multi-index J that
/// produced it.
struct RangeTerm {
  std::vector<int> j_set;
  double coefficient = 0.0;
};

/// Thm-range of Ch_I: Z + sum over Z-ordered J containing I with |J \ I| even
/// of (2 pi)^{-|J\I|/2} Pf(antisym(Theta) restricted to J \ I) Z. The leading
/// term J = I contributes coefficient 1.
inline std::vector<RangeTerm> chern_range(const TwistMatrix& theta, const MultiIndex& index) {
  const int d = theta.dim();
  for (int a : index.axes)
    if (a > d) throw std::invalid_argument("chern_range: axis exceeds dimension");
  const RealMatrix hat = antisym(theta);

  std::vector<int> base(index.axes);
  std::sort(base.begin(), base.end());
  std::vector<int> rest;
  for (int a = 1; a <= d; ++a)
    if (std::find(base.begin(), base.end(), a) == base.end()) rest.push_back(a);

  std::vector<RangeTerm> terms;
  const size_t subsets = 1u << rest.size();
  for (size_t mask = 0; mask < subsets; ++mask) {
    std::vector<int> extra;
    for (size_t b = 0; b < rest.size(); ++b)
      if (mask & (1u << b)) extra.push_back(rest[b]);
    if (extra.size() % 2 != 0) continue;

    RealMatrix sub(static_cast<long>(extra.size()), static_cast<long>(extra.size()));
    for (size_t r = 0; r < extra.size(); ++r)
      for (size_t c = 0; c < extra.size(); ++c)
        sub(static_cast<long>(r), static_cast<long>(c)) =
            hat(extra[r] - 1, extra[c] - 1);

    std::vector<int> j_set = base;
    j_set.insert(j_set.end(), extra.begin(), extra.end());
    std::sort(j_set.begin(), j_set.end());
    const double coeff =
        std::pow(2.0 * kPi, -0.5 * static_cast<double>(extra.size())) * pfaffian(sub);
    terms.push_back(RangeTerm{std::move(j_set), coeff});
  }
  // Leading term (J = I) first, then by J.
  std::sort(terms.begin(), terms.end(), [](const RangeTerm& a, const RangeTerm& b) {
    if (a.j_set.size() != b.j_set.size()) return a.j_set.size() < b.j_set.size();
    return a.j_set < b.j_set;
  });
  return terms;
}

/// Distance from `value` to the lattice Z + sum_k coeff_k Z (nonzero
/// coefficients only), searched over integer combinations up to `max_coeff`.
inline double range_membership_distance(double value, const std::vector<RangeTerm>& terms,
                                        int max_coeff = 12) {
  std::vector<double> gens;
  for (const auto& t : terms)
    if (t.j_set.size() > 0 && std::abs(t.coefficient) > 1e-15 &&
        std::abs(t.coefficient - 1.0) > 1e-15)
      gens.push_back(t.coefficient);
  double best = std::abs(value - std::round(value));
  std::vector<int> combo(gens.size(), -max_coeff);
  if (gens.empty()) return best;
  while (true) {
    double x = value;
    for (size_t i = 0; i < gens.size(); ++i) x -= combo[i] * gens[i];
    best = std::min(best, std::abs(x - std::round(x)));
    size_t pos = 0;
    while (pos < combo.size() && combo[pos] == max_coeff) combo[pos++] = -max_coeff;
    if (pos == combo.size()) break;
    ++combo[pos];
  }
  return best;
}

/// Fukui-Hatsugai-Suzuki plaquette Berry-flux Chern number of the lowest
/// `band_count` bands of a Bloch Hamiltonian over [0, 2 pi)^2. Integer-valued
/// by construction as long as the gap stays open on the grid.
inline double kspace_chern_oracle(const std::function<Matrix(double, double)>& bloch,
                                  int band_count, int grid) {
  if (grid < 4) throw std::invalid_argument("kspace_chern_oracle: grid too small");
  if (band_count < 1) throw std::invalid_argument("kspace_chern_oracle: band_count >= 1");

  std::vector<Matrix> frames(static_cast<size_t>(grid) * grid);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double k1 = 2.0 * kPi * i / grid, k2 = 2.0 * kPi * j / grid;
      Matrix h = bloch(k1, k2);
      if (hermiticity_residual(h) > 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("kspace_chern_oracle: Bloch matrix not Hermitian");
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      if (band_count >= h.rows() ||
          es.eigenvalues()(band_count) - es.eigenvalues()(band_count - 1) <= 1e-8)
        throw NumericError("kspace_chern_oracle: gap closes on the grid");
      frames[static_cast<size_t>(i) * grid + j] = es.eigenvectors().leftCols(band_count);
    }
  }

  auto link = [&](int i0, int j0, int i1, int j1) {
    const Matrix& a = frames[static_cast<size_t>(i0 % grid) * grid + (j0 % grid)];
    const Matrix& b = frames[static_cast<size_t>(i1 % grid) * grid + (j1 % grid)];
    Complex det = (a.adjoint() * b).determinant();
    if (std::abs(det) < 1e-12)
      throw NumericError("kspace_chern_oracle: singular link variable");
    return det / std::abs(det);
  };

  double total = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Complex u1 = link(i, j, i + 1, j);
      const Complex u2 = link(i + 1, j, i + 1, j + 1);
      const Complex u3 = link(i + 1, j + 1, i, j + 1);
      const Complex u4 = link(i, j + 1, i, j);
      total += std::arg(u1 * u2 * u3 * u4);
    }
  }
  return total / (2.0 * kPi);
}

struct WindingResult {
  int value = 0;
  double residual = 0.0;  // |raw - value|
};

/// Winding number of det q(k) around the origin: phase-increment summation on
/// the grid, rounded to the nearest integer.
inline WindingResult winding_oracle(const std::function<Matrix(double)>& symbol, int grid) {
  if (grid < 8) throw std::invalid_argument("winding_oracle: grid too small");
  double total = 0.0;
  Complex prev = symbol(0.0).determinant();
  if (std::abs(prev) < 1e-12) throw NumericError("winding_oracle: det vanishes on the grid");
  for (int i = 1; i <= grid; ++i) {
    const double k = 2.0 * kPi * i / grid;
    const Complex cur = symbol(k).determinant();
    if (std::abs(cur) < 1e-12) throw NumericError("winding_oracle: det vanishes on the grid");
    total += std::arg(cur / prev);
    prev = cur;
  }
  const double raw = total / (2.0 * kPi);
  const int rounded = static_cast<int>(std::lround(raw));
  return WindingResult{rounded, std::abs(raw - rounded)};
}

/// Monte Carlo aggregate of per-sample invariant evaluations.
struct ChernResult {
  double value = 0.0;          // mean of real parts
  double imag_residual = 0.0;  // max |imaginary part|
  double stderror = 0.0;       // standard error of the mean
  std::vector<Complex> per_sample;
};

inline ChernResult disorder_average(std::vector<Complex> per_sample) {
  if (per_sample.empty()) throw std::invalid_argument("disorder_average: empty sample list");
  ChernResult r;
  double mean = 0.0, imag = 0.0;
  for (Complex z : per_sample) {
    mean += z.real();
    imag = std::max(imag, std::abs(z.imag()));
  }
  mean /= static_cast<double>(per_sample.size());
  double var = 0.0;
  for (Complex z : per_sample) var += (z.real() - mean) * (z.real() - mean);
  if (per_sample.size() > 1) {
    var /= static_cast<double>(per_sample.size() - 1);
    r.stderror = std::sqrt(var / static_cast<double>(per_sample.size()));
  }
  r.value = mean;
  r.imag_residual = imag;
  r.per_sample = std::move(per_sample);
  return r;
}

}  // namespace ncbt
