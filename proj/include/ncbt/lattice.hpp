#pragma once

#include <memory>

#include "ncbt/poly.hpp"
#include "ncbt/window.hpp"

namespace ncbt {

/// Dense matrix on a finite window, block layout site-major x orbital-minor.
/// Immutable after construction.
struct LatticeOperator {
  std::shared_ptr<const Window> window;
  Matrix data;
  bool hermitian_hint = false;

  LatticeOperator(std::shared_ptr<const Window> w, Matrix m, bool herm = false)
      : window(std::move(w)), data(std::move(m)), hermitian_hint(herm) {
    if (data.rows() != data.cols() || data.rows() != window->matrix_dim())
      throw std::invalid_argument("LatticeOperator: matrix does not match the window");
  }

  int orbital_dim() const { return window->orbital_dim; }

  Eigen::Block<const Matrix> block(const IntVec& row_site, const IntVec& col_site) const {
    const int n = orbital_dim();
    return data.block(window->site_index(row_site) * n, window->site_index(col_site) * n, n,
                      n);
  }
};

inline LatticeOperator identity_operator(std::shared_ptr<const Window> w) {
  const long m = w->matrix_dim();
  return LatticeOperator(std::move(w), Matrix::Identity(m, m), true);
}

namespace detail {

/// Evaluation shift for the coefficient at hop s based at x: the exact entry
/// is exp(i s^T Theta x) * (alpha(-x-s) Phi_s)(omega), and alpha offsets fold
/// into one total shift. Periodic windows wrap that total back into the
/// window, which keeps disordered Hamiltonians Hermitian across the seam;
/// site-functions should read their local site (relative site 0) for the
/// wrap to stay exact.
inline IntVec coefficient_shift(const Window& w, const Coefficient& c, const IntVec& x,
                                const IntVec& s) {
  IntVec total = sub(add(x, s), c.is_constant() ? zero_vec(w.dim()) : c.shift_offset());
  if (w.boundary == Boundary::periodic) total = w.wrap(total);
  return total;
}

}  // namespace detail

/// pi_omega(p): entry <x+s| M |x> = exp(i s^T Theta x) Phi_s(p)(rho(x+s) omega)
/// as an n x n block. Periodic windows wrap x+s mod N with the Landau phase
/// at unwrapped x; open windows drop out-of-window hops (Dirichlet).
inline LatticeOperator materialize(const NcPoly& p, const DisorderConfig& omega,
                                   std::shared_ptr<const Window> window) {
  const Window& w = *window;
  if (w.dim() != p.dim()) throw std::invalid_argument("materialize: dimension mismatch");
  if (w.orbital_dim != p.orbital_dim())
    throw std::invalid_argument("materialize: orbital dimension mismatch");
  w.require_commensurate(p.twist());
  for (const auto& [s, c] : p.coeffs())
    for (int j = 0; j < w.dim(); ++j)
      if (std::abs(s[static_cast<size_t>(j)]) >= w.sizes[static_cast<size_t>(j)])
        throw std::invalid_argument("materialize: hopping " + to_string(s) +
                                    " exceeds the window");

  const int n = w.orbital_dim;
  Matrix m = Matrix::Zero(w.matrix_dim(), w.matrix_dim());
  for (long xi = 0; xi < w.site_count(); ++xi) {
    const IntVec x = w.site_at(xi);
    for (const auto& [s, c] : p.coeffs()) {
      IntVec y = add(x, s);
      if (w.boundary == Boundary::periodic)
        y = w.wrap(y);
      else if (!w.contains(y))
        continue;
      const Complex phase = std::exp(kI * p.twist().bilinear(s, x));
      const DisorderConfig local = shift(omega, detail::coefficient_shift(w, c, x, s));
      m.block(w.site_index(y) * n, xi * n, n, n) += phase * c.eval_base(local);
    }
  }
  return LatticeOperator(window, std::move(m), false);
}

/// Dual magnetic translation U^y |x> = exp(i y^T Theta x) |x+y>; generates the
/// algebra (U^{e_j} = pi(u_j)) and is unitary on periodic commensurate windows.
inline LatticeOperator dual_translation(const IntVec& y, std::shared_ptr<const Window> window,
                                        const TwistMatrix& theta) {
  const Window& w = *window;
  w.require_commensurate(theta);
  const int n = w.orbital_dim;
  Matrix m = Matrix::Zero(w.matrix_dim(), w.matrix_dim());
  for (long xi = 0; xi < w.site_count(); ++xi) {
    const IntVec x = w.site_at(xi);
    IntVec t = add(x, y);
    if (w.boundary == Boundary::periodic)
      t = w.wrap(t);
    else if (!w.contains(t))
      continue;
    const Complex phase = std::exp(kI * theta.bilinear(y, x));
    m.block(w.site_index(t) * n, xi * n, n, n) = phase * Matrix::Identity(n, n);
  }
  return LatticeOperator(window, std::move(m), false);
}

/// Direct magnetic translation V^y |x> = exp(i (x+y)^T Theta y) |x+y>; commutes
/// with every dual translation and implements the covariance of disordered
/// Hamiltonians.
inline LatticeOperator direct_translation(const IntVec& y,
                                          std::shared_ptr<const Window> window,
                                          const TwistMatrix& theta) {
  const Window& w = *window;
  w.require_commensurate(theta);
  const int n = w.orbital_dim;
  Matrix m = Matrix::Zero(w.matrix_dim(), w.matrix_dim());
  for (long xi = 0; xi < w.site_count(); ++xi) {
    const IntVec x = w.site_at(xi);
    IntVec t = add(x, y);
    if (w.boundary == Boundary::periodic)
      t = w.wrap(t);
    else if (!w.contains(t))
      continue;
    const Complex phase = std::exp(kI * theta.bilinear(add(x, y), y));
    m.block(w.site_index(t) * n, xi * n, n, n) = phase * Matrix::Identity(n, n);
  }
  return LatticeOperator(window, std::move(m), false);
}

/// i [X_j, M] with X_j the diagonal position operator; realizes the
/// derivation in representation. Periodic windows use the minimal-image
/// displacement; at the ambiguous distance N_j/2 (even N_j) the two images
/// +-N_j/2 are averaged, which zeroes the entry. Dense operators such as
/// Fermi projections always populate that shell, so the average replaces a
/// hard error; the identity with materialize(derive(p, j)) holds exactly for
/// hopping range < N_j/2.
inline LatticeOperator position_commutator(const LatticeOperator& op, int axis) {
  const Window& w = *op.window;
  if (axis < 1 || axis > w.dim())
    throw std::invalid_argument("position_commutator: axis out of range");
  const int n = w.orbital_dim;
  const int N = w.sizes[static_cast<size_t>(axis - 1)];
  Matrix m = Matrix::Zero(op.data.rows(), op.data.cols());
  for (long ri = 0; ri < w.site_count(); ++ri) {
    const IntVec r = w.site_at(ri);
    for (long ci = 0; ci < w.site_count(); ++ci) {
      const IntVec c = w.site_at(ci);
      int delta = r[static_cast<size_t>(axis - 1)] - c[static_cast<size_t>(axis - 1)];
      if (w.boundary == Boundary::periodic) {
        if (delta > N / 2) delta -= N;
        if (delta < -(N / 2)) delta += N;
        if (N % 2 == 0 && std::abs(delta) == N / 2) continue;  // images average to zero
      }
      if (delta == 0) continue;
      m.block(ri * n, ci * n, n, n) =
          kI * static_cast<double>(delta) * op.data.block(ri * n, ci * n, n, n);
    }
  }
  return LatticeOperator(op.window, std::move(m), false);
}

/// Interior sites: distance >= margin from every open boundary (all sites on
/// periodic windows).
inline std::vector<long> interior_sites(const Window& w, int margin) {
  if (margin < 0) throw std::invalid_argument("volume_trace: margin must be >= 0");
  std::vector<long> sites;
  for (long xi = 0; xi < w.site_count(); ++xi) {
    if (w.boundary == Boundary::periodic) {
      sites.push_back(xi);
      continue;
    }
    const IntVec x = w.site_at(xi);
    bool inside = true;
    for (int j = 0; j < w.dim(); ++j) {
      const int v = x[static_cast<size_t>(j)];
      if (v < margin || v >= w.sizes[static_cast<size_t>(j)] - margin) {
        inside = false;
        break;
      }
    }
    if (inside) sites.push_back(xi);
  }
  return sites;
}

/// Per-volume trace: (1 / |interior|) sum over interior sites of the
/// unnormalized orbital trace of the diagonal block. The finite-volume
/// realization of T(p) = integral of tr Phi_0(p).
inline Complex volume_trace(const LatticeOperator& op, int margin = 0) {
  const Window& w = *op.window;
  const auto sites = interior_sites(w, margin);
  if (sites.empty()) throw std::invalid_argument("volume_trace: empty interior");
  const int n = w.orbital_dim;
  Complex acc = 0.0;
  for (long xi : sites) acc += op.data.block(xi * n, xi * n, n, n).trace();
  return acc / static_cast<double>(sites.size());
}

/// exp(-i s^T Theta x) <x+s| M |x>: recovers Phi_s(p)(rho(x+s) omega) from a
/// materialized operator.
inline Matrix fourier_from_matrix(const LatticeOperator& op, const TwistMatrix& theta,
                                  const IntVec& s, const IntVec& x) {
  const Window& w = *op.window;
  IntVec y = add(x, s);
  if (w.boundary == Boundary::periodic)
    y = w.wrap(y);
  else if (!w.contains(y) || !w.contains(x))
    throw std::invalid_argument("fourier_from_matrix: site out of window");
  const Complex phase = std::exp(-kI * theta.bilinear(s, x));
  return phase * op.block(y, x);
}

/// Largest singular value via power iteration on M^dagger M; deterministic
/// start vector, 1e-8 relative accuracy.
inline double op_norm_estimate(const Matrix& m) {
  const long n = m.rows();
  if (n == 0) return 0.0;
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Vector v(n);
  for (long i = 0; i < n; ++i)
    v(i) = Complex(1.0 + 0.382 * ((i * 2654435769u) % 97) / 97.0, 0.1);
  v.normalize();
  double prev = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vector mv = m * v;
    Vector w = m.adjoint() * mv;
    const double sigma2 = w.norm();
    if (sigma2 == 0.0) return 0.0;
    v = w / sigma2;
    const double sigma = std::sqrt(sigma2);
    if (it > 2 && std::abs(sigma - prev) <= 1e-9 * std::max(1.0, sigma)) return sigma;
    prev = sigma;
  }
  return prev;
}

inline double op_norm_estimate(const LatticeOperator& op) { return op_norm_estimate(op.data); }

/// Operator-norm residual of the covariance relation
/// V^y H_omega V^y* = H_{rho(-y) omega}. With the representation of u_j as
/// U^{e_j}, the conjugation is implemented by the direct translations; open
/// windows compare only sites at distance >= margin from the boundary.
inline double covariance_residual(const NcPoly& hamiltonian, const DisorderConfig& omega,
                                  const IntVec& y, std::shared_ptr<const Window> window,
                                  int margin = 0) {
  const Window& w = *window;
  LatticeOperator h = materialize(hamiltonian, omega, window);
  LatticeOperator hs = materialize(hamiltonian, shift(omega, negate(y)), window);
  LatticeOperator v = direct_translation(y, window, hamiltonian.twist());
  Matrix diff = v.data * h.data * v.data.adjoint() - hs.data;
  if (w.boundary == Boundary::open) {
    const auto sites = interior_sites(w, margin);
    if (sites.empty()) throw std::invalid_argument("covariance_residual: empty interior");
    const int n = w.orbital_dim;
    Matrix restricted = Matrix::Zero(static_cast<long>(sites.size()) * n,
                                     static_cast<long>(sites.size()) * n);
    for (size_t a = 0; a < sites.size(); ++a)
      for (size_t b = 0; b < sites.size(); ++b)
        restricted.block(static_cast<long>(a) * n, static_cast<long>(b) * n, n, n) =
            diff.block(sites[a] * n, sites[b] * n, n, n);
    diff.swap(restricted);
  }
  return op_norm_estimate(diff);
}

/// ||p||_n with the operator-estimate backend: every ||.|| in the seminorm
/// formula is served by op_norm_estimate of the materialized operator,
/// maximized over the samples.
inline Seminorm smooth_seminorm_operator(const NcPoly& p, int order,
                                         const std::vector<DisorderConfig>& samples,
                                         std::shared_ptr<const Window> window) {
  if (order < 0) throw std::invalid_argument("smooth_seminorm: order must be >= 0");
  if (samples.empty())
    throw std::invalid_argument("smooth_seminorm: operator backend needs samples");
  auto norm_of = [&](const NcPoly& q) {
    double best = 0.0;
    for (const auto& w : samples) best = std::max(best, op_norm_estimate(materialize(q, w, window)));
    return best;
  };
  double value = norm_of(p);
  double factorial = 1.0;
  const int d = p.dim();
  for (int k = 1; k <= order; ++k) {
    factorial *= k;
    // All ordered k-tuples of axes, odometer enumeration.
    std::vector<int> tuple(static_cast<size_t>(k), 1);
    while (true) {
      NcPoly q = p;
      for (int axis : tuple) q = derive(q, axis);
      value += norm_of(q) / factorial;
      int pos = k - 1;
      while (pos >= 0 && tuple[static_cast<size_t>(pos)] == d) {
        tuple[static_cast<size_t>(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++tuple[static_cast<size_t>(pos)];
    }
  }
  return Seminorm{order, NormBackend::operator_estimate, value};
}

}  // namespace ncbt
