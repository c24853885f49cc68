#pragma once

#include <Eigen/Eigenvalues>

#include "ncbt/lattice.hpp"

namespace ncbt {

/// Eigendecomposition of a Hermitian lattice operator: ascending eigenvalues,
/// unitary eigenvector columns, and a fingerprint of the source matrix.
struct SpectralData {
  RealVector eigenvalues;
  Matrix eigenvectors;
  uint64_t source_hash = 0;
};

inline double hermiticity_residual(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Symmetrize-then-decompose; rejects inputs that are non-Hermitian beyond
/// 1e-9 relative to the matrix scale.
inline SpectralData eigh(const LatticeOperator& op) {
  const double scale = std::max(1.0, op.data.cwiseAbs().maxCoeff());
  if (hermiticity_residual(op.data) > 1e-9 * scale)
    throw NumericError("eigh: matrix is not Hermitian within tolerance");
  Matrix sym = 0.5 * (op.data + op.data.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("eigh: decomposition failed");
  return SpectralData{solver.eigenvalues(), solver.eigenvectors(), matrix_hash(op.data)};
}

/// Open spectral gap (lower, upper), eigenvalues on both sides.
struct Gap {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double e) const { return e > lower && e < upper; }
};

/// All maximal inter-eigenvalue intervals of width >= min_width, excluding
/// the unbounded ends.
inline std::vector<Gap> find_gaps(const SpectralData& spec, double min_width) {
  if (min_width <= 0.0) throw std::invalid_argument("find_gaps: min_width must be > 0");
  std::vector<Gap> gaps;
  for (long i = 0; i + 1 < spec.eigenvalues.size(); ++i) {
    const double lo = spec.eigenvalues(i), hi = spec.eigenvalues(i + 1);
    if (hi - lo >= min_width) gaps.push_back(Gap{lo, hi});
  }
  return gaps;
}

/// Fermi projection P = sum_{lambda_k <= E_F} v_k v_k^dagger. The Fermi level
/// must sit in a gap: rejects when an eigenvalue lies within 1e-8 of E_F.
inline LatticeOperator fermi_projection(const SpectralData& spec, double fermi_level,
                                        std::shared_ptr<const Window> window) {
  for (long i = 0; i < spec.eigenvalues.size(); ++i)
    if (std::abs(spec.eigenvalues(i) - fermi_level) <= 1e-8)
      throw NumericError("fermi_projection: Fermi level within 1e-8 of an eigenvalue");
  Matrix p = Matrix::Zero(spec.eigenvectors.rows(), spec.eigenvectors.rows());
  for (long i = 0; i < spec.eigenvalues.size(); ++i) {
    if (spec.eigenvalues(i) > fermi_level) break;
    p.noalias() += spec.eigenvectors.col(i) * spec.eigenvectors.col(i).adjoint();
  }
  return LatticeOperator(std::move(window), std::move(p), true);
}

/// Rectangle contour for the Riesz projector.
struct Contour {
  Complex corner_low;   // lower-left
  Complex corner_high;  // upper-right
  int points_per_edge = 64;
};

/// Default contour for a Fermi projection below `fermi` with spectral gap g:
/// real extent [min eigenvalue - g/2, fermi], imaginary half-height g.
inline Contour default_contour(const SpectralData& spec, const Gap& gap, double fermi,
                               int points_per_edge = 64) {
  const double g = gap.width();
  return Contour{Complex(spec.eigenvalues(0) - 0.5 * g, -g), Complex(fermi, g),
                 points_per_edge};
}

/// Riesz projector (1/2 pi i) oint (z - M)^{-1} dz over the rectangle,
/// composite trapezoid with points_per_edge nodes per edge. Each edge is
/// graded by a septic smoothstep so the Euler-Maclaurin corner terms vanish;
/// a plain equispaced trapezoid would be stuck at O(h^2) because of the
/// rectangle corners. Converges to the spectral projector onto the enclosed
/// eigenvalues.
inline LatticeOperator riesz_projection(const LatticeOperator& op, const Contour& contour) {
  const double scale = std::max(1.0, op.data.cwiseAbs().maxCoeff());
  if (hermiticity_residual(op.data) > 1e-9 * scale)
    throw NumericError("riesz_projection: matrix is not Hermitian within tolerance");
  if (contour.points_per_edge < 4)
    throw std::invalid_argument("riesz_projection: need at least 4 points per edge");
  const long n = op.data.rows();
  const Complex a = contour.corner_low, b = contour.corner_high;
  const Complex corners[5] = {a, Complex(b.real(), a.imag()), b, Complex(a.real(), b.imag()),
                              a};
  // w(0) = 0, w(1) = 1, w' vanishing to fifth order at both ends; buys
  // O(h^6) from the composite trapezoid despite the corners.
  const auto smoothstep = [](double t) {
    const double t6 = t * t * t * t * t * t;
    return t6 * (462.0 + t * (-1980.0 + t * (3465.0 + t * (-3080.0 + t * (1386.0 - 252.0 * t)))));
  };
  const auto smoothstep_d = [](double t) {
    const double u = t * (1.0 - t);
    return 2772.0 * u * u * u * u * u;
  };
  Matrix acc = Matrix::Zero(n, n);
  const Matrix eye = Matrix::Identity(n, n);
  for (int edge = 0; edge < 4; ++edge) {
    const Complex z0 = corners[edge], z1 = corners[edge + 1];
    const double h = 1.0 / contour.points_per_edge;
    const double step = std::abs(z1 - z0) * h;
    for (int k = 0; k <= contour.points_per_edge; ++k) {
      const double t = k * h;
      const double jac = smoothstep_d(t);
      if (jac == 0.0) continue;  // corner nodes carry zero weight
      const Complex z = z0 + smoothstep(t) * (z1 - z0);
      const double weight = (k == 0 || k == contour.points_per_edge) ? 0.5 : 1.0;
      Eigen::PartialPivLU<Matrix> lu(z * eye - op.data);
      Matrix res = lu.solve(eye);
      const double relres = ((z * eye - op.data) * res - eye).cwiseAbs().maxCoeff();
      // For Hermitian M the resolvent norm is 1/dist(z, spectrum); enforce
      // the 10-quadrature-steps clearance heuristic through it.
      const double res_scale = res.colwise().template lpNorm<2>().maxCoeff();
      const double distance = res_scale > 0.0 ? 1.0 / res_scale : 1e300;
      if (!(relres < 1e-6) || distance < 10.0 * step)
        throw NumericError("riesz_projection: contour too close to the spectrum near z = (" +
                           std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                           "), distance about " + std::to_string(distance));
      acc.noalias() += (weight * h * jac * (z1 - z0)) * res;
    }
  }
  Matrix p = acc / (2.0 * kPi * kI);
  // The exact projector is Hermitian; fold in the quadrature's asymmetry.
  p = 0.5 * (p + p.adjoint()).eval();
  return LatticeOperator(op.window, std::move(p), true);
}

/// Flat-band unitary of a chiral gapped operator: with J = diag(+1 on the
/// first n_plus orbitals, -1 on the rest) per site and J M J = -M, the sign
/// Q = 1 - 2 P_{M <= 0} is off-diagonal in the J-grading,
/// Q = [[0, U^dagger], [U, 0]]; returns the lower-left block U.
inline LatticeOperator chiral_unitary(const LatticeOperator& op, int n_plus, int n_minus) {
  const Window& w = *op.window;
  if (n_plus < 1 || n_minus < 1 || n_plus + n_minus != w.orbital_dim)
    throw std::invalid_argument("chiral_unitary: block split must partition the orbitals");
  if (n_plus != n_minus)
    throw std::invalid_argument("chiral_unitary: off-diagonal block is square only for an "
                                "even split");
  const int n = w.orbital_dim;
  const long sites = w.site_count();

  // J M J + M == 0.
  RealVector jdiag(w.matrix_dim());
  for (long s = 0; s < sites; ++s)
    for (int o = 0; o < n; ++o) jdiag(s * n + o) = o < n_plus ? 1.0 : -1.0;
  Matrix jmj = jdiag.asDiagonal() * op.data * jdiag.asDiagonal();
  if ((jmj + op.data).cwiseAbs().maxCoeff() > 1e-9)
    throw NumericError("chiral_unitary: operator violates the chiral symmetry");

  SpectralData sd = eigh(op);
  if (sd.eigenvalues.minCoeff() > 0.0 || sd.eigenvalues.maxCoeff() < 0.0 ||
      sd.eigenvalues.cwiseAbs().minCoeff() <= 1e-8)
    throw NumericError("chiral_unitary: spectrum not gapped around zero");
  LatticeOperator p = fermi_projection(sd, 0.0, op.window);
  Matrix q = Matrix::Identity(p.data.rows(), p.data.cols()) - 2.0 * p.data;

  // Extract the grading blocks, site-major within each sector.
  const long half = sites * n_plus;
  Matrix qpp(half, half), qmm(half, half), qmp(half, half);
  for (long sr = 0; sr < sites; ++sr) {
    for (long sc = 0; sc < sites; ++sc) {
      qpp.block(sr * n_plus, sc * n_plus, n_plus, n_plus) =
          q.block(sr * n, sc * n, n_plus, n_plus);
      qmm.block(sr * n_minus, sc * n_minus, n_minus, n_minus) =
          q.block(sr * n + n_plus, sc * n + n_plus, n_minus, n_minus);
      qmp.block(sr * n_minus, sc * n_plus, n_minus, n_plus) =
          q.block(sr * n + n_plus, sc * n, n_minus, n_plus);
    }
  }
  if (qpp.cwiseAbs().maxCoeff() > 1e-8 || qmm.cwiseAbs().maxCoeff() > 1e-8)
    throw NumericError("chiral_unitary: flat-band sign is not off-diagonal in the grading");
  if ((qmp.adjoint() * qmp - Matrix::Identity(half, half)).cwiseAbs().maxCoeff() > 1e-8)
    throw NumericError("chiral_unitary: extracted block is not unitary");

  auto uw = std::make_shared<Window>(w.sizes, w.boundary, n_plus);
  return LatticeOperator(std::move(uw), std::move(qmp), false);
}

}  // namespace ncbt
