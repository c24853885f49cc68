#pragma once

#include "ncbt/twist.hpp"

namespace ncbt {

enum class Boundary { periodic, open };

/// Finite lattice window: sites 0 .. N_j - 1 per axis, lexicographic site
/// order, orbital-minor block layout. The finite-volume surrogate for
/// l^2(Z^d) x C^n.
struct Window {
  IntVec sizes;
  Boundary boundary = Boundary::periodic;
  int orbital_dim = 1;

  Window(IntVec sizes_, Boundary boundary_, int orbital_dim_)
      : sizes(std::move(sizes_)), boundary(boundary_), orbital_dim(orbital_dim_) {
    if (sizes.empty()) throw std::invalid_argument("Window: empty size vector");
    for (int n : sizes)
      if (n < 1) throw std::invalid_argument("Window: sizes must be >= 1");
    if (orbital_dim < 1) throw std::invalid_argument("Window: orbital_dim >= 1");
  }

  int dim() const { return static_cast<int>(sizes.size()); }

  long site_count() const {
    long n = 1;
    for (int s : sizes) n *= s;
    return n;
  }

  long matrix_dim() const { return site_count() * orbital_dim; }

  bool contains(const IntVec& x) const {
    for (int j = 0; j < dim(); ++j) {
      const int v = x[static_cast<size_t>(j)];
      if (v < 0 || v >= sizes[static_cast<size_t>(j)]) return false;
    }
    return true;
  }

  IntVec wrap(const IntVec& x) const {
    IntVec r = x;
    for (int j = 0; j < dim(); ++j) {
      const int n = sizes[static_cast<size_t>(j)];
      int v = r[static_cast<size_t>(j)] % n;
      if (v < 0) v += n;
      r[static_cast<size_t>(j)] = v;
    }
    return r;
  }

  /// Lexicographic site index; the block row of a site starts at
  /// site_index * orbital_dim.
  long site_index(const IntVec& x) const {
    long idx = 0;
    for (int j = 0; j < dim(); ++j) idx = idx * sizes[static_cast<size_t>(j)] + x[static_cast<size_t>(j)];
    return idx;
  }

  IntVec site_at(long index) const {
    IntVec x(static_cast<size_t>(dim()), 0);
    for (int j = dim() - 1; j >= 0; --j) {
      const int n = sizes[static_cast<size_t>(j)];
      x[static_cast<size_t>(j)] = static_cast<int>(index % n);
      index /= n;
    }
    return x;
  }

  /// Periodic windows require Theta_{j,k} N_k in 2*pi*Z so the Landau-gauge
  /// phases close around the torus.
  void require_commensurate(const TwistMatrix& theta) const {
    if (boundary != Boundary::periodic) return;
    if (theta.dim() != dim()) throw std::invalid_argument("Window: twist dimension mismatch");
    for (int j = 0; j < dim(); ++j) {
      for (int k = 0; k < dim(); ++k) {
        const double v = theta(j, k) * sizes[static_cast<size_t>(k)] / (2.0 * kPi);
        if (std::abs(v - std::round(v)) > 1e-9)
          throw std::invalid_argument(
              "Window: incommensurate flux, Theta(" + std::to_string(j + 1) + "," +
              std::to_string(k + 1) + ") * N_" + std::to_string(k + 1) +
              " is not a multiple of 2*pi");
      }
    }
  }
};

}  // namespace ncbt
