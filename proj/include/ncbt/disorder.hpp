#pragma once

#include <cmath>
#include <memory>

#include "ncbt/common.hpp"

namespace ncbt {

/// Sampling model for the hull Omega = prod_{s in Z^d} O with O = [0,1]^m.
/// m = 0 encodes the clean case (Omega is a single point). Configurations are
/// stored on the finite window [-R, R]^d; the product measure is i.i.d.
/// uniform per site and coordinate, drawn reproducibly from (seed, index).
struct DisorderSpec {
  int dim = 1;
  int per_site_dim = 0;
  int window_radius = 0;
  uint64_t seed = 0;

  bool clean() const { return per_site_dim == 0; }

  bool operator==(const DisorderSpec& o) const {
    return dim == o.dim && per_site_dim == o.per_site_dim &&
           window_radius == o.window_radius && seed == o.seed;
  }

  /// Same hull structure; seeds may differ (they select points, not spaces).
  bool same_hull(const DisorderSpec& o) const {
    return dim == o.dim && per_site_dim == o.per_site_dim &&
           window_radius == o.window_radius;
  }

  int window_side() const { return 2 * window_radius + 1; }

  long window_sites() const {
    long n = 1;
    for (int j = 0; j < dim; ++j) n *= window_side();
    return n;
  }

  /// Row index of a site in [-R, R]^d, lexicographic.
  long site_index(const IntVec& x) const {
    long idx = 0;
    for (int j = 0; j < dim; ++j) {
      const int c = x[static_cast<size_t>(j)];
      if (c < -window_radius || c > window_radius) return -1;
      idx = idx * window_side() + (c + window_radius);
    }
    return idx;
  }
};

/// One point omega of the hull: per-site values in [0,1]^m on the window,
/// plus a lazily applied shift offset. Immutable after construction.
class DisorderConfig {
 public:
  DisorderConfig(std::shared_ptr<const DisorderSpec> spec, std::vector<double> values,
                 IntVec offset)
      : spec_(std::move(spec)), values_(std::move(values)), offset_(std::move(offset)) {}

  const DisorderSpec& spec() const { return *spec_; }
  std::shared_ptr<const DisorderSpec> spec_ptr() const { return spec_; }
  const IntVec& offset() const { return offset_; }
  const std::vector<double>& raw_values() const { return values_; }

  /// omega(x)[coord], honoring the accumulated shift: reads site x + offset.
  double value(const IntVec& x, int coord) const {
    if (spec_->clean())
      throw std::invalid_argument("DisorderConfig: clean configuration has no values");
    const long idx = spec_->site_index(add(x, offset_));
    if (idx < 0)
      throw std::invalid_argument("DisorderConfig: read at " + to_string(add(x, offset_)) +
                                  " exits the window; need radius >= " +
                                  std::to_string(required_radius(add(x, offset_))));
    return values_[static_cast<size_t>(idx) * spec_->per_site_dim +
                   static_cast<size_t>(coord)];
  }

  bool same_content(const DisorderConfig& o) const {
    if (!spec().same_hull(o.spec())) return false;
    if (spec_->clean()) return true;
    const int R = spec_->window_radius - max_abs_offset(*this, o);
    if (R < 0) return false;
    IntVec x = zero_vec(spec_->dim);
    return compare_window(o, x, 0, R);
  }

 private:
  static int max_abs_offset(const DisorderConfig& a, const DisorderConfig& b) {
    int m = 0;
    for (int v : a.offset_) m = std::max(m, std::abs(v));
    for (int v : b.offset_) m = std::max(m, std::abs(v));
    return m;
  }

  bool compare_window(const DisorderConfig& o, IntVec& x, int axis, int R) const {
    if (axis == spec_->dim) {
      for (int c = 0; c < spec_->per_site_dim; ++c)
        if (value(x, c) != o.value(x, c)) return false;
      return true;
    }
    for (int v = -R; v <= R; ++v) {
      x[static_cast<size_t>(axis)] = v;
      if (!compare_window(o, x, axis + 1, R)) return false;
    }
    return true;
  }

  int required_radius(const IntVec& x) const {
    int r = 0;
    for (int v : x) r = std::max(r, std::abs(v));
    return r;
  }

  std::shared_ptr<const DisorderSpec> spec_;
  std::vector<double> values_;
  IntVec offset_;
};

/// Draws configuration number `index` of the product measure. Deterministic:
/// each (seed, index, site, coordinate) cell is an independent counter draw,
/// so identical inputs give byte-identical configurations.
inline DisorderConfig sample_config(const DisorderSpec& spec, uint64_t index) {
  auto sp = std::make_shared<DisorderSpec>(spec);
  std::vector<double> values;
  if (!spec.clean()) {
    values.resize(static_cast<size_t>(spec.window_sites()) * spec.per_site_dim);
    const uint64_t base = hash_combine(spec.seed, index);
    for (long site = 0; site < spec.window_sites(); ++site) {
      for (int c = 0; c < spec.per_site_dim; ++c) {
        const uint64_t cell =
            hash_combine(base, static_cast<uint64_t>(site) * 977 + static_cast<uint64_t>(c));
        values[static_cast<size_t>(site) * spec.per_site_dim + static_cast<size_t>(c)] =
            uniform01(cell);
      }
    }
  }
  return DisorderConfig(std::move(sp), std::move(values), zero_vec(spec.dim));
}

/// The shift action: (rho(s) omega)(x) = omega(x + s). Applied lazily through
/// the offset, so rho(s) rho(t) = rho(s + t) holds exactly; reads that leave
/// the stored window are a hard error (never silent wraparound).
inline DisorderConfig shift(const DisorderConfig& omega, const IntVec& s) {
  if (static_cast<int>(s.size()) != omega.spec().dim)
    throw std::invalid_argument("shift: dimension mismatch");
  return DisorderConfig(omega.spec_ptr(), omega.raw_values(), add(omega.offset(), s));
}

/// Weighted product metric over the window, following the fixed spiral
/// enumeration of Z^d (ordered by sup-norm shell, then lexicographic).
/// Per-site metric: Euclidean on [0,1]^m.
inline double hull_metric(const DisorderConfig& a, const DisorderConfig& b) {
  if (!a.spec().same_hull(b.spec()))
    throw std::invalid_argument("hull_metric: configurations from different hulls");
  const DisorderSpec& spec = a.spec();
  if (spec.clean()) return 0.0;

  // Enumerate window sites by (||x||_inf, then lexicographic) and accumulate
  // 2^{-l} d(x)/(1 + d(x)). Shifted configurations shrink the readable
  // window, so the scan stops at the radius both operands can serve.
  double total = 0.0;
  double weight = 1.0;
  int R = spec.window_radius;
  for (int v : a.offset()) R = std::min(R, spec.window_radius - std::abs(v));
  for (int v : b.offset()) R = std::min(R, spec.window_radius - std::abs(v));
  if (R < 0) throw std::invalid_argument("hull_metric: offsets exhaust the window");
  IntVec x(static_cast<size_t>(spec.dim), 0);
  auto visit = [&](const IntVec& site) {
    double d2 = 0.0;
    for (int c = 0; c < spec.per_site_dim; ++c) {
      const double diff = a.value(site, c) - b.value(site, c);
      d2 += diff * diff;
    }
    const double d = std::sqrt(d2);
    total += weight * d / (1.0 + d);
    weight *= 0.5;
  };
  // Shell 0.
  visit(x);
  for (int shell = 1; shell <= R; ++shell) {
    // Lexicographic scan of the cube surface ||x||_inf == shell.
    std::vector<IntVec> sites;
    IntVec cur(static_cast<size_t>(spec.dim), -shell);
    while (true) {
      int m = 0;
      for (int v : cur) m = std::max(m, std::abs(v));
      if (m == shell) sites.push_back(cur);
      int axis = spec.dim - 1;
      while (axis >= 0 && cur[static_cast<size_t>(axis)] == shell) {
        cur[static_cast<size_t>(axis)] = -shell;
        --axis;
      }
      if (axis < 0) break;
      ++cur[static_cast<size_t>(axis)];
    }
    for (const auto& s : sites) visit(s);
  }
  return total;
}

}  // namespace ncbt
