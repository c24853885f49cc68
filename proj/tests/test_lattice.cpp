#include <catch2/catch.hpp>
#include <random>

#include "ncbt/lattice.hpp"
#include "ncbt/models.hpp"

using namespace ncbt;

namespace {

DisorderConfig clean_config(int d) {
  DisorderSpec spec;
  spec.dim = d;
  return sample_config(spec, 0);
}

std::shared_ptr<Window> torus(IntVec sizes, int orbitals = 1) {
  return std::make_shared<Window>(std::move(sizes), Boundary::periodic, orbitals);
}

}  // namespace

TEST_CASE("materialize") {
  SECTION("u^e1 is a plain shift: row one of Theta vanishes") {
    const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi / 4.0);
    auto w = torus({4, 4});
    const LatticeOperator m =
        materialize(NcPoly::scalar_monomial(theta, {1, 0}), clean_config(2), w);
    for (long xi = 0; xi < w->site_count(); ++xi) {
      const IntVec x = w->site_at(xi);
      const IntVec y = w->wrap(add(x, {1, 0}));
      REQUIRE(std::abs(m.block(y, x)(0, 0) - 1.0) < 1e-15);
    }
    REQUIRE(m.data.cwiseAbs().sum() == Approx(16.0));
  }

  SECTION("u^e2 carries the Landau phase exp(i phi x1)") {
    const double phi = 2.0 * kPi / 4.0;
    const TwistMatrix theta = TwistMatrix::flux2d(phi);
    auto w = torus({4, 4});
    const LatticeOperator m =
        materialize(NcPoly::scalar_monomial(theta, {0, 1}), clean_config(2), w);
    for (long xi = 0; xi < w->site_count(); ++xi) {
      const IntVec x = w->site_at(xi);
      const IntVec y = w->wrap(add(x, {0, 1}));
      REQUIRE(std::abs(m.block(y, x)(0, 0) - std::exp(kI * phi * double(x[0]))) < 1e-14);
    }
  }

  SECTION("diagonal coefficient evaluates along the orbit") {
    DisorderSpec spec;
    spec.dim = 1;
    spec.per_site_dim = 1;
    spec.window_radius = 8;
    spec.seed = 3;
    const DisorderConfig omega = sample_config(spec, 0);
    auto w = std::make_shared<Window>(IntVec{5}, Boundary::open, 1);
    const NcPoly p = NcPoly::monomial(
        TwistMatrix::zero(1), {0}, Coefficient::site_function(1, 1, [](const DisorderConfig& c) {
          return Matrix::Constant(1, 1, c.value({0}, 0));
        }));
    const LatticeOperator m = materialize(p, omega, w);
    for (int x = 0; x < 5; ++x)
      REQUIRE(m.data(x, x).real() == Approx(omega.value({x}, 0)));
  }

  SECTION("incommensurate periodic window rejected") {
    const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi / 3.0);
    REQUIRE_THROWS_AS(
        materialize(NcPoly::scalar_monomial(theta, {1, 0}), clean_config(2), torus({4, 4})),
        std::invalid_argument);
  }

  SECTION("hop wider than the window rejected") {
    const TwistMatrix theta = TwistMatrix::zero(1);
    auto w = std::make_shared<Window>(IntVec{3}, Boundary::open, 1);
    REQUIRE_THROWS_AS(materialize(NcPoly::scalar_monomial(theta, {3}), clean_config(1), w),
                      std::invalid_argument);
  }
}

TEST_CASE("magnetic translations") {
  const double phi = 2.0 * kPi / 4.0;
  const TwistMatrix theta = TwistMatrix::flux2d(phi);
  auto w = torus({4, 4});
  const IntVec e1{1, 0}, e2{0, 1};

  SECTION("y = 0 gives the identity") {
    REQUIRE((dual_translation({0, 0}, w, theta).data -
             Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((direct_translation({0, 0}, w, theta).data -
             Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("U^e2 U^e1 = exp(i Theta21) U^(e1+e2)") {
    const Matrix lhs =
        dual_translation(e2, w, theta).data * dual_translation(e1, w, theta).data;
    const Matrix rhs =
        std::exp(kI * phi) * dual_translation(add(e1, e2), w, theta).data;
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("dual translations are unitary on the commensurate torus") {
    const Matrix u = dual_translation(e2, w, theta).data;
    REQUIRE((u.adjoint() * u - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("direct and dual translations commute") {
    for (const IntVec& y : {e1, e2, IntVec{2, 1}}) {
      const Matrix v = direct_translation(y, w, theta).data;
      for (const IntVec& z : {e1, e2}) {
        const Matrix u = dual_translation(z, w, theta).data;
        REQUIRE((v * u - u * v).cwiseAbs().maxCoeff() < 1e-13);
      }
    }
  }

  SECTION("V conjugation preserves the clean Hamiltonian") {
    const ModelSpec model = hofstadter(1, 4);
    const Matrix h =
        materialize(build_hamiltonian(model), sample_config(model.disorder, 0), w).data;
    for (const IntVec& y : {e1, e2}) {
      const Matrix v = direct_translation(y, w, theta).data;
      REQUIRE((v * h * v.adjoint() - h).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("position_commutator") {
  const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi / 5.0);
  auto w = torus({5, 5});
  const DisorderConfig omega = clean_config(2);

  SECTION("diagonal operators commute with position") {
    const LatticeOperator m = materialize(NcPoly::unit(theta, 1), omega, w);
    REQUIRE(position_commutator(m, 1).data.cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("i[X_1, u^e1] = i u^e1") {
    const LatticeOperator m = materialize(NcPoly::scalar_monomial(theta, {1, 0}), omega, w);
    const LatticeOperator c = position_commutator(m, 1);
    REQUIRE((c.data - kI * m.data).cwiseAbs().maxCoeff() < 1e-15);
  }

  SECTION("agrees with derive on random polynomials") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> site(-2, 2);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
      NcPoly::CoeffMap coeffs;
      for (int j = 0; j < 4; ++j)
        coeffs.emplace(IntVec{site(rng), site(rng)},
                       Coefficient::scalar(Complex(val(rng), val(rng))));
      const NcPoly p(theta, 1, coeffs);
      const LatticeOperator m = materialize(p, omega, w);
      for (int axis = 1; axis <= 2; ++axis) {
        const Matrix lhs = materialize(derive(p, axis), omega, w).data;
        const Matrix rhs = position_commutator(m, axis).data;
        REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }

  SECTION("open boundary interior agreement") {
    auto ow = std::make_shared<Window>(IntVec{8, 8}, Boundary::open, 1);
    const NcPoly p = NcPoly::scalar_monomial(theta, {1, 1}, Complex(0.3, 0.1)) +
                     NcPoly::scalar_monomial(theta, {-1, 0}, Complex(0.0, 0.9));
    const LatticeOperator m = materialize(p, omega, ow);
    const Matrix lhs = materialize(derive(p, 2), omega, ow).data;
    const Matrix rhs = position_commutator(m, 2).data;
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);  // no wrap, exact everywhere
  }
}

TEST_CASE("volume_trace") {
  const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi / 5.0);
  auto w = torus({5, 5}, 2);
  const DisorderConfig omega = clean_config(2);

  SECTION("identity with two orbitals traces to 2") {
    REQUIRE(volume_trace(identity_operator(w)).real() == Approx(2.0));
  }

  SECTION("pure hops are traceless") {
    const LatticeOperator m =
        materialize(NcPoly::monomial(theta, {1, 0}, Coefficient(Matrix::Identity(2, 2))),
                    omega, w);
    REQUIRE(std::abs(volume_trace(m)) == 0.0);
  }

  SECTION("cyclicity on materialized polynomials") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_int_distribution<int> site(-1, 1);
    for (int t = 0; t < 5; ++t) {
      auto rand_poly = [&]() {
        NcPoly::CoeffMap coeffs;
        for (int j = 0; j < 3; ++j) {
          Matrix block(2, 2);
          for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) block(r, c) = Complex(val(rng), val(rng));
          coeffs.emplace(IntVec{site(rng), site(rng)}, Coefficient(block));
        }
        return NcPoly(theta, 2, coeffs);
      };
      const Matrix a = materialize(rand_poly(), omega, w).data;
      const Matrix b = materialize(rand_poly(), omega, w).data;
      REQUIRE(std::abs(volume_trace(LatticeOperator(w, a * b)) -
                       volume_trace(LatticeOperator(w, b * a))) < 1e-10);
    }
  }

  SECTION("empty interior rejected") {
    auto ow = std::make_shared<Window>(IntVec{4, 4}, Boundary::open, 1);
    REQUIRE_THROWS_AS(volume_trace(identity_operator(ow), 2), std::invalid_argument);
  }
}

TEST_CASE("fourier_from_matrix") {
  const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi / 5.0);
  auto w = torus({5, 5});
  const DisorderConfig omega = clean_config(2);

  SECTION("single monomial: recovered at s0, zero elsewhere") {
    const Complex amp(0.7, -0.2);
    const LatticeOperator m =
        materialize(NcPoly::scalar_monomial(theta, {1, 2}, amp), omega, w);
    REQUIRE(std::abs(fourier_from_matrix(m, theta, {1, 2}, {3, 1})(0, 0) - amp) < 1e-14);
    REQUIRE(std::abs(fourier_from_matrix(m, theta, {1, 0}, {3, 1})(0, 0)) == 0.0);
  }

  SECTION("clean recovery is base-point independent") {
    const LatticeOperator m =
        materialize(NcPoly::scalar_monomial(theta, {0, 1}, Complex(0.0, 1.0)), omega, w);
    for (long xi = 0; xi < w->site_count(); ++xi) {
      const Matrix rec = fourier_from_matrix(m, theta, {0, 1}, w->site_at(xi));
      REQUIRE(std::abs(rec(0, 0) - Complex(0.0, 1.0)) < 1e-12);
    }
  }

  SECTION("round-trip recovers every coefficient of a random clean polynomial") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<int> site(-2, 2);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    NcPoly::CoeffMap coeffs;
    for (int j = 0; j < 5; ++j)
      coeffs.emplace(IntVec{site(rng), site(rng)},
                     Coefficient::scalar(Complex(val(rng), val(rng))));
    const NcPoly p(theta, 1, coeffs);
    const LatticeOperator m = materialize(p, omega, w);
    for (const auto& [s, c] : p.coeffs())
      REQUIRE(std::abs(fourier_from_matrix(m, theta, s, {2, 2})(0, 0) -
                       c.constant_value()(0, 0)) < 1e-13);
  }
}

TEST_CASE("covariance_residual") {
  SECTION("clean periodic model is exactly covariant") {
    const ModelSpec model = hofstadter(1, 3);
    const NcPoly h = build_hamiltonian(model);
    auto w = torus({6, 6});
    const DisorderConfig omega = sample_config(model.disorder, 0);
    REQUIRE(covariance_residual(h, omega, {0, 0}, w) < 1e-12);
    REQUIRE(covariance_residual(h, omega, {1, 0}, w) < 1e-12);
    REQUIRE(covariance_residual(h, omega, {0, 1}, w) < 1e-12);
  }

  SECTION("disordered model on an open interior") {
    const ModelSpec model = hofstadter(1, 3, 0.5, 5);
    const NcPoly h = build_hamiltonian(model);
    auto w = std::make_shared<Window>(IntVec{10, 10}, Boundary::open, 1);
    const DisorderConfig omega = sample_config(model.disorder, 0);
    REQUIRE(covariance_residual(h, omega, {1, 0}, w, 2) < 1e-10);
    REQUIRE(covariance_residual(h, omega, {0, 1}, w, 2) < 1e-10);
  }
}

TEST_CASE("op_norm_estimate") {
  SECTION("identity") {
    auto w = torus({3, 3});
    REQUIRE(op_norm_estimate(identity_operator(w)) == Approx(1.0));
  }

  SECTION("diagonal matrix") {
    auto w = std::make_shared<Window>(IntVec{2}, Boundary::open, 1);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    REQUIRE(op_norm_estimate(LatticeOperator(w, d)) == Approx(3.0));
  }

  SECTION("unitary translation has unit norm") {
    const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi / 4.0);
    auto w = torus({4, 4});
    REQUIRE(op_norm_estimate(dual_translation({0, 1}, w, theta)) == Approx(1.0));
  }
}
