#include <catch2/catch.hpp>

#include "ncbt/models.hpp"
#include "ncbt/spectral.hpp"

using namespace ncbt;

TEST_CASE("build_hamiltonian") {
  SECTION("single clean hop pair gives u + u^-1") {
    const ModelSpec m = from_hoppings(1, 1, TwistMatrix::zero(1),
                                      {{IntVec{1}, Coefficient::scalar(1.0)}});
    const NcPoly h = build_hamiltonian(m);
    REQUIRE(h.coeffs().size() == 2);
    REQUIRE(std::abs(h.coeff(IntVec{1})->constant_value()(0, 0) - 1.0) < 1e-15);
    REQUIRE(std::abs(h.coeff(IntVec{-1})->constant_value()(0, 0) - 1.0) < 1e-15);
  }

  SECTION("imaginary hop with explicit Hermitian partner") {
    const ModelSpec m = from_hoppings(
        1, 1, TwistMatrix::zero(1),
        {{IntVec{1}, Coefficient::scalar(kI)}, {IntVec{-1}, Coefficient::scalar(-kI)}});
    auto w = std::make_shared<Window>(IntVec{8}, Boundary::periodic, 1);
    const Matrix h =
        materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w).data;
    REQUIRE(hermiticity_residual(h) < 1e-14);
  }

  SECTION("Hofstadter at 2 pi / 3 on a 6x6 torus: Hermitian, bandwidth inside [-4, 4]") {
    const ModelSpec m = hofstadter(2, 3);
    auto w = std::make_shared<Window>(IntVec{6, 6}, Boundary::periodic, 1);
    const LatticeOperator h = materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w);
    REQUIRE(hermiticity_residual(h.data) < 1e-12);
    const SpectralData sd = eigh(h);
    REQUIRE(sd.eigenvalues.minCoeff() >= -4.0 - 1e-9);
    REQUIRE(sd.eigenvalues.maxCoeff() <= 4.0 + 1e-9);
  }

  SECTION("adjoint(H) = H for disordered builders") {
    const ModelSpec m = hofstadter(1, 3, 0.8, 3);
    const NcPoly h = build_hamiltonian(m);
    const NcPoly diff = adjoint(h) - h;
    std::vector<DisorderConfig> samples;
    for (uint64_t i = 0; i < 4; ++i) samples.push_back(sample_config(m.disorder, i));
    REQUIRE(l1_norm(diff, samples) < 1e-12);
  }
}

TEST_CASE("hofstadter") {
  SECTION("zero flux square lattice: spectrum inside [-4, 4], no gap") {
    const ModelSpec m = hofstadter(0, 1);
    auto w = std::make_shared<Window>(IntVec{24, 24}, Boundary::periodic, 1);
    const SpectralData sd =
        eigh(materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w));
    REQUIRE(sd.eigenvalues.minCoeff() >= -4.0 - 1e-12);
    REQUIRE(sd.eigenvalues.maxCoeff() <= 4.0 + 1e-12);
    REQUIRE(find_gaps(sd, 0.5).empty());
  }

  SECTION("flux 1/3 splits into 3 bands with 2 gaps") {
    const ModelSpec m = hofstadter(1, 3);
    auto w = std::make_shared<Window>(IntVec{24, 24}, Boundary::periodic, 1);
    const SpectralData sd =
        eigh(materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w));
    REQUIRE(find_gaps(sd, 0.5).size() == 2);
  }

  SECTION("disorder 0.5 keeps the lowest gap open (8 samples)") {
    const ModelSpec m = hofstadter(1, 3, 0.5, 17);
    auto w = std::make_shared<Window>(IntVec{12, 12}, Boundary::periodic, 1);
    const NcPoly h = build_hamiltonian(m);
    for (uint64_t i = 0; i < 8; ++i) {
      const SpectralData sd = eigh(materialize(h, sample_config(m.disorder, i), w));
      bool found = false;
      for (const Gap& g : find_gaps(sd, 0.05))
        if (g.lower > -2.5 && g.upper < 0.0 && g.width() > 0.05) found = true;
      REQUIRE(found);
    }
  }

  SECTION("invalid flux rejected") {
    REQUIRE_THROWS_AS(hofstadter(2, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(hofstadter(1, 0), std::invalid_argument);
  }
}

TEST_CASE("ssh") {
  SECTION("clean topological chain: gap of half-width |t_inter - t_intra| at zero") {
    const ModelSpec m = ssh(0.5, 1.0);
    auto w = std::make_shared<Window>(IntVec{64}, Boundary::periodic, 2);
    const SpectralData sd =
        eigh(materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w));
    bool found = false;
    for (const Gap& g : find_gaps(sd, 0.4))
      if (g.contains(0.0)) {
        found = true;
        REQUIRE(g.width() >= 2.0 * 0.5 - 1e-9);  // analytic gap = 2 |t' - t|
      }
    REQUIRE(found);
  }

  SECTION("equal hoppings close the gap at zero") {
    const ModelSpec m = ssh(1.0, 1.0);
    auto w = std::make_shared<Window>(IntVec{64}, Boundary::periodic, 2);
    const SpectralData sd =
        eigh(materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w));
    REQUIRE(sd.eigenvalues.cwiseAbs().minCoeff() < 0.1);
  }

  SECTION("materialized chain anticommutes with the chiral grading") {
    const ModelSpec m = ssh(0.7, 1.3, 0.2, 9);
    auto w = std::make_shared<Window>(IntVec{16}, Boundary::periodic, 2);
    const Matrix h = materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w).data;
    RealVector jdiag(h.rows());
    for (long s = 0; s < 16; ++s) {
      jdiag(2 * s) = 1.0;
      jdiag(2 * s + 1) = -1.0;
    }
    const Matrix jmj = jdiag.asDiagonal() * h * jdiag.asDiagonal();
    REQUIRE((jmj + h).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("spectrum symmetric about zero") {
    const ModelSpec m = ssh(0.5, 1.0, 0.1, 4);
    auto w = std::make_shared<Window>(IntVec{32}, Boundary::periodic, 2);
    const SpectralData sd =
        eigh(materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w));
    const long n = sd.eigenvalues.size();
    for (long i = 0; i < n; ++i)
      REQUIRE(sd.eigenvalues(i) == Approx(-sd.eigenvalues(n - 1 - i)).margin(1e-10));
  }
}

TEST_CASE("from_hoppings") {
  SECTION("missing partner auto-completed with the conjugate transpose") {
    const ModelSpec m = from_hoppings(2, 1, TwistMatrix::zero(2),
                                      {{IntVec{1, 0}, Coefficient::scalar(Complex(0, 2))}});
    REQUIRE(m.hoppings.size() == 2);
    REQUIRE(std::abs(m.hoppings.at(IntVec{-1, 0}).constant_value()(0, 0) -
                     Complex(0, -2)) < 1e-15);
  }

  SECTION("contradictory explicit pair rejected") {
    REQUIRE_THROWS_AS(
        from_hoppings(1, 1, TwistMatrix::zero(1),
                      {{IntVec{1}, Coefficient::scalar(2.0)},
                       {IntVec{-1}, Coefficient::scalar(3.0)}}),
        std::invalid_argument);
  }

  SECTION("diagonal mass term gives a Hermitian diagonal model") {
    Matrix sz = Matrix::Zero(2, 2);
    sz(0, 0) = 1.0;
    sz(1, 1) = -1.0;
    const ModelSpec m =
        from_hoppings(1, 2, TwistMatrix::zero(1), {{IntVec{0}, Coefficient(sz)}});
    auto w = std::make_shared<Window>(IntVec{4}, Boundary::periodic, 2);
    const Matrix h = materialize(build_hamiltonian(m), sample_config(m.disorder, 0), w).data;
    REQUIRE(hermiticity_residual(h) == 0.0);
    REQUIRE((h.cwiseAbs().rowwise().sum() - RealVector::Ones(8)).cwiseAbs().maxCoeff() <
            1e-15);
  }

  SECTION("non-Hermitian on-site term rejected") {
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    REQUIRE_THROWS_AS(
        from_hoppings(1, 2, TwistMatrix::zero(1), {{IntVec{0}, Coefficient(bad)}}),
        std::invalid_argument);
  }
}
