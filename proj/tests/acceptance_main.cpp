// Acceptance suite: one line per criterion, pinned tolerances, nonzero exit
// when any criterion fails.

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "ncbt/verify.hpp"

using namespace ncbt;

namespace {

struct Criterion {
  int id;
  std::string summary;
  std::function<bool(std::string&)> body;
};

Matrix random_matrix(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = Complex(dist(rng), dist(rng));
  return m;
}

NcPoly random_poly(std::mt19937& rng, const TwistMatrix& theta, int radius, int terms) {
  std::uniform_int_distribution<int> site(-radius, radius);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  NcPoly::CoeffMap coeffs;
  for (int t = 0; t < terms; ++t) {
    const IntVec s{site(rng), site(rng)};
    const Coefficient c = Coefficient::scalar(Complex(val(rng), val(rng)));
    auto it = coeffs.find(s);
    if (it == coeffs.end())
      coeffs.emplace(s, c);
    else
      it->second = it->second.plus(c);
  }
  return NcPoly(theta, 1, coeffs);
}

// ---------------------------------------------------------------------------

bool criterion1(std::string& detail, long& integer_out) {
  const ModelSpec model = hofstadter(1, 3);
  auto window = std::make_shared<Window>(IntVec{24, 24}, Boundary::periodic, 1);
  const SpectralData sd =
      eigh(materialize(build_hamiltonian(model), sample_config(model.disorder, 0), window));
  const double fermi = find_gaps(sd, 0.2).at(0).midpoint();
  const Complex ch = chern_even(fermi_projection(sd, fermi, window), MultiIndex({1, 2}));
  const double oracle = kspace_chern_oracle(hofstadter_bloch(1, 3), 1, 64);
  integer_out = std::lround(ch.real());
  const double int_dev = std::abs(ch.real() - static_cast<double>(integer_out));
  const double oracle_dev = std::abs(ch.real() - oracle);
  std::ostringstream os;
  os << "Ch = " << ch.real() << " (imag " << ch.imag() << "), oracle " << oracle
     << ", integer deviation " << int_dev;
  detail = os.str();
  return int_dev <= 1e-2 && std::abs(ch.imag()) <= 1e-6 && oracle_dev <= 1e-2;
}

bool criterion2(std::string& detail, long clean_integer) {
  const ModelSpec model = hofstadter(1, 3, 0.5, 7);
  auto window = std::make_shared<Window>(IntVec{24, 24}, Boundary::periodic, 1);
  const NcPoly h = build_hamiltonian(model);
  // Fermi level from the clean spectrum, then required gapped per sample.
  const ModelSpec clean = hofstadter(1, 3);
  const SpectralData sd0 =
      eigh(materialize(build_hamiltonian(clean), sample_config(clean.disorder, 0), window));
  const double fermi = find_gaps(sd0, 0.2).at(0).midpoint();

  std::vector<Complex> values;
  for (uint64_t i = 0; i < 8; ++i) {
    const SpectralData sd = eigh(materialize(h, sample_config(model.disorder, i), window));
    bool gapped = false;
    for (const Gap& g : find_gaps(sd, 0.05))
      if (g.contains(fermi)) gapped = true;
    if (!gapped) {
      detail = "sample " + std::to_string(i) + " gapless at the Fermi level";
      return false;
    }
    values.push_back(chern_even(fermi_projection(sd, fermi, window), MultiIndex({1, 2})));
  }
  const ChernResult r = disorder_average(values);
  std::ostringstream os;
  os << "mean = " << r.value << " +- " << r.stderror << " (8 samples), integer "
     << std::lround(r.value) << " vs clean " << clean_integer;
  detail = os.str();
  return std::lround(r.value) == clean_integer &&
         std::abs(r.value - static_cast<double>(clean_integer)) <= 5e-2;
}

bool criterion3(std::string& detail) {
  auto window = std::make_shared<Window>(IntVec{64}, Boundary::periodic, 2);
  const ModelSpec topo = ssh(0.5, 1.0);
  const LatticeOperator ht =
      materialize(build_hamiltonian(topo), sample_config(topo.disorder, 0), window);
  const Complex odd = chern_odd(chiral_unitary(ht, 1, 1), MultiIndex({1}));
  const auto symbol = bloch_symbol(topo);
  const WindingResult w = winding_oracle(
      [&symbol](double k) { return symbol({k}).block(0, 1, 1, 1).eval(); }, 2048);

  const ModelSpec triv = ssh(1.0, 0.5);
  const LatticeOperator hv =
      materialize(build_hamiltonian(triv), sample_config(triv.disorder, 0), window);
  const Complex odd0 = chern_odd(chiral_unitary(hv, 1, 1), MultiIndex({1}));

  std::ostringstream os;
  os << "topological " << odd.real() << " (winding oracle " << w.value << "), trivial "
     << odd0.real();
  detail = os.str();
  return w.value == 1 && std::abs(odd.real() - w.value) <= 1e-3 &&
         std::abs(odd0.real()) <= 1e-3;
}

bool criterion4(std::string& detail) {
  std::mt19937 rng(2024);
  const std::vector<int> denominators{1, 2, 3, 4, 6, 12};
  auto window = std::make_shared<Window>(IntVec{12, 12}, Boundary::periodic, 1);
  DisorderSpec clean;
  clean.dim = 2;
  const DisorderConfig omega = sample_config(clean, 0);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int q = denominators[static_cast<size_t>(t) % denominators.size()];
    std::uniform_int_distribution<int> pnum(0, q - 1);
    const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi * pnum(rng) / q);
    const NcPoly p = random_poly(rng, theta, 2, 4);
    const NcPoly r = random_poly(rng, theta, 2, 4);
    const Matrix mp = materialize(p, omega, window).data;
    const Matrix mr = materialize(r, omega, window).data;
    worst = std::max(worst,
                     op_norm_estimate(Matrix(materialize(nc_mul(p, r), omega, window).data -
                                             mp * mr)));
    worst = std::max(worst, op_norm_estimate(Matrix(materialize(adjoint(p), omega, window).data -
                                                    mp.adjoint())));
  }
  detail = "max operator-norm residual over 50 pairs: " + std::to_string(worst);
  return worst <= 1e-10;
}

bool criterion5(std::string& detail) {
  std::mt19937 rng(4096);
  const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi / 4.0);
  auto window = std::make_shared<Window>(IntVec{12, 12}, Boundary::periodic, 1);
  DisorderSpec clean;
  clean.dim = 2;
  const DisorderConfig omega = sample_config(clean, 0);
  double worst = 0.0, worst_trace = 0.0;
  for (int t = 0; t < 20; ++t) {
    const NcPoly p = random_poly(rng, theta, 2, 4);  // range 2 < N/2 = 6
    const LatticeOperator m = materialize(p, omega, window);
    for (int axis = 1; axis <= 2; ++axis) {
      const LatticeOperator commutator = position_commutator(m, axis);
      worst = std::max(worst, (materialize(derive(p, axis), omega, window).data -
                               commutator.data)
                                  .cwiseAbs()
                                  .maxCoeff());
      worst_trace = std::max(worst_trace, std::abs(volume_trace(commutator)));
    }
  }
  std::ostringstream os;
  os << "derive/commutator residual " << worst << ", trace of derivation image "
     << worst_trace;
  detail = os.str();
  return worst <= 1e-12 && worst_trace == 0.0;
}

bool criterion6(std::string& detail) {
  std::mt19937 rng(77);
  auto window = std::make_shared<Window>(IntVec{16}, Boundary::open, 2);
  double worst = 0.0;
  bool halving = true;
  for (int t = 0; t < 20; ++t) {
    Matrix g = random_matrix(rng, 32);
    Matrix h = (g + g.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    RealVector ev = es.eigenvalues();
    for (long i = 0; i < ev.size(); ++i) ev(i) += ev(i) >= 0.0 ? 1.0 : -1.0;
    h = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    const LatticeOperator H(window, h, true);
    const SpectralData sd = eigh(H);
    const Matrix pf = fermi_projection(sd, 0.0, window).data;
    const Matrix pr = riesz_projection(H, default_contour(sd, Gap{-1.0, 1.0}, 0.0, 64)).data;
    worst = std::max(worst, op_norm_estimate(Matrix(pr - pf)));
    if (t < 5) {
      double prev = -1.0;
      for (int pts : {64, 128, 256, 512}) {
        const Matrix p2 =
            riesz_projection(H, default_contour(sd, Gap{-1.0, 1.0}, 0.0, pts)).data;
        const double resid = (p2 * p2 - p2).cwiseAbs().maxCoeff();
        if (prev >= 0.0 && resid > 0.5 * prev && resid > 1e-12) halving = false;
        prev = resid;
      }
    }
  }
  std::ostringstream os;
  os << "max |riesz - fermi| " << worst << (halving ? ", residual halves under doubling"
                                                    : ", residual did NOT halve");
  detail = os.str();
  return worst <= 1e-6 && halving;
}

bool criterion7(std::string& detail) {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> site(-2, 2);
  const TwistMatrix theta = TwistMatrix::flux2d(2.0 * kPi / 3.0);
  DisorderSpec spec;
  spec.dim = 2;
  spec.per_site_dim = 1;
  spec.window_radius = 10;
  spec.seed = 9;
  std::vector<DisorderConfig> samples;
  for (uint64_t i = 0; i < 3; ++i) samples.push_back(sample_config(spec, i));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    NcPoly::CoeffMap coeffs;
    for (int j = 0; j < 4; ++j) {
      const IntVec s{site(rng), site(rng)};
      Coefficient c = [&]() -> Coefficient {
        if (j % 2 == 0) return Coefficient(random_matrix(rng, 2));
        const Matrix a = random_matrix(rng, 2), b = random_matrix(rng, 2);
        return Coefficient::site_function(2, 2, [a, b](const DisorderConfig& w) {
          return (a + w.value({0, 0}, 0) * b).eval();
        });
      }();
      auto it = coeffs.find(s);
      if (it == coeffs.end())
        coeffs.emplace(s, std::move(c));
      else
        it->second = it->second.plus(c);
    }
    const NcPoly p(theta, 2, coeffs);
    const Coefficient lhs = gram0(p);
    const NcPoly product = nc_mul(p, adjoint(p));
    const Coefficient* rhs = product.coeff(zero_vec(2));
    for (const auto& w : samples) {
      const Matrix diff = rhs ? (lhs.eval(w) - rhs->eval(w)).eval() : lhs.eval(w);
      worst = std::max(worst, block_op_norm(diff));
    }
  }
  detail = "max |gram0(p) - Phi_0(p p*)| over 100 polynomials: " + std::to_string(worst);
  return worst <= 1e-12;
}

bool criterion8(std::string& detail) {
  // Literal reading: error <= 1e-3 once n reaches 100 * (support radius).
  const TwistMatrix theta1 = TwistMatrix::zero(1);
  const NcPoly p1 =
      NcPoly::scalar_monomial(theta1, {1}) + NcPoly::scalar_monomial(theta1, {3});
  const TwistMatrix theta2 = TwistMatrix::flux2d(2.0 * kPi / 3.0);
  const NcPoly p2 = NcPoly::scalar_monomial(theta2, {1, 0}) +
                    NcPoly::scalar_monomial(theta2, {-2, 2}, Complex(0.0, 1.0));
  bool monotone = true;
  double measured = 0.0;
  std::ostringstream os;
  for (const NcPoly* p : {&p1, &p2}) {
    double prev = std::numeric_limits<double>::infinity();
    const int n_target = 100 * p->support_radius();
    for (int n = 0; n <= 50; ++n) {
      const double err = l1_norm(fejer(*p, n) - *p);
      if (err > prev + 1e-15) monotone = false;
      prev = err;
    }
    const double err_target = l1_norm(fejer(*p, n_target) - *p);
    measured = std::max(measured, err_target);
    os << "err(n=" << n_target << ") = " << err_target << "; ";
  }
  os << (monotone ? "nonincreasing" : "NOT nonincreasing");
  detail = os.str();
  return monotone && measured <= 1e-3;
}

bool criterion9(std::string& detail) {
  const auto strong = chern_range(TwistMatrix::flux2d(2.0 * kPi / 3.0), MultiIndex({1, 2}));
  const auto weak = chern_range(TwistMatrix::flux2d(2.0 * kPi / 3.0), MultiIndex({1}));
  const bool ranges_ok = strong.size() == 1 && std::abs(strong[0].coefficient - 1.0) < 1e-15 &&
                         weak.size() == 1 && std::abs(weak[0].coefficient - 1.0) < 1e-15;

  const ModelSpec model = hofstadter(1, 3);
  auto window = std::make_shared<Window>(IntVec{24, 24}, Boundary::periodic, 1);
  const SpectralData sd =
      eigh(materialize(build_hamiltonian(model), sample_config(model.disorder, 0), window));
  const double fermi = find_gaps(sd, 0.2).at(0).midpoint();
  const double filling = volume_trace(fermi_projection(sd, fermi, window)).real();
  const auto labels = chern_range(model.twist, MultiIndex(std::vector<int>{}));
  const double dist = range_membership_distance(filling, labels);
  std::ostringstream os;
  os << "Ran(Ch_{12}) = Ran(Ch_1) = Z; T(P) = " << filling << ", gap-label distance " << dist;
  detail = os.str();
  const bool label_ok =
      labels.size() == 2 && std::abs(labels[1].coefficient + 1.0 / 3.0) < 1e-12 &&
      dist <= 1e-3;
  return ranges_ok && label_ok;
}

bool criterion10(std::string& detail) {
  const auto first = ncbt::verify::run_all();
  const auto second = ncbt::verify::run_all();
  bool all = true;
  int failed = 0;
  for (const auto& r : first)
    if (!r.pass) {
      all = false;
      ++failed;
    }
  bool deterministic = first.size() == second.size();
  if (deterministic)
    for (size_t i = 0; i < first.size(); ++i)
      if (first[i].name != second[i].name || first[i].pass != second[i].pass ||
          first[i].detail != second[i].detail)
        deterministic = false;
  std::ostringstream os;
  os << first.size() << " checks, " << failed << " failures, "
     << (deterministic ? "report deterministic" : "report NOT deterministic")
     << "; homotopy invariance evidenced only by criterion 2 disorder stability";
  detail = os.str();
  return all && deterministic;
}

}  // namespace

int main() {
  long clean_integer = 0;
  std::vector<Criterion> criteria;
  criteria.push_back({1, "quantized Hall conductance, clean Hofstadter 2*pi/3",
                      [&](std::string& d) { return criterion1(d, clean_integer); }});
  criteria.push_back({2, "weak-disorder resilience, strength 0.5, 8 samples",
                      [&](std::string& d) { return criterion2(d, clean_integer); }});
  criteria.push_back({3, "odd quantization on the SSH chain", criterion3});
  criteria.push_back({4, "algebra/representation equivalence, 50 random pairs", criterion4});
  criteria.push_back({5, "derivation equivalence and traceless derivatives", criterion5});
  criteria.push_back({6, "Riesz contour vs eigendecomposition projectors", criterion6});
  criteria.push_back({7, "Gram identity on 100 random polynomials", criterion7});
  criteria.push_back({8, "Fejer density at n = 100 * support radius", criterion8});
  criteria.push_back({9, "Pfaffian range formula and gap labeling", criterion9});
  criteria.push_back({10, "full verification suite, deterministic", criterion10});

  int failures = 0;
  for (auto& c : criteria) {
    std::string detail;
    bool pass = false;
    try {
      pass = c.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s - %s\n", pass ? "PASS" : "FAIL", c.id,
                c.summary.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
