#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "ncbt/config.hpp"
#include "ncbt/invariants.hpp"

namespace ncbt {

inline int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NCBT_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

/// Order-stable parallel map over sample indices.
template <typename F>
auto map_samples(int samples, int jobs, F&& f)
    -> std::vector<decltype(f(uint64_t{0}))> {
  using R = decltype(f(uint64_t{0}));
  std::vector<R> out(static_cast<size_t>(samples));
  if (jobs <= 1 || samples <= 1) {
    for (int i = 0; i < samples; ++i) out[static_cast<size_t>(i)] = f(static_cast<uint64_t>(i));
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(samples));
  const int nthreads = std::min(jobs, samples);
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= samples) return;
        try {
          out[static_cast<size_t>(i)] = f(static_cast<uint64_t>(i));
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

inline std::shared_ptr<const Window> make_window(const WindowConfig& wc, int orbital_dim) {
  return std::make_shared<Window>(
      wc.sizes, wc.boundary == "periodic" ? Boundary::periodic : Boundary::open, orbital_dim);
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumOutput {
  std::vector<RealVector> eigenvalues;     // one column per sample
  std::vector<std::vector<Gap>> gaps;      // per sample
};

inline SpectrumOutput run_spectrum(const RunConfig& cfg, std::optional<uint64_t> seed = {},
                                   int jobs = 0) {
  const ModelSpec model = make_model(cfg.model, seed);
  const NcPoly h = build_hamiltonian(model);
  auto window = make_window(cfg.window, model.orbital_dim);
  const int samples = cfg.invariant.samples;
  auto rows = detail::map_samples(samples, resolve_jobs(jobs), [&](uint64_t i) {
    const DisorderConfig omega = sample_config(model.disorder, i);
    const SpectralData sd = eigh(materialize(h, omega, window));
    return std::make_pair(sd.eigenvalues, find_gaps(sd, cfg.spectral.gap_min_width));
  });
  SpectrumOutput out;
  for (auto& [ev, gaps] : rows) {
    out.eigenvalues.push_back(std::move(ev));
    out.gaps.push_back(std::move(gaps));
  }
  return out;
}

inline std::string render_spectrum_csv(const SpectrumOutput& out) {
  std::string csv = "index";
  for (size_t s = 0; s < out.eigenvalues.size(); ++s) csv += ",sample_" + std::to_string(s);
  csv += "\n";
  const long n = out.eigenvalues.empty() ? 0 : out.eigenvalues[0].size();
  for (long i = 0; i < n; ++i) {
    csv += std::to_string(i);
    for (const auto& col : out.eigenvalues) csv += "," + detail::format_double(col(i));
    csv += "\n";
  }
  return csv;
}

inline std::string render_gaps_csv(const SpectrumOutput& out) {
  std::string csv = "sample,lower,upper,width\n";
  for (size_t s = 0; s < out.gaps.size(); ++s)
    for (const Gap& g : out.gaps[s])
      csv += std::to_string(s) + "," + detail::format_double(g.lower) + "," +
             detail::format_double(g.upper) + "," + detail::format_double(g.width()) + "\n";
  return csv;
}

// ---------------------------------------------------------------------------
// butterfly

struct ButterflyOutput {
  struct Row {
    int p, q;
    double flux;
    RealVector eigenvalues;
  };
  std::vector<Row> rows;
  std::vector<std::string> warnings;
};

inline ButterflyOutput run_butterfly(const RunConfig& cfg, std::optional<uint64_t> seed = {},
                                     int jobs = 0) {
  ButterflyOutput out;
  if (cfg.butterfly.fluxes.empty())
    throw ConfigError("butterfly: [butterfly] fluxes list is required");
  auto window = make_window(cfg.window, 1);
  std::vector<std::pair<int, int>> good;
  for (auto [p, q] : cfg.butterfly.fluxes) {
    bool commensurate = true;
    if (window->boundary == Boundary::periodic)
      for (int n : window->sizes)
        if ((static_cast<long>(n) * p) % q != 0) commensurate = false;
    if (!commensurate) {
      out.warnings.push_back("skipping incommensurate flux " + std::to_string(p) + "/" +
                             std::to_string(q));
      continue;
    }
    good.emplace_back(p, q);
  }
  auto rows = detail::map_samples(
      static_cast<int>(good.size()), resolve_jobs(jobs), [&](uint64_t i) {
        const auto [p, q] = good[static_cast<size_t>(i)];
        const ModelSpec model = hofstadter(p, q, 0.0, seed.value_or(cfg.model.seed));
        const SpectralData sd =
            eigh(materialize(build_hamiltonian(model), sample_config(model.disorder, 0), window));
        return ButterflyOutput::Row{p, q, 2.0 * kPi * p / q, sd.eigenvalues};
      });
  out.rows = std::move(rows);
  return out;
}

inline std::string render_butterfly_csv(const ButterflyOutput& out) {
  std::string csv = "flux,eigenvalue\n";
  for (const auto& row : out.rows)
    for (long i = 0; i < row.eigenvalues.size(); ++i)
      csv += detail::format_double(row.flux) + "," + detail::format_double(row.eigenvalues(i)) +
             "\n";
  return csv;
}

// ---------------------------------------------------------------------------
// chern / winding

namespace detail {

/// Fermi level shared by all samples: explicit from the config, else the
/// midpoint of the gap_index-th gap of sample 0; then required to sit in a
/// detected gap of every sample.
inline double resolve_fermi(const RunConfig& cfg, const std::vector<SpectralData>& spectra) {
  double fermi;
  if (cfg.spectral.fermi) {
    fermi = *cfg.spectral.fermi;
  } else {
    const auto gaps = find_gaps(spectra.at(0), cfg.spectral.gap_min_width);
    if (cfg.spectral.gap_index < 0 || cfg.spectral.gap_index >= static_cast<int>(gaps.size()))
      throw NumericError("gap_index " + std::to_string(cfg.spectral.gap_index) +
                         " out of range: sample 0 has " + std::to_string(gaps.size()) +
                         " gaps");
    fermi = gaps[static_cast<size_t>(cfg.spectral.gap_index)].midpoint();
  }
  for (size_t i = 0; i < spectra.size(); ++i) {
    bool in_gap = false;
    for (const Gap& g : find_gaps(spectra[i], cfg.spectral.gap_min_width))
      if (g.contains(fermi)) in_gap = true;
    if (!in_gap)
      throw NumericError("sample " + std::to_string(i) +
                         " is gapless at the Fermi level " + format_double(fermi));
  }
  return fermi;
}

}  // namespace detail

struct ChernOutput {
  ChernResult result;
  double fermi = 0.0;
  double filling = 0.0;  // T(P), sample mean
  std::vector<RangeTerm> range;
  std::optional<double> oracle;
  bool integral = false;
  long nearest_integer = 0;
};

inline ChernOutput run_chern(const RunConfig& cfg, std::optional<uint64_t> seed = {},
                             int jobs = 0) {
  const ModelSpec model = make_model(cfg.model, seed);
  const NcPoly h = build_hamiltonian(model);
  auto window = make_window(cfg.window, model.orbital_dim);
  const MultiIndex index(cfg.invariant.axes.empty() ? std::vector<int>{1, 2}
                                                    : cfg.invariant.axes);

  auto spectra = detail::map_samples(cfg.invariant.samples, resolve_jobs(jobs), [&](uint64_t i) {
    return eigh(materialize(h, sample_config(model.disorder, i), window));
  });
  const double fermi = detail::resolve_fermi(cfg, spectra);

  std::vector<Complex> per_sample(spectra.size());
  std::vector<double> fillings(spectra.size());
  auto evals =
      detail::map_samples(static_cast<int>(spectra.size()), resolve_jobs(jobs), [&](uint64_t i) {
        const LatticeOperator p = fermi_projection(spectra[static_cast<size_t>(i)], fermi, window);
        return std::make_pair(chern_even(p, index, cfg.window.margin),
                              volume_trace(p, cfg.window.margin).real());
      });
  for (size_t i = 0; i < evals.size(); ++i) {
    per_sample[i] = evals[i].first;
    fillings[i] = evals[i].second;
  }

  ChernOutput out;
  out.result = disorder_average(per_sample);
  out.fermi = fermi;
  for (double f : fillings) out.filling += f / static_cast<double>(fillings.size());
  out.range = chern_range(model.twist, index);
  out.nearest_integer = std::lround(out.result.value);
  out.integral = std::abs(out.result.value - static_cast<double>(out.nearest_integer)) <= 1e-2;

  // Clean Bloch-decomposable models get the independent k-space value.
  if (model.disorder.clean() && index.size() == 2) {
    if (cfg.model.type == "hofstadter") {
      const int bands = static_cast<int>(std::lround(out.filling * cfg.model.q));
      if (bands >= 1 && bands < cfg.model.q)
        out.oracle = kspace_chern_oracle(hofstadter_bloch(cfg.model.p, cfg.model.q), bands, 64);
    } else if (model.dim == 2 && antisym(model.twist).cwiseAbs().maxCoeff() == 0.0) {
      const auto symbol = bloch_symbol(model);
      const int bands = static_cast<int>(std::lround(out.filling));
      if (bands >= 1 && bands < model.orbital_dim)
        out.oracle = kspace_chern_oracle(
            [&symbol](double k1, double k2) { return symbol({k1, k2}); }, bands, 64);
    }
  }
  return out;
}

inline Json chern_output_json(const ChernOutput& out, const RunConfig& cfg) {
  Json j;
  j["invariant"] = "chern_even";
  j["axes"] = cfg.invariant.axes.empty() ? std::vector<int>{1, 2} : cfg.invariant.axes;
  j["value"] = out.result.value;
  j["stderr"] = out.result.stderror;
  j["imag_residual"] = out.result.imag_residual;
  j["samples"] = out.result.per_sample.size();
  Json per = Json::array();
  for (Complex z : out.result.per_sample) per.push_back({{"re", z.real()}, {"im", z.imag()}});
  j["per_sample"] = per;
  j["fermi"] = out.fermi;
  j["filling"] = out.filling;
  j["nearest_integer"] = out.nearest_integer;
  j["integral"] = out.integral;
  j["integrality_tolerance"] = 1e-2;
  Json range = Json::array();
  for (const auto& t : out.range) {
    Json term;
    term["J"] = t.j_set;
    term["coefficient"] = t.coefficient;
    range.push_back(term);
  }
  j["range"] = range;
  if (out.oracle) {
    j["oracle"] = *out.oracle;
    j["oracle_kind"] = "kspace_berry_flux";
    j["matches_oracle"] = std::abs(out.result.value - *out.oracle) <= 1e-2;
  } else {
    j["oracle"] = nullptr;
  }
  return j;
}

struct WindingOutput {
  ChernResult result;
  std::optional<int> oracle;
  double oracle_residual = 0.0;
  bool integral = false;
  long nearest_integer = 0;
};

inline WindingOutput run_winding(const RunConfig& cfg, std::optional<uint64_t> seed = {},
                                 int jobs = 0) {
  const ModelSpec model = make_model(cfg.model, seed);
  if (!model.chiral_split)
    throw NumericError("winding: model carries no chiral split");
  const auto [n_plus, n_minus] = *model.chiral_split;
  const NcPoly h = build_hamiltonian(model);
  auto window = make_window(cfg.window, model.orbital_dim);
  const MultiIndex index(cfg.invariant.axes.empty() ? std::vector<int>{1}
                                                    : cfg.invariant.axes);

  auto per_sample =
      detail::map_samples(cfg.invariant.samples, resolve_jobs(jobs), [&](uint64_t i) {
        const LatticeOperator H = materialize(h, sample_config(model.disorder, i), window);
        const LatticeOperator u = chiral_unitary(H, n_plus, n_minus);
        return chern_odd(u, index, cfg.window.margin);
      });

  WindingOutput out;
  out.result = disorder_average(per_sample);
  out.nearest_integer = std::lround(out.result.value);
  out.integral = std::abs(out.result.value - static_cast<double>(out.nearest_integer)) <= 1e-2;

  if (model.disorder.clean() && model.dim == 1 &&
      antisym(model.twist).cwiseAbs().maxCoeff() == 0.0) {
    // Winding of the (+,-) block of the Bloch symbol.
    const auto symbol = bloch_symbol(model);
    const int np = n_plus;
    const auto q = [&symbol, np](double k) {
      return symbol({k}).block(0, np, np, np).eval();
    };
    const WindingResult w = winding_oracle(q, 2048);
    out.oracle = w.value;
    out.oracle_residual = w.residual;
  }
  return out;
}

inline Json winding_output_json(const WindingOutput& out, const RunConfig& cfg) {
  Json j;
  j["invariant"] = "chern_odd";
  j["axes"] = cfg.invariant.axes.empty() ? std::vector<int>{1} : cfg.invariant.axes;
  j["value"] = out.result.value;
  j["stderr"] = out.result.stderror;
  j["imag_residual"] = out.result.imag_residual;
  j["samples"] = out.result.per_sample.size();
  Json per = Json::array();
  for (Complex z : out.result.per_sample) per.push_back({{"re", z.real()}, {"im", z.imag()}});
  j["per_sample"] = per;
  j["nearest_integer"] = out.nearest_integer;
  j["integral"] = out.integral;
  j["integrality_tolerance"] = 1e-2;
  if (out.oracle) {
    j["oracle"] = *out.oracle;
    j["oracle_kind"] = "winding_number";
    j["oracle_rounding_residual"] = out.oracle_residual;
    j["matches_oracle"] = std::abs(out.result.value - *out.oracle) <= 1e-2;
  } else {
    j["oracle"] = nullptr;
  }
  return j;
}

}  // namespace ncbt
