// ncbt: batch front end for spectra, butterflies, Chern sweeps, winding
// numbers, and the built-in verification suite.
//
// Exit codes: 0 success, 1 verification/quantization failure, 2 config error,
// 3 numeric failure (gapless sample, non-Hermitian input, failed solve).

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ncbt/pipeline.hpp"
#include "ncbt/verify.hpp"

namespace {

constexpr int kExitQuantization = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  std::optional<uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "TOML or JSON run configuration");
  if (needs_config) opt->required();
  cmd->add_option("--jobs", args.jobs, "parallel sample workers (default: NCBT_JOBS or cores)");
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--out", args.out_dir, "output directory (default: config [output] dir)");
}

std::filesystem::path resolve_out_dir(const CommonArgs& args, const ncbt::RunConfig& cfg) {
  const std::filesystem::path dir = args.out_dir.empty() ? cfg.output_dir : args.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ncbt::ConfigError("cannot write " + path.string());
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

int cmd_spectrum(const CommonArgs& args) {
  const ncbt::RunConfig cfg = ncbt::load_config_file(args.config_path);
  const auto out = ncbt::run_spectrum(cfg, args.seed, args.jobs);
  const auto dir = resolve_out_dir(args, cfg);
  write_file(dir / "spectrum.csv", ncbt::render_spectrum_csv(out));
  write_file(dir / "gaps.csv", ncbt::render_gaps_csv(out));
  return 0;
}

int cmd_butterfly(const CommonArgs& args) {
  const ncbt::RunConfig cfg = ncbt::load_config_file(args.config_path);
  const auto out = ncbt::run_butterfly(cfg, args.seed, args.jobs);
  for (const auto& warning : out.warnings) std::cerr << "warning: " << warning << "\n";
  const auto dir = resolve_out_dir(args, cfg);
  write_file(dir / "butterfly.csv", ncbt::render_butterfly_csv(out));
  return 0;
}

int cmd_chern(const CommonArgs& args) {
  const ncbt::RunConfig cfg = ncbt::load_config_file(args.config_path);
  const auto out = ncbt::run_chern(cfg, args.seed, args.jobs);
  const auto dir = resolve_out_dir(args, cfg);
  write_file(dir / "chern.json", ncbt::chern_output_json(out, cfg).dump(2) + "\n");
  if (!out.integral) {
    std::cerr << "chern: value " << out.result.value << " is not within 1e-2 of an integer\n";
    return kExitQuantization;
  }
  if (out.oracle && std::abs(*out.oracle - out.result.value) > 1e-2) {
    std::cerr << "chern: value " << out.result.value << " disagrees with the k-space oracle "
              << *out.oracle << "\n";
    return kExitQuantization;
  }
  return 0;
}

int cmd_winding(const CommonArgs& args) {
  const ncbt::RunConfig cfg = ncbt::load_config_file(args.config_path);
  const auto out = ncbt::run_winding(cfg, args.seed, args.jobs);
  const auto dir = resolve_out_dir(args, cfg);
  write_file(dir / "winding.json", ncbt::winding_output_json(out, cfg).dump(2) + "\n");
  if (!out.integral) {
    std::cerr << "winding: value " << out.result.value << " is not within 1e-2 of an integer\n";
    return kExitQuantization;
  }
  if (out.oracle && std::abs(out.result.value - *out.oracle) > 1e-2) {
    std::cerr << "winding: value " << out.result.value << " disagrees with the winding oracle "
              << *out.oracle << "\n";
    return kExitQuantization;
  }
  return 0;
}

int cmd_verify() {
  const auto results = ncbt::verify::run_all();
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " - " << r.detail << "\n";
    all = all && r.pass;
  }
  std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all ? 0 : kExitQuantization;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-commutative Brillouin torus toolkit"};
  app.require_subcommand(1);

  CommonArgs spectrum_args, butterfly_args, chern_args, winding_args;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and gap table per sample");
  add_common(spectrum, spectrum_args);
  auto* butterfly = app.add_subcommand("butterfly", "eigenvalues swept over a flux list");
  add_common(butterfly, butterfly_args);
  auto* chern = app.add_subcommand("chern", "even Chern number of the Fermi projection");
  add_common(chern, chern_args);
  auto* winding = app.add_subcommand("winding", "odd Chern number of the flat-band unitary");
  add_common(winding, winding_args);
  auto* verify = app.add_subcommand("verify", "run the built-in invariant suite");
  (void)verify;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfig : 0;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(spectrum_args);
    if (butterfly->parsed()) return cmd_butterfly(butterfly_args);
    if (chern->parsed()) return cmd_chern(chern_args);
    if (winding->parsed()) return cmd_winding(winding_args);
    if (verify->parsed()) return cmd_verify();
  } catch (const ncbt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ncbt::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}
