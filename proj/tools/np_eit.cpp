// np-eit: command-line driver for the conductivity-contrast experiments.
//
//   np-eit <spectrum|sweep|stability|expand|oracle-check> --config FILE [--out DIR]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 a checked property
// failed, 3 a solver failure.

#include "npeit/config.hpp"
#include "npeit/harness.hpp"
#include "npeit/layer_ops.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <vector>

namespace fs = std::filesystem;
using namespace npeit;

namespace {

enum Exit { kOk = 0, kUsage = 1, kAssertion = 2, kSolver = 3 };

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream& open(const std::string& name) {
    auto& s = streams_.emplace_back(std::make_unique<std::ofstream>(dir_ / name));
    if (!*s) throw ConfigError("cannot write " + (dir_ / name).string());
    return *s;
  }

  void abort(const std::string& msg) {
    for (auto& s : streams_) *s << "# aborted: " << msg << '\n' << std::flush;
  }

 private:
  fs::path dir_;
  std::vector<std::unique_ptr<std::ofstream>> streams_;
};

using Command = std::function<void(const ExperimentConfig&, Outputs&)>;

void spectrum(const ExperimentConfig& c, Outputs& out) {
  const NPSpectrum s = run_spectrum(c, out.open("spectrum.csv"));
  std::cout << "spectrum: " << s.modes().size() << " modes\n";
  assert_spectrum(s);
}

void sweep(const ExperimentConfig& c, Outputs& out) {
  auto& csv = out.open("sweep.csv");
  const SweepResult r = run_sweep(c, csv);
  write_sweep_summary(out.open("sweep_summary.csv"), r);
  std::cout << "sweep: " << r.rows.size() << " contrasts, final/initial "
            << r.final_over_initial << '\n';
  assert_sweep(c, r);
}

void stability(const ExperimentConfig& c, Outputs& out) {
  auto& csv = out.open("stability.csv");
  const StabilityResult r = run_stability(c, csv);
  write_stability_summary(out.open("stability_summary.csv"), r);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "stability: " << r.rows.size() << " pairs\n";
  assert_stability(r);
}

void expand(const ExperimentConfig& c, Outputs& out) {
  auto& csv = out.open("expansion.csv");
  auto& recon = out.open("expansion_reconstruction.csv");
  const ExpansionReport r = run_expansion(c, csv, recon);
  std::cout << "expand: " << r.coefficients.entries.size() << " coefficients, max gap "
            << r.coefficients.max_gap << '\n';
  assert_expansion(r);
}

void oracle(const ExperimentConfig& c, Outputs& out) {
  const auto rows = oracle_check(c, out.open("oracle_check.csv"));
  std::cout << "oracle-check: " << rows.size() << " comparisons\n";
  assert_oracle(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neumann-Poincare transmission experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir;

  const std::vector<std::pair<std::string, Command>> commands = {
      {"spectrum", spectrum}, {"sweep", sweep},   {"stability", stability},
      {"expand", expand},     {"oracle-check", oracle}};
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (default: [output] directory, else .)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const Command* run = nullptr;
  for (const auto& [name, fn] : commands)
    if (app.got_subcommand(name)) run = &fn;

  ExperimentConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  }
  if (out_dir.empty()) out_dir = config.output_dir.empty() ? "." : config.output_dir;

  std::unique_ptr<Outputs> out;
  try {
    out = std::make_unique<Outputs>(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  auto fail = [&](const char* tag, const std::exception& e, int code) {
    out->abort(e.what());
    std::cerr << tag << ": " << e.what() << '\n';
    return code;
  };
  try {
    (*run)(config, *out);
  } catch (const AssertionFailure& e) {
    return fail("assertion failed", e, kAssertion);
  } catch (const ConfigError& e) {
    return fail("config error", e, kUsage);
  } catch (const GeometryError& e) {
    return fail("geometry error", e, kUsage);
  } catch (const std::invalid_argument& e) {
    return fail("invalid input", e, kUsage);
  } catch (const std::exception& e) {
    return fail("solver failure", e, kSolver);
  }
  return kOk;
}
