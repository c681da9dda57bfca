#pragma once

#include "npeit/config.hpp"
#include "npeit/np_spectrum.hpp"
#include "npeit/transmission.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace npeit {

/// A harness-level property failed (CLI exit code 2).
class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepRow {
  double k = 0.0;
  double dist_dirichlet = 0.0;
  double dist_conductor = 0.0;
  double grad_ratio = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> slope;  ///< log-log fit of dist_dirichlet over the last 4 points
  int slope_points = 0;
  bool dirichlet_decreasing = false;
  bool conductor_decreasing = false;
  double final_over_initial = 0.0;  ///< of dist_dirichlet
  double max_grad_ratio = 0.0;
};

struct StabilityRow {
  int pair_id = 0;
  double d_H = 0.0;
  double d_m = 0.0;
  double Lambda = 0.0;
  std::optional<double> ref_triple_log;  ///< 1 / ln ln |ln Lambda|, if 0 < Lambda < e^-e
  bool shares_boundary = false;
};

struct StabilityResult {
  std::vector<StabilityRow> rows;
  std::optional<double> spearman;  ///< rank correlation of d_H and Lambda
  std::vector<std::string> warnings;
};

struct ExpansionReport {
  ExpansionCoefficients coefficients;
  std::vector<ReconstructionPoint> reconstruction;
};

struct OracleRow {
  std::string kind;  ///< transmission or dirichlet_limit
  bool sine = false;
  int m = 0;
  double k = 0.0;
  double bem = 0.0;
  double oracle = 0.0;
  double abs_diff = 0.0;
};

/// Largest oracle deviation accepted by oracle-check.
inline constexpr double kOracleTolerance = 1e-7;

/// Each run_* writes its CSV header and rows to `csv` as they are produced, so a
/// failing run leaves a partial file.
SweepResult run_sweep(const ExperimentConfig& config, std::ostream& csv);
StabilityResult run_stability(const ExperimentConfig& config, std::ostream& csv);
NPSpectrum run_spectrum(const ExperimentConfig& config, std::ostream& csv);
ExpansionReport run_expansion(const ExperimentConfig& config, std::ostream& csv,
                              std::ostream& reconstruction_csv);
std::vector<OracleRow> oracle_check(const ExperimentConfig& config, std::ostream& csv);

void write_sweep_summary(std::ostream& os, const SweepResult& result);
void write_stability_summary(std::ostream& os, const StabilityResult& result);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Throws AssertionFailure when a subcommand's checked property fails.
void assert_sweep(const ExperimentConfig& config, const SweepResult& r);
void assert_stability(const StabilityResult& r);
void assert_spectrum(const NPSpectrum& s);
void assert_expansion(const ExpansionReport& r);
void assert_oracle(const std::vector<OracleRow>& rows);

}  // namespace npeit
