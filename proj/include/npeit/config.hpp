#pragma once

#include "npeit/geometry.hpp"
#include "npeit/transmission.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace npeit {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InclusionPair {
  CurveShape first;
  CurveShape second;
  bool operator==(const InclusionPair&) const = default;
};

/// D1 = B(c, R), D2 = B(c + (t, 0), R - t): internally tangent at c + (R, 0).
struct TangentLadder {
  Point center = Point::Zero();
  double radius = 0.4;
  std::vector<double> offsets;
  bool operator==(const TangentLadder&) const = default;
};

struct ExperimentConfig {
  // [scene]
  CurveShape outer = CurveShape::circle({0, 0}, 1);
  CurveShape inclusion = CurveShape::circle({0, 0}, 0.5);
  int n_outer = 256;
  int n_inclusion = 256;
  // [physics]
  double k0 = 1.0;
  std::vector<FourierTerm> f{{false, 1, 1.0}};
  // [sweep]
  double k_base = 4.0;
  double k_ratio = 4.0;
  int k_count = 6;
  // [spectrum]
  int n_modes = 32;
  int J = 16;
  // [stability]
  std::vector<InclusionPair> pairs;
  std::optional<TangentLadder> ladder;
  // [expansion]
  double expansion_k = 3.0;
  int reconstruction_J = 24;
  // [output]
  std::string output_dir;

  bool operator==(const ExperimentConfig&) const = default;

  std::vector<double> k_ladder() const;
  /// Explicit pairs followed by the tangent ladder pairs.
  std::vector<InclusionPair> all_pairs() const;
  InclusionScene scene() const;
  InclusionScene scene_for(const CurveShape& inclusion) const;
};

/// Sectioned `key = value` text; `#` starts a comment. Unknown sections or keys,
/// repeated keys (other than `pair`) and malformed values raise ConfigError
/// naming the line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace npeit
