#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcmean/bounds.hpp"
#include "qcmean/divergence.hpp"
#include "qcmean/field.hpp"
#include "qcmean/gauge.hpp"
#include "qcmean/numerics.hpp"

namespace qcmean {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One JSON document drives every subcommand; unknown keys are rejected
/// nowhere, missing ones fall back to defaults where a default is sane.
struct RunConfig {
  int dim = 2;
  nlohmann::json raw;

  std::optional<Gauge> gauge;
  std::string gauge_text;
  std::optional<DistortionField> field;
  std::string field_text;

  BoundParams params;
  std::optional<double> lambda;
  double lift_delta0 = 1.0;

  std::vector<double> eps_grid;
  std::vector<Point> x_grid;
  std::vector<int> m_grid;
  std::vector<double> witness_deltas;
  std::vector<double> profile_radii;
  std::vector<double> p_list;

  std::string out_dir;                // empty: use the --out flag or "."
  std::vector<std::string> formats;   // empty: all of json, csv, svg

  std::uint64_t seed = 12345;
  Tolerances tol;
  DivergencePolicy divergence;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir);

Gauge parse_gauge(const nlohmann::json& j);
DistortionField parse_field(const nlohmann::json& j, int dim, const std::string& base_dir);
GridData load_grid_csv(const std::string& path, int dim);

/// FNV-1a over the canonical (key-sorted) dump of the config document.
std::uint64_t config_hash(const nlohmann::json& j);
std::string config_hash_hex(const nlohmann::json& j);

}  // namespace qcmean
