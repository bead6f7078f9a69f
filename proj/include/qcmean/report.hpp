#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qcmean/bounds.hpp"
#include "qcmean/divergence.hpp"
#include "qcmean/numerics.hpp"

namespace qcmean {

const char* tool_version();

/// "%.12g" with stable inf/nan spellings; used everywhere text output must be
/// byte-identical across runs.
std::string format_double(double v);

/// Finite doubles stay numbers; infinities become the strings "inf"/"-inf".
nlohmann::ordered_json json_number(double v);

nlohmann::ordered_json to_json(const DivergenceVerdict& v);
nlohmann::ordered_json to_json(const BoundReport& r);
nlohmann::ordered_json tolerances_json(const Tolerances& tol, const DivergencePolicy& policy);

struct RunReport {
  std::string command;
  std::string config_hash;
  nlohmann::ordered_json body;
  std::vector<std::string> errors;
  int exit_code = 0;

  nlohmann::ordered_json envelope(const Tolerances& tol, const DivergencePolicy& policy) const;
};

/// One CSV text from a header and string rows; '\n' line ends, no quoting.
std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

/// Polyline-only SVG document; deterministic formatting.
struct SvgPolyline {
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
};
std::string svg_text(const std::vector<SvgPolyline>& lines, double extent);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace qcmean
