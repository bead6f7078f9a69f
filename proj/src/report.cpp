#include "qcmean/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qcmean {

const char* tool_version() { return "0.1.0"; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

nlohmann::ordered_json to_json(const DivergenceVerdict& v) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(v.kind);
  j["method"] = v.method;
  j["detail"] = v.detail;
  nlohmann::ordered_json ev = nlohmann::ordered_json::array();
  for (const auto& [limit, value] : v.evidence) {
    ev.push_back({json_number(limit), json_number(value)});
  }
  j["evidence"] = std::move(ev);
  return j;
}

nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["lhs"] = json_number(r.lhs);
  j["rhs"] = json_number(r.rhs);
  j["bound"] = json_number(r.bound_value);
  j["verdict"] = r.verdict;
  if (r.lhs_divergent) j["lhs_divergent"] = true;
  if (r.rhs_divergent) j["rhs_divergent"] = true;
  j["tolerances"] = json_number(r.tolerance);
  nlohmann::ordered_json in;
  for (const auto& [k, v] : r.inputs) in[k] = json_number(v);
  j["inputs"] = std::move(in);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::ordered_json tolerances_json(const Tolerances& tol, const DivergencePolicy& policy) {
  nlohmann::ordered_json j;
  j["quadrature_rel"] = tol.quadrature_rel;
  j["root_tol"] = tol.root_tol;
  j["divergence_growth_per_decade"] = policy.growth_per_decade;
  j["divergence_converge_sum"] = policy.converge_increment_sum;
  j["divergence_k_max"] = policy.k_max;
  j["divergence_trailing_decades"] = policy.trailing_decades;
  return j;
}

nlohmann::ordered_json RunReport::envelope(const Tolerances& tol,
                                           const DivergencePolicy& policy) const {
  nlohmann::ordered_json j;
  j["tool"] = "qcmean";
  j["version"] = tool_version();
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["tolerances"] = tolerances_json(tol, policy);
  j["report"] = body;
  if (!errors.empty()) j["errors"] = errors;
  j["status"] = exit_code == 0 ? "ok" : (exit_code == 3 ? "numerical-failure" : "config-error");
  return j;
}

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += (i + 1 < header.size()) ? "," : "\n";
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += row[i];
      out += (i + 1 < row.size()) ? "," : "\n";
    }
  }
  return out;
}

std::string svg_text(const std::vector<SvgPolyline>& lines, double extent) {
  const int size = 600;
  const double half = size / 2.0;
  const double scale = extent > 0 ? (half - 10.0) / extent : 1.0;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) +
         "\" height=\"" + std::to_string(size) + "\" viewBox=\"0 0 " + std::to_string(size) +
         " " + std::to_string(size) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& line : lines) {
    out += "<polyline fill=\"none\" stroke=\"" + line.color + "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < line.points.size(); ++i) {
      const double px = half + line.points[i].first * scale;
      const double py = half - line.points[i].second * scale;
      out += format_double(px) + "," + format_double(py);
      if (i + 1 < line.points.size()) out += " ";
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace qcmean
