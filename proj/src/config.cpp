#include "qcmean/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qcmean/expression.hpp"

namespace qcmean {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError("config: missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError("config: field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

Point parse_point(const json& j, int dim) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return Point::infinity(dim);
    throw ConfigError("config: points are arrays of coordinates or the string \"inf\"");
  }
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ConfigError("config: point must be an array of " + std::to_string(dim) +
                      " coordinates");
  }
  std::vector<double> c;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("config: point coordinates must be numbers");
    c.push_back(v.get<double>());
  }
  return Point(std::move(c));
}

Domain parse_domain(const json& j, int dim) {
  const std::string type = j.value("type", "ball");
  const Point center =
      j.contains("center") ? parse_point(j.at("center"), dim) : Point::origin(dim);
  if (type == "ball") return Domain::ball(center, number_or(j, "radius", 1.0));
  if (type == "ring") return Domain::ring(center, require_number(j, "r1"), require_number(j, "r2"));
  if (type == "space") return Domain::space(dim);
  throw ConfigError("config: unknown domain type '" + type + "'");
}

}  // namespace

Gauge parse_gauge(const json& j) {
  if (!j.is_object() || !j.contains("family")) {
    throw ConfigError("config: gauge spec needs a 'family' field");
  }
  const std::string family = j.at("family").get<std::string>();
  try {
    if (family == "identity") return Gauge::identity();
    if (family == "constant") return Gauge::constant(require_number(j, "c"));
    if (family == "power") return Gauge::power(number_or(j, "c", 1.0), require_number(j, "alpha"));
    if (family == "exp") return Gauge::exp_power(number_or(j, "beta", 1.0), number_or(j, "q", 1.0));
    if (family == "logpower") {
      return Gauge::log_power(number_or(j, "alpha", 1.0), number_or(j, "beta", 1.0));
    }
    if (family == "table") {
      if (!j.contains("points") || !j.at("points").is_array()) {
        throw ConfigError("config: table gauge needs 'points': [[t, v], ...]");
      }
      std::vector<std::pair<double, double>> pts;
      for (const auto& row : j.at("points")) {
        if (!row.is_array() || row.size() != 2) {
          throw ConfigError("config: table points are [t, v] pairs");
        }
        pts.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
      return Gauge::table(std::move(pts));
    }
    if (family == "affine") {
      if (!j.contains("inner")) throw ConfigError("config: affine gauge needs an 'inner' spec");
      return Gauge::affine(number_or(j, "alpha", 1.0), number_or(j, "beta", 0.0),
                           parse_gauge(j.at("inner")));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: bad gauge parameters: ") + e.what());
  }
  throw ConfigError("config: unknown gauge family '" + family + "'");
}

GridData load_grid_csv(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open grid file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != dim + 1) {
      throw ConfigError("config: grid rows must be x1..x" + std::to_string(dim) + ",value");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("config: grid file '" + path + "' is empty");

  GridData data;
  data.dim = dim;
  data.axes.resize(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    std::vector<double> ax;
    for (const auto& r : rows) ax.push_back(r[static_cast<std::size_t>(k)]);
    std::sort(ax.begin(), ax.end());
    ax.erase(std::unique(ax.begin(), ax.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             ax.end());
    data.axes[static_cast<std::size_t>(k)] = std::move(ax);
  }
  std::size_t expected = 1;
  for (const auto& ax : data.axes) expected *= ax.size();
  if (rows.size() != expected) {
    throw ConfigError("config: grid file does not cover a full lattice (" +
                      std::to_string(rows.size()) + " rows, " + std::to_string(expected) +
                      " lattice sites)");
  }

  auto axis_index = [&](int k, double v) {
    const auto& ax = data.axes[static_cast<std::size_t>(k)];
    auto it = std::lower_bound(ax.begin(), ax.end(), v - 1e-12);
    return static_cast<std::size_t>(it - ax.begin());
  };
  std::vector<std::size_t> stride(static_cast<std::size_t>(dim), 1);
  for (int k = dim - 2; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] =
        stride[static_cast<std::size_t>(k + 1)] * data.axes[static_cast<std::size_t>(k + 1)].size();
  }
  data.values.assign(expected, 0.0);
  std::vector<bool> seen(expected, false);
  for (const auto& r : rows) {
    std::size_t offset = 0;
    for (int k = 0; k < dim; ++k) {
      offset += axis_index(k, r[static_cast<std::size_t>(k)]) * stride[static_cast<std::size_t>(k)];
    }
    if (seen[offset]) throw ConfigError("config: duplicate lattice site in grid file");
    seen[offset] = true;
    data.values[offset] = r.back();
  }
  return data;
}

DistortionField parse_field(const json& j, int dim, const std::string& base_dir) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError("config: field spec needs a 'kind' field");
  }
  const std::string kind = j.at("kind").get<std::string>();
  std::optional<Domain> domain;
  if (j.contains("domain")) domain = parse_domain(j.at("domain"), dim);

  try {
    if (kind == "constant") {
      return DistortionField::constant(require_number(j, "c"), dim, domain);
    }
    if (kind == "radial") {
      if (!j.contains("profile")) throw ConfigError("config: radial field needs a 'profile'");
      const std::string text = j.at("profile").get<std::string>();
      Expression expr = Expression::parse(text, dim);
      if (expr.uses_coordinates()) {
        throw ConfigError("config: radial profiles may only use the variable r");
      }
      const Point center =
          j.contains("center") ? parse_point(j.at("center"), dim) : Point::origin(dim);
      if (!domain) domain = Domain::ball(center, number_or(j, "radius", 1.0));
      return DistortionField::radial([expr](double r) { return expr.eval_radial(r); }, center,
                                     domain, text);
    }
    if (kind == "analytic") {
      if (!j.contains("expr")) throw ConfigError("config: analytic field needs an 'expr'");
      const std::string text = j.at("expr").get<std::string>();
      Expression expr = Expression::parse(text, dim);
      if (!domain) domain = Domain::ball(Point::origin(dim), number_or(j, "radius", 1.0));
      return DistortionField::analytic([expr](const Point& x) { return expr.eval(x); }, dim,
                                       domain, text);
    }
    if (kind == "grid") {
      if (!j.contains("file")) throw ConfigError("config: grid field needs a 'file'");
      std::string path = j.at("file").get<std::string>();
      if (!path.empty() && path.front() != '/' && !base_dir.empty()) {
        path = base_dir + "/" + path;
      }
      return DistortionField::grid(load_grid_csv(path, dim));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: bad field parameters: ") + e.what());
  }
  throw ConfigError("config: unknown field kind '" + kind + "'");
}

RunConfig parse_config(const json& j, const std::string& base_dir) {
  RunConfig cfg;
  cfg.raw = j;
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer()) throw ConfigError("config: 'dim' must be an integer");
    cfg.dim = j.at("dim").get<int>();
  }
  if (cfg.dim < 2) throw ConfigError("config: dim must be >= 2");

  if (j.contains("gauge")) {
    cfg.gauge = parse_gauge(j.at("gauge"));
    cfg.gauge_text = cfg.gauge->describe();
  }
  if (j.contains("field")) {
    cfg.field = parse_field(j.at("field"), cfg.dim, base_dir);
    cfg.field_text = cfg.field->describe();
  }

  cfg.params.dim = cfg.dim;
  cfg.params.x0 = Point::origin(cfg.dim);
  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) throw ConfigError("config: 'params' must be an object");
    cfg.params.p = number_or(p, "p", 1.0);
    cfg.params.chordal_gap = number_or(p, "delta", 0.5);
    cfg.params.mass = number_or(p, "mass", 1.0);
    cfg.params.alpha_n = number_or(p, "alpha_n", 1.0);
    cfg.params.working_radius = number_or(p, "rho", 0.5);
    if (p.contains("x0")) cfg.params.x0 = parse_point(p.at("x0"), cfg.dim);
    if (p.contains("lambda")) cfg.lambda = require_number(p, "lambda");
    cfg.lift_delta0 = number_or(p, "lift_delta0", 1.0);
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (s.contains("epsilon")) {
      for (const auto& v : s.at("epsilon")) cfg.eps_grid.push_back(v.get<double>());
      if (!std::is_sorted(cfg.eps_grid.rbegin(), cfg.eps_grid.rend()) &&
          !std::is_sorted(cfg.eps_grid.begin(), cfg.eps_grid.end())) {
        throw ConfigError("config: the epsilon grid must be sorted");
      }
    }
    if (s.contains("x")) {
      for (const auto& v : s.at("x")) cfg.x_grid.push_back(parse_point(v, cfg.dim));
    }
    if (s.contains("m")) {
      for (const auto& v : s.at("m")) {
        if (!v.is_number_integer() || v.get<int>() < 1) {
          throw ConfigError("config: truncation indices must be integers >= 1");
        }
        cfg.m_grid.push_back(v.get<int>());
      }
      if (!std::is_sorted(cfg.m_grid.begin(), cfg.m_grid.end())) {
        throw ConfigError("config: the m grid must be sorted");
      }
    }
    if (s.contains("witness_delta")) {
      for (const auto& v : s.at("witness_delta")) cfg.witness_deltas.push_back(v.get<double>());
    }
    if (s.contains("radii")) {
      for (const auto& v : s.at("radii")) cfg.profile_radii.push_back(v.get<double>());
      if (!std::is_sorted(cfg.profile_radii.begin(), cfg.profile_radii.end())) {
        throw ConfigError("config: the radius grid must be sorted increasing");
      }
    }
    if (s.contains("p")) {
      for (const auto& v : s.at("p")) cfg.p_list.push_back(v.get<double>());
    }
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("dir")) cfg.out_dir = o.at("dir").get<std::string>();
    if (o.contains("formats")) {
      for (const auto& f : o.at("formats")) {
        const std::string fmt = f.get<std::string>();
        if (fmt != "json" && fmt != "csv" && fmt != "svg") {
          throw ConfigError("config: unknown output format '" + fmt + "'");
        }
        cfg.formats.push_back(fmt);
      }
    }
  }

  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    cfg.tol.quadrature_rel = number_or(t, "quadrature_rel", cfg.tol.quadrature_rel);
    cfg.tol.root_tol = number_or(t, "root_tol", cfg.tol.root_tol);
  }
  cfg.divergence.quad_rel = cfg.tol.quadrature_rel;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: JSON parse failure in '" + path + "': " + e.what());
  }
  std::string base_dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) base_dir = path.substr(0, slash);
  return parse_config(j, base_dir);
}

std::uint64_t config_hash(const json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash_hex(const json& j) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash(j)));
  return buf;
}

}  // namespace qcmean
