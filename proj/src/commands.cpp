#include "qcmean/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <numbers>
#include <random>
#include <thread>

#include "qcmean/extremal.hpp"

namespace qcmean {

namespace {

using nlohmann::ordered_json;

/// Evaluates fn(0..count-1) concurrently, results emitted in index order.
template <typename Fn>
std::vector<ordered_json> ordered_parallel(std::size_t count, Fn fn) {
  std::vector<ordered_json> rows(count);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (count <= 1 || hw <= 1) {
    for (std::size_t i = 0; i < count; ++i) rows[i] = fn(i);
    return rows;
  }
  std::vector<std::future<ordered_json>> futs;
  futs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    futs.push_back(std::async(std::launch::async | std::launch::deferred,
                              [&fn, i] { return fn(i); }));
  }
  for (std::size_t i = 0; i < count; ++i) rows[i] = futs[i].get();
  return rows;
}

std::vector<double> default_log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  }
  g.back() = hi;
  return g;
}

std::vector<double> convexity_sample_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 120; ++i) g.push_back(1e-3 * std::pow(1e6, i / 120.0));
  return g;
}

ordered_json convexity_certificate(const Gauge& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uexp(-2.0, 2.0);
  std::uniform_real_distribution<double> ulam(0.0, 1.0);
  int checked = 0, failures = 0;
  for (int i = 0; i < 200; ++i) {
    const double t1 = std::pow(10.0, uexp(rng));
    const double t2 = std::pow(10.0, uexp(rng));
    const double lam = ulam(rng);
    const double rhs = lam * g.eval(t1) + (1.0 - lam) * g.eval(t2);
    if (std::isinf(rhs)) continue;
    ++checked;
    const double lhs = g.eval(lam * t1 + (1.0 - lam) * t2);
    if (lhs > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) ++failures;
  }
  ordered_json j;
  j["sampled_pairs"] = checked;
  j["failures"] = failures;
  j["ok"] = failures == 0;
  return j;
}

std::string verdict_word(Divergence d) { return to_string(d); }

}  // namespace

// ---------------------------------------------------------------------------

CommandOutput cmd_gauge_check(const RunConfig& cfg) {
  if (!cfg.gauge) throw ConfigError("gauge-check: the config must contain a 'gauge' spec");
  const Gauge& g = *cfg.gauge;
  if (g.family() == Gauge::Family::Constant) {
    throw ConfigError("gauge-check: the gauge cannot be constant; a constant gauge places no "
                      "restriction on the distortion");
  }
  const int n = cfg.dim;

  std::vector<double> ps = {1.0, static_cast<double>(n - 1)};
  for (double p : cfg.p_list) ps.push_back(p);
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

  CommandOutput out;
  out.report.command = "gauge-check";
  ordered_json& body = out.report.body;
  body["gauge"] = g.describe();
  body["dim"] = n;
  body["slope_nondecreasing"] = slope_is_nondecreasing(g, convexity_sample_grid());
  body["convexity_sampled"] = convexity_certificate(g, cfg.seed);

  ordered_json rows = ordered_json::array();
  std::vector<std::vector<std::string>> csv_rows;
  std::optional<Divergence> overall;
  for (double p : ps) {
    for (ConditionId cond : all_conditions()) {
      if (cond == ConditionId::LogGaugeNPrime && p != static_cast<double>(n - 1)) continue;
      ordered_json row;
      row["p"] = p;
      row["condition"] = to_string(cond);
      std::string verdict = "error";
      try {
        const double delta = default_condition_delta(g, p, cond);
        const DivergenceVerdict v = classify_condition(g, p, cond, delta, cfg.divergence);
        row["delta"] = json_number(delta);
        row["verdict"] = to_json(v);
        verdict = verdict_word(v.kind);
        if (cond == ConditionId::InvRoot && p == static_cast<double>(n - 1)) {
          overall = v.kind;
        }
      } catch (const std::exception& e) {
        row["error"] = e.what();
        out.report.errors.push_back(e.what());
      }
      rows.push_back(row);
      csv_rows.push_back({format_double(p), to_string(cond), verdict});
    }
  }
  body["conditions"] = std::move(rows);

  std::string overall_text = "undetermined";
  if (overall == Divergence::Diverges) overall_text = "equicontinuous";
  if (overall == Divergence::Converges) overall_text = "not-equicontinuous";
  body["overall"] = overall_text;
  if (!body["slope_nondecreasing"].get<bool>()) {
    body["overall_note"] =
        "convexity certificate failed; the verdict is only two-sided for convex gauges";
  }

  out.files.emplace_back("gauge_check.csv", csv_text({"p", "condition", "verdict"}, csv_rows));
  return out;
}

// ---------------------------------------------------------------------------

CommandOutput cmd_bound(const RunConfig& cfg) {
  if (!cfg.gauge) throw ConfigError("bound: the config must contain a 'gauge' spec");
  if (cfg.x_grid.empty()) throw ConfigError("bound: the sweep needs a non-empty x grid");
  const int n = cfg.dim;
  BoundParams params = cfg.params;
  params.validate();

  Gauge phi = *cfg.gauge;
  CommandOutput out;
  out.report.command = "bound";
  ordered_json& body = out.report.body;
  body["gauge"] = phi.describe();
  body["dim"] = n;

  const Domain domain = cfg.field ? cfg.field->domain()
                                  : Domain::ball(params.x0.is_infinity() ? Point::origin(n)
                                                                         : params.x0,
                                                 params.working_radius);
  if (phi.value_at_zero() == 0.0) {
    const GaugeLift lift = lift_gauge_for_bound(phi, cfg.lift_delta0, params.mass, domain);
    ordered_json lj;
    lj["delta0"] = lift.delta0;
    lj["weighted_volume"] = json_number(lift.weighted_volume);
    lj["mass_before"] = params.mass;
    lj["mass_after"] = json_number(lift.adjusted_mass);
    body["gauge_lift"] = std::move(lj);
    phi = lift.lifted;
    params.mass = lift.adjusted_mass;
  }

  if (cfg.field) {
    for (const Point& x : cfg.x_grid) {
      if (!x.is_infinity() && !cfg.field->domain().contains(x)) {
        throw ConfigError("bound: sweep point outside the field domain");
      }
    }
    try {
      const double field_mass =
          class_membership_integral(*cfg.gauge, *cfg.field, true, {}, cfg.tol.quadrature_rel);
      body["field_weighted_mass"] = json_number(field_mass);
      body["field_mass_within_bound"] = field_mass <= params.mass * (1.0 + 1e-12);
    } catch (const NumericError& e) {
      body["field_weighted_mass"] = "divergent";
      out.report.errors.push_back(e.what());
    }
  }

  ordered_json pj;
  pj["p"] = params.p;
  pj["delta"] = params.chordal_gap;
  pj["mass"] = json_number(params.mass);
  pj["alpha_n"] = params.alpha_n;
  pj["rho"] = params.working_radius;
  pj["lambda_n"] = lambda_constant(n);
  if (!params.x0.is_infinity()) {
    pj["beta_n"] = json_number(beta_weight(params.x0, params.working_radius, n));
  }
  body["params"] = std::move(pj);

  const bool about_infinity = params.x0.is_infinity();
  auto row_of = [&](std::size_t i) -> ordered_json {
    const Point& x = cfg.x_grid[i];
    ordered_json row;
    ordered_json xs = ordered_json::array();
    if (x.is_infinity()) {
      xs = "inf";
    } else {
      for (double c : x.coords()) xs.push_back(c);
    }
    row["x"] = xs;
    try {
      const double b =
          about_infinity ? at_infinity_bound(params, phi, x) : equicontinuity_bound(params, phi, x);
      row["dist"] = json_number(about_infinity ? invert(x).norm() : distance(x, params.x0));
      row["bound"] = json_number(b);
    } catch (const std::exception& e) {
      row["error"] = e.what();
    }
    return row;
  };
  ordered_json rows_json = ordered_json::array();
  std::vector<std::vector<std::string>> csv_rows;
  for (auto& row : ordered_parallel(cfg.x_grid.size(), row_of)) {
    if (row.contains("error")) {
      out.report.errors.push_back(row["error"].get<std::string>());
      out.report.exit_code = 3;
      csv_rows.push_back({"", "", "error"});
    } else {
      csv_rows.push_back({format_double(row["dist"].is_number() ? row["dist"].get<double>() : 0),
                          format_double(row["bound"].is_number() ? row["bound"].get<double>() : 0),
                          "ok"});
    }
    rows_json.push_back(std::move(row));
  }
  body["rows"] = std::move(rows_json);
  out.files.emplace_back("bound.csv", csv_text({"dist", "bound", "status"}, csv_rows));
  return out;
}

// ---------------------------------------------------------------------------

CommandOutput cmd_lemma31(const RunConfig& cfg) {
  if (!cfg.gauge) throw ConfigError("lemma31: the config must contain a 'gauge' spec");
  if (!cfg.field) throw ConfigError("lemma31: the config must contain a 'field' spec");
  if (cfg.eps_grid.empty()) throw ConfigError("lemma31: the sweep needs a non-empty epsilon grid");
  const int n = cfg.dim;
  if (cfg.field->kind() != DistortionField::Kind::Constant &&
      cfg.field->kind() != DistortionField::Kind::Radial && n > 3) {
    throw ConfigError("lemma31: dim >= 4 requires a radial or constant field");
  }
  const Point x0 = cfg.params.x0.is_infinity() ? Point::origin(n) : cfg.params.x0;

  CommandOutput out;
  out.report.command = "lemma31";
  ordered_json& body = out.report.body;
  body["gauge"] = cfg.gauge->describe();
  body["field"] = cfg.field->describe();
  body["dim"] = n;
  body["p"] = cfg.params.p;
  if (cfg.lambda) body["lambda"] = *cfg.lambda;

  auto row_of = [&](std::size_t i) -> ordered_json {
    const double eps = cfg.eps_grid[i];
    ordered_json row;
    row["epsilon"] = eps;
    try {
      const BoundReport rep = verify_mean_inequality(*cfg.gauge, *cfg.field, x0, cfg.params.p,
                                                     eps, {}, 1e-7, cfg.tol.quadrature_rel);
      row["lhs"] = json_number(rep.lhs);
      row["rhs"] = json_number(rep.rhs);
      for (const auto& [k, v] : rep.inputs) {
        if (k == "ring_mean") row["ring_mean"] = json_number(v);
      }
      row["verdict"] = rep.verdict;
      if (cfg.lambda) {
        const BoundReport star = verify_mean_inequality(*cfg.gauge, *cfg.field, x0, cfg.params.p,
                                                        eps, cfg.lambda, 1e-7,
                                                        cfg.tol.quadrature_rel);
        row["lhs_star"] = json_number(star.lhs);
        row["rhs_star"] = json_number(star.rhs);
        row["verdict_star"] = star.verdict;
      }
    } catch (const std::exception& e) {
      row["error"] = e.what();
    }
    return row;
  };

  ordered_json rows_json = ordered_json::array();
  std::vector<std::vector<std::string>> csv_rows;
  for (auto& row : ordered_parallel(cfg.eps_grid.size(), row_of)) {
    std::vector<std::string> csv_row;
    csv_row.push_back(format_double(row["epsilon"].get<double>()));
    if (row.contains("error")) {
      out.report.errors.push_back(row["error"].get<std::string>());
      out.report.exit_code = 3;
      csv_row.insert(csv_row.end(), {"", "", "error"});
    } else {
      csv_row.push_back(row["lhs"].is_number() ? format_double(row["lhs"].get<double>())
                                               : row["lhs"].get<std::string>());
      csv_row.push_back(row["rhs"].is_number() ? format_double(row["rhs"].get<double>())
                                               : row["rhs"].get<std::string>());
      csv_row.push_back(row["verdict"].get<bool>() ? "true" : "false");
    }
    csv_rows.push_back(std::move(csv_row));
    rows_json.push_back(std::move(row));
  }
  body["rows"] = std::move(rows_json);
  out.files.emplace_back("lemma31.csv",
                         csv_text({"epsilon", "lhs", "rhs", "verdict"}, csv_rows));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string profile_csv(const RadialProfile& profile, const RadialProfile& truncated,
                        const std::vector<double>& radii) {
  std::vector<std::vector<std::string>> rows;
  for (double r : radii) {
    rows.push_back({format_double(r), format_double(profile.K(r)),
                    format_double(truncated.K(r)), format_double(profile.I(r)),
                    format_double(profile.R(r)), format_double(truncated.R(r))});
  }
  return csv_text({"r", "K", "K_m", "I", "R", "R_m"}, rows);
}

std::string extremal_svg(const RadialProfile& truncated) {
  const double extent = truncated.R(1.0);
  std::vector<SvgPolyline> lines;
  // images of concentric circles
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    SvgPolyline line;
    line.color = "#1f77b4";
    const double rr = truncated.R(r);
    for (int k = 0; k <= 128; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 128.0;
      line.points.emplace_back(rr * std::cos(th), rr * std::sin(th));
    }
    lines.push_back(std::move(line));
  }
  // images of rays
  for (int j = 0; j < 8; ++j) {
    const double th = 2.0 * std::numbers::pi * j / 8.0;
    SvgPolyline line;
    line.color = "#d62728";
    for (int k = 0; k <= 64; ++k) {
      const double t = std::pow(10.0, -4.0 + 4.0 * k / 64.0);
      const double rr = truncated.R(std::min(t, 1.0));
      line.points.emplace_back(rr * std::cos(th), rr * std::sin(th));
    }
    lines.push_back(std::move(line));
  }
  return svg_text(lines, extent);
}

}  // namespace

CommandOutput cmd_extremal(const RunConfig& cfg) {
  if (!cfg.gauge) throw ConfigError("extremal: the config must contain a 'gauge' spec");
  const int n = cfg.dim;

  ExtremalSetup setup;
  try {
    setup = normalize_gauge(*cfg.gauge, n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("extremal: ") + e.what());
  }

  std::vector<double> radii =
      cfg.profile_radii.empty() ? default_log_grid(1e-3, 1.0, 64) : cfg.profile_radii;
  std::vector<int> ms = cfg.m_grid.empty() ? std::vector<int>{1, 10, 100} : cfg.m_grid;
  std::vector<double> deltas =
      cfg.witness_deltas.empty() ? std::vector<double>{0.5, 0.125} : cfg.witness_deltas;

  const RadialProfile profile = solve_profile(setup, radii, cfg.tol.root_tol);
  const int m_ref = ms.back();
  const RadialProfile truncated = truncate_profile(profile, m_ref);
  const double i0 = profile.I0();  // surfaces the divergent-tail error early

  CommandOutput out;
  out.report.command = "extremal";
  ordered_json& body = out.report.body;
  body["gauge"] = cfg.gauge->describe();
  body["dim"] = n;
  body["gamma"] = json_number(setup.gamma());
  body["scale_used"] = setup.scale_used();
  body["shift_used"] = setup.shift_used();
  body["growth_C"] = json_number(setup.growth_c());
  body["growth_T"] = setup.growth_t();
  body["I0"] = json_number(i0);
  body["image_radius"] = json_number(std::exp(i0));
  body["m_ref"] = m_ref;

  ordered_json mass_rows = ordered_json::array();
  std::vector<std::vector<std::string>> mass_csv;
  {
    const GaugeMass untrunc = gauge_mass(profile);
    ordered_json row;
    row["m"] = "untruncated";
    row["mass"] = json_number(untrunc.mass);
    row["bound"] = json_number(untrunc.bound);
    row["ok"] = untrunc.mass <= untrunc.bound + 1e-7 * std::max(1.0, untrunc.bound);
    mass_rows.push_back(row);
    mass_csv.push_back({"0", format_double(untrunc.mass), format_double(untrunc.bound)});
  }
  for (int m : ms) {
    const GaugeMass gm = gauge_mass(truncate_profile(profile, m));
    ordered_json row;
    row["m"] = m;
    row["mass"] = json_number(gm.mass);
    row["bound"] = json_number(gm.bound);
    row["ok"] = gm.mass <= gm.bound + 1e-7 * std::max(1.0, gm.bound);
    mass_rows.push_back(row);
    mass_csv.push_back({std::to_string(m), format_double(gm.mass), format_double(gm.bound)});
  }
  body["mass"] = std::move(mass_rows);

  ordered_json witness = ordered_json::array();
  for (double d : deltas) {
    std::vector<int> admissible;
    for (int m : ms) {
      if (m >= 1.0 / d) admissible.push_back(m);
    }
    if (admissible.empty()) continue;
    for (const WitnessRow& w : nonequicontinuity_witness(profile, d, admissible)) {
      ordered_json row;
      row["delta"] = w.delta;
      row["m"] = w.m;
      row["min_abs_f"] = json_number(w.min_abs_f);
      row["chordal_osc"] = json_number(w.chordal_osc);
      row["separated"] = w.separated;
      witness.push_back(row);
    }
  }
  body["witness"] = std::move(witness);

  body["membership"] = to_json(membership_check(profile, m_ref, cfg.params.chordal_gap));

  out.files.emplace_back("extremal_profile.csv", profile_csv(profile, truncated, radii));
  out.files.emplace_back("extremal_mass.csv", csv_text({"m", "mass", "bound"}, mass_csv));
  out.files.emplace_back("extremal_witness.json", body["witness"].dump(2) + "\n");
  if (n == 2) {
    out.files.emplace_back("extremal_plot.svg", extremal_svg(truncated));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string write_outputs(const CommandOutput& out, const RunConfig& cfg,
                          const std::string& out_dir, const std::set<std::string>& formats) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  RunReport report = out.report;
  report.config_hash = config_hash_hex(cfg.raw);
  const ordered_json envelope = report.envelope(cfg.tol, cfg.divergence);
  const std::string text = envelope.dump(2) + "\n";

  if (formats.count("json") > 0) {
    std::string name = report.command;
    std::replace(name.begin(), name.end(), '-', '_');
    write_text_file(out_dir + "/" + name + ".json", text);
  }
  for (const auto& [name, content] : out.files) {
    const bool is_csv = name.size() > 4 && name.substr(name.size() - 4) == ".csv";
    const bool is_svg = name.size() > 4 && name.substr(name.size() - 4) == ".svg";
    const bool is_json = name.size() > 5 && name.substr(name.size() - 5) == ".json";
    if ((is_csv && formats.count("csv") == 0) || (is_svg && formats.count("svg") == 0) ||
        (is_json && formats.count("json") == 0)) {
      continue;
    }
    write_text_file(out_dir + "/" + name, content);
  }
  return text;
}

}  // namespace qcmean
