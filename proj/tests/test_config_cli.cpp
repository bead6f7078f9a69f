#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qcmean/commands.hpp"
#include "qcmean/expression.hpp"

using namespace qcmean;
using nlohmann::json;

namespace {

RunConfig config_from(const std::string& text) {
  return parse_config(json::parse(text), ".");
}

std::filesystem::path scratch_dir() {
  auto p = std::filesystem::temp_directory_path() / "qcmean_unit";
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("expression parser") {
  const Expression e = Expression::parse("1 + x1*x2 - 2^2", 2);
  CHECK(e.eval(Point(std::vector<double>{3.0, 4.0})) == doctest::Approx(9.0));
  CHECK(e.uses_coordinates());

  const Expression rad = Expression::parse("1/r", 2);
  CHECK_FALSE(rad.uses_coordinates());
  CHECK(rad.eval_radial(0.25) == doctest::Approx(4.0));
  CHECK(rad.eval(Point(std::vector<double>{0.0, 0.5})) == doctest::Approx(2.0));

  CHECK(Expression::parse("max(min(x1, 2), sqrt(4))", 2)
            .eval(Point(std::vector<double>{10.0, 0.0})) == doctest::Approx(2.0));
  CHECK(Expression::parse("-2^2", 2).eval_radial(1.0) == doctest::Approx(-4.0));
  CHECK(Expression::parse("2^-2", 2).eval_radial(1.0) == doctest::Approx(0.25));
  CHECK(Expression::parse("(0-2)^2", 2).eval_radial(1.0) == doctest::Approx(4.0));
  CHECK(Expression::parse("2^3^2", 2).eval_radial(1.0) == doctest::Approx(512.0));
  CHECK(Expression::parse("exp(log(pi))", 2).eval_radial(1.0) ==
        doctest::Approx(3.14159265358979).epsilon(1e-12));

  CHECK_THROWS_AS(Expression::parse("x3", 2), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("1 +", 2), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("foo(1)", 2), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("x1", 2).eval_radial(1.0), std::invalid_argument);
}

TEST_CASE("gauge spec grammar") {
  CHECK(parse_gauge(json::parse(R"({"family":"exp","beta":1,"q":1})")).eval(2.0) ==
        doctest::Approx(std::exp(2.0)));
  CHECK(parse_gauge(json::parse(R"({"family":"power","c":1,"alpha":2})")).eval(3.0) ==
        doctest::Approx(9.0));
  CHECK(parse_gauge(json::parse(R"({"family":"table","points":[[0,1],[2,1],[2,5]]})")).eval(1.0) ==
        doctest::Approx(1.0));
  const Gauge aff = parse_gauge(
      json::parse(R"({"family":"affine","alpha":2,"beta":1,"inner":{"family":"identity"}})"));
  CHECK(aff.eval(3.0) == doctest::Approx(7.0));

  CHECK_THROWS_AS(parse_gauge(json::parse(R"({"family":"nope"})")), ConfigError);
  CHECK_THROWS_AS(parse_gauge(json::parse(R"({"family":"power"})")), ConfigError);
}

TEST_CASE("field spec grammar") {
  const auto c = parse_field(json::parse(R"({"kind":"constant","c":2})"), 2, ".");
  CHECK(c.eval(Point::origin(2)) == doctest::Approx(2.0));

  const auto r = parse_field(
      json::parse(R"({"kind":"radial","profile":"1/r","center":[0,0]})"), 2, ".");
  CHECK(r.eval(Point(std::vector<double>{0.5, 0.0})) == doctest::Approx(2.0));

  const auto a = parse_field(json::parse(R"({"kind":"analytic","expr":"1+x1"})"), 2, ".");
  CHECK(a.eval(Point(std::vector<double>{0.25, 0.0})) == doctest::Approx(1.25));

  // grid CSV round trip
  const auto dir = scratch_dir();
  const auto csv = dir / "q.csv";
  {
    std::ofstream out(csv);
    out << "# x1,x2,value\n";
    for (double x : {0.0, 1.0}) {
      for (double y : {0.0, 1.0}) out << x << "," << y << "," << (1.0 + x + y) << "\n";
    }
  }
  const auto g = parse_field(json::parse(R"({"kind":"grid","file":")" + csv.string() + R"("})"),
                             2, ".");
  CHECK(g.eval(Point(std::vector<double>{0.5, 0.5})) == doctest::Approx(2.0));

  CHECK_THROWS_AS(parse_field(json::parse(R"({"kind":"radial","profile":"1+x1"})"), 2, "."),
                  ConfigError);
  CHECK_THROWS_AS(parse_field(json::parse(R"({"kind":"?"})"), 2, "."), ConfigError);
}

TEST_CASE("config hashing is canonical") {
  const auto a = json::parse(R"({"dim":2,"gauge":{"family":"identity"}})");
  const auto b = json::parse(R"({"gauge":{"family":"identity"},"dim":2})");
  const auto c = json::parse(R"({"dim":3,"gauge":{"family":"identity"}})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash_hex(a).size() == 16);
}

TEST_CASE("gauge-check command") {
  const RunConfig exp_cfg = config_from(R"({"dim":2,"gauge":{"family":"exp","beta":1,"q":1}})");
  const CommandOutput out = cmd_gauge_check(exp_cfg);
  CHECK(out.report.body["overall"] == "equicontinuous");
  CHECK(out.report.body["slope_nondecreasing"] == true);
  CHECK(out.report.body["convexity_sampled"]["ok"] == true);

  const RunConfig pow_cfg = config_from(R"({"dim":2,"gauge":{"family":"power","alpha":2}})");
  CHECK(cmd_gauge_check(pow_cfg).report.body["overall"] == "not-equicontinuous");

  const RunConfig const_cfg = config_from(R"({"dim":2,"gauge":{"family":"constant","c":3}})");
  CHECK_THROWS_AS(cmd_gauge_check(const_cfg), ConfigError);

  const RunConfig missing = config_from(R"({"dim":2})");
  CHECK_THROWS_AS(cmd_gauge_check(missing), ConfigError);

  // bounded table gauges classify without errors: every condition converges
  const RunConfig table_cfg = config_from(
      R"({"dim":2,"gauge":{"family":"table","points":[[0,1],[2,1],[2,5]]}})");
  const CommandOutput tout = cmd_gauge_check(table_cfg);
  CHECK(tout.report.errors.empty());
  CHECK(tout.report.body["overall"] == "not-equicontinuous");
}

TEST_CASE("bound command produces a monotone column and echoes alpha_n") {
  RunConfig cfg = config_from(R"({
    "dim": 2,
    "gauge": {"family":"exp","beta":1,"q":1},
    "field": {"kind":"constant","c":1},
    "params": {"delta":0.9,"mass":1,"alpha_n":0.25,"rho":0.5,"p":1},
    "sweep": {"x":[[0.002,0],[0.01,0],[0.05,0],[0.2,0]]}
  })");
  const CommandOutput out = cmd_bound(cfg);
  CHECK(out.report.exit_code == 0);
  CHECK(out.report.body["params"]["alpha_n"] == doctest::Approx(0.25));
  double prev = 0.0;
  for (const auto& row : out.report.body["rows"]) {
    REQUIRE(row.contains("bound"));
    const double b = row["bound"].get<double>();
    CHECK(b >= prev - 1e-13);
    prev = b;
  }

  RunConfig empty = cfg;
  empty.x_grid.clear();
  CHECK_THROWS_AS(cmd_bound(empty), ConfigError);
}

TEST_CASE("bound command about the point at infinity") {
  const RunConfig cfg = config_from(R"({
    "dim": 2,
    "gauge": {"family":"exp","beta":1,"q":1},
    "params": {"delta":0.9,"mass":1,"alpha_n":0.25,"rho":0.5,"x0":"inf"},
    "sweep": {"x":[[200,0],[50,0],[10,0]]}
  })");
  const CommandOutput out = cmd_bound(cfg);
  CHECK(out.report.exit_code == 0);
  // the inverted distances 1/200 < 1/50 < 1/10 order the bounds upwards
  double prev = 0.0;
  for (const auto& row : out.report.body["rows"]) {
    REQUIRE(row.contains("bound"));
    const double b = row["bound"].get<double>();
    CHECK(b >= prev - 1e-13);
    prev = b;
  }
}

TEST_CASE("bound command lifts gauges vanishing at zero") {
  const RunConfig cfg = config_from(R"({
    "dim": 2,
    "gauge": {"family":"power","alpha":2},
    "params": {"delta":0.9,"mass":1,"rho":0.5},
    "sweep": {"x":[[0.01,0]]}
  })");
  const CommandOutput out = cmd_bound(cfg);
  CHECK(out.report.body.contains("gauge_lift"));
  CHECK(out.report.body["gauge_lift"]["mass_after"].get<double>() > 1.0);
}

TEST_CASE("lemma31 command sweeps the epsilon grid") {
  const RunConfig cfg = config_from(R"({
    "dim": 2,
    "gauge": {"family":"exp","beta":1,"q":1},
    "field": {"kind":"constant","c":1},
    "params": {"p":1},
    "sweep": {"epsilon":[0.8,0.5,0.25,0.1]}
  })");
  const CommandOutput out = cmd_lemma31(cfg);
  CHECK(out.report.exit_code == 0);
  for (const auto& row : out.report.body["rows"]) {
    CHECK(row["verdict"] == true);
  }
  // eps >= e^{-1/2} ~ 0.6065 degenerates the tail range
  CHECK(out.report.body["rows"][0]["rhs"].get<double>() == 0.0);
  CHECK(out.report.body["rows"][2]["rhs"].get<double>() > 0.0);

  // lambda mode adds the floored column
  RunConfig with_lambda = cfg;
  with_lambda.lambda = 0.5;
  const CommandOutput star = cmd_lemma31(with_lambda);
  CHECK(star.report.body["rows"][3].contains("lhs_star"));
  CHECK(star.report.body["rows"][3]["verdict_star"] == true);
}

TEST_CASE("extremal command emits profile, witness, mass and plot data") {
  const RunConfig cfg = config_from(R"({
    "dim": 2,
    "gauge": {"family":"identity"},
    "params": {"delta":0.3},
    "sweep": {"m":[2,10], "witness_delta":[0.5,0.125]}
  })");
  const CommandOutput out = cmd_extremal(cfg);
  CHECK(out.report.body["gamma"].get<double>() == doctest::Approx(1.0));
  CHECK(out.report.body["I0"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& row : out.report.body["witness"]) {
    CHECK(row["separated"] == true);
    CHECK(row["min_abs_f"].get<double>() >= 1.0 - 1e-12);
  }
  for (const auto& row : out.report.body["mass"]) {
    CHECK(row["ok"] == true);
  }
  bool has_profile = false, has_svg = false;
  for (const auto& [name, content] : out.files) {
    if (name == "extremal_profile.csv") {
      has_profile = true;
      CHECK(content.rfind("r,K,K_m,I,R,R_m\n", 0) == 0);
    }
    if (name == "extremal_plot.svg") {
      has_svg = true;
      CHECK(content.find("<svg") != std::string::npos);
    }
  }
  CHECK(has_profile);
  CHECK(has_svg);

  // growth failure surfaces as a config error
  const RunConfig bad = config_from(R"({"dim":2,"gauge":{"family":"constant","c":2}})");
  CHECK_THROWS_AS(cmd_extremal(bad), ConfigError);
}

TEST_CASE("parallel sweeps stay deterministic on larger grids") {
  nlohmann::json j = json::parse(R"({
    "dim": 2,
    "gauge": {"family":"exp","beta":1,"q":1},
    "field": {"kind":"constant","c":1},
    "params": {"p":1},
    "sweep": {"epsilon": []}
  })");
  for (int i = 0; i < 40; ++i) j["sweep"]["epsilon"].push_back(0.5 * std::pow(0.93, i));
  std::sort(j["sweep"]["epsilon"].begin(), j["sweep"]["epsilon"].end());
  const RunConfig cfg = parse_config(j, ".");
  const CommandOutput a = cmd_lemma31(cfg);
  const CommandOutput b = cmd_lemma31(cfg);
  CHECK(a.report.body.dump() == b.report.body.dump());
  CHECK(a.files == b.files);
}

TEST_CASE("extremal command in dimension 3") {
  const RunConfig cfg = config_from(R"({
    "dim": 3,
    "gauge": {"family":"power","alpha":2},
    "sweep": {"m":[2,8], "witness_delta":[0.5], "radii":[0.01,0.1,0.5,1.0]}
  })");
  const CommandOutput out = cmd_extremal(cfg);
  for (const auto& row : out.report.body["mass"]) CHECK(row["ok"] == true);
  for (const auto& row : out.report.body["witness"]) CHECK(row["separated"] == true);
  bool has_svg = false;
  for (const auto& [name, content] : out.files) {
    if (name == "extremal_plot.svg") has_svg = true;
  }
  CHECK_FALSE(has_svg);  // plots are plane-only
}

TEST_CASE("command outputs are deterministic") {
  const std::string text = R"({
    "dim": 2,
    "gauge": {"family":"identity"},
    "sweep": {"m":[2,8], "witness_delta":[0.5]}
  })";
  const CommandOutput a = cmd_extremal(config_from(text));
  const CommandOutput b = cmd_extremal(config_from(text));
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].first == b.files[i].first);
    CHECK(a.files[i].second == b.files[i].second);
  }
  CHECK(a.report.body.dump() == b.report.body.dump());

  const RunConfig cfg = config_from(text);
  const auto dir = scratch_dir() / "det";
  const std::string env1 = write_outputs(a, cfg, dir.string(), {"json", "csv", "svg"});
  const std::string env2 = write_outputs(b, cfg, dir.string(), {"json", "csv", "svg"});
  CHECK(env1 == env2);
}

TEST_CASE("process exit codes: 0 ok, 2 config error, 3 numerical failure") {
  const char* bin = std::getenv("QCMEAN_BIN");
  if (bin == nullptr) return;  // only meaningful when ctest provides the binary
  const auto dir = scratch_dir() / "exit_codes";
  std::filesystem::create_directories(dir);

  auto run = [&](const std::string& cmd, const std::string& cfg_text) {
    const auto cfg = dir / "cfg.json";
    std::ofstream(cfg) << cfg_text;
    const std::string command = std::string(bin) + " " + cmd + " --config " + cfg.string() +
                                " --out " + (dir / "out").string() + " > /dev/null 2>&1";
    const int rc = std::system(command.c_str());
    return WEXITSTATUS(rc);
  };

  CHECK(run("gauge-check", R"({"dim":2,"gauge":{"family":"exp","beta":1,"q":1}})") == 0);
  CHECK(run("gauge-check", R"({"dim":2,"gauge":{"family":"constant","c":1}})") == 2);
  CHECK(run("lemma31", R"({"dim":2})") == 2);

  // one ring contains a non-integrable singularity: that row fails, the run
  // continues and exits 3 with the partial report written
  const int rc = run("lemma31", R"json({
    "dim": 2,
    "gauge": {"family":"affine","alpha":1,"beta":1,"inner":{"family":"identity"}},
    "field": {"kind":"radial","profile":"1/((r-0.3)^2)","center":[0,0]},
    "params": {"p":1},
    "sweep": {"epsilon":[0.5,0.25]}
  })json");
  CHECK(rc == 3);
  std::ifstream report(dir / "out" / "lemma31.json");
  REQUIRE(report.good());
  json j;
  report >> j;
  CHECK(j["status"] == "numerical-failure");
  CHECK(j["report"]["rows"][0]["verdict"] == true);     // the clean row survived
  CHECK(j["report"]["rows"][1].contains("error"));      // the singular row is flagged
}

TEST_CASE("report envelope carries version, hash and tolerances") {
  const RunConfig cfg = config_from(R"({"dim":2,"gauge":{"family":"identity"}})");
  CommandOutput out = cmd_gauge_check(cfg);
  out.report.config_hash = config_hash_hex(cfg.raw);
  const auto env = out.report.envelope(cfg.tol, cfg.divergence);
  CHECK(env["tool"] == "qcmean");
  CHECK(env["version"] == tool_version());
  CHECK(env["config_hash"] == config_hash_hex(cfg.raw));
  CHECK(env["tolerances"]["quadrature_rel"].get<double>() == doctest::Approx(1e-9));
  CHECK(env["tolerances"]["root_tol"].get<double>() == doctest::Approx(1e-12));
}

TEST_CASE("json number helper keeps infinities readable") {
  CHECK(json_number(1.5).is_number());
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}
