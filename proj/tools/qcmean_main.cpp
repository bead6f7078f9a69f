#include <cstdio>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcmean/commands.hpp"

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        bool has_out, const std::vector<std::string>& formats, double alpha_n_override,
        bool has_alpha, std::uint64_t seed_override, bool has_seed) {
  using namespace qcmean;
  try {
    RunConfig cfg = load_config(config_path);
    if (has_alpha) cfg.params.alpha_n = alpha_n_override;
    if (has_seed) cfg.seed = seed_override;

    // flags override the config's own output block
    const std::string dir = has_out ? out_dir : (cfg.out_dir.empty() ? out_dir : cfg.out_dir);
    std::set<std::string> fmt(formats.begin(), formats.end());
    if (fmt.empty()) fmt.insert(cfg.formats.begin(), cfg.formats.end());
    if (fmt.empty()) fmt = {"json", "csv", "svg"};

    CommandOutput out;
    if (command == "gauge-check") {
      out = cmd_gauge_check(cfg);
    } else if (command == "bound") {
      out = cmd_bound(cfg);
    } else if (command == "lemma31") {
      out = cmd_lemma31(cfg);
    } else {
      out = cmd_extremal(cfg);
    }
    const std::string text = write_outputs(out, cfg, dir, fmt);
    std::fputs(text.c_str(), stdout);
    return out.report.exit_code;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "qcmean: config error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "qcmean: numerical failure: %s (partial %s)\n", e.what(),
                 format_double(e.partial()).c_str());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qcmean: error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcmean: gauge-constrained distortion estimates and extremal radial maps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> formats;
  double alpha_n = 1.0;
  std::uint64_t seed = 0;

  const std::vector<std::string> names = {"gauge-check", "bound", "lemma31", "extremal"};
  const std::vector<std::string> descriptions = {
      "classify the divergence conditions of a gauge and report equicontinuity",
      "evaluate the equicontinuity modulus over an x grid",
      "sweep the ring mean inequality over an epsilon grid",
      "solve the radial profile and emit the non-equicontinuity witness"};

  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (default: current)");
    sub->add_option("--format", formats, "output formats: json, csv, svg (default: all)")
        ->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->add_option("--alpha-n", alpha_n, "override the distortion constant alpha_n");
    sub->add_option("--seed", seed, "seed for sampled certificates");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) {
      const bool has_out = subs[i]->count("--out") > 0;
      const bool has_alpha = subs[i]->count("--alpha-n") > 0;
      const bool has_seed = subs[i]->count("--seed") > 0;
      return run(names[i], config_path, out_dir, has_out, formats, alpha_n, has_alpha, seed,
                 has_seed);
    }
  }
  return 2;
}
