#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qcmean/config.hpp"
#include "qcmean/report.hpp"

namespace qcmean {

/// Outcome of a subcommand: the JSON report body plus auxiliary files
/// (CSV/SVG) as name -> content. Writing to disk happens in the driver.
struct CommandOutput {
  RunReport report;
  std::vector<std::pair<std::string, std::string>> files;
};

CommandOutput cmd_gauge_check(const RunConfig& cfg);
CommandOutput cmd_bound(const RunConfig& cfg);
CommandOutput cmd_lemma31(const RunConfig& cfg);
CommandOutput cmd_extremal(const RunConfig& cfg);

/// Writes the envelope JSON and the auxiliary files selected by `formats`
/// ("json", "csv", "svg") into out_dir; returns the envelope text.
std::string write_outputs(const CommandOutput& out, const RunConfig& cfg,
                          const std::string& out_dir, const std::set<std::string>& formats);

}  // namespace qcmean
