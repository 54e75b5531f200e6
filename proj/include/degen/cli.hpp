#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace degen {

struct RunConfig {
  std::string command;  // check, weights, limit, converge, fit, blowup, demo
  std::string example;  // demo name
  std::string model_path;
  std::string chart_path;
  std::string testfn_path;
  std::string masses_path;
  std::string out_path;
  std::string center;  // "E0,B1" or "E0,B1#label"
  std::optional<std::string> L_schedule;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  unsigned workers = 4;
  bool probe = false;   // allow charts with beta > 1
  int point_codim = 0;  // > 0 blows up a point on the center instead
};

enum ExitCode : int { kOk = 0, kValidation = 2, kNonSubLc = 3, kNumerical = 4 };

/// "1,10,100" or geometric "a:b:n"; must be nonempty and strictly increasing.
std::vector<double> parse_L_schedule(std::string_view text);

/// Column documentation for the convergence CSV.
std::string csv_columns_help();

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace degen
