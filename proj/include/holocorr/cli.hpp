#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "holocorr/recurrence.hpp"

namespace holocorr::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes.
enum Exit : int {
  ok = 0,
  parse_failure = 1,
  condition_failure = 2,
  verification_failure = 3,
  caps_exceeded = 4,
  io_failure = 5,
};

/// Settings of one run, embedded in every artifact. The worker count is kept
/// out of the serialized form so that outputs match across worker counts.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  Caps caps;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  nlohmann::json parameters = nlohmann::json::object();
  unsigned workers = 1;
};

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ReturnReport& report, const RunConfig& config);

/// Binary PGM (P5) of cell masses on the grid, row 0 at the top, value
/// round(255 log1p(K c) / log1p(K)) with c the mass relative to the fullest cell.
std::string render_pgm(const AtomicMeasure& mu, const RasterGrid& grid, double gain = 1000.0);

/// Runs the command line `holocorr <subcommand> ...`; args excludes the
/// program name. Returns an Exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holocorr::cli
