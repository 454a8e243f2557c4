#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbmclt/verification.hpp"

namespace fbmclt::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default directory for reports.
inline constexpr const char* kOutDirEnv = "FBMCLT_OUT_DIR";

/// Fully resolved run configuration; every field has a default.
struct RunConfig {
  std::string subcommand;
  double hurst = 0.6;
  int dim = 1;
  std::string function = "gaussian-diff:1,2";
  std::optional<double> beta;  // defaults to 1/H - d
  std::string method = "both";
  std::string intervals = "0,1";
  std::string orders = "2";
  double n = 256.0;
  double t = 1.0;
  std::size_t paths = 2000;
  std::size_t grid = 16384;
  std::uint64_t seed = 20260917;
  double tolerance = 0.0;  // 0 selects the subcommand default
  bool quick = false;
  bool full = false;
  bool conjecture = false;
  bool metadata = false;
  std::string out;
  std::string samples;
  std::string config_file;
};

Json config_json(const RunConfig& config);

/// Parses "key = value" lines (blank lines and '#' comments ignored) into
/// command-line tokens "--key value"; boolean keys expand to "--key" when true.
std::vector<std::string> config_file_tokens(std::istream& in, const std::string& path);

/// Writes `text` to `path` through a temporary file and rename.
void write_atomically(const std::string& path, const std::string& text);

/// Parses argv and runs the selected subcommand. The JSON report goes to
/// `out` and, when requested, to a file. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbmclt::cli
