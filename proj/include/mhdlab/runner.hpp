#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhd::cli {

inline constexpr const char* kVersion = "mhdlab 1.0.0";

enum ExitCode : int { ok = 0, failure = 1, nan_abort = 2, not_admissible = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key=value configuration. Keys are checked against a fixed schema;
/// values are type-checked when set. Unset keys read their defaults.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig parse(std::istream& in, const std::string& origin = "<config>");
  static RunConfig parse_file(const std::filesystem::path& path);

  /// Applies one "key=value" override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string str(const std::string& key) const;
  double num(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<int> int_list(const std::string& key) const;

  /// Every schema key with its resolved value, sorted, one per line.
  std::string frozen() const;

  /// Known keys and their defaults.
  static const std::map<std::string, std::string>& defaults();

 private:
  std::map<std::string, std::string> values_;
};

struct RunOptions {
  bool allow_nonadmissible = false;
  int jobs = 1;
  std::optional<std::filesystem::path> output_root;  // overrides the environment
  std::ostream* log = nullptr;                       // progress messages
};

struct RunResult {
  int exit_code = ExitCode::ok;
  std::filesystem::path run_dir;
  std::string message;
};

/// Output root: options, then MHDLAB_OUTPUT_ROOT, then output.root.
std::filesystem::path output_root(const RunConfig& cfg, const RunOptions& opts);

RunResult simulate(const RunConfig& cfg, const RunOptions& opts);
RunResult identities(const RunConfig& cfg, const RunOptions& opts);
RunResult stationary(const RunConfig& cfg, const RunOptions& opts);
RunResult bench_estimates(const RunConfig& cfg, const RunOptions& opts);
/// Fits the a priori constants to a run's diagnostics; optionally compares
/// against a second run and a golden diagnostics file.
RunResult report(const std::filesystem::path& run_dir, const std::optional<std::filesystem::path>& against,
                 const std::optional<std::filesystem::path>& golden, const RunOptions& opts);

}  // namespace mhd::cli
