#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ose {

enum class SweepKind { kDimFrontier, kSparsityPhase, kSparsityEps, kLemmaSuite, kRegressDemo };

std::string to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view name);

/// Grid and seeding for one sweep. Empty n or m grids mean "derive from the
/// other parameters" (see each sweep).
struct ExperimentConfig {
  SweepKind kind = SweepKind::kDimFrontier;
  std::vector<std::size_t> n;
  std::vector<std::size_t> d;
  std::vector<std::size_t> m;
  std::vector<std::size_t> s;
  std::vector<double> eps;
  std::size_t trials = 1000;
  std::uint64_t master_seed = 42;
  std::string output_path;  // empty writes to stdout
  unsigned threads = 0;  // 0 uses every hardware thread
  bool explicit_gaussian = false;
  bool allow_small_n = false;

  /// Throws InputError on non-positive grid values, eps outside (0, 1), or
  /// fewer than 100 trials for rate-estimation sweeps.
  void validate() const;
};

ExperimentConfig default_config(SweepKind kind);

/// Parses "a,b,c" lists; throws InputError on malformed or non-positive entries.
std::vector<std::size_t> parse_size_list(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);

/// Parses key=value lines. Blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

/// Applies one setting. Keys: n, d, m, s, eps, trials, seed, out, threads,
/// explicit_gaussian, allow_small_n. Throws InputError on unknown keys.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

}  // namespace ose
