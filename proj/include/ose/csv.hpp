#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ose {

inline constexpr std::string_view kCsvHeader =
    "sweep,n,d,m,s,eps,trials,failures,fail_rate,ci_low,ci_high,aux_name,aux_value,seed";

/// One CSV row. s = 0 marks a dense (Gaussian or identity) sketch.
struct TrialRecord {
  std::string sweep;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t s = 0;
  double eps = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double fail_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string aux_name;
  double aux_value = 0.0;
  std::uint64_t seed = 0;

  /// Throws InputError unless failures <= trials and ci_low <= fail_rate <= ci_high.
  void validate() const;
};

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Header plus one LF-terminated line per record; validates each record first.
void write_csv(std::ostream& out, std::span<const TrialRecord> records);
std::string to_csv(std::span<const TrialRecord> records);

/// Inverse of write_csv. Throws InputError naming the offending column when the
/// header differs from kCsvHeader or a field does not parse.
std::vector<TrialRecord> read_csv(std::istream& in);

}  // namespace ose
