#include "ose/csv.hpp"

#include "ose/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ose {

void TrialRecord::validate() const {
  if (failures > trials) throw InputError("trial record: failures exceed trials");
  if (!(ci_low <= fail_rate && fail_rate <= ci_high)) {
    throw InputError("trial record: fail_rate lies outside [ci_low, ci_high]");
  }
  if (sweep.find(',') != std::string::npos || aux_name.find(',') != std::string::npos) {
    throw InputError("trial record: text fields must not contain commas");
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

void write_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    r.validate();
    out << r.sweep << ',' << r.n << ',' << r.d << ',' << r.m << ',' << r.s << ',' << format_double(r.eps) << ','
        << r.trials << ',' << r.failures << ',' << format_double(r.fail_rate) << ',' << format_double(r.ci_low)
        << ',' << format_double(r.ci_high) << ',' << r.aux_name << ',' << format_double(r.aux_value) << ','
        << r.seed << '\n';
  }
  if (!out) throw Error("write_csv: stream write failed");
}

std::string to_csv(std::span<const TrialRecord> records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

namespace {

constexpr std::array<std::string_view, 14> kColumns = {
    "sweep", "n", "d", "m", "s", "eps", "trials", "failures", "fail_rate", "ci_low", "ci_high",
    "aux_name", "aux_value", "seed"};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_integer(std::string_view text, std::string_view column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError("read_csv: column '" + std::string(column) + "' has malformed value '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view text, std::string_view column) {
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  if (text == "nan") return NAN;
  double value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError("read_csv: column '" + std::string(column) + "' has malformed value '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("read_csv: missing header");
  const auto header = split(line);
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i >= header.size() || header[i] != kColumns[i]) {
      throw InputError("read_csv: header column " + std::to_string(i + 1) + " should be '" +
                       std::string(kColumns[i]) + "'");
    }
  }
  if (header.size() != kColumns.size()) throw InputError("read_csv: header has extra columns");

  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != kColumns.size()) throw InputError("read_csv: row has " + std::to_string(f.size()) + " fields");
    TrialRecord r;
    r.sweep = std::string(f[0]);
    r.n = parse_integer<std::size_t>(f[1], kColumns[1]);
    r.d = parse_integer<std::size_t>(f[2], kColumns[2]);
    r.m = parse_integer<std::size_t>(f[3], kColumns[3]);
    r.s = parse_integer<std::size_t>(f[4], kColumns[4]);
    r.eps = parse_real(f[5], kColumns[5]);
    r.trials = parse_integer<std::size_t>(f[6], kColumns[6]);
    r.failures = parse_integer<std::size_t>(f[7], kColumns[7]);
    r.fail_rate = parse_real(f[8], kColumns[8]);
    r.ci_low = parse_real(f[9], kColumns[9]);
    r.ci_high = parse_real(f[10], kColumns[10]);
    r.aux_name = std::string(f[11]);
    r.aux_value = parse_real(f[12], kColumns[12]);
    r.seed = parse_integer<std::uint64_t>(f[13], kColumns[13]);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace ose
