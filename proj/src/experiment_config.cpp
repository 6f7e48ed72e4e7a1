#include "ose/experiment_config.hpp"

#include "ose/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ose {

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::kDimFrontier: return "dim-frontier";
    case SweepKind::kSparsityPhase: return "sparsity-phase";
    case SweepKind::kSparsityEps: return "sparsity-eps";
    case SweepKind::kLemmaSuite: return "lemma-suite";
    case SweepKind::kRegressDemo: return "regress-demo";
  }
  return "unknown";
}

SweepKind parse_sweep_kind(std::string_view name) {
  for (auto kind : {SweepKind::kDimFrontier, SweepKind::kSparsityPhase, SweepKind::kSparsityEps,
                    SweepKind::kLemmaSuite, SweepKind::kRegressDemo}) {
    if (to_string(kind) == name) return kind;
  }
  throw InputError("unknown sweep kind '" + std::string(name) + "'");
}

ExperimentConfig default_config(SweepKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case SweepKind::kDimFrontier:
      c.n = {12800};
      c.d = {10};
      c.eps = {0.1, 0.3};
      c.m = {25, 50, 100, 200, 400, 800, 1600, 3200, 6400, 12800};
      break;
    case SweepKind::kSparsityPhase:
      c.d = {20};
      c.eps = {0.3};
      c.s = {1, 2, 4, 8};
      c.m = {4, 40, 400, 4000, 40000};
      break;
    case SweepKind::kSparsityEps:
      c.d = {20};
      c.eps = {0.1, 0.2, 0.3, 0.5};
      c.s = {1, 2, 4, 8};
      c.m = {400};
      break;
    case SweepKind::kLemmaSuite:
      c.n = {2000};
      c.d = {20};
      c.eps = {0.5};
      c.m = {50, 200};
      break;
    case SweepKind::kRegressDemo:
      c.n = {20000};
      c.d = {5};
      c.eps = {0.2, 0.5};
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  auto positive = [](const auto& grid, const char* name) {
    for (auto v : grid) {
      if (!(v > 0)) throw InputError(std::string("grid '") + name + "' must contain positive values");
    }
  };
  positive(n, "n");
  positive(d, "d");
  positive(m, "m");
  positive(s, "s");
  positive(eps, "eps");
  for (double e : eps) {
    if (!(e < 1.0)) throw InputError("grid 'eps' values must lie in (0, 1)");
  }
  if (d.empty()) throw InputError("grid 'd' must not be empty");
  if (eps.empty()) throw InputError("grid 'eps' must not be empty");
  if (trials < 1) throw InputError("trials must be positive");
  const bool rate_sweep = kind == SweepKind::kDimFrontier || kind == SweepKind::kSparsityPhase ||
                          kind == SweepKind::kSparsityEps;
  if (rate_sweep && trials < 100) throw InputError("rate-estimation sweeps need at least 100 trials");
  if ((kind == SweepKind::kSparsityPhase || kind == SweepKind::kSparsityEps) && (s.empty() || m.empty())) {
    throw InputError("sparsity sweeps need non-empty 's' and 'm' grids");
  }
  if (kind == SweepKind::kDimFrontier && (m.empty() || n.empty())) {
    throw InputError("dim-frontier needs non-empty 'n' and 'm' grids");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError("malformed value '" + std::string(text) + "' for " + std::string(what));
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view what) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const T value = parse_number<T>(item, what);
    if (!(value > 0)) throw InputError("non-positive value in list for " + std::string(what));
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw InputError("malformed boolean '" + std::string(text) + "' for " + std::string(key));
}

}  // namespace

std::vector<std::size_t> parse_size_list(std::string_view text) { return parse_list<std::size_t>(text, "list"); }
std::vector<double> parse_double_list(std::string_view text) { return parse_list<double>(text, "list"); }

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str());
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  if (key == "n") {
    config.n = parse_list<std::size_t>(value, key);
  } else if (key == "d") {
    config.d = parse_list<std::size_t>(value, key);
  } else if (key == "m") {
    config.m = parse_list<std::size_t>(value, key);
  } else if (key == "s") {
    config.s = parse_list<std::size_t>(value, key);
  } else if (key == "eps") {
    config.eps = parse_list<double>(value, key);
  } else if (key == "trials") {
    config.trials = parse_number<std::size_t>(value, key);
  } else if (key == "seed") {
    config.master_seed = parse_number<std::uint64_t>(value, key);
  } else if (key == "out") {
    config.output_path = std::string(trim(value));
  } else if (key == "threads") {
    config.threads = parse_number<unsigned>(value, key);
  } else if (key == "explicit_gaussian") {
    config.explicit_gaussian = parse_bool(value, key);
  } else if (key == "allow_small_n") {
    config.allow_small_n = parse_bool(value, key);
  } else {
    throw InputError("unknown config key '" + std::string(key) + "'");
  }
}

}  // namespace ose
