// oselab: run sketching experiments and write their CSV records.
#include "ose/csv.hpp"
#include "ose/errors.hpp"
#include "ose/experiment_config.hpp"
#include "ose/sweeps.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> settings;
  bool explicit_gaussian = false;
  bool allow_small_n = false;
};

void add_common_flags(CLI::App& sub, Flags& flags) {
  sub.add_option("--config", flags.config_path, "key=value file applied before the other flags");
  const std::vector<std::pair<std::string, std::string>> keyed{
      {"out", "output CSV path (default stdout)"}, {"seed", "master seed"},
      {"trials", "trials per cell"},               {"n", "ambient dimensions, comma separated"},
      {"d", "subspace dimensions"},                {"m", "sketch row counts"},
      {"s", "column sparsities"},                  {"eps", "distortion levels in (0, 1)"},
      {"threads", "worker threads (0 = all cores)"},
  };
  for (const auto& [key, help] : keyed) {
    sub.add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& value) { flags.settings[key] = value; }, help);
  }
  sub.add_flag("--explicit-gaussian", flags.explicit_gaussian,
               "materialize Gaussian sketches instead of sampling the sketched basis directly");
  sub.add_flag("--allow-small-n", flags.allow_small_n, "permit n < 100 d^2 for basis-column instances");
}

ose::ExperimentConfig build_config(ose::SweepKind kind, const Flags& flags) {
  ose::ExperimentConfig config = ose::default_config(kind);
  if (!flags.config_path.empty()) {
    for (const auto& [key, value] : ose::read_key_value_file(flags.config_path)) {
      ose::apply_setting(config, key, value);
    }
  }
  for (const auto& [key, value] : flags.settings) ose::apply_setting(config, key, value);
  if (flags.explicit_gaussian) config.explicit_gaussian = true;
  if (flags.allow_small_n) config.allow_small_n = true;
  config.validate();
  return config;
}

// Opened before the sweep runs so a bad path fails fast.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw ose::InputError("cannot open output file: " + path);
  }

  bool to_stdout() const { return !file_.is_open(); }

  void write(const std::vector<ose::TrialRecord>& records) {
    std::ostream& out = to_stdout() ? std::cout : file_;
    ose::write_csv(out, records);
    out.flush();
    if (!out) throw ose::InputError("failed writing CSV output");
  }

 private:
  std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oblivious subspace embedding experiments"};
  app.require_subcommand(1);

  const std::vector<ose::SweepKind> kinds{ose::SweepKind::kDimFrontier, ose::SweepKind::kSparsityPhase,
                                          ose::SweepKind::kSparsityEps, ose::SweepKind::kLemmaSuite,
                                          ose::SweepKind::kRegressDemo};
  std::vector<Flags> flags(kinds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    auto* sub = app.add_subcommand(ose::to_string(kinds[i]));
    add_common_flags(*sub, flags[i]);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const auto config = build_config(kinds[i], flags[i]);
      Output output(config.output_path);
      if (kinds[i] == ose::SweepKind::kLemmaSuite) {
        const auto result = ose::run_lemma_suite(config);
        output.write(result.records);
        ose::print_lemma_summary(output.to_stdout() ? std::cerr : std::cout, result);
        return result.all_pass() ? 0 : 2;
      }
      output.write(ose::run_sweep(config));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "oselab: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
