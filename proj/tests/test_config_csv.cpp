#include "ose/csv.hpp"
#include "ose/errors.hpp"
#include "ose/experiment_config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace ose;

namespace {

TrialRecord sample_record() {
  TrialRecord r;
  r.sweep = "dim-frontier";
  r.n = 12800;
  r.d = 10;
  r.m = 400;
  r.s = 0;
  r.eps = 0.1;
  r.trials = 1000;
  r.failures = 37;
  r.fail_rate = 0.037;
  r.ci_low = 0.0269;
  r.ci_high = 0.0507;
  r.aux_name = "median_kappa";
  r.aux_value = 1.3033070621835177;
  r.seed = 18446744073709551615ull;
  return r;
}

}  // namespace

TEST(Csv, HeaderIsExact) {
  const std::vector<TrialRecord> none;
  EXPECT_EQ(to_csv(none), "sweep,n,d,m,s,eps,trials,failures,fail_rate,ci_low,ci_high,aux_name,aux_value,seed\n");
}

TEST(Csv, RoundTripIsLossless) {
  std::vector<TrialRecord> rows{sample_record(), sample_record()};
  rows[1].aux_value = std::numeric_limits<double>::infinity();
  rows[1].eps = 0.30000000000000004;
  const std::string text = to_csv(rows);
  std::istringstream in(text);
  const auto back = read_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].seed, rows[0].seed);
  EXPECT_EQ(back[0].aux_value, rows[0].aux_value);
  EXPECT_EQ(back[1].eps, rows[1].eps);
  EXPECT_TRUE(std::isinf(back[1].aux_value));
  EXPECT_EQ(to_csv(back), text);
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Csv, MismatchedHeaderNamesTheColumn) {
  std::istringstream in("sweep,n,d,m,s,epsilon,trials,failures,fail_rate,ci_low,ci_high,aux_name,aux_value,seed\n");
  try {
    read_csv(in);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("eps"), std::string::npos);
  }
}

TEST(Csv, InvalidRecordsAreRejected) {
  auto r = sample_record();
  r.failures = 2000;
  std::vector<TrialRecord> rows{r};
  EXPECT_THROW(to_csv(rows), InputError);
  r = sample_record();
  r.ci_low = 0.05;
  rows = {r};
  EXPECT_THROW(to_csv(rows), InputError);
}

TEST(Config, DefaultsAndValidation) {
  const auto c = default_config(SweepKind::kDimFrontier);
  EXPECT_EQ(c.m.front(), 25u);
  EXPECT_EQ(c.m.back(), 12800u);
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.trials = 99;
  EXPECT_THROW(bad.validate(), InputError);
  bad = c;
  bad.eps = {1.0};
  EXPECT_THROW(bad.validate(), InputError);
  bad = c;
  bad.d = {0};
  EXPECT_THROW(bad.validate(), InputError);
  for (auto k : {SweepKind::kDimFrontier, SweepKind::kSparsityPhase, SweepKind::kSparsityEps,
                 SweepKind::kLemmaSuite, SweepKind::kRegressDemo}) {
    EXPECT_EQ(parse_sweep_kind(to_string(k)), k);
    EXPECT_NO_THROW(default_config(k).validate());
  }
  EXPECT_THROW(parse_sweep_kind("nope"), InputError);
}

TEST(Config, ListsAndKeyValues) {
  EXPECT_EQ(parse_size_list("1,2, 40"), (std::vector<std::size_t>{1, 2, 40}));
  EXPECT_EQ(parse_double_list("0.1,0.5"), (std::vector<double>{0.1, 0.5}));
  EXPECT_THROW(parse_size_list("1,,2"), InputError);
  EXPECT_THROW(parse_size_list("-3"), InputError);
  EXPECT_THROW(parse_size_list("0"), InputError);
  EXPECT_THROW(parse_double_list("abc"), InputError);

  const auto kv = parse_key_values("# grid\nd=5,6\n\neps = 0.2\n");
  EXPECT_EQ(kv.at("d"), "5,6");
  EXPECT_EQ(kv.at("eps"), "0.2");

  ExperimentConfig c = default_config(SweepKind::kSparsityPhase);
  for (const auto& [k, v] : kv) apply_setting(c, k, v);
  apply_setting(c, "seed", "7");
  apply_setting(c, "trials", "150");
  EXPECT_EQ(c.d, (std::vector<std::size_t>{5, 6}));
  EXPECT_EQ(c.master_seed, 7u);
  EXPECT_EQ(c.trials, 150u);
  EXPECT_THROW(apply_setting(c, "colour", "red"), InputError);
}

TEST(Config, ReadsFile) {
  const auto path = std::filesystem::temp_directory_path() / "ose_config_test.cfg";
  {
    std::ofstream out(path);
    out << "m=10,20\ntrials=200\n";
  }
  const auto kv = read_key_value_file(path);
  EXPECT_EQ(kv.at("m"), "10,20");
  std::filesystem::remove(path);
  EXPECT_THROW(read_key_value_file(path), InputError);
}
