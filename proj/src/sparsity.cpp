#include "ose/sparsity.hpp"

#include "ose/errors.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

namespace ose {

std::vector<ColumnProfile> max_coordinate_profile(const DenseMatrix& sketched) {
  if (!sketched.allFinite()) throw InputError("max_coordinate_profile: non-finite entries");
  const Eigen::Index m = sketched.rows();
  std::vector<ColumnProfile> out;
  out.reserve(static_cast<std::size_t>(sketched.cols()));
  for (Eigen::Index c = 0; c < sketched.cols(); ++c) {
    const auto col = sketched.col(c);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < m; ++i) {
      if (std::abs(col(i)) > std::abs(col(best))) best = i;
    }
    if (col(best) == 0.0) {
      throw DegeneracyError("max_coordinate_profile: column " + std::to_string(c) + " is zero");
    }
    ColumnProfile profile;
    profile.column = static_cast<std::size_t>(c);
    profile.row = static_cast<std::size_t>(best);
    profile.value = col(best);
    profile.rest.resize(m - 1);
    profile.rest.head(best) = col.head(best);
    profile.rest.tail(m - 1 - best) = col.tail(m - 1 - best);
    out.push_back(std::move(profile));
  }
  return out;
}

std::vector<double> signed_row_fractions(const SketchMatrix& sketch) {
  const std::size_t m = sketch.rows();
  const std::size_t n = sketch.cols();
  std::vector<std::size_t> counts(2 * m, 0);
  for (std::size_t j = 0; j < n; ++j) {
    switch (sketch.kind()) {
      case SketchKind::kIdentity: ++counts[signed_class(j, 1.0)]; break;
      case SketchKind::kSparse: {
        const auto rows = sketch.column_rows(j);
        const auto vals = sketch.column_values(j);
        std::size_t best = 0;
        for (std::size_t k = 1; k < rows.size(); ++k) {
          // rows are ascending, so strict comparison keeps the lowest row on ties
          if (std::abs(vals[k]) > std::abs(vals[best])) best = k;
        }
        ++counts[signed_class(rows[best], vals[best])];
        break;
      }
      case SketchKind::kGaussian: {
        const auto col = sketch.dense().col(static_cast<Eigen::Index>(j));
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < col.size(); ++i) {
          if (std::abs(col(i)) > std::abs(col(best))) best = i;
        }
        ++counts[signed_class(static_cast<std::size_t>(best), col(best))];
        break;
      }
    }
  }
  std::vector<double> p(2 * m);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
  return p;
}

CollisionStats collision_stats(std::span<const ColumnProfile> profiles, std::span<const double> p) {
  if (profiles.empty()) throw InputError("collision_stats: no profiles");
  const std::size_t m = static_cast<std::size_t>(profiles.front().rest.size()) + 1;
  if (p.size() != 2 * m) {
    throw ShapeError("collision_stats: expected " + std::to_string(2 * m) + " class fractions, got " +
                     std::to_string(p.size()));
  }
  double total = 0.0;
  double square_sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InputError("collision_stats: negative class fraction");
    total += x;
    square_sum += x * x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("collision_stats: class fractions must sum to 1");

  CollisionStats stats;
  stats.d = profiles.size();
  stats.class_sizes.assign(2 * m, 0);
  stats.members.assign(2 * m, {});
  for (const auto& prof : profiles) {
    if (static_cast<std::size_t>(prof.rest.size()) + 1 != m) throw ShapeError("collision_stats: ragged profiles");
    const std::size_t k = signed_class(prof.row, prof.value);
    ++stats.class_sizes[k];
    stats.members[k].push_back(prof.column);
  }
  for (std::size_t size : stats.class_sizes) {
    if (size > 1) stats.collisions += size * (size - 1) / 2;
  }
  stats.p.assign(p.begin(), p.end());
  const double d = static_cast<double>(stats.d);
  stats.expected_collisions = d * (d - 1.0) / 2.0 * square_sum;
  return stats;
}

std::vector<ColumnPair> extract_disjoint_pairs(const CollisionStats& stats) {
  std::vector<ColumnPair> pairs;
  for (const auto& members : stats.members) {
    for (std::size_t i = 0; i + 1 < members.size(); i += 2) pairs.emplace_back(members[i], members[i + 1]);
  }
  return pairs;
}

GroupSet extract_groups(const CollisionStats& stats, std::size_t t) {
  if (t < 2) throw InputError("extract_groups: group size must be at least 2");
  GroupSet out;
  out.group_size = t;
  for (std::size_t k = 0; k < stats.members.size(); ++k) {
    const auto& members = stats.members[k];
    for (std::size_t start = 0; start + t <= members.size(); start += t) {
      out.groups.push_back(Group{k, {members.begin() + static_cast<std::ptrdiff_t>(start),
                                     members.begin() + static_cast<std::ptrdiff_t>(start + t)}});
    }
  }
  return out;
}

StressNorm stress_vector_norm(const DenseMatrix& sketched, std::span<const std::size_t> group) {
  const std::size_t t = group.size();
  if (t < 2) throw InputError("stress_vector_norm: group must have at least 2 members");
  for (std::size_t i : group) {
    if (i >= static_cast<std::size_t>(sketched.cols())) throw ShapeError("stress_vector_norm: index out of range");
  }
  Vector combined = Vector::Zero(sketched.rows());
  for (std::size_t i : group) combined += sketched.col(static_cast<Eigen::Index>(i));
  const double td = static_cast<double>(t);
  StressNorm out;
  out.direct = combined.squaredNorm() / td;

  double norms = 0.0;
  double cross = 0.0;
  for (std::size_t a = 0; a < t; ++a) {
    const auto ua = sketched.col(static_cast<Eigen::Index>(group[a]));
    norms += ua.squaredNorm();
    for (std::size_t b = a + 1; b < t; ++b) cross += ua.dot(sketched.col(static_cast<Eigen::Index>(group[b])));
  }
  out.expansion = norms / td + 2.0 / td * cross;
  return out;
}

StressNorm stress_vector_norm(const DenseMatrix& sketched, const ColumnPair& pair) {
  const std::array<std::size_t, 2> group{pair.first, pair.second};
  return stress_vector_norm(sketched, group);
}

bool InnerProductReport::any_flag() const {
  return mean_flagged || std::any_of(tails.begin(), tails.end(), [](const TailCheck& t) { return t.flagged; });
}

InnerProductReport inner_product_statistics(std::span<const double> samples, std::span<const double> deltas) {
  if (samples.empty()) throw InputError("inner_product_statistics: no samples");
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) {
    if (!(std::abs(x) <= 1.0 + 1e-12)) throw InputError("inner_product_statistics: |X| exceeds 1");
    sum += x;
  }
  InnerProductReport report;
  report.samples = samples.size();
  report.mean = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - report.mean) * (x - report.mean);
  report.standard_error = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  report.mean_flagged = report.mean < -4.0 * report.standard_error;

  for (double delta : deltas) {
    if (!(delta > 0.0 && delta <= 1.0)) throw InputError("inner_product_statistics: delta must lie in (0, 1]");
    std::size_t below = 0;
    for (double x : samples) {
      if (x <= -delta) ++below;
    }
    TailCheck tail;
    tail.delta = delta;
    tail.empirical = static_cast<double>(below) / n;
    tail.bound = 1.0 / (1.0 + delta);
    tail.standard_error = std::sqrt(tail.bound * (1.0 - tail.bound) / n);
    tail.flagged = tail.empirical > tail.bound + 4.0 * tail.standard_error;
    report.tails.push_back(tail);
  }
  return report;
}

InnerProductReport inner_product_lemma_check(std::span<const VectorPair> samples, std::span<const double> deltas) {
  std::vector<double> dots;
  dots.reserve(samples.size());
  for (const auto& pair : samples) {
    if (pair.u.size() != pair.v.size()) throw ShapeError("inner_product_lemma_check: ragged pair");
    if (pair.u.norm() > 1.0 + 1e-12 || pair.v.norm() > 1.0 + 1e-12) {
      throw InputError("inner_product_lemma_check: vector norm exceeds 1");
    }
    dots.push_back(std::clamp(pair.u.dot(pair.v), -1.0, 1.0));
  }
  return inner_product_statistics(dots, deltas);
}

namespace {

double compensated_total(std::span<const double> p) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : p) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

void validate_distribution(std::span<const double> p, double tol, const char* who) {
  if (p.empty()) throw InputError(std::string(who) + ": empty probability vector");
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InputError(std::string(who) + ": negative or non-finite mass");
  }
  if (std::abs(compensated_total(p) - 1.0) > tol) throw InputError(std::string(who) + ": masses must sum to 1");
}

}  // namespace

std::vector<std::size_t> assign_balls(std::size_t d, std::size_t m, std::optional<std::span<const double>> p,
                                      std::uint64_t seed) {
  if (m < 1) throw InputError("throw_balls: need at least one bin");
  Rng rng(seed);
  std::vector<std::size_t> bins(d);
  if (!p) {
    for (auto& b : bins) b = static_cast<std::size_t>(rng.below(m));
    return bins;
  }
  if (p->size() != m) throw ShapeError("throw_balls: probability vector must have m entries");
  validate_distribution(*p, 1e-10, "throw_balls");
  std::discrete_distribution<std::size_t> pick(p->begin(), p->end());
  for (auto& b : bins) b = pick(rng);
  return bins;
}

std::vector<std::size_t> throw_balls(std::size_t d, std::size_t m, std::optional<std::span<const double>> p,
                                     std::uint64_t seed) {
  std::vector<std::size_t> loads(m, 0);
  for (std::size_t b : assign_balls(d, m, p, seed)) ++loads[b];
  return loads;
}

std::size_t bins_with_load_at_least(std::span<const std::size_t> loads, std::size_t t) {
  return static_cast<std::size_t>(std::count_if(loads.begin(), loads.end(), [t](std::size_t x) { return x >= t; }));
}

double expected_bins_with_load_at_least(std::size_t d, std::size_t m, std::size_t t) {
  if (m < 1) throw InputError("expected_bins_with_load_at_least: need at least one bin");
  if (t == 0) return static_cast<double>(m);
  if (t > d) return 0.0;
  if (m == 1) return 1.0;
  const boost::math::binomial_distribution<double> load(static_cast<double>(d), 1.0 / static_cast<double>(m));
  // Pr[X >= t] = 1 - Pr[X <= t - 1]
  return static_cast<double>(m) * boost::math::cdf(boost::math::complement(load, static_cast<double>(t - 1)));
}

GroupSet group_balls(std::span<const std::size_t> ball_bins, std::size_t t) {
  if (t < 1) throw InputError("group_balls: group size must be positive");
  std::size_t bins = 0;
  for (std::size_t b : ball_bins) bins = std::max(bins, b + 1);
  std::vector<std::vector<std::size_t>> members(bins);
  for (std::size_t ball = 0; ball < ball_bins.size(); ++ball) members[ball_bins[ball]].push_back(ball);
  GroupSet out;
  out.group_size = t;
  for (std::size_t b = 0; b < bins; ++b) {
    for (std::size_t start = 0; start + t <= members[b].size(); start += t) {
      out.groups.push_back(Group{b, {members[b].begin() + static_cast<std::ptrdiff_t>(start),
                                     members[b].begin() + static_cast<std::ptrdiff_t>(start + t)}});
    }
  }
  return out;
}

double VirtualBinTable::VirtualBin::mass() const {
  double total = 0.0;
  for (const auto& part : active()) total += part.mass;
  return total;
}

std::vector<double> VirtualBinTable::attributed_masses() const {
  std::vector<double> sum(bins_.size(), 0.0);
  std::vector<double> carry(bins_.size(), 0.0);
  for (const auto& vb : bins_) {
    for (const auto& part : vb.active()) {
      const double t = sum[part.bin] + part.mass;
      carry[part.bin] += (sum[part.bin] - t) + part.mass;
      sum[part.bin] = t;
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += carry[i];
  return sum;
}

std::pair<std::size_t, std::size_t> VirtualBinTable::sample(Rng& rng) const {
  const auto v = static_cast<std::size_t>(rng.below(bins_.size()));
  const VirtualBin& vb = bins_[v];
  if (vb.count == 1) return {v, vb.parts[0].bin};
  const double u = rng.uniform() * vb.mass();
  return {v, u < vb.parts[0].mass ? vb.parts[0].bin : vb.parts[1].bin};
}

namespace {

// A remaining mass carried as an unevaluated sum hi + lo.
struct Compensated {
  double hi = 0.0;
  double lo = 0.0;

  double value() const { return hi + lo; }

  void add(double x) {
    const double s = hi + x;
    const double bp = s - hi;
    const double err = (hi - (s - bp)) + (x - bp);
    hi = s;
    lo += err;
  }
};

}  // namespace

VirtualBinTable alias_virtual_bins(std::span<const double> p) {
  validate_distribution(p, 1e-12, "alias_virtual_bins");
  const std::size_t m = p.size();
  const double quantum = 1.0 / static_cast<double>(m);

  std::vector<Compensated> remaining(m);
  std::set<std::pair<double, std::size_t>> order;  // (current mass, real bin)
  for (std::size_t i = 0; i < m; ++i) {
    remaining[i].hi = p[i];
    order.emplace(p[i], i);
  }

  VirtualBinTable table;
  table.bins_.reserve(m);
  while (!order.empty()) {
    VirtualBinTable::VirtualBin vb;
    if (order.size() == 1) {
      const std::size_t j = order.begin()->second;
      const double mass = remaining[j].value();
      if (mass > 0.0) vb.parts[vb.count++] = {j, mass};
      order.clear();
      table.bins_.push_back(vb);
      break;
    }

    const auto small_it = order.begin();
    const auto large_it = std::prev(order.end());
    const std::size_t j = small_it->second;
    const std::size_t k = large_it->second;
    const double pj = std::max(0.0, remaining[j].value());
    const double donated = quantum - pj;
    if (donated < -1e-12) throw NumericError("alias_virtual_bins: smallest mass exceeds 1/m");

    if (pj > 0.0) vb.parts[vb.count++] = {j, pj};
    if (donated > 0.0) vb.parts[vb.count++] = {k, donated};
    table.bins_.push_back(vb);

    order.erase(small_it);
    order.erase(std::prev(order.end()));
    remaining[k].add(pj);
    remaining[k].add(-quantum);
    const double updated = remaining[k].value();
    if (updated < -1e-12) throw NumericError("alias_virtual_bins: remaining mass went negative");
    order.emplace(updated, k);
  }
  return table;
}

VirtualGroupExtraction virtual_group_extraction(std::size_t d, std::span<const double> p, std::size_t t,
                                                std::uint64_t seed) {
  if (t < 2) throw InputError("virtual_group_extraction: group size must be at least 2");
  const VirtualBinTable table = alias_virtual_bins(p);
  VirtualGroupExtraction out;
  out.ball_virtual_bins.resize(d);
  out.ball_real_bins.resize(d);
  Rng rng(seed);
  for (std::size_t ball = 0; ball < d; ++ball) {
    const auto [v, real] = table.sample(rng);
    out.ball_virtual_bins[ball] = v;
    out.ball_real_bins[ball] = real;
  }

  const std::size_t keep = (t + 1) / 2;
  out.groups.group_size = keep;
  const GroupSet virtual_groups = group_balls(out.ball_virtual_bins, t);
  out.virtual_groups = virtual_groups.groups.size();
  for (const auto& group : virtual_groups.groups) {
    const auto& vb = table[group.label];
    for (const auto& part : vb.active()) {
      Group real{part.bin, {}};
      for (std::size_t ball : group.members) {
        if (out.ball_real_bins[ball] == part.bin) real.members.push_back(ball);
      }
      if (real.members.size() >= keep) out.groups.groups.push_back(std::move(real));
    }
  }
  return out;
}

}  // namespace ose
