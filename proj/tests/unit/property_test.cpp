#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "support/instances.hpp"
#include "support/oracle.hpp"
#include "vmrank/error.hpp"
#include "vmrank/json.hpp"
#include "vmrank/scoring.hpp"
#include "vmrank/validation.hpp"

using namespace vmrank;

namespace {

MeasurementMatrix random_matrix(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> vms(2, 12), attrs(1, 16);
  std::uniform_real_distribution<double> v(-1e3, 1e3);
  std::bernoulli_distribution constant(0.15), lower(0.5);
  const int m = vms(rng), n = attrs(rng);
  std::vector<VmDescriptor> vd;
  for (int i = 0; i < m; ++i) vd.push_back({"v" + std::to_string(i), 1, 1, "x", 1});
  std::vector<AttributeDef> ad;
  std::vector<bool> is_constant;
  for (int j = 0; j < n; ++j) {
    ad.push_back({"a" + std::to_string(j), "", kAllGroups[j % 4], lower(rng) ? Polarity::LowerBetter : Polarity::HigherBetter, ""});
    is_constant.push_back(constant(rng));
  }
  std::vector<double> values(static_cast<std::size_t>(m * n));
  const double c = v(rng);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) values[static_cast<std::size_t>(i * n + j)] = is_constant[j] ? c : v(rng);
  }
  return MeasurementMatrix(vd, ad, values);
}

/// Same data, VMs and attributes declared in a shuffled order, observations
/// inside each cell shuffled too.
MeasurementSet shuffled(const MeasurementSet& s, std::mt19937_64& rng) {
  auto vms = s.vms();
  auto attrs = s.attributes();
  std::shuffle(vms.begin(), vms.end(), rng);
  std::shuffle(attrs.begin(), attrs.end(), rng);
  MeasurementSet out;
  for (auto& v : vms) out.add_vm(v);
  for (auto& a : attrs) out.add_attribute(a);
  for (const auto& v : vms) {
    for (const auto& a : attrs) {
      auto obs = s.observations().at({v.id, a.id});
      std::shuffle(obs.begin(), obs.end(), rng);
      for (double x : obs) out.add_observation(v.id, a.id, x);
    }
  }
  return out;
}

MeasurementSet rescaled(const MeasurementSet& s, const std::string& attr, double a, double b) {
  MeasurementSet out;
  for (auto& v : s.vms()) out.add_vm(v);
  for (auto& at : s.attributes()) out.add_attribute(at);
  for (const auto& [cell, obs] : s.observations()) {
    for (double x : obs) out.add_observation(cell.first, cell.second, cell.second == attr ? a * x + b : x);
  }
  return out;
}

void expect_same_ranking(const RankTable& a, const RankTable& b, double score_tol) {
  ASSERT_EQ(a.size(), b.size());
  for (const auto& e : a.entries()) {
    const auto* o = b.find(e.vm_id);
    ASSERT_NE(o, nullptr) << e.vm_id;
    EXPECT_EQ(e.rank, o->rank) << e.vm_id;
    EXPECT_NEAR(e.score, o->score, score_tol) << e.vm_id;
  }
}

}  // namespace

TEST(Property, NormalizationMomentsOnRandomMatrices) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_matrix(rng);
    const auto n = normalize(m);
    for (std::size_t j = 0; j < m.attribute_count(); ++j) {
      const auto raw = m.column(j);
      const bool flat = std::adjacent_find(raw.begin(), raw.end(), std::not_equal_to<>()) == raw.end();
      double mean = 0, sq = 0;
      for (std::size_t i = 0; i < m.vm_count(); ++i) mean += n.at(i, j);
      mean /= static_cast<double>(m.vm_count());
      for (std::size_t i = 0; i < m.vm_count(); ++i) sq += (n.at(i, j) - mean) * (n.at(i, j) - mean);
      const double sd = std::sqrt(sq / static_cast<double>(m.vm_count()));
      EXPECT_LT(std::abs(mean), 1e-9);
      if (flat) {
        for (std::size_t i = 0; i < m.vm_count(); ++i) EXPECT_EQ(n.at(i, j), 0.0);
      } else {
        EXPECT_LT(std::abs(sd - 1.0), 1e-9);
      }
    }
  }
}

TEST(Property, OracleEquivalence) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = testdata::random_instance(rng);
    const auto w = testdata::random_weights(rng);
    const bool parallel = trial % 2 == 1;
    const auto table = rank_pipeline(s, WeightVector(w), parallel ? ExecutionMode::Parallel : ExecutionMode::Sequential);
    const auto expect = oracle::rank(s, w, parallel);
    for (const auto& e : table.entries()) {
      ASSERT_EQ(e.rank, expect.rank.at(e.vm_id)) << "trial " << trial;
      ASSERT_NEAR(e.score, expect.score.at(e.vm_id), 1e-9) << "trial " << trial;
    }
    check_rank_table(table);
  }
}

TEST(Property, PositiveWeightScaling) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testdata::random_instance(rng);
    const Ranker r(s, ExecutionMode::Sequential);
    // Small weights half the time so that both multipliers stay in range.
    std::uniform_int_distribution<int> d(0, trial % 2 ? 5 : 2);
    std::array<int, 4> w{};
    do {
      for (auto& x : w) x = d(rng);
    } while (w == std::array<int, 4>{0, 0, 0, 0});
    const auto base = r.rank(WeightVector(w));
    for (int lambda : {2, 5}) {
      if (*std::max_element(w.begin(), w.end()) * lambda > WeightVector::kMax) continue;
      std::array<int, 4> scaled{};
      for (int k = 0; k < 4; ++k) scaled[k] = w[k] * lambda;
      const auto t = r.rank(WeightVector(scaled));
      for (const auto& e : base.entries()) {
        EXPECT_EQ(t.rank_of(e.vm_id), e.rank);
        EXPECT_NEAR(t.find(e.vm_id)->score, lambda * e.score, 1e-9);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Property, AffineRescalingOfAColumn) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-500.0, 500.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testdata::random_instance(rng);
    const auto w = WeightVector(testdata::random_weights(rng));
    const auto& attrs = s.attributes();
    const auto& attr = attrs[std::uniform_int_distribution<std::size_t>(0, attrs.size() - 1)(rng)].id;
    const auto t = rescaled(s, attr, scale(rng), shift(rng));
    expect_same_ranking(rank_pipeline(s, w, ExecutionMode::Parallel), rank_pipeline(t, w, ExecutionMode::Parallel),
                        1e-9);
  }
}

TEST(Property, PermutationOfVmsAndAttributes) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testdata::random_instance(rng);
    const auto w = WeightVector(testdata::random_weights(rng));
    expect_same_ranking(rank_pipeline(s, w, ExecutionMode::Sequential),
                        rank_pipeline(shuffled(s, rng), w, ExecutionMode::Sequential), 1e-12);
  }
}

TEST(Property, WeakDominanceHoldsRankOne) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = testdata::random_instance(rng, {.clone_probability = 0.0});
    const auto w = testdata::random_weights(rng);
    // Make vm0 weakly best everywhere, strictly best on one attribute of a
    // positively weighted group.
    MeasurementSet d;
    for (auto& v : s.vms()) d.add_vm(v);
    for (auto& a : s.attributes()) d.add_attribute(a);
    bool strict_done = false;
    for (const auto& a : s.attributes()) {
      double best = a.polarity == Polarity::HigherBetter ? -1e300 : 1e300;
      for (const auto& v : s.vms()) {
        for (double x : s.observations().at({v.id, a.id})) {
          best = a.polarity == Polarity::HigherBetter ? std::max(best, x) : std::min(best, x);
        }
      }
      const bool strict = !strict_done && w[index_of(a.group)] > 0;
      strict_done = strict_done || strict;
      const double bump = strict ? (a.polarity == Polarity::HigherBetter ? 1.0 : -0.01) : 0.0;
      for (const auto& v : s.vms()) {
        if (v.id == "vm0") {
          d.add_observation(v.id, a.id, best + bump);
        } else {
          for (double x : s.observations().at({v.id, a.id})) d.add_observation(v.id, a.id, x);
        }
      }
    }
    const auto t = rank_pipeline(d, WeightVector(w), ExecutionMode::Sequential);
    EXPECT_EQ(t.rank_of("vm0"), 1) << "trial " << trial;
  }
}

TEST(Property, PearsonOnRanksMatchesClosedFormWithoutTies) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 30)(rng);
    std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    std::iota(a.begin(), a.end(), 1);
    std::iota(b.begin(), b.end(), 1);
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    std::map<std::string, double> sa, sb;
    for (int i = 0; i < n; ++i) {
      sa["v" + std::to_string(i)] = -a[static_cast<std::size_t>(i)];
      sb["v" + std::to_string(i)] = -b[static_cast<std::size_t>(i)];
    }
    const auto ta = RankTable::from_scores(RankKind::BenchmarkSequential, sa);
    const auto tb = RankTable::from_scores(RankKind::EmpiricalSequential, sb);
    const auto r = compare(ta, tb);
    EXPECT_NEAR(r.coefficient, oracle::spearman_closed_form(a, b), 1e-12);
    EXPECT_NEAR(compare(ta, tb, {CorrelationMethod::SpearmanAverageRanks, 3}).coefficient, r.coefficient, 1e-12);
  }
}

TEST(Property, CompareIsSymmetricAndSelfIsOne) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> score(0, 6);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, double> sa, sb;
    const int n = std::uniform_int_distribution<int>(3, 12)(rng);
    for (int i = 0; i < n; ++i) {
      sa["v" + std::to_string(i)] = score(rng);
      sb["v" + std::to_string(i)] = score(rng);
    }
    const auto ta = RankTable::from_scores(RankKind::BenchmarkSequential, sa);
    const auto tb = RankTable::from_scores(RankKind::EmpiricalSequential, sb);
    for (auto m : {CorrelationMethod::PearsonOnRanks, CorrelationMethod::SpearmanAverageRanks,
                   CorrelationMethod::KendallTau}) {
      try {
        const double ab = compare(ta, tb, {m, 3}).coefficient;
        const double ba = compare(tb, ta, {m, 3}).coefficient;
        EXPECT_EQ(ab, ba);
        EXPECT_GE(ab, -1.0);
        EXPECT_LE(ab, 1.0);
        EXPECT_EQ(compare(ta, ta, {m, 3}).coefficient, 1.0);
        ++compared;
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateRanks);
      }
    }
  }
  EXPECT_GT(compared, 300);
}

TEST(Property, EmpiricalRankingIgnoresMonotoneRescaling) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> secs(1.0, 600.0);
  for (int trial = 0; trial < 100; ++trial) {
    TimingSet t, doubled;
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    for (int i = 0; i < n; ++i) {
      const double base = secs(rng);
      for (int r = 0; r < 3; ++r) {
        const double x = r == 0 || trial % 3 ? base + r : base;
        t.records.push_back({"v" + std::to_string(i), ExecutionMode::Sequential, x});
        doubled.records.push_back({"v" + std::to_string(i), ExecutionMode::Sequential, 2 * x});
      }
    }
    const auto a = rank_empirical(t, ExecutionMode::Sequential);
    const auto b = rank_empirical(doubled, ExecutionMode::Sequential);
    for (const auto& e : a.entries()) EXPECT_EQ(b.rank_of(e.vm_id), e.rank);
  }
}

TEST(Property, RankTablesRoundTripThroughJson) {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> score(0, 4);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, double> s;
    for (int i = 0; i < 8; ++i) s["v" + std::to_string(i)] = score(rng) * 0.1;
    const auto t = RankTable::from_scores(RankKind::BenchmarkParallel, s);
    check_rank_table(t);
    EXPECT_EQ(rank_table_from_json(nlohmann::json::parse(nlohmann::json(t).dump())), t);
  }
}
