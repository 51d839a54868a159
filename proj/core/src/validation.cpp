#include "vmrank/validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "vmrank/error.hpp"

namespace vmrank {

RankTable rank_empirical(const TimingSet& timings, ExecutionMode mode, double tie_tolerance) {
  timings.validate({});
  std::map<std::string, std::vector<double>> per_vm;
  for (const auto& r : timings.records) {
    if (r.mode == mode) per_vm[r.vm_id].push_back(r.seconds);
  }
  if (per_vm.empty()) {
    throw Error(Stage::Validate, ErrorCode::NoRecords,
                "no timing records for mode '" + std::string(to_string(mode)) + "'");
  }

  std::vector<VmDescriptor> vms;
  std::vector<double> medians;
  for (const auto& [vm, secs] : per_vm) {
    VmDescriptor d;
    d.id = vm;
    vms.push_back(std::move(d));
    medians.push_back(aggregate_values(secs, AggregationMethod::Median));
  }
  AttributeDef runtime{"execution_time", "Execution time", AttributeGroup::Computation,
                       Polarity::LowerBetter, "s"};
  const auto norm = normalize(MeasurementMatrix(vms, {runtime}, medians));

  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < vms.size(); ++i) scores.emplace(vms[i].id, norm.at(i, 0));
  return RankTable::from_scores(empirical_kind(mode), scores, tie_tolerance);
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Stage::Validate, ErrorCode::InvalidArgument, "sample lengths differ");
  }
  if (x.size() < 2) {
    throw Error(Stage::Validate, ErrorCode::TooFewShared, "need at least 2 paired samples");
  }
}

bool constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

[[noreturn]] void degenerate() {
  throw Error(Stage::Validate, ErrorCode::DegenerateRanks,
              "a rank vector has zero variance; correlation is undefined");
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (constant(x) || constant(y)) degenerate();
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) degenerate();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman_average_ranks(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ++ties_x;
      if (dy == 0.0) ++ties_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0)) ++concordant; else ++discordant;
    }
  }
  const long long pairs = static_cast<long long>(n * (n - 1) / 2);
  const double denom = std::sqrt(static_cast<double>(pairs - ties_x) * static_cast<double>(pairs - ties_y));
  if (denom == 0.0) degenerate();
  return std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
}

ComparisonReport compare(const RankTable& a, const RankTable& b, const CompareOptions& options) {
  ComparisonReport report;
  report.method = options.method;
  report.top_k = options.top_k;
  report.kind_a = a.kind();
  report.kind_b = b.kind();
  std::map<std::string_view, std::pair<int, int>> shared;
  for (const auto& e : a.entries()) {
    if (const RankEntry* other = b.find(e.vm_id)) shared.emplace(e.vm_id, std::pair{e.rank, other->rank});
  }
  std::vector<double> ra, rb;
  for (const auto& [vm, ranks] : shared) {
    ra.push_back(ranks.first);
    rb.push_back(ranks.second);
    report.per_vm_delta.emplace(std::string(vm), ranks.first - ranks.second);
    if (ranks.first <= options.top_k && ranks.second <= options.top_k) ++report.top_k_overlap;
  }
  if (ra.size() < 3) {
    throw Error(Stage::Validate, ErrorCode::TooFewShared,
                "tables share " + std::to_string(ra.size()) + " VM(s); at least 3 are required");
  }
  switch (options.method) {
    case CorrelationMethod::PearsonOnRanks: report.coefficient = pearson(ra, rb); break;
    case CorrelationMethod::SpearmanAverageRanks: report.coefficient = spearman_average_ranks(ra, rb); break;
    case CorrelationMethod::KendallTau: report.coefficient = kendall_tau_b(ra, rb); break;
  }
  return report;
}

DivergenceReport divergence_report(const RankTable& a, const RankTable& b, int threshold,
                                   const GroupScoreTable* groups) {
  if (threshold < 0) {
    throw Error(Stage::Validate, ErrorCode::InvalidArgument, "threshold must be >= 0");
  }
  DivergenceReport report;
  report.threshold = threshold;
  for (const auto& e : a.entries()) {
    const RankEntry* other = b.find(e.vm_id);
    if (other == nullptr) continue;
    const int delta = e.rank - other->rank;
    if (std::abs(delta) > threshold) report.flagged.push_back({e.vm_id, e.rank, other->rank, delta});
  }
  std::stable_sort(report.flagged.begin(), report.flagged.end(),
                   [](const DivergentVm& x, const DivergentVm& y) {
                     return std::abs(x.delta) > std::abs(y.delta);
                   });

  if (groups != nullptr && !report.flagged.empty()) {
    for (auto g : kAllGroups) {
      if (!groups->has_group(g)) continue;
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& f : report.flagged) {
        const auto& ids = groups->vm_ids();
        if (std::find(ids.begin(), ids.end(), f.vm_id) == ids.end()) continue;
        sum += std::abs(*groups->at(f.vm_id, g));
        ++n;
      }
      if (n > 0) report.group_deviation.emplace_back(g, sum / static_cast<double>(n));
    }
    std::stable_sort(report.group_deviation.begin(), report.group_deviation.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    for (const auto& [g, dev] : report.group_deviation) {
      if (report.groups_to_revisit.size() == 2 || dev <= 0.0) break;
      report.groups_to_revisit.push_back(g);
    }
  }
  return report;
}

std::string render_divergence(const DivergenceReport& report) {
  std::ostringstream os;
  if (report.flagged.empty()) {
    os << "No VM differs by more than " << report.threshold << " rank position(s).\n";
    return os.str();
  }
  os << report.flagged.size() << " VM(s) differ by more than " << report.threshold
     << " rank position(s):\n";
  for (const auto& f : report.flagged) {
    os << "  " << std::left << std::setw(14) << f.vm_id << " rank " << f.rank_a << " vs "
       << f.rank_b << " (delta " << std::showpos << f.delta << std::noshowpos << ")\n";
  }
  if (!report.groups_to_revisit.empty()) {
    os << "Consider revisiting the weights of:";
    for (std::size_t i = 0; i < report.groups_to_revisit.size(); ++i) {
      os << (i ? ", " : " ") << to_string(report.groups_to_revisit[i]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace vmrank
