#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vmrank/ingest.hpp"
#include "vmrank/model.hpp"
#include "vmrank/scoring.hpp"

namespace vmrank {

// Timing format, one record per line, # comments allowed:
//
//   <vm_id>, <sequential|parallel>, <seconds>
//
// Repeated records for the same (vm, mode) are repetitions.
TimingSet load_timings(std::string_view document);
std::string to_timing_text(const TimingSet& timings);

/// Empirical ranking: per-VM median of the selected mode's timings,
/// normalized lower-better, competition-ranked. Throws NoRecords if the
/// mode has no records, NonPositiveSeconds for a bad record.
RankTable rank_empirical(const TimingSet& timings, ExecutionMode mode,
                         double tie_tolerance = 1e-9);

// Correlation primitives over paired samples. All throw DegenerateRanks if
// either side has zero variance and InvalidArgument on a length mismatch.
double pearson(std::span<const double> x, std::span<const double> y);
/// Pearson over fractional (average-of-ties) ranks of x and y.
double spearman_average_ranks(std::span<const double> x, std::span<const double> y);
/// Kendall tau-b (tie-corrected).
double kendall_tau_b(std::span<const double> x, std::span<const double> y);
/// Fractional ranks, ascending, ties get the average of their positions.
std::vector<double> average_ranks(std::span<const double> x);

struct CompareOptions {
  CorrelationMethod method = CorrelationMethod::PearsonOnRanks;
  int top_k = 3;
};

/// Correlates the rank values of the VMs present in both tables (as stored,
/// no re-ranking). Throws TooFewShared below 3 shared VMs.
ComparisonReport compare(const RankTable& a, const RankTable& b, const CompareOptions& options = {});

struct DivergentVm {
  std::string vm_id;
  int rank_a = 0;
  int rank_b = 0;
  int delta = 0;  // rank_a - rank_b
};

struct DivergenceReport {
  int threshold = 3;
  std::vector<DivergentVm> flagged;                 // |delta| > threshold, largest first
  std::vector<AttributeGroup> groups_to_revisit;    // most deviating groups first
  std::vector<std::pair<AttributeGroup, double>> group_deviation;  // mean |group z| over flagged
};

/// Flags VMs whose rank differs by more than `threshold`. When `groups` is
/// given, also suggests the groups whose scores deviate most for the
/// flagged VMs (those are the weights worth revisiting).
DivergenceReport divergence_report(const RankTable& a, const RankTable& b, int threshold = 3,
                                   const GroupScoreTable* groups = nullptr);

std::string render_divergence(const DivergenceReport& report);

}  // namespace vmrank
