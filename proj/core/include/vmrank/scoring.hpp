#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vmrank/ingest.hpp"
#include "vmrank/model.hpp"

namespace vmrank {

/// How the member z-scores of one group collapse to a single group score.
enum class GroupReduction { Mean, Sum };

std::string_view to_string(GroupReduction r) noexcept;

struct ScoringOptions {
  AggregationMethod aggregation = AggregationMethod::Median;
  GroupReduction reduction = GroupReduction::Mean;
  double tie_tolerance = 1e-9;
};

/// Name of the attribute parallel_adjust injects.
inline constexpr const char* kVcpuAttributeId = "vcpus";

/// Per attribute: mu = mean, sigma = population stddev over the VMs, and
/// z = (r - mu) / sigma for higher-better, (mu - r) / sigma for lower-better.
/// A column whose values are all identical gets sigma = 0 and z = 0.
/// Throws NonFinite for NaN / inf input and EmptyInput for a matrix without VMs.
NormalizedMatrix normalize(const MeasurementMatrix& matrix);

/// Group scores per VM; std::nullopt for a group with no attributes.
class GroupScoreTable {
 public:
  GroupScoreTable() = default;
  GroupScoreTable(std::vector<std::string> vm_ids,
                  std::vector<std::array<std::optional<double>, kGroupCount>> scores);

  const std::vector<std::string>& vm_ids() const noexcept { return vm_ids_; }
  const std::array<std::optional<double>, kGroupCount>& row(std::size_t i) const {
    return scores_.at(i);
  }
  /// Throws UnknownVm.
  std::optional<double> at(std::string_view vm_id, AttributeGroup group) const;
  bool has_group(AttributeGroup group) const noexcept;

 private:
  std::vector<std::string> vm_ids_;
  std::vector<std::array<std::optional<double>, kGroupCount>> scores_;
};

GroupScoreTable group_scores(const NormalizedMatrix& norm,
                             GroupReduction reduction = GroupReduction::Mean);

/// S_i = sum_k group_score(i, k) * w_k. Groups with w_k = 0 are skipped even
/// when empty; an empty group with w_k > 0 throws MissingGroup.
std::map<std::string, double> score(const GroupScoreTable& groups, const WeightVector& w);

/// Competition ranking of scores, descending.
RankTable rank(const std::map<std::string, double>& scores, RankKind kind,
               double tie_tolerance = 1e-9);

/// Appends a `vcpus` attribute (Computation, higher-better) holding each
/// VM's vCPU count. Throws MissingDescriptor if a VM has no descriptor.
MeasurementMatrix parallel_adjust(const MeasurementMatrix& matrix,
                                  std::span<const VmDescriptor> vms);

/// aggregate -> (parallel_adjust) -> normalize -> group_scores -> score -> rank.
RankTable rank_pipeline(const MeasurementSet& set, const WeightVector& w, ExecutionMode mode,
                        const ScoringOptions& options = {});

/// Holds the weight-independent part of the pipeline so many weight vectors
/// can be ranked against one dataset without re-normalizing.
class Ranker {
 public:
  Ranker(const MeasurementSet& set, ExecutionMode mode, ScoringOptions options = {});

  ExecutionMode mode() const noexcept { return mode_; }
  const ScoringOptions& options() const noexcept { return options_; }
  const MeasurementMatrix& matrix() const noexcept { return matrix_; }
  const NormalizedMatrix& normalized() const noexcept { return normalized_; }
  const GroupScoreTable& groups() const noexcept { return groups_; }

  std::map<std::string, double> scores(const WeightVector& w) const;
  RankTable rank(const WeightVector& w) const;

  /// Fast path for sweeps: competition ranks in VM declaration order,
  /// without building a RankTable. Same tie rule as RankTable::from_scores.
  void ranks_into(const WeightVector& w, std::span<int> out) const;

 private:
  ExecutionMode mode_;
  ScoringOptions options_;
  MeasurementMatrix matrix_;
  NormalizedMatrix normalized_;
  GroupScoreTable groups_;
};

}  // namespace vmrank
