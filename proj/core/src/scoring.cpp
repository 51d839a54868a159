#include "vmrank/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vmrank/error.hpp"

namespace vmrank {

std::string_view to_string(GroupReduction r) noexcept {
  return r == GroupReduction::Mean ? "mean" : "sum";
}

NormalizedMatrix normalize(const MeasurementMatrix& matrix) {
  const std::size_t m = matrix.vm_count();
  const std::size_t n = matrix.attribute_count();
  if (m == 0) throw Error(Stage::Normalize, ErrorCode::EmptyInput, "matrix has no VMs");

  NormalizedMatrix out;
  out.vms = matrix.vms();
  out.attributes = matrix.attributes();
  out.mean.assign(n, 0.0);
  out.stddev.assign(n, 0.0);
  out.z.assign(m * n, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    const auto col = matrix.column(j);
    for (std::size_t i = 0; i < m; ++i) {
      if (!std::isfinite(col[i])) {
        throw Error(Stage::Normalize, ErrorCode::NonFinite,
                    "value for (" + out.vms[i].id + ", " + out.attributes[j].id +
                        ") is not finite");
      }
    }
    const double mu = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(m);
    double ss = 0.0;
    for (double v : col) ss += (v - mu) * (v - mu);
    double sigma = std::sqrt(ss / static_cast<double>(m));

    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    const bool constant = *lo == *hi;
    if (constant) sigma = 0.0;
    out.mean[j] = mu;
    out.stddev[j] = sigma;
    if (constant || sigma == 0.0) continue;  // z stays 0

    const double sign = out.attributes[j].polarity == Polarity::HigherBetter ? 1.0 : -1.0;
    for (std::size_t i = 0; i < m; ++i) out.z[i * n + j] = sign * (col[i] - mu) / sigma;
  }
  return out;
}

GroupScoreTable::GroupScoreTable(std::vector<std::string> vm_ids,
                                 std::vector<std::array<std::optional<double>, kGroupCount>> scores)
    : vm_ids_(std::move(vm_ids)), scores_(std::move(scores)) {
  if (vm_ids_.size() != scores_.size()) {
    throw Error(Stage::Score, ErrorCode::InvalidArgument, "group score table size mismatch");
  }
}

std::optional<double> GroupScoreTable::at(std::string_view vm_id, AttributeGroup group) const {
  auto it = std::find(vm_ids_.begin(), vm_ids_.end(), vm_id);
  if (it == vm_ids_.end()) {
    throw Error(Stage::Score, ErrorCode::UnknownVm, "unknown VM id '" + std::string(vm_id) + "'");
  }
  return scores_[static_cast<std::size_t>(it - vm_ids_.begin())][index_of(group)];
}

bool GroupScoreTable::has_group(AttributeGroup group) const noexcept {
  return !scores_.empty() && scores_.front()[index_of(group)].has_value();
}

GroupScoreTable group_scores(const NormalizedMatrix& norm, GroupReduction reduction) {
  const std::size_t m = norm.vms.size();
  const std::size_t n = norm.attributes.size();
  std::array<std::vector<std::size_t>, kGroupCount> members;
  for (std::size_t j = 0; j < n; ++j) members[index_of(norm.attributes[j].group)].push_back(j);

  std::vector<std::string> ids;
  std::vector<std::array<std::optional<double>, kGroupCount>> rows(m);
  ids.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    ids.push_back(norm.vms[i].id);
    for (std::size_t k = 0; k < kGroupCount; ++k) {
      if (members[k].empty()) continue;
      double sum = 0.0;
      for (std::size_t j : members[k]) sum += norm.at(i, j);
      rows[i][k] = reduction == GroupReduction::Mean
                       ? sum / static_cast<double>(members[k].size())
                       : sum;
    }
  }
  return GroupScoreTable(std::move(ids), std::move(rows));
}

namespace {

void require_groups(const GroupScoreTable& groups, const WeightVector& w) {
  for (auto g : kAllGroups) {
    if (w[g] > 0 && !groups.vm_ids().empty() && !groups.has_group(g)) {
      throw Error(Stage::Score, ErrorCode::MissingGroup,
                  "group '" + std::string(to_string(g)) + "' has weight " + std::to_string(w[g]) +
                      " but no attributes");
    }
  }
}

double weighted_sum(const std::array<std::optional<double>, kGroupCount>& row,
                    const WeightVector& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < kGroupCount; ++k) {
    if (w[k] == 0) continue;
    s += *row[k] * static_cast<double>(w[k]);
  }
  return s;
}

}  // namespace

std::map<std::string, double> score(const GroupScoreTable& groups, const WeightVector& w) {
  require_groups(groups, w);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < groups.vm_ids().size(); ++i) {
    out.emplace(groups.vm_ids()[i], weighted_sum(groups.row(i), w));
  }
  return out;
}

RankTable rank(const std::map<std::string, double>& scores, RankKind kind, double tie_tolerance) {
  return RankTable::from_scores(kind, scores, tie_tolerance);
}

MeasurementMatrix parallel_adjust(const MeasurementMatrix& matrix,
                                  std::span<const VmDescriptor> vms) {
  std::vector<double> column;
  column.reserve(matrix.vm_count());
  for (const auto& vm : matrix.vms()) {
    auto it = std::find_if(vms.begin(), vms.end(),
                           [&](const VmDescriptor& d) { return d.id == vm.id; });
    if (it == vms.end()) {
      throw Error(Stage::Score, ErrorCode::MissingDescriptor,
                  "no descriptor (vCPU count) for VM '" + vm.id + "'");
    }
    column.push_back(static_cast<double>(it->vcpus));
  }
  AttributeDef vcpu{kVcpuAttributeId, "Virtual CPUs", AttributeGroup::Computation,
                    Polarity::HigherBetter, "count"};
  return matrix.with_attribute(std::move(vcpu), column);
}

RankTable rank_pipeline(const MeasurementSet& set, const WeightVector& w, ExecutionMode mode,
                        const ScoringOptions& options) {
  return Ranker(set, mode, options).rank(w);
}

Ranker::Ranker(const MeasurementSet& set, ExecutionMode mode, ScoringOptions options)
    : mode_(mode), options_(options), matrix_(aggregate(set, options.aggregation)) {
  if (mode_ == ExecutionMode::Parallel) matrix_ = parallel_adjust(matrix_, set.vms());
  normalized_ = normalize(matrix_);
  groups_ = group_scores(normalized_, options_.reduction);
}

std::map<std::string, double> Ranker::scores(const WeightVector& w) const {
  return score(groups_, w);
}

RankTable Ranker::rank(const WeightVector& w) const {
  return vmrank::rank(scores(w), benchmark_kind(mode_), options_.tie_tolerance);
}

void Ranker::ranks_into(const WeightVector& w, std::span<int> out) const {
  const std::size_t m = groups_.vm_ids().size();
  if (out.size() != m) {
    throw Error(Stage::Rank, ErrorCode::InvalidArgument, "rank buffer size does not match VM count");
  }
  require_groups(groups_, w);
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = weighted_sum(groups_.row(i), w);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& ids = groups_.vm_ids();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    return ids[a] < ids[b];
  });
  std::size_t leader = 0;
  for (std::size_t pos = 0; pos < m; ++pos) {
    if (pos == 0 || s[order[leader]] - s[order[pos]] > options_.tie_tolerance) leader = pos;
    out[order[pos]] = static_cast<int>(leader) + 1;
  }
}

}  // namespace vmrank
