#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vmrank {

/// Static description of a VM type as published by the provider.
struct VmDescriptor {
  std::string id;
  int vcpus = 1;
  double memory_gib = 0.0;
  std::string processor;
  double clock_ghz = 0.0;

  /// Throws Error(InvalidArgument) unless vcpus >= 1, memory > 0, clock > 0.
  void validate() const;

  friend bool operator==(const VmDescriptor&, const VmDescriptor&) = default;
};

/// The four attribute groups. Order is fixed; it is the weight index.
enum class AttributeGroup : std::size_t {
  MemoryProcess = 0,
  LocalCommunication = 1,
  Computation = 2,
  Storage = 3,
};

inline constexpr std::size_t kGroupCount = 4;
inline constexpr std::array<AttributeGroup, kGroupCount> kAllGroups = {
    AttributeGroup::MemoryProcess, AttributeGroup::LocalCommunication,
    AttributeGroup::Computation, AttributeGroup::Storage};

constexpr std::size_t index_of(AttributeGroup g) noexcept { return static_cast<std::size_t>(g); }

/// Canonical snake_case name, e.g. "memory_process".
std::string_view to_string(AttributeGroup group) noexcept;
/// Accepts the snake_case names and the G1..G4 aliases. Throws
/// Error(UnknownGroup) listing the valid names otherwise.
AttributeGroup parse_group(std::string_view text);

enum class Polarity { HigherBetter, LowerBetter };

std::string_view to_string(Polarity polarity) noexcept;
Polarity parse_polarity(std::string_view text);

struct AttributeDef {
  std::string id;
  std::string label;
  AttributeGroup group = AttributeGroup::MemoryProcess;
  Polarity polarity = Polarity::HigherBetter;
  std::string unit;

  friend bool operator==(const AttributeDef&, const AttributeDef&) = default;
};

enum class ExecutionMode { Sequential, Parallel };

std::string_view to_string(ExecutionMode mode) noexcept;
ExecutionMode parse_mode(std::string_view text);

using CellKey = std::pair<std::string, std::string>;  // (vm_id, attr_id)

/// Raw, unaggregated observations r_ij with repetitions.
class MeasurementSet {
 public:
  MeasurementSet() = default;

  /// Throws DuplicateId if the id is already declared.
  void add_vm(VmDescriptor vm);
  void add_attribute(AttributeDef attr);
  /// Throws UnknownVm / UnknownAttribute for undeclared ids.
  void add_observation(const std::string& vm_id, const std::string& attr_id, double value);

  const std::vector<VmDescriptor>& vms() const noexcept { return vms_; }
  const std::vector<AttributeDef>& attributes() const noexcept { return attributes_; }
  const std::map<CellKey, std::vector<double>>& observations() const noexcept {
    return observations_;
  }

  const VmDescriptor* find_vm(std::string_view id) const noexcept;
  const AttributeDef* find_attribute(std::string_view id) const noexcept;

  std::size_t observation_count() const noexcept;

  /// Cells (vm, attr) over the declared grid that have no observation.
  std::vector<CellKey> missing_cells() const;

  /// Order-insensitive equality: same declarations (as sets) and the same
  /// multiset of values per cell.
  bool equivalent(const MeasurementSet& other) const;

 private:
  std::vector<VmDescriptor> vms_;
  std::vector<AttributeDef> attributes_;
  std::map<CellKey, std::vector<double>> observations_;
};

/// Exactly one aggregated value per (vm, attribute); rectangular.
class MeasurementMatrix {
 public:
  MeasurementMatrix() = default;
  /// values is row-major, vms.size() x attributes.size().
  MeasurementMatrix(std::vector<VmDescriptor> vms, std::vector<AttributeDef> attributes,
                    std::vector<double> values);

  const std::vector<VmDescriptor>& vms() const noexcept { return vms_; }
  const std::vector<AttributeDef>& attributes() const noexcept { return attributes_; }
  std::size_t vm_count() const noexcept { return vms_.size(); }
  std::size_t attribute_count() const noexcept { return attributes_.size(); }

  double at(std::size_t vm, std::size_t attr) const { return values_.at(vm * attributes_.size() + attr); }
  /// Throws UnknownVm / UnknownAttribute.
  double value(std::string_view vm_id, std::string_view attr_id) const;
  std::vector<double> column(std::size_t attr) const;

  /// Copy with one more attribute column appended.
  MeasurementMatrix with_attribute(AttributeDef attr, std::span<const double> column) const;

 private:
  std::vector<VmDescriptor> vms_;
  std::vector<AttributeDef> attributes_;
  std::vector<double> values_;
};

/// Four user weights in [0, 5], not all zero, indexed by AttributeGroup.
class WeightVector {
 public:
  static constexpr int kMin = 0;
  static constexpr int kMax = 5;

  /// Throws Error(Usage, InvalidWeights) on a range or all-zero violation.
  explicit WeightVector(std::array<int, kGroupCount> w);

  /// Parses "5,3,5,0" (whitespace tolerated).
  static WeightVector parse(std::string_view text);

  int operator[](AttributeGroup g) const noexcept { return w_[index_of(g)]; }
  int operator[](std::size_t k) const noexcept { return w_[k]; }
  const std::array<int, kGroupCount>& values() const noexcept { return w_; }

  std::string to_string() const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
  friend auto operator<=>(const WeightVector&, const WeightVector&) = default;

 private:
  std::array<int, kGroupCount> w_;
};

/// Polarity-adjusted z-scores. Larger is better for every attribute.
struct NormalizedMatrix {
  std::vector<VmDescriptor> vms;
  std::vector<AttributeDef> attributes;
  std::vector<double> mean;    // per attribute
  std::vector<double> stddev;  // per attribute, population
  std::vector<double> z;       // row-major vm x attribute

  double at(std::size_t vm, std::size_t attr) const { return z.at(vm * attributes.size() + attr); }
};

enum class RankKind {
  BenchmarkSequential,
  BenchmarkParallel,
  EmpiricalSequential,
  EmpiricalParallel,
};

std::string_view to_string(RankKind kind) noexcept;
RankKind parse_rank_kind(std::string_view text);
RankKind benchmark_kind(ExecutionMode mode) noexcept;
RankKind empirical_kind(ExecutionMode mode) noexcept;

/// Computed tables obey strict competition ranking. Published tables are
/// transcriptions whose rank values are kept verbatim (some printed tables
/// skip positions in ways competition ranking would not).
enum class RankProvenance { Computed, Published };

std::string_view to_string(RankProvenance p) noexcept;

struct RankEntry {
  std::string vm_id;
  double score = 0.0;
  int rank = 0;

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

class RankTable {
 public:
  RankTable() = default;

  /// Sorts by score descending (ties by vm id) and assigns competition ranks.
  /// Scores within `tie_tolerance` of the first member of a tie group share
  /// its rank.
  static RankTable from_scores(RankKind kind, const std::map<std::string, double>& scores,
                               double tie_tolerance = 1e-9);

  /// Transcribed ranks, e.g. from a printed table. Entries keep the given
  /// rank values; score is the rank-derived value (n + 1 - rank).
  static RankTable from_published(RankKind kind,
                                  std::span<const std::pair<std::string, int>> ranks);

  /// Rebuilds a table from explicit entries (deserialization) and validates it.
  static RankTable from_entries(RankKind kind, RankProvenance provenance,
                                std::vector<RankEntry> entries, double tie_tolerance = 1e-9);

  RankKind kind() const noexcept { return kind_; }
  RankProvenance provenance() const noexcept { return provenance_; }
  const std::vector<RankEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const RankEntry* find(std::string_view vm_id) const noexcept;
  std::optional<int> rank_of(std::string_view vm_id) const noexcept;

  friend bool operator==(const RankTable&, const RankTable&) = default;

 private:
  RankKind kind_ = RankKind::BenchmarkSequential;
  RankProvenance provenance_ = RankProvenance::Computed;
  std::vector<RankEntry> entries_;
};

/// Throws Error(InvariantViolation) describing the first problem found.
/// Computed tables must satisfy competition ranking; published ones must be
/// sorted with non-decreasing positive ranks and rank 1 present.
void check_rank_table(const RankTable& table, double tie_tolerance = 1e-9);

struct TimingRecord {
  std::string vm_id;
  ExecutionMode mode = ExecutionMode::Sequential;
  double seconds = 0.0;

  friend bool operator==(const TimingRecord&, const TimingRecord&) = default;
};

struct TimingSet {
  std::vector<TimingRecord> records;

  /// Throws NonPositiveSeconds / UnknownVm.
  void validate(std::span<const VmDescriptor> vms) const;
};

enum class CorrelationMethod { PearsonOnRanks, SpearmanAverageRanks, KendallTau };

std::string_view to_string(CorrelationMethod m) noexcept;
/// Accepts the enum names and the short forms pearson / spearman / kendall.
CorrelationMethod parse_method(std::string_view text);

struct ComparisonReport {
  CorrelationMethod method = CorrelationMethod::PearsonOnRanks;
  double coefficient = 0.0;
  std::map<std::string, int> per_vm_delta;  // rank_a - rank_b
  int top_k = 3;
  int top_k_overlap = 0;
  RankKind kind_a = RankKind::BenchmarkSequential;
  RankKind kind_b = RankKind::EmpiricalSequential;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

}  // namespace vmrank
