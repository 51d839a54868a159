#include "vmrank/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "text_util.hpp"
#include "vmrank/error.hpp"

namespace vmrank {

using detail::trim;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

void VmDescriptor::validate() const {
  if (id.empty()) throw Error(Stage::Parse, ErrorCode::InvalidArgument, "VM id must not be empty");
  if (vcpus < 1) {
    throw Error(Stage::Parse, ErrorCode::InvalidArgument,
                "VM '" + id + "': vcpus must be >= 1");
  }
  if (!(memory_gib > 0.0) || !std::isfinite(memory_gib)) {
    throw Error(Stage::Parse, ErrorCode::InvalidArgument,
                "VM '" + id + "': memory_gib must be > 0");
  }
  if (!(clock_ghz > 0.0) || !std::isfinite(clock_ghz)) {
    throw Error(Stage::Parse, ErrorCode::InvalidArgument,
                "VM '" + id + "': clock_ghz must be > 0");
  }
}

std::string_view to_string(AttributeGroup group) noexcept {
  switch (group) {
    case AttributeGroup::MemoryProcess: return "memory_process";
    case AttributeGroup::LocalCommunication: return "local_communication";
    case AttributeGroup::Computation: return "computation";
    case AttributeGroup::Storage: return "storage";
  }
  return "unknown";
}

AttributeGroup parse_group(std::string_view text) {
  const std::string s = lower(trim(text));
  if (s == "memory_process" || s == "g1") return AttributeGroup::MemoryProcess;
  if (s == "local_communication" || s == "g2") return AttributeGroup::LocalCommunication;
  if (s == "computation" || s == "g3") return AttributeGroup::Computation;
  if (s == "storage" || s == "g4") return AttributeGroup::Storage;
  throw Error(Stage::Parse, ErrorCode::UnknownGroup,
              "unknown attribute group '" + std::string(trim(text)) +
                  "'; valid groups are memory_process, local_communication, computation, storage");
}

std::string_view to_string(Polarity polarity) noexcept {
  return polarity == Polarity::HigherBetter ? "higher_better" : "lower_better";
}

Polarity parse_polarity(std::string_view text) {
  const std::string s = lower(trim(text));
  if (s == "higher_better" || s == "higher") return Polarity::HigherBetter;
  if (s == "lower_better" || s == "lower") return Polarity::LowerBetter;
  throw Error(Stage::Parse, ErrorCode::InvalidArgument,
              "unknown polarity '" + std::string(trim(text)) +
                  "'; expected higher_better or lower_better");
}

std::string_view to_string(ExecutionMode mode) noexcept {
  return mode == ExecutionMode::Sequential ? "sequential" : "parallel";
}

ExecutionMode parse_mode(std::string_view text) {
  const std::string s = lower(trim(text));
  if (s == "sequential" || s == "seq") return ExecutionMode::Sequential;
  if (s == "parallel" || s == "par") return ExecutionMode::Parallel;
  throw Error(Stage::Usage, ErrorCode::InvalidArgument,
              "unknown mode '" + std::string(trim(text)) + "'; expected sequential or parallel");
}

// ---------------------------------------------------------------------------
// MeasurementSet

void MeasurementSet::add_vm(VmDescriptor vm) {
  vm.validate();
  if (find_vm(vm.id) != nullptr) {
    throw Error(Stage::Parse, ErrorCode::DuplicateId, "VM '" + vm.id + "' declared twice");
  }
  vms_.push_back(std::move(vm));
}

void MeasurementSet::add_attribute(AttributeDef attr) {
  if (attr.id.empty()) {
    throw Error(Stage::Parse, ErrorCode::InvalidArgument, "attribute id must not be empty");
  }
  if (find_attribute(attr.id) != nullptr) {
    throw Error(Stage::Parse, ErrorCode::DuplicateId,
                "attribute '" + attr.id + "' declared twice");
  }
  attributes_.push_back(std::move(attr));
}

void MeasurementSet::add_observation(const std::string& vm_id, const std::string& attr_id,
                                     double value) {
  if (find_vm(vm_id) == nullptr) {
    throw Error(Stage::Parse, ErrorCode::UnknownVm, "unknown VM id '" + vm_id + "'");
  }
  if (find_attribute(attr_id) == nullptr) {
    throw Error(Stage::Parse, ErrorCode::UnknownAttribute,
                "unknown attribute id '" + attr_id + "'");
  }
  observations_[{vm_id, attr_id}].push_back(value);
}

const VmDescriptor* MeasurementSet::find_vm(std::string_view id) const noexcept {
  auto it = std::find_if(vms_.begin(), vms_.end(), [&](const auto& v) { return v.id == id; });
  return it == vms_.end() ? nullptr : &*it;
}

const AttributeDef* MeasurementSet::find_attribute(std::string_view id) const noexcept {
  auto it = std::find_if(attributes_.begin(), attributes_.end(),
                         [&](const auto& a) { return a.id == id; });
  return it == attributes_.end() ? nullptr : &*it;
}

std::size_t MeasurementSet::observation_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [key, values] : observations_) n += values.size();
  return n;
}

std::vector<CellKey> MeasurementSet::missing_cells() const {
  std::vector<CellKey> gaps;
  for (const auto& vm : vms_) {
    for (const auto& attr : attributes_) {
      if (!observations_.contains({vm.id, attr.id})) gaps.emplace_back(vm.id, attr.id);
    }
  }
  return gaps;
}

bool MeasurementSet::equivalent(const MeasurementSet& other) const {
  auto sorted_vms = [](std::vector<VmDescriptor> v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return v;
  };
  auto sorted_attrs = [](std::vector<AttributeDef> v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return v;
  };
  if (sorted_vms(vms_) != sorted_vms(other.vms_)) return false;
  if (sorted_attrs(attributes_) != sorted_attrs(other.attributes_)) return false;
  if (observations_.size() != other.observations_.size()) return false;
  for (const auto& [key, values] : observations_) {
    auto it = other.observations_.find(key);
    if (it == other.observations_.end()) return false;
    auto a = values;
    auto b = it->second;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// MeasurementMatrix

MeasurementMatrix::MeasurementMatrix(std::vector<VmDescriptor> vms,
                                     std::vector<AttributeDef> attributes,
                                     std::vector<double> values)
    : vms_(std::move(vms)), attributes_(std::move(attributes)), values_(std::move(values)) {
  if (values_.size() != vms_.size() * attributes_.size()) {
    throw Error(Stage::Aggregate, ErrorCode::InvalidArgument,
                "matrix value count does not match vms x attributes");
  }
}

double MeasurementMatrix::value(std::string_view vm_id, std::string_view attr_id) const {
  auto vit = std::find_if(vms_.begin(), vms_.end(), [&](const auto& v) { return v.id == vm_id; });
  if (vit == vms_.end()) {
    throw Error(Stage::Aggregate, ErrorCode::UnknownVm, "unknown VM id '" + std::string(vm_id) + "'");
  }
  auto ait = std::find_if(attributes_.begin(), attributes_.end(),
                          [&](const auto& a) { return a.id == attr_id; });
  if (ait == attributes_.end()) {
    throw Error(Stage::Aggregate, ErrorCode::UnknownAttribute,
                "unknown attribute id '" + std::string(attr_id) + "'");
  }
  return at(static_cast<std::size_t>(vit - vms_.begin()),
            static_cast<std::size_t>(ait - attributes_.begin()));
}

std::vector<double> MeasurementMatrix::column(std::size_t attr) const {
  std::vector<double> col(vms_.size());
  for (std::size_t i = 0; i < vms_.size(); ++i) col[i] = at(i, attr);
  return col;
}

MeasurementMatrix MeasurementMatrix::with_attribute(AttributeDef attr,
                                                    std::span<const double> column) const {
  if (column.size() != vms_.size()) {
    throw Error(Stage::Aggregate, ErrorCode::InvalidArgument,
                "new column length does not match VM count");
  }
  if (std::any_of(attributes_.begin(), attributes_.end(),
                  [&](const auto& a) { return a.id == attr.id; })) {
    throw Error(Stage::Aggregate, ErrorCode::DuplicateId,
                "attribute '" + attr.id + "' already present in matrix");
  }
  const std::size_t n_old = attributes_.size();
  std::vector<double> values;
  values.reserve(vms_.size() * (n_old + 1));
  for (std::size_t i = 0; i < vms_.size(); ++i) {
    for (std::size_t j = 0; j < n_old; ++j) values.push_back(at(i, j));
    values.push_back(column[i]);
  }
  auto attributes = attributes_;
  attributes.push_back(std::move(attr));
  return MeasurementMatrix(vms_, std::move(attributes), std::move(values));
}

// ---------------------------------------------------------------------------
// WeightVector

WeightVector::WeightVector(std::array<int, kGroupCount> w) : w_(w) {
  for (int v : w_) {
    if (v < kMin || v > kMax) {
      throw Error(Stage::Usage, ErrorCode::InvalidWeights,
                  "weights must be integers in range 0-5, got " + to_string());
    }
  }
  if (std::all_of(w_.begin(), w_.end(), [](int v) { return v == 0; })) {
    throw Error(Stage::Usage, ErrorCode::InvalidWeights, "weights must be not all zero");
  }
}

WeightVector WeightVector::parse(std::string_view text) {
  std::array<int, kGroupCount> w{};
  std::size_t count = 0;
  std::string_view rest = text;
  while (true) {
    auto comma = rest.find(',');
    std::string_view tok = trim(rest.substr(0, comma));
    if (count >= kGroupCount) {
      throw Error(Stage::Usage, ErrorCode::InvalidWeights,
                  "expected exactly 4 comma-separated weights, got '" + std::string(text) + "'");
    }
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw Error(Stage::Usage, ErrorCode::InvalidWeights,
                  "weight '" + std::string(tok) + "' is not an integer in range 0-5");
    }
    w[count++] = v;
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (count != kGroupCount) {
    throw Error(Stage::Usage, ErrorCode::InvalidWeights,
                "expected exactly 4 comma-separated weights, got '" + std::string(text) + "'");
  }
  return WeightVector(w);
}

std::string WeightVector::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < kGroupCount; ++k) {
    if (k) os << ',';
    os << w_[k];
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Rank tables

std::string_view to_string(RankKind kind) noexcept {
  switch (kind) {
    case RankKind::BenchmarkSequential: return "benchmark_sequential";
    case RankKind::BenchmarkParallel: return "benchmark_parallel";
    case RankKind::EmpiricalSequential: return "empirical_sequential";
    case RankKind::EmpiricalParallel: return "empirical_parallel";
  }
  return "unknown";
}

RankKind parse_rank_kind(std::string_view text) {
  const std::string s = lower(trim(text));
  if (s == "benchmark_sequential") return RankKind::BenchmarkSequential;
  if (s == "benchmark_parallel") return RankKind::BenchmarkParallel;
  if (s == "empirical_sequential") return RankKind::EmpiricalSequential;
  if (s == "empirical_parallel") return RankKind::EmpiricalParallel;
  throw Error(Stage::Parse, ErrorCode::InvalidArgument,
              "unknown rank table kind '" + std::string(trim(text)) + "'");
}

RankKind benchmark_kind(ExecutionMode mode) noexcept {
  return mode == ExecutionMode::Sequential ? RankKind::BenchmarkSequential
                                           : RankKind::BenchmarkParallel;
}

RankKind empirical_kind(ExecutionMode mode) noexcept {
  return mode == ExecutionMode::Sequential ? RankKind::EmpiricalSequential
                                           : RankKind::EmpiricalParallel;
}

std::string_view to_string(RankProvenance p) noexcept {
  return p == RankProvenance::Computed ? "computed" : "published";
}

RankTable RankTable::from_scores(RankKind kind, const std::map<std::string, double>& scores,
                                 double tie_tolerance) {
  if (scores.empty()) throw Error(Stage::Rank, ErrorCode::EmptyScores, "no scores to rank");
  RankTable t;
  t.kind_ = kind;
  t.provenance_ = RankProvenance::Computed;
  t.entries_.reserve(scores.size());
  for (const auto& [vm, s] : scores) {
    if (!std::isfinite(s)) {
      throw Error(Stage::Rank, ErrorCode::NonFinite, "score for '" + vm + "' is not finite");
    }
    t.entries_.push_back({vm, s, 0});
  }
  // std::map iteration already orders by id, so stable_sort breaks score ties by id.
  std::stable_sort(t.entries_.begin(), t.entries_.end(),
                   [](const RankEntry& a, const RankEntry& b) { return a.score > b.score; });
  std::size_t leader = 0;
  for (std::size_t i = 0; i < t.entries_.size(); ++i) {
    if (i == 0 || t.entries_[leader].score - t.entries_[i].score > tie_tolerance) leader = i;
    t.entries_[i].rank = static_cast<int>(leader) + 1;
  }
  return t;
}

RankTable RankTable::from_published(RankKind kind,
                                    std::span<const std::pair<std::string, int>> ranks) {
  RankTable t;
  t.kind_ = kind;
  t.provenance_ = RankProvenance::Published;
  const double n = static_cast<double>(ranks.size());
  for (const auto& [vm, r] : ranks) t.entries_.push_back({vm, n + 1.0 - r, r});
  std::stable_sort(t.entries_.begin(), t.entries_.end(),
                   [](const RankEntry& a, const RankEntry& b) { return a.rank < b.rank; });
  check_rank_table(t);
  return t;
}

RankTable RankTable::from_entries(RankKind kind, RankProvenance provenance,
                                  std::vector<RankEntry> entries, double tie_tolerance) {
  RankTable t;
  t.kind_ = kind;
  t.provenance_ = provenance;
  t.entries_ = std::move(entries);
  check_rank_table(t, tie_tolerance);
  return t;
}

const RankEntry* RankTable::find(std::string_view vm_id) const noexcept {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const RankEntry& e) { return e.vm_id == vm_id; });
  return it == entries_.end() ? nullptr : &*it;
}

std::optional<int> RankTable::rank_of(std::string_view vm_id) const noexcept {
  const RankEntry* e = find(vm_id);
  if (e == nullptr) return std::nullopt;
  return e->rank;
}

void check_rank_table(const RankTable& table, double tie_tolerance) {
  auto fail = [](const std::string& what) {
    throw Error(Stage::Rank, ErrorCode::InvariantViolation, what);
  };
  const auto& e = table.entries();
  if (e.empty()) return;
  std::set<std::string> seen;
  for (const auto& entry : e) {
    if (!seen.insert(entry.vm_id).second) fail("VM '" + entry.vm_id + "' appears twice");
    if (entry.rank < 1) fail("rank of '" + entry.vm_id + "' is not positive");
    if (!std::isfinite(entry.score)) fail("score of '" + entry.vm_id + "' is not finite");
  }
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i - 1].score < e[i].score) fail("entries not sorted by score descending");
    if (e[i - 1].rank > e[i].rank) fail("ranks decrease along the table");
  }
  if (e.front().rank != 1) fail("rank 1 missing");

  if (table.provenance() == RankProvenance::Published) {
    for (std::size_t i = 1; i < e.size(); ++i) {
      if ((e[i].rank == e[i - 1].rank) != (e[i].score == e[i - 1].score)) {
        fail("published ranks and scores disagree on ties");
      }
    }
    return;
  }

  // Competition ranking: an entry either shares its tie leader's rank (score
  // within tolerance) or its rank is 1 + number of entries ahead of it.
  std::size_t leader = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const bool tied = i > 0 && e[leader].score - e[i].score <= tie_tolerance;
    if (!tied) leader = i;
    if (e[i].rank != static_cast<int>(leader) + 1) {
      fail("competition ranking violated at '" + e[i].vm_id + "': expected rank " +
           std::to_string(leader + 1) + ", found " + std::to_string(e[i].rank));
    }
  }
}

// ---------------------------------------------------------------------------
// Timings and comparison enums

void TimingSet::validate(std::span<const VmDescriptor> vms) const {
  for (const auto& r : records) {
    if (!(r.seconds > 0.0) || !std::isfinite(r.seconds)) {
      throw Error(Stage::Validate, ErrorCode::NonPositiveSeconds,
                  "timing for '" + r.vm_id + "' must be a positive number of seconds");
    }
    if (!vms.empty() &&
        std::none_of(vms.begin(), vms.end(), [&](const auto& v) { return v.id == r.vm_id; })) {
      throw Error(Stage::Validate, ErrorCode::UnknownVm,
                  "timing references unknown VM '" + r.vm_id + "'");
    }
  }
}

std::string_view to_string(CorrelationMethod m) noexcept {
  switch (m) {
    case CorrelationMethod::PearsonOnRanks: return "PearsonOnRanks";
    case CorrelationMethod::SpearmanAverageRanks: return "SpearmanAverageRanks";
    case CorrelationMethod::KendallTau: return "KendallTau";
  }
  return "Unknown";
}

CorrelationMethod parse_method(std::string_view text) {
  const std::string s = lower(trim(text));
  if (s == "pearson" || s == "pearsononranks") return CorrelationMethod::PearsonOnRanks;
  if (s == "spearman" || s == "spearmanaverageranks") return CorrelationMethod::SpearmanAverageRanks;
  if (s == "kendall" || s == "kendalltau") return CorrelationMethod::KendallTau;
  throw Error(Stage::Usage, ErrorCode::InvalidArgument,
              "unknown correlation method '" + std::string(trim(text)) +
                  "'; expected pearson, spearman or kendall");
}

}  // namespace vmrank
