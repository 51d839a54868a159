#pragma once

#include <map>
#include <string>
#include <vector>

#include "vmrank/model.hpp"
#include "vmrank/scoring.hpp"

namespace vmrank {

/// Size of the full weight space: 6^4 - 1.
inline constexpr int kWeightSpaceSize = 1295;

/// All 4-tuples over {0..5} except all-zero, lexicographic order.
std::vector<WeightVector> enumerate_weight_vectors();

struct SweepResult {
  int total_vectors = 0;
  int k = 3;
  ExecutionMode mode = ExecutionMode::Sequential;
  /// vm -> counts for exact rank positions 1..k (index 0 is rank 1).
  std::map<std::string, std::vector<int>> position_counts;
  /// vm -> number of vectors where the VM's competition rank is <= k.
  std::map<std::string, int> top_k_counts;

  double top_k_frequency(const std::string& vm_id) const;
  double position_frequency(const std::string& vm_id, int position) const;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

struct SweepOptions {
  ScoringOptions scoring{};
  /// 0 = std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Ranks the dataset under every weight vector and credits each VM whose
/// competition rank is <= k. Tied VMs are all credited. Normalization is
/// computed once. The result does not depend on the thread count.
SweepResult top_k_frequency(const MeasurementSet& set, int k, ExecutionMode mode,
                            const SweepOptions& options = {});

/// Same, over an already-built Ranker and an explicit list of vectors.
SweepResult top_k_frequency(const Ranker& ranker, int k, const std::vector<WeightVector>& vectors,
                            unsigned threads = 0);

}  // namespace vmrank
