#include "vmrank/sweep.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "vmrank/error.hpp"

namespace vmrank {

std::vector<WeightVector> enumerate_weight_vectors() {
  std::vector<WeightVector> out;
  out.reserve(kWeightSpaceSize);
  for (int a = 0; a <= WeightVector::kMax; ++a)
    for (int b = 0; b <= WeightVector::kMax; ++b)
      for (int c = 0; c <= WeightVector::kMax; ++c)
        for (int d = 0; d <= WeightVector::kMax; ++d) {
          if (a == 0 && b == 0 && c == 0 && d == 0) continue;
          out.emplace_back(std::array<int, kGroupCount>{a, b, c, d});
        }
  return out;
}

double SweepResult::top_k_frequency(const std::string& vm_id) const {
  auto it = top_k_counts.find(vm_id);
  if (it == top_k_counts.end() || total_vectors == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_vectors);
}

double SweepResult::position_frequency(const std::string& vm_id, int position) const {
  auto it = position_counts.find(vm_id);
  if (it == position_counts.end() || total_vectors == 0 || position < 1 || position > k) return 0.0;
  return static_cast<double>(it->second[static_cast<std::size_t>(position - 1)]) /
         static_cast<double>(total_vectors);
}

namespace {

struct Tally {
  std::vector<std::vector<int>> positions;  // vm -> rank position -> count
  std::vector<int> top_k;
};

}  // namespace

SweepResult top_k_frequency(const Ranker& ranker, int k, const std::vector<WeightVector>& vectors,
                            unsigned threads) {
  if (k < 1) throw Error(Stage::Sweep, ErrorCode::InvalidArgument, "k must be >= 1");
  const auto& ids = ranker.groups().vm_ids();
  const std::size_t m = ids.size();
  const auto ku = static_cast<std::size_t>(k);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, vectors.size())));

  std::vector<Tally> tallies(threads);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned t) {
    Tally& tally = tallies[t];
    tally.positions.assign(m, std::vector<int>(ku, 0));
    tally.top_k.assign(m, 0);
    std::vector<int> ranks(m);
    const std::size_t chunk = (vectors.size() + threads - 1) / threads;
    const std::size_t begin = std::min(vectors.size(), t * chunk);
    const std::size_t end = std::min(vectors.size(), begin + chunk);
    try {
      for (std::size_t v = begin; v < end; ++v) {
        try {
          ranker.ranks_into(vectors[v], ranks);
        } catch (const Error& e) {
          throw Error(e.stage(), e.code(),
                      e.detail() + " (weight vector " + vectors[v].to_string() + ")");
        }
        for (std::size_t i = 0; i < m; ++i) {
          const int r = ranks[i];
          if (r > k) continue;
          ++tally.positions[i][static_cast<std::size_t>(r - 1)];
          ++tally.top_k[i];
        }
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult result;
  result.total_vectors = static_cast<int>(vectors.size());
  result.k = k;
  result.mode = ranker.mode();
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<int> pos(ku, 0);
    int top = 0;
    for (const auto& tally : tallies) {
      for (std::size_t p = 0; p < ku; ++p) pos[p] += tally.positions[i][p];
      top += tally.top_k[i];
    }
    result.position_counts.emplace(ids[i], std::move(pos));
    result.top_k_counts.emplace(ids[i], top);
  }
  return result;
}

SweepResult top_k_frequency(const MeasurementSet& set, int k, ExecutionMode mode,
                            const SweepOptions& options) {
  if (k < 1) throw Error(Stage::Sweep, ErrorCode::InvalidArgument, "k must be >= 1");
  const Ranker ranker(set, mode, options.scoring);
  return top_k_frequency(ranker, k, enumerate_weight_vectors(), options.threads);
}

}  // namespace vmrank
