#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vmrank/model.hpp"

namespace vmrank {

/// Bundled reference data: the EC2 VM catalogue and the two case-study rank
/// tables (benchmark and empirical, sequential and parallel).
struct FixtureDataset {
  std::string name;
  std::string description;
  std::vector<VmDescriptor> vms;
  std::optional<WeightVector> weights;
  std::vector<RankTable> tables;

  /// Throws Error(Fixture, InvalidArgument) if the kind is not present.
  const RankTable& table(RankKind kind) const;
};

/// Names accepted by load_fixture_dataset.
std::vector<std::string> fixture_names();

/// Raw text of a bundled fixture. Throws UnknownFixture.
std::string_view fixture_text(std::string_view name);

/// "vm-specs", "casestudy1-ranks" or "casestudy2-ranks". Throws UnknownFixture.
FixtureDataset load_fixture_dataset(std::string_view name);

// Rank fixture format:
//
//   # comments
//   @description <text>
//   @weights <w1>,<w2>,<w3>,<w4>          (optional)
//   @columns <rank_kind>, <rank_kind>, ...
//   <vm_id>, <rank>, <rank>, ...
//
// VM specs format: the @vm lines of the measurement format.

std::vector<VmDescriptor> parse_vm_specs(std::string_view text);
std::string to_vm_specs_text(const std::vector<VmDescriptor>& vms);

/// Parses a rank fixture. VM descriptors are looked up in `catalogue`.
FixtureDataset parse_rank_fixture(std::string_view text, const std::vector<VmDescriptor>& catalogue,
                                  std::string name = {});
std::string to_rank_fixture_text(const FixtureDataset& dataset);

}  // namespace vmrank
