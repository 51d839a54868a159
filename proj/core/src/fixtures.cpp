#include "vmrank/fixtures.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "text_util.hpp"
#include "vmrank/error.hpp"
#include "vmrank/ingest.hpp"

namespace vmrank {

namespace {

// Amazon EC2 VM types (vCPUs, memory GiB, processor, clock GHz).
constexpr std::string_view kVmSpecs = R"(# Amazon EC2 VM types used in the case studies
@vm m1.xlarge, 4, 15.0, Intel Xeon E5-2650, 2.00
@vm m2.xlarge, 2, 17.1, Intel Xeon E5-2665, 2.40
@vm m2.2xlarge, 4, 34.2, Intel Xeon E5-2665, 2.40
@vm m2.4xlarge, 8, 68.4, Intel Xeon E5-2665, 2.40
@vm m3.xlarge, 4, 15.0, Intel Xeon E5-2670, 2.60
@vm m3.2xlarge, 8, 30.0, Intel Xeon E5-2670, 2.60
@vm cr1.8xlarge, 32, 244.0, Intel Xeon E5-2670, 2.60
@vm cc1.4xlarge, 16, 23.0, Intel Xeon X5570, 2.93
@vm cc2.8xlarge, 32, 60.5, Intel Xeon X5570, 2.93
@vm hi1.4xlarge, 16, 60.5, Intel Xeon E5620, 2.40
@vm hs1.8xlarge, 16, 117.0, Intel Xeon E5-2650, 2.00
@vm cg1.4xlarge, 16, 22.5, Intel Xeon X5570, 2.93
)";

// Aggregate risk analysis. The printed empirical sequential column is kept
// verbatim, including its 8,8,8 block after six better-ranked VMs.
constexpr std::string_view kCaseStudy1 = R"(# Aggregate risk analysis case study rankings
@description aggregate risk analysis, W={5,3,5,0}
@weights 5,3,5,0
@columns benchmark_sequential, empirical_sequential, benchmark_parallel, empirical_parallel
m1.xlarge,   12, 12, 12, 10
m2.xlarge,    8,  8, 10, 12
m2.2xlarge,  10,  8,  9,  9
m2.4xlarge,   7,  8,  8,  7
m3.xlarge,    5,  5,  6, 11
m3.2xlarge,   4,  5,  5,  8
cr1.8xlarge,  2,  1,  1,  2
cc1.4xlarge,  1,  2,  2,  4
cc2.8xlarge,  6,  2,  4,  1
hi1.4xlarge,  9,  9,  7,  6
hs1.8xlarge, 11, 11, 11,  3
cg1.4xlarge,  3,  2,  3,  4
)";

// Molecular dynamics; cg1.4xlarge was not part of this study.
constexpr std::string_view kCaseStudy2 = R"(# Molecular dynamics case study rankings
@description molecular dynamics, W={4,3,5,0}
@weights 4,3,5,0
@columns benchmark_sequential, empirical_sequential, benchmark_parallel, empirical_parallel
m1.xlarge,   11, 10, 11, 10
m2.xlarge,    9,  8,  9, 11
m2.2xlarge,   7,  7,  8,  8
m2.4xlarge,   6,  6,  7,  6
m3.xlarge,    4,  5,  5,  9
m3.2xlarge,   3,  3,  4,  7
hi1.4xlarge,  8,  9,  6,  4
hs1.8xlarge, 10, 11, 10,  5
cc1.4xlarge,  1,  4,  2,  3
cc2.8xlarge,  5,  2,  3,  2
cr1.8xlarge,  2,  1,  1,  1
)";

[[noreturn]] void fixture_error(ErrorCode code, const std::string& what) {
  throw Error(Stage::Fixture, code, what);
}

}  // namespace

const RankTable& FixtureDataset::table(RankKind kind) const {
  auto it = std::find_if(tables.begin(), tables.end(), [&](const RankTable& t) { return t.kind() == kind; });
  if (it == tables.end()) {
    fixture_error(ErrorCode::InvalidArgument,
                  "fixture '" + name + "' has no " + std::string(to_string(kind)) + " table");
  }
  return *it;
}

std::vector<std::string> fixture_names() {
  return {"vm-specs", "casestudy1-ranks", "casestudy2-ranks"};
}

std::string_view fixture_text(std::string_view name) {
  if (name == "vm-specs") return kVmSpecs;
  if (name == "casestudy1-ranks") return kCaseStudy1;
  if (name == "casestudy2-ranks") return kCaseStudy2;
  fixture_error(ErrorCode::UnknownFixture,
                "unknown fixture '" + std::string(name) +
                    "'; available: vm-specs, casestudy1-ranks, casestudy2-ranks");
}

std::vector<VmDescriptor> parse_vm_specs(std::string_view text) {
  // Reuse the measurement header grammar; a spec file has no observations.
  std::vector<VmDescriptor> vms;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    std::string_view line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) return;
    if (line.rfind("@vm ", 0) != 0) {
      fixture_error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected '@vm ...'");
    }
    auto f = detail::split_fields(line.substr(4), 5);
    auto vcpus = f.size() == 5 ? detail::parse_int(f[1]) : std::nullopt;
    auto mem = f.size() == 5 ? detail::parse_double(f[2]) : std::nullopt;
    auto clock = f.size() == 5 ? detail::parse_double(f[4]) : std::nullopt;
    if (!vcpus || !mem || !clock) {
      fixture_error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": malformed @vm row");
    }
    VmDescriptor vm{std::string(f[0]), *vcpus, *mem, std::string(f[3]), *clock};
    vm.validate();
    if (std::any_of(vms.begin(), vms.end(), [&](const auto& v) { return v.id == vm.id; })) {
      fixture_error(ErrorCode::DuplicateId, "VM '" + vm.id + "' listed twice");
    }
    vms.push_back(std::move(vm));
  });
  return vms;
}

std::string to_vm_specs_text(const std::vector<VmDescriptor>& vms) {
  std::ostringstream os;
  for (const auto& vm : vms) {
    os << "@vm " << vm.id << ", " << vm.vcpus << ", " << detail::format_double(vm.memory_gib) << ", "
       << vm.processor << ", " << detail::format_double(vm.clock_ghz) << '\n';
  }
  return os.str();
}

FixtureDataset parse_rank_fixture(std::string_view text, const std::vector<VmDescriptor>& catalogue,
                                  std::string name) {
  FixtureDataset ds;
  ds.name = std::move(name);
  std::vector<RankKind> columns;
  std::vector<std::vector<std::pair<std::string, int>>> ranks;

  detail::for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    std::string_view line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) return;
    auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (line.rfind("@description", 0) == 0) {
      ds.description = std::string(detail::trim(line.substr(12)));
    } else if (line.rfind("@weights", 0) == 0) {
      ds.weights = WeightVector::parse(line.substr(8));
    } else if (line.rfind("@columns", 0) == 0) {
      for (auto f : detail::split_fields(line.substr(8), 64)) columns.push_back(parse_rank_kind(f));
      ranks.assign(columns.size(), {});
    } else {
      if (columns.empty()) fixture_error(ErrorCode::MalformedRow, where() + "row before @columns");
      auto f = detail::split_fields(line, columns.size() + 1);
      if (f.size() != columns.size() + 1) {
        fixture_error(ErrorCode::MalformedRow, where() + "expected " + std::to_string(columns.size()) + " ranks");
      }
      const std::string vm_id(f[0]);
      auto it = std::find_if(catalogue.begin(), catalogue.end(), [&](const auto& v) { return v.id == vm_id; });
      if (it == catalogue.end()) fixture_error(ErrorCode::UnknownVm, where() + "unknown VM '" + vm_id + "'");
      ds.vms.push_back(*it);
      for (std::size_t c = 0; c < columns.size(); ++c) {
        auto r = detail::parse_int(f[c + 1]);
        if (!r || *r < 1) fixture_error(ErrorCode::MalformedRow, where() + "rank must be a positive integer");
        ranks[c].emplace_back(vm_id, *r);
      }
    }
  });
  for (std::size_t c = 0; c < columns.size(); ++c) {
    ds.tables.push_back(RankTable::from_published(columns[c], ranks[c]));
  }
  return ds;
}

std::string to_rank_fixture_text(const FixtureDataset& ds) {
  std::ostringstream os;
  if (!ds.description.empty()) os << "@description " << ds.description << '\n';
  if (ds.weights) os << "@weights " << ds.weights->to_string() << '\n';
  os << "@columns ";
  for (std::size_t c = 0; c < ds.tables.size(); ++c) os << (c ? ", " : "") << to_string(ds.tables[c].kind());
  os << '\n';
  for (const auto& vm : ds.vms) {
    os << vm.id;
    for (const auto& t : ds.tables) os << ", " << *t.rank_of(vm.id);
    os << '\n';
  }
  return os.str();
}

FixtureDataset load_fixture_dataset(std::string_view name) {
  const std::string_view text = fixture_text(name);
  auto catalogue = parse_vm_specs(kVmSpecs);
  if (name == "vm-specs") {
    FixtureDataset ds;
    ds.name = std::string(name);
    ds.description = "Amazon EC2 VM types";
    ds.vms = std::move(catalogue);
    return ds;
  }
  return parse_rank_fixture(text, catalogue, std::string(name));
}

}  // namespace vmrank
