#include "vmrank/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

#include "text_util.hpp"
#include "vmrank/error.hpp"

namespace vmrank {

using detail::format_double;
using detail::parse_double;
using detail::parse_int;
using detail::split_fields;
using detail::trim;

namespace {

[[noreturn]] void fail_at(std::size_t line_no, ErrorCode code, const std::string& what) {
  throw Error(Stage::Parse, code, "line " + std::to_string(line_no) + ": " + what);
}

VmDescriptor parse_vm_directive(std::size_t line_no, std::string_view body) {
  auto f = split_fields(body, 5);
  if (f.size() != 5) {
    fail_at(line_no, ErrorCode::MalformedRow,
            "@vm expects <id>, <vcpus>, <memory_gib>, <processor>, <clock_ghz>");
  }
  VmDescriptor vm;
  vm.id = std::string(f[0]);
  auto vcpus = parse_int(f[1]);
  auto mem = parse_double(f[2]);
  auto clock = parse_double(f[4]);
  if (!vcpus || !mem || !clock) fail_at(line_no, ErrorCode::MalformedRow, "non-numeric @vm field");
  vm.vcpus = *vcpus;
  vm.memory_gib = *mem;
  vm.processor = std::string(f[3]);
  vm.clock_ghz = *clock;
  return vm;
}

AttributeDef parse_attribute_directive(std::size_t line_no, std::string_view body) {
  auto f = split_fields(body, 5);
  if (f.size() != 5) {
    fail_at(line_no, ErrorCode::MalformedRow,
            "@attribute expects <id>, <group>, <polarity>, <unit>, <label>");
  }
  AttributeDef a;
  a.id = std::string(f[0]);
  a.group = parse_group(f[1]);
  a.polarity = parse_polarity(f[2]);
  a.unit = std::string(f[3]);
  a.label = std::string(f[4]);
  return a;
}

}  // namespace

MeasurementSet load_measurements(std::string_view document) {
  MeasurementSet set;
  bool any_content = false;
  bool in_body = false;

  detail::for_each_line(document, [&](std::size_t line_no, std::string_view raw_line) {
    std::string_view line = trim(detail::strip_comment(raw_line));
    if (line.empty()) return;
    any_content = true;
    try {
      if (line.front() == '@') {
        if (in_body) {
          fail_at(line_no, ErrorCode::MalformedRow,
                  "declarations must precede the first observation row");
        }
        auto space = line.find_first_of(" \t");
        std::string_view directive = line.substr(0, space);
        std::string_view body = space == std::string_view::npos ? "" : line.substr(space + 1);
        if (directive == "@vm") {
          set.add_vm(parse_vm_directive(line_no, body));
        } else if (directive == "@attribute") {
          set.add_attribute(parse_attribute_directive(line_no, body));
        } else {
          fail_at(line_no, ErrorCode::MalformedRow,
                  "unknown directive '" + std::string(directive) + "'");
        }
        return;
      }
      in_body = true;
      auto f = split_fields(line, 3);
      if (f.size() != 3 || f[0].empty() || f[1].empty()) {
        fail_at(line_no, ErrorCode::MalformedRow, "expected '<vm_id>, <attr_id>, <value>'");
      }
      auto value = parse_double(f[2]);
      if (!value || !std::isfinite(*value)) {
        fail_at(line_no, ErrorCode::MalformedRow,
                "value '" + std::string(f[2]) + "' is not a finite number");
      }
      set.add_observation(std::string(f[0]), std::string(f[1]), *value);
    } catch (const Error& e) {
      if (e.detail().rfind("line ", 0) == 0) throw;
      fail_at(line_no, e.code(), e.detail());
    }
  });

  if (!any_content) throw Error(Stage::Parse, ErrorCode::EmptyInput, "measurement document is empty");
  if (set.observations().empty()) {
    throw Error(Stage::Parse, ErrorCode::EmptyInput, "measurement document has no observation rows");
  }
  return set;
}

std::string to_canonical_text(const MeasurementSet& set) {
  std::ostringstream os;
  os << "# vmrank measurements\n";
  for (const auto& vm : set.vms()) {
    os << "@vm " << vm.id << ", " << vm.vcpus << ", " << format_double(vm.memory_gib) << ", "
       << vm.processor << ", " << format_double(vm.clock_ghz) << '\n';
  }
  for (const auto& a : set.attributes()) {
    os << "@attribute " << a.id << ", " << to_string(a.group) << ", " << to_string(a.polarity)
       << ", " << a.unit << ", " << a.label << '\n';
  }
  for (const auto& vm : set.vms()) {
    for (const auto& a : set.attributes()) {
      auto it = set.observations().find({vm.id, a.id});
      if (it == set.observations().end()) continue;
      for (double v : it->second) os << vm.id << ", " << a.id << ", " << format_double(v) << '\n';
    }
  }
  return os.str();
}

MeasurementSet merge_measurement_sets(std::span<const MeasurementSet> parts) {
  MeasurementSet merged;
  std::map<CellKey, std::vector<double>> cells;
  for (const auto& part : parts) {
    for (const auto& vm : part.vms()) {
      if (const auto* existing = merged.find_vm(vm.id)) {
        if (!(*existing == vm)) {
          throw Error(Stage::Parse, ErrorCode::DuplicateId,
                      "conflicting declarations for VM '" + vm.id + "'");
        }
      } else {
        merged.add_vm(vm);
      }
    }
    for (const auto& a : part.attributes()) {
      if (const auto* existing = merged.find_attribute(a.id)) {
        if (!(*existing == a)) {
          throw Error(Stage::Parse, ErrorCode::DuplicateId,
                      "conflicting declarations for attribute '" + a.id + "'");
        }
      } else {
        merged.add_attribute(a);
      }
    }
    for (const auto& [key, values] : part.observations()) {
      auto& cell = cells[key];
      cell.insert(cell.end(), values.begin(), values.end());
    }
  }
  for (auto& [key, values] : cells) {
    std::sort(values.begin(), values.end());
    for (double v : values) merged.add_observation(key.first, key.second, v);
  }
  return merged;
}

MeasurementSet load_measurement_documents(std::span<const std::string> documents) {
  std::vector<std::future<MeasurementSet>> futures;
  futures.reserve(documents.size());
  for (const auto& doc : documents) {
    futures.push_back(std::async(std::launch::async, [&doc] { return load_measurements(doc); }));
  }
  std::vector<MeasurementSet> parts;
  parts.reserve(futures.size());
  for (auto& f : futures) parts.push_back(f.get());
  return merge_measurement_sets(parts);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Stage::Parse, ErrorCode::InvalidArgument,
                "cannot open file '" + path.string() + "' (file not found or unreadable)");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view to_string(AggregationMethod m) noexcept {
  switch (m) {
    case AggregationMethod::Median: return "median";
    case AggregationMethod::Mean: return "mean";
    case AggregationMethod::Min: return "min";
  }
  return "unknown";
}

AggregationMethod parse_aggregation(std::string_view text) {
  text = trim(text);
  if (text == "median") return AggregationMethod::Median;
  if (text == "mean") return AggregationMethod::Mean;
  if (text == "min") return AggregationMethod::Min;
  throw Error(Stage::Usage, ErrorCode::InvalidArgument,
              "unknown aggregation '" + std::string(text) + "'; expected median, mean or min");
}

double aggregate_values(std::span<const double> values, AggregationMethod method) {
  if (values.empty()) {
    throw Error(Stage::Aggregate, ErrorCode::EmptyInput, "cannot aggregate an empty observation list");
  }
  switch (method) {
    case AggregationMethod::Min:
      return *std::min_element(values.begin(), values.end());
    case AggregationMethod::Mean: {
      // Sorting first makes the sum independent of observation order.
      std::vector<double> v(values.begin(), values.end());
      std::sort(v.begin(), v.end());
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }
    case AggregationMethod::Median: {
      std::vector<double> v(values.begin(), values.end());
      std::sort(v.begin(), v.end());
      const std::size_t n = v.size();
      if (n % 2 == 1) return v[n / 2];
      return v[n / 2 - 1] + (v[n / 2] - v[n / 2 - 1]) / 2.0;
    }
  }
  return 0.0;
}

MeasurementMatrix aggregate(const MeasurementSet& set, AggregationMethod method) {
  auto gaps = set.missing_cells();
  if (!gaps.empty()) {
    std::string msg = std::to_string(gaps.size()) + " cell(s) without observations:";
    const std::size_t shown = std::min<std::size_t>(gaps.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg += " (" + gaps[i].first + ", " + gaps[i].second + ")";
    if (shown < gaps.size()) msg += " ...";
    throw Error(Stage::Aggregate, ErrorCode::IncompleteMatrix, msg);
  }
  const auto& vms = set.vms();
  const auto& attrs = set.attributes();
  std::vector<double> values;
  values.reserve(vms.size() * attrs.size());
  for (const auto& vm : vms) {
    for (const auto& a : attrs) {
      values.push_back(aggregate_values(set.observations().at({vm.id, a.id}), method));
    }
  }
  return MeasurementMatrix(vms, attrs, std::move(values));
}

}  // namespace vmrank
