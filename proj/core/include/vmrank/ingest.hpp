#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vmrank/model.hpp"

namespace vmrank {

// Canonical measurement format (UTF-8, line oriented):
//
//   # comment, blank lines ignored; trailing "# ..." on a row is ignored too
//   @vm        <id>, <vcpus>, <memory_gib>, <processor>, <clock_ghz>
//   @attribute <id>, <group>, <polarity>, <unit>, <label...>
//   <vm_id>, <attr_id>, <value>
//
// Declarations form the header and must precede the first observation row.
// <group> is one of memory_process, local_communication, computation,
// storage (G1..G4 accepted). <polarity> is higher_better or lower_better.
// The label runs to end of line and may contain commas.

/// Parses a canonical document. Repeated rows for one cell accumulate.
/// Errors carry the 1-based line number in their message.
MeasurementSet load_measurements(std::string_view document);

/// Inverse of load_measurements, up to row order and comments.
std::string to_canonical_text(const MeasurementSet& set);

/// Merges partial sets keyed by (vm, attr). VM / attribute declarations
/// must agree when repeated. Observations in every cell come out sorted, so
/// the result does not depend on input order.
MeasurementSet merge_measurement_sets(std::span<const MeasurementSet> parts);

/// Parses each document concurrently, then merges deterministically.
MeasurementSet load_measurement_documents(std::span<const std::string> documents);

/// Reads a whole file. Throws Error(Parse, InvalidArgument) if it can't be opened.
std::string read_text_file(const std::filesystem::path& path);

enum class AggregationMethod { Median, Mean, Min };

std::string_view to_string(AggregationMethod m) noexcept;
AggregationMethod parse_aggregation(std::string_view text);

/// Aggregates a non-empty list of repeated observations.
double aggregate_values(std::span<const double> values, AggregationMethod method);

/// One value per cell. Throws IncompleteMatrix listing every gap.
MeasurementMatrix aggregate(const MeasurementSet& set,
                            AggregationMethod method = AggregationMethod::Median);

}  // namespace vmrank
