#pragma once

#include <string>
#include <string_view>

#include "vmrank/model.hpp"
#include "vmrank/sweep.hpp"
#include "vmrank/validation.hpp"

namespace vmrank {

enum class OutputFormat { Table, Json, Csv };

OutputFormat parse_format(std::string_view text);

std::string render(const RankTable& table, OutputFormat format);
std::string render(const SweepResult& result, OutputFormat format);
std::string render(const ComparisonReport& report, OutputFormat format);

/// Per-position frequencies (one column per rank position), for charting.
std::string render_sweep_plot_csv(const SweepResult& result);

}  // namespace vmrank
