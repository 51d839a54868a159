#include "vmrank/render.hpp"

#include <cstdio>
#include <sstream>

#include "vmrank/error.hpp"
#include "vmrank/json.hpp"

namespace vmrank {

OutputFormat parse_format(std::string_view text) {
  if (text == "table") return OutputFormat::Table;
  if (text == "json") return OutputFormat::Json;
  if (text == "csv") return OutputFormat::Csv;
  throw Error(Stage::Usage, ErrorCode::InvalidArgument,
              "unknown format '" + std::string(text) + "'; expected table, json or csv");
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string_view s, std::size_t width, bool right = false) {
  std::string out(s);
  if (out.size() >= width) return out;
  const std::string fill(width - out.size(), ' ');
  return right ? fill + out : out + fill;
}

}  // namespace

std::string render(const RankTable& table, OutputFormat format) {
  if (format == OutputFormat::Json) return nlohmann::json(table).dump(2) + "\n";
  std::ostringstream os;
  if (format == OutputFormat::Csv) {
    os << "rank,vm,score\n";
    for (const auto& e : table.entries()) os << e.rank << ',' << e.vm_id << ',' << fixed(e.score, 6) << '\n';
    return os.str();
  }
  std::size_t w = 2;
  for (const auto& e : table.entries()) w = std::max(w, e.vm_id.size());
  os << pad("rank", 5, true) << "  " << pad("vm", w) << "  " << pad("score", 10, true) << '\n';
  os << std::string(5 + 2 + w + 2 + 10, '-') << '\n';
  for (const auto& e : table.entries()) {
    os << pad(std::to_string(e.rank), 5, true) << "  " << pad(e.vm_id, w) << "  "
       << pad(fixed(e.score, 4), 10, true) << '\n';
  }
  os << "(" << to_string(table.kind()) << ", " << table.size() << " VMs)\n";
  return os.str();
}

std::string render(const SweepResult& result, OutputFormat format) {
  if (format == OutputFormat::Json) return nlohmann::json(result).dump(2) + "\n";
  std::ostringstream os;
  if (format == OutputFormat::Csv) {
    os << "vm";
    for (int p = 1; p <= result.k; ++p) os << ",rank" << p << "_count";
    os << ",topk_count,topk_frequency\n";
    for (const auto& [vm, counts] : result.position_counts) {
      os << vm;
      for (int c : counts) os << ',' << c;
      os << ',' << result.top_k_counts.at(vm) << ',' << fixed(result.top_k_frequency(vm), 6) << '\n';
    }
    return os.str();
  }
  std::size_t w = 2;
  for (const auto& [vm, c] : result.position_counts) w = std::max(w, vm.size());
  os << pad("vm", w);
  for (int p = 1; p <= result.k; ++p) os << "  " << pad("rank" + std::to_string(p), 7, true);
  os << "  " << pad("top" + std::to_string(result.k), 7, true) << "  " << pad("freq", 7, true) << '\n';
  os << std::string(w + static_cast<std::size_t>(result.k + 2) * 9, '-') << '\n';
  for (const auto& [vm, counts] : result.position_counts) {
    os << pad(vm, w);
    for (int c : counts) os << "  " << pad(std::to_string(c), 7, true);
    os << "  " << pad(std::to_string(result.top_k_counts.at(vm)), 7, true) << "  "
       << pad(fixed(result.top_k_frequency(vm), 3), 7, true) << '\n';
  }
  os << "total_vectors: " << result.total_vectors << " (mode " << to_string(result.mode) << ", k "
     << result.k << ")\n";
  return os.str();
}

std::string render(const ComparisonReport& report, OutputFormat format) {
  if (format == OutputFormat::Json) return nlohmann::json(report).dump(2) + "\n";
  std::ostringstream os;
  if (format == OutputFormat::Csv) {
    os << "vm,delta\n";
    for (const auto& [vm, d] : report.per_vm_delta) os << vm << ',' << d << '\n';
    os << "# method," << to_string(report.method) << "\n# coefficient," << fixed(report.coefficient, 6)
       << "\n# top" << report.top_k << "_overlap," << report.top_k_overlap << '\n';
    return os.str();
  }
  os << to_string(report.method) << ": " << fixed(report.coefficient, 3) << "  ("
     << to_string(report.kind_a) << " vs " << to_string(report.kind_b) << ", "
     << report.per_vm_delta.size() << " shared VMs)\n";
  os << "top-" << report.top_k << " overlap: " << report.top_k_overlap << '\n';
  std::size_t w = 2;
  for (const auto& [vm, d] : report.per_vm_delta) w = std::max(w, vm.size());
  os << pad("vm", w) << "  " << pad("delta", 6, true) << '\n';
  for (const auto& [vm, d] : report.per_vm_delta) {
    os << pad(vm, w) << "  " << pad((d > 0 ? "+" : "") + std::to_string(d), 6, true) << '\n';
  }
  return os.str();
}

std::string render_sweep_plot_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "vm";
  for (int p = 1; p <= result.k; ++p) os << ",rank" << p << "_frequency";
  os << '\n';
  for (const auto& [vm, counts] : result.position_counts) {
    os << vm;
    for (int p = 1; p <= result.k; ++p) os << ',' << fixed(result.position_frequency(vm, p), 6);
    os << '\n';
  }
  return os.str();
}

}  // namespace vmrank
