#include <cmath>
#include <sstream>

#include "text_util.hpp"
#include "vmrank/error.hpp"
#include "vmrank/validation.hpp"

namespace vmrank {

TimingSet load_timings(std::string_view document) {
  TimingSet set;
  bool any_content = false;
  detail::for_each_line(document, [&](std::size_t line_no, std::string_view raw) {
    std::string_view line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) return;
    any_content = true;
    auto fail = [&](ErrorCode code, const std::string& what) {
      throw Error(Stage::Parse, code, "line " + std::to_string(line_no) + ": " + what);
    };
    auto f = detail::split_fields(line, 3);
    if (f.size() != 3 || f[0].empty()) fail(ErrorCode::MalformedRow, "expected '<vm_id>, <mode>, <seconds>'");
    TimingRecord r;
    r.vm_id = std::string(f[0]);
    try {
      r.mode = parse_mode(f[1]);
    } catch (const Error& e) {
      fail(ErrorCode::MalformedRow, e.detail());
    }
    auto seconds = detail::parse_double(f[2]);
    if (!seconds || !std::isfinite(*seconds)) {
      fail(ErrorCode::MalformedRow, "seconds '" + std::string(f[2]) + "' is not a finite number");
    }
    if (*seconds <= 0.0) fail(ErrorCode::NonPositiveSeconds, "seconds must be positive");
    r.seconds = *seconds;
    set.records.push_back(std::move(r));
  });
  if (!any_content) throw Error(Stage::Parse, ErrorCode::EmptyInput, "timing document is empty");
  return set;
}

std::string to_timing_text(const TimingSet& timings) {
  std::ostringstream os;
  for (const auto& r : timings.records) {
    os << r.vm_id << ", " << to_string(r.mode) << ", " << detail::format_double(r.seconds) << '\n';
  }
  return os.str();
}

}  // namespace vmrank
