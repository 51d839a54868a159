#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vmrank/model.hpp"

namespace vmrank {

/// Config-driven adapter turning raw benchmark tool output into observations.
///
/// Text form, one rule per line (# comments allowed):
///
///   <attr_id>, <scale>, <polarity_hint|->, <regex with one capture group>
///
/// The regex (ECMAScript) runs to end of line, so it may contain commas.
struct ExtractionRule {
  std::string attr_id;
  std::string pattern;
  double scale = 1.0;
  std::optional<Polarity> polarity_hint;
};

struct ExtractionSpec {
  std::vector<ExtractionRule> rules;

  static ExtractionSpec parse(std::string_view text);

  /// Every attr_id must exist in `catalogue`, every pattern must compile and
  /// have exactly one capture group. Throws UnknownAttribute / InvalidPattern.
  void validate(std::span<const AttributeDef> catalogue) const;
};

struct ExtractionResult {
  MeasurementSet set;                 // just `vm_id` plus the catalogue
  std::vector<std::string> warnings;  // unmatched rules, polarity mismatches
};

/// Applies every rule to `raw`; each match becomes one observation of
/// captured value x scale. Throws NoRuleMatched if nothing matched at all.
ExtractionResult apply_extraction_spec(std::string_view raw, const ExtractionSpec& spec,
                                       std::string_view vm_id, const MeasurementSet& declarations);

}  // namespace vmrank
