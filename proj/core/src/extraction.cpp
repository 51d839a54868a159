#include "vmrank/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "text_util.hpp"
#include "vmrank/error.hpp"

namespace vmrank {

using detail::parse_double;
using detail::split_fields;
using detail::trim;

namespace {

std::regex compile(const ExtractionRule& rule) {
  std::regex re;
  try {
    re = std::regex(rule.pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(Stage::Parse, ErrorCode::InvalidPattern,
                "rule for '" + rule.attr_id + "': invalid pattern: " + e.what());
  }
  if (re.mark_count() != 1) {
    throw Error(Stage::Parse, ErrorCode::InvalidPattern,
                "rule for '" + rule.attr_id + "': pattern must have exactly one capture group, has " +
                    std::to_string(re.mark_count()));
  }
  return re;
}

}  // namespace

ExtractionSpec ExtractionSpec::parse(std::string_view text) {
  ExtractionSpec spec;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') return;
    auto f = split_fields(t, 4);
    auto bad = [&](const std::string& what) {
      throw Error(Stage::Parse, ErrorCode::MalformedRow,
                  "extraction spec line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 4) bad("expected '<attr_id>, <scale>, <polarity_hint|->, <regex>'");
    ExtractionRule rule;
    rule.attr_id = std::string(f[0]);
    auto scale = parse_double(f[1]);
    if (!scale || !std::isfinite(*scale)) bad("scale '" + std::string(f[1]) + "' is not a number");
    rule.scale = *scale;
    if (f[2] != "-" && !f[2].empty()) rule.polarity_hint = parse_polarity(f[2]);
    rule.pattern = std::string(f[3]);
    if (rule.attr_id.empty() || rule.pattern.empty()) bad("empty attribute id or pattern");
    spec.rules.push_back(std::move(rule));
  });
  return spec;
}

void ExtractionSpec::validate(std::span<const AttributeDef> catalogue) const {
  for (const auto& rule : rules) {
    if (std::none_of(catalogue.begin(), catalogue.end(),
                     [&](const AttributeDef& a) { return a.id == rule.attr_id; })) {
      throw Error(Stage::Parse, ErrorCode::UnknownAttribute,
                  "extraction rule references unknown attribute '" + rule.attr_id + "'");
    }
    compile(rule);
  }
}

ExtractionResult apply_extraction_spec(std::string_view raw, const ExtractionSpec& spec,
                                       std::string_view vm_id,
                                       const MeasurementSet& declarations) {
  const VmDescriptor* vm = declarations.find_vm(vm_id);
  if (vm == nullptr) {
    throw Error(Stage::Parse, ErrorCode::UnknownVm, "unknown VM id '" + std::string(vm_id) + "'");
  }
  spec.validate(declarations.attributes());

  ExtractionResult result;
  result.set.add_vm(*vm);
  for (const auto& a : declarations.attributes()) result.set.add_attribute(a);

  const std::string text(raw);
  std::size_t matched_rules = 0;
  for (const auto& rule : spec.rules) {
    const std::regex re = compile(rule);
    const AttributeDef* attr = declarations.find_attribute(rule.attr_id);
    if (rule.polarity_hint && *rule.polarity_hint != attr->polarity) {
      result.warnings.push_back("rule for '" + rule.attr_id + "': polarity hint " +
                                std::string(to_string(*rule.polarity_hint)) +
                                " disagrees with catalogue (" +
                                std::string(to_string(attr->polarity)) + ")");
    }
    std::size_t hits = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
         ++it) {
      const std::string captured = (*it)[1].str();
      auto value = parse_double(captured);
      if (!value || !std::isfinite(*value)) {
        result.warnings.push_back("rule for '" + rule.attr_id + "': captured '" + captured +
                                  "' is not a number");
        continue;
      }
      result.set.add_observation(vm->id, rule.attr_id, *value * rule.scale);
      ++hits;
    }
    if (hits == 0) {
      result.warnings.push_back("rule for '" + rule.attr_id + "' matched nothing");
    } else {
      ++matched_rules;
    }
  }
  if (matched_rules == 0) {
    throw Error(Stage::Parse, ErrorCode::NoRuleMatched,
                "no extraction rule matched the input for VM '" + std::string(vm_id) +
                    "' (wrong spec for this tool output?)");
  }
  return result;
}

}  // namespace vmrank
