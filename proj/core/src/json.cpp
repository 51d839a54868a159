#include "vmrank/json.hpp"

#include "vmrank/error.hpp"

namespace vmrank {

using nlohmann::json;

void to_json(json& j, const VmDescriptor& v) {
  j = json{{"id", v.id},
           {"vcpus", v.vcpus},
           {"memory_gib", v.memory_gib},
           {"processor", v.processor},
           {"clock_ghz", v.clock_ghz}};
}

void from_json(const json& j, VmDescriptor& v) {
  j.at("id").get_to(v.id);
  j.at("vcpus").get_to(v.vcpus);
  j.at("memory_gib").get_to(v.memory_gib);
  j.at("processor").get_to(v.processor);
  j.at("clock_ghz").get_to(v.clock_ghz);
  v.validate();
}

void to_json(json& j, const AttributeDef& a) {
  j = json{{"id", a.id},
           {"label", a.label},
           {"group", std::string(to_string(a.group))},
           {"polarity", std::string(to_string(a.polarity))},
           {"unit", a.unit}};
}

void from_json(const json& j, AttributeDef& a) {
  j.at("id").get_to(a.id);
  j.at("label").get_to(a.label);
  a.group = parse_group(j.at("group").get<std::string>());
  a.polarity = parse_polarity(j.at("polarity").get<std::string>());
  j.at("unit").get_to(a.unit);
}

void to_json(json& j, const WeightVector& w) { j = w.values(); }

WeightVector weights_from_json(const json& j) {
  if (!j.is_array() || j.size() != kGroupCount) {
    throw Error(Stage::Usage, ErrorCode::InvalidWeights, "weights must be an array of 4 integers");
  }
  std::array<int, kGroupCount> w{};
  for (std::size_t k = 0; k < kGroupCount; ++k) {
    if (!j[k].is_number_integer()) {
      throw Error(Stage::Usage, ErrorCode::InvalidWeights,
                  "weights[" + std::to_string(k) + "] is not an integer");
    }
    w[k] = j[k].get<int>();
  }
  return WeightVector(w);
}

void to_json(json& j, const RankEntry& e) {
  j = json{{"vm", e.vm_id}, {"score", e.score}, {"rank", e.rank}};
}

void from_json(const json& j, RankEntry& e) {
  j.at("vm").get_to(e.vm_id);
  j.at("score").get_to(e.score);
  j.at("rank").get_to(e.rank);
}

void to_json(json& j, const RankTable& t) {
  j = json{{"kind", std::string(to_string(t.kind()))},
           {"provenance", std::string(to_string(t.provenance()))},
           {"entries", t.entries()}};
}

RankTable rank_table_from_json(const json& j) {
  const auto kind = parse_rank_kind(j.at("kind").get<std::string>());
  const auto prov_text = j.value("provenance", std::string("computed"));
  const auto provenance = prov_text == "published" ? RankProvenance::Published : RankProvenance::Computed;
  auto entries = j.at("entries").get<std::vector<RankEntry>>();
  return RankTable::from_entries(kind, provenance, std::move(entries));
}

namespace {

CorrelationMethod method_from_name(const std::string& s) { return parse_method(s); }

}  // namespace

void to_json(json& j, const ComparisonReport& r) {
  j = json{{"method", std::string(to_string(r.method))},
           {"coefficient", r.coefficient},
           {"per_vm_delta", r.per_vm_delta},
           {"top_k", r.top_k},
           {"top_k_overlap", r.top_k_overlap},
           {"table_a", std::string(to_string(r.kind_a))},
           {"table_b", std::string(to_string(r.kind_b))}};
}

void from_json(const json& j, ComparisonReport& r) {
  r.method = method_from_name(j.at("method").get<std::string>());
  j.at("coefficient").get_to(r.coefficient);
  j.at("per_vm_delta").get_to(r.per_vm_delta);
  j.at("top_k").get_to(r.top_k);
  j.at("top_k_overlap").get_to(r.top_k_overlap);
  r.kind_a = parse_rank_kind(j.at("table_a").get<std::string>());
  r.kind_b = parse_rank_kind(j.at("table_b").get<std::string>());
}

void to_json(json& j, const SweepResult& r) {
  json rows = json::array();
  for (const auto& [vm, counts] : r.position_counts) {
    const int top = r.top_k_counts.at(vm);
    rows.push_back(json{{"vm", vm},
                        {"position_counts", counts},
                        {"topk_count", top},
                        {"topk_frequency", r.top_k_frequency(vm)}});
  }
  j = json{{"total_vectors", r.total_vectors},
           {"k", r.k},
           {"mode", std::string(to_string(r.mode))},
           {"vms", rows}};
}

void from_json(const json& j, SweepResult& r) {
  j.at("total_vectors").get_to(r.total_vectors);
  j.at("k").get_to(r.k);
  r.mode = parse_mode(j.at("mode").get<std::string>());
  r.position_counts.clear();
  r.top_k_counts.clear();
  for (const auto& row : j.at("vms")) {
    const auto vm = row.at("vm").get<std::string>();
    r.position_counts[vm] = row.at("position_counts").get<std::vector<int>>();
    r.top_k_counts[vm] = row.at("topk_count").get<int>();
  }
}

void to_json(json& j, const DivergenceReport& r) {
  json flagged = json::array();
  for (const auto& f : r.flagged) {
    flagged.push_back(json{{"vm", f.vm_id}, {"rank_a", f.rank_a}, {"rank_b", f.rank_b}, {"delta", f.delta}});
  }
  json groups = json::array();
  for (auto g : r.groups_to_revisit) groups.push_back(std::string(to_string(g)));
  j = json{{"threshold", r.threshold}, {"flagged", flagged}, {"groups_to_revisit", groups}};
}

void to_json(json& j, const TimingRecord& r) {
  j = json{{"vm", r.vm_id}, {"mode", std::string(to_string(r.mode))}, {"seconds", r.seconds}};
}

void from_json(const json& j, TimingRecord& r) {
  j.at("vm").get_to(r.vm_id);
  r.mode = parse_mode(j.value("mode", std::string("sequential")));
  j.at("seconds").get_to(r.seconds);
}

void to_json(json& j, const MeasurementSet& s) {
  json obs = json::array();
  for (const auto& [key, values] : s.observations()) {
    obs.push_back(json{{"vm", key.first}, {"attribute", key.second}, {"values", values}});
  }
  j = json{{"vms", s.vms()}, {"attributes", s.attributes()}, {"observations", obs}};
}

MeasurementSet measurement_set_from_json(const json& j) {
  MeasurementSet s;
  for (const auto& v : j.at("vms")) s.add_vm(v.get<VmDescriptor>());
  for (const auto& a : j.at("attributes")) s.add_attribute(a.get<AttributeDef>());
  for (const auto& o : j.at("observations")) {
    const auto vm = o.at("vm").get<std::string>();
    const auto attr = o.at("attribute").get<std::string>();
    for (double v : o.at("values")) s.add_observation(vm, attr, v);
  }
  return s;
}

json explained_ranking_json(const RankTable& table, const GroupScoreTable& groups,
                            const WeightVector& w) {
  json entries = json::array();
  for (const auto& e : table.entries()) {
    json contributions = json::object();
    for (auto g : kAllGroups) {
      const auto gs = groups.at(e.vm_id, g);
      contributions[std::string(to_string(g))] = gs && w[g] != 0 ? *gs * static_cast<double>(w[g]) : 0.0;
    }
    entries.push_back(json{{"vm", e.vm_id},
                           {"score", e.score},
                           {"rank", e.rank},
                           {"contributions", contributions}});
  }
  return json{{"kind", std::string(to_string(table.kind()))},
              {"provenance", std::string(to_string(table.provenance()))},
              {"weights", w},
              {"entries", entries}};
}

}  // namespace vmrank
