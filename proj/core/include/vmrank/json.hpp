#pragma once

#include <nlohmann/json.hpp>

#include "vmrank/model.hpp"
#include "vmrank/scoring.hpp"
#include "vmrank/sweep.hpp"
#include "vmrank/validation.hpp"

// nlohmann/json adapters for the core types. Every to_json has a matching
// from_json that restores an equal value (RankTable is re-validated).
namespace vmrank {

void to_json(nlohmann::json& j, const VmDescriptor& v);
void from_json(const nlohmann::json& j, VmDescriptor& v);

void to_json(nlohmann::json& j, const AttributeDef& a);
void from_json(const nlohmann::json& j, AttributeDef& a);

void to_json(nlohmann::json& j, const WeightVector& w);
WeightVector weights_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const RankEntry& e);
void from_json(const nlohmann::json& j, RankEntry& e);

void to_json(nlohmann::json& j, const RankTable& t);
RankTable rank_table_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const ComparisonReport& r);
void from_json(const nlohmann::json& j, ComparisonReport& r);

void to_json(nlohmann::json& j, const SweepResult& r);
void from_json(const nlohmann::json& j, SweepResult& r);

void to_json(nlohmann::json& j, const DivergenceReport& r);

void to_json(nlohmann::json& j, const TimingRecord& r);
void from_json(const nlohmann::json& j, TimingRecord& r);

void to_json(nlohmann::json& j, const MeasurementSet& s);
MeasurementSet measurement_set_from_json(const nlohmann::json& j);

/// Rank table plus per-group contribution (group score x weight) per VM.
nlohmann::json explained_ranking_json(const RankTable& table, const GroupScoreTable& groups,
                                      const WeightVector& w);

}  // namespace vmrank
