#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "termstruct/aggregate.hpp"
#include "termstruct/curvestats.hpp"
#include "termstruct/ingest.hpp"
#include "termstruct/returns.hpp"
#include "termstruct/scaling.hpp"
#include "termstruct/tails.hpp"

namespace termstruct {

// Insertion-ordered JSON keeps artifact bytes stable across runs.
using Json = nlohmann::ordered_json;

inline constexpr const char* kDatasetSchema = "termstruct.dataset/1";
inline constexpr const char* kReturnsSchema = "termstruct.returns/1";
inline constexpr const char* kMomentsSchema = "termstruct.moments/1";
inline constexpr const char* kScalingSchema = "termstruct.scaling/1";
inline constexpr const char* kTailsSchema = "termstruct.tails/1";
inline constexpr const char* kAggregateSchema = "termstruct.aggregate/1";

// Shortest decimal that round-trips the exact double; used for CSV output.
std::string format_double(double value);

Json dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const Json& doc);

Json returns_to_json(std::span<const ReturnSeries> series);
std::vector<ReturnSeries> returns_from_json(const Json& doc);

Json moment_summary_to_json(const MomentSummary& summary);
MomentSummary moment_summary_from_json(const Json& doc);

Json contango_to_json(const ContangoIndex& index);

Json scaling_fit_to_json(const PowerLawScalingFit& fit);
Json crossover_to_json(const CrossoverReport& report);
Json samuelson_to_json(const SamuelsonReport& report);

Json tail_fit_to_json(const TailFit& fit);
TailFit tail_fit_from_json(const Json& doc);

Json aggregate_to_json(const AggregateCurve& curve);
AggregateCurve aggregate_from_json(const Json& doc);

Json regime_fit_to_json(const RegimeFit& fit);

}  // namespace termstruct
