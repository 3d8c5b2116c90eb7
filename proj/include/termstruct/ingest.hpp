#pragma once

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "termstruct/dates.hpp"

namespace termstruct {

// One observed settlement price for one contract on one day.
struct FuturesQuote {
    std::string market;
    Date obs_date{};
    DeliveryMonth delivery{};
    double settle = 0.0;
};

// Input schema: header `market,obs_date,delivery,settle`, dates as YYYY-MM-DD,
// delivery as YYYY-MM, settle a strictly positive decimal. One quote per valid
// row, in file order. Throws ParseError / DuplicateRecordError naming the line.
std::vector<FuturesQuote> parse_quotes(std::istream& in);

struct PricePoint {
    Date date{};
    double price = 0.0;
};

// Per-market, per-maturity-rank daily price series; dates strictly increasing.
struct ConstantMaturitySeries {
    std::string market;
    int maturity = 0;  // rank M >= 1, labeled in months
    std::vector<PricePoint> points;
};

struct DateRange {
    Date first{};
    Date last{};
};

struct Dataset {
    std::vector<ConstantMaturitySeries> series;  // sorted by (market, maturity)
    DateRange period{};

    std::vector<std::string> markets() const;
    const ConstantMaturitySeries* find(std::string_view market, int maturity) const;
};

// Rearranges raw quotes into constant-maturity series: on each observation
// date the unexpired deliveries are sorted ascending and the k-th nearest gets
// rank M=k. A contract counts as expired once its delivery month is strictly
// before the month of the observation date. Empty input yields empty output.
std::vector<ConstantMaturitySeries> build_constant_maturity(std::span<const FuturesQuote> quotes,
                                                            std::string_view market);

// All markets at once; period spans the observed dates.
Dataset build_dataset(std::span<const FuturesQuote> quotes);

enum class PeriodPolicy { kIntersection, kExplicit };

struct AlignOptions {
    PeriodPolicy policy = PeriodPolicy::kIntersection;
    std::optional<DateRange> window;  // required for kExplicit
    std::map<std::string, int, std::less<>> maturity_caps;
};

// Truncates every series to the common (or explicit) period, drops series left
// empty and ranks above the per-market cap. Idempotent for a fixed policy.
// Throws AlignmentError naming the disjoint markets when the intersection is
// empty.
std::vector<Dataset> align_period(std::vector<Dataset> datasets, const AlignOptions& options);

}  // namespace termstruct
