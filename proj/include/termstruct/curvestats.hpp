#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "termstruct/ingest.hpp"
#include "termstruct/returns.hpp"

namespace termstruct {

// The four moment term-structure statistics. All use the plain 1/T
// normalization; skewness and kurtosis are standardized central moments
// (Gaussian kurtosis is 3, not 0).
double mean_abs(std::span<const double> values);
double variance(std::span<const double> values);
double skewness(std::span<const double> values);
double kurtosis(std::span<const double> values);

double mean_abs(const ReturnSeries& series);
double variance(const ReturnSeries& series);
double skewness(const ReturnSeries& series);
double kurtosis(const ReturnSeries& series);

struct MomentSummary {
    std::string market;
    int maturity = 0;
    std::size_t count = 0;
    double mean_abs = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

MomentSummary summarize_moments(const ReturnSeries& series);

// One summary per (market, maturity), sorted; per-series failures are
// rethrown with the market and maturity tagged onto the message.
std::vector<MomentSummary> moment_term_structure(const Dataset& dataset);

struct ContangoIndex {
    std::string market;
    double c = 0.0;  // fraction of compared dates with P_far > P_near
    int far_maturity = 0;
    int near_maturity = 0;  // shortest rank that served as the near leg
    long records = 0;       // dates compared
};

// Per date, the near leg is the shortest maturity present; ties (zero spread)
// count as not-contango.
ContangoIndex contango_index(const Dataset& dataset, std::string_view market, int far_maturity = 9);

}  // namespace termstruct
