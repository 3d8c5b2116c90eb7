#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "termstruct/tails.hpp"

namespace termstruct {

struct AggregatePoint {
    int maturity = 0;
    std::optional<double> mu_bar_pos;
    std::optional<double> mu_bar_neg;
    std::optional<double> mu_bar_abs;
    int n_pos = 0;  // markets contributing to each average
    int n_neg = 0;
    int n_abs = 0;
    std::optional<double> asymmetry;  // |mu_bar_pos - mu_bar_neg|
};

struct AggregateCurve {
    std::vector<AggregatePoint> points;  // sorted by maturity
};

// Unweighted cross-market average per (maturity, kind). Fits whose tail is
// smaller than n_tail_floor are excluded; markets missing a maturity simply
// reduce the count.
AggregateCurve aggregate_exponents(std::span<const TailFit> fits, std::size_t n_tail_floor = 50);

enum class AggregateField { kAbs, kPos, kNeg, kAsymmetry };

struct RegimeFit {
    std::optional<int> transition;  // Mt; the boundary month joins the low plateau
    double level_low = 0.0;
    double level_high = 0.0;
    double sse = 0.0;
    double sse_gain = 0.0;  // 1 - SSE_two_plateaus / SSE_single_constant
};

// Exhaustive search over integer breakpoints with >= 2 maturities per side;
// each plateau is the mean of its side. Smallest Mt wins ties; the transition
// is reported only when the SSE gain exceeds the threshold.
RegimeFit fit_two_plateaus(const AggregateCurve& curve, AggregateField field,
                           double gain_threshold = 0.3);

}  // namespace termstruct
