#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "termstruct/curvestats.hpp"

namespace termstruct {

struct CurvePoint {
    int maturity = 0;
    double value = 0.0;
};

struct PowerLawScalingFit {
    std::string market;
    std::string statistic;  // "mean_abs" or "variance" when produced by the pipeline
    double alpha = 0.0;     // y ~ M^(-alpha)
    double alpha_err = 0.0;
    double intercept = 0.0;  // ln(c) of y = c * M^(-alpha)
    double r_squared = 0.0;
    int m_min = 0;
    int m_max = 0;
    std::size_t n_points = 0;
};

// Unweighted OLS of ln y on ln M, optionally restricted to [range.first,
// range.second]. alpha is minus the slope, alpha_err its OLS standard error.
// Exact on noiseless power laws. Throws DomainError on y <= 0 or duplicate
// maturities, InsufficientDataError below 3 points.
PowerLawScalingFit fit_power_law_scaling(std::span<const CurvePoint> points,
                                         std::optional<std::pair<int, int>> range = std::nullopt);

struct CrossoverReport {
    std::string market;
    std::string statistic;
    std::optional<int> breakpoint;  // last maturity of the first segment
    double alpha_before = 0.0;      // best split, reported even when rejected
    double alpha_after = 0.0;
    double sse_gain = 0.0;  // 1 - SSE_two_segments / SSE_single
};

// Exhaustive breakpoint search with two independent log-log fits (>= 3 points
// per side). The breakpoint is reported only when the relative SSE gain
// exceeds the threshold; a clean single power law yields none.
CrossoverReport detect_crossover(std::span<const CurvePoint> points, double gain_threshold = 0.5);

struct MonotonicityReport {
    double decreasing_fraction = 0.0;  // consecutive maturity pairs that decrease
    int max_maturity = 0;              // where the curve peaks (bell-curve detector)
};

struct SamuelsonReport {
    std::string market;
    MonotonicityReport mean_abs;
    MonotonicityReport variance;
};

MonotonicityReport check_monotonicity(std::span<const CurvePoint> points);

// Per-market curve of MomentSummary sorted by maturity, >= 2 maturities.
SamuelsonReport samuelson_check(std::span<const MomentSummary> curve);

}  // namespace termstruct
