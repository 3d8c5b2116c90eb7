#include "termstruct/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "termstruct/errors.hpp"

namespace termstruct {

namespace {

struct OlsFit {
    double slope = 0.0;
    double slope_err = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
    double sst = 0.0;
};

// ln y on ln M
OlsFit log_log_ols(std::span<const CurvePoint> points) {
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points) {
        sx += std::log(static_cast<double>(p.maturity));
        sy += std::log(p.value);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = std::log(static_cast<double>(p.maturity)) - mx;
        const double dy = std::log(p.value) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.sse = 0.0;
    for (const auto& p : points) {
        const double r = std::log(p.value) -
                         (fit.intercept + fit.slope * std::log(static_cast<double>(p.maturity)));
        fit.sse += r * r;
    }
    fit.sst = syy;
    if (points.size() > 2) {
        fit.slope_err = std::sqrt(std::max(fit.sse, 0.0) / (n - 2.0) / sxx);
    }
    return fit;
}

std::vector<CurvePoint> usable_points(std::span<const CurvePoint> points,
                                      std::optional<std::pair<int, int>> range) {
    std::vector<CurvePoint> kept;
    std::set<int> maturities;
    for (const auto& p : points) {
        if (range && (p.maturity < range->first || p.maturity > range->second)) continue;
        if (!(p.value > 0.0)) {
            throw DomainError("power-law fit needs y > 0, got " + std::to_string(p.value) +
                              " at M=" + std::to_string(p.maturity));
        }
        if (!maturities.insert(p.maturity).second) {
            throw DomainError("duplicate maturity M=" + std::to_string(p.maturity) +
                              " in fit input");
        }
        kept.push_back(p);
    }
    std::sort(kept.begin(), kept.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.maturity < b.maturity; });
    return kept;
}

}  // namespace

PowerLawScalingFit fit_power_law_scaling(std::span<const CurvePoint> points,
                                         std::optional<std::pair<int, int>> range) {
    const auto kept = usable_points(points, range);
    if (kept.size() < 3) {
        throw InsufficientDataError("power-law fit needs at least 3 points, got " +
                                    std::to_string(kept.size()));
    }
    const auto ols = log_log_ols(kept);
    PowerLawScalingFit fit;
    fit.alpha = -ols.slope;
    fit.alpha_err = ols.slope_err;
    fit.intercept = ols.intercept;
    fit.r_squared = ols.sst > 0.0 ? 1.0 - ols.sse / ols.sst : 1.0;
    fit.m_min = kept.front().maturity;
    fit.m_max = kept.back().maturity;
    fit.n_points = kept.size();
    return fit;
}

CrossoverReport detect_crossover(std::span<const CurvePoint> points, double gain_threshold) {
    const auto kept = usable_points(points, std::nullopt);
    if (kept.size() < 8) {
        throw InsufficientDataError("crossover detection needs at least 8 points, got " +
                                    std::to_string(kept.size()));
    }
    const double sse_one = log_log_ols(kept).sse;

    CrossoverReport report;
    double best_sse = -1.0;
    int best_break = 0;
    double best_alpha_before = 0.0, best_alpha_after = 0.0;
    // candidate break = last maturity of the left segment; >= 3 points per side
    for (std::size_t i = 2; i + 3 < kept.size(); ++i) {
        const std::span left(kept.data(), i + 1);
        const std::span right(kept.data() + i + 1, kept.size() - i - 1);
        const auto fit_left = log_log_ols(left);
        const auto fit_right = log_log_ols(right);
        const double sse = fit_left.sse + fit_right.sse;
        if (best_sse < 0.0 || sse < best_sse) {
            best_sse = sse;
            best_break = kept[i].maturity;
            best_alpha_before = -fit_left.slope;
            best_alpha_after = -fit_right.slope;
        }
    }

    report.alpha_before = best_alpha_before;
    report.alpha_after = best_alpha_after;
    report.sse_gain = sse_one > 0.0 ? 1.0 - best_sse / sse_one : 0.0;
    if (report.sse_gain > gain_threshold) report.breakpoint = best_break;
    return report;
}

MonotonicityReport check_monotonicity(std::span<const CurvePoint> points) {
    if (points.size() < 2) {
        throw InsufficientDataError("monotonicity check needs at least 2 maturities");
    }
    std::vector<CurvePoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.maturity < b.maturity; });

    MonotonicityReport report;
    std::size_t decreasing = 0;
    std::size_t max_index = 0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].value < sorted[i - 1].value) ++decreasing;
        if (sorted[i].value > sorted[max_index].value) max_index = i;
    }
    report.decreasing_fraction =
        static_cast<double>(decreasing) / static_cast<double>(sorted.size() - 1);
    report.max_maturity = sorted[max_index].maturity;
    return report;
}

SamuelsonReport samuelson_check(std::span<const MomentSummary> curve) {
    if (curve.size() < 2) {
        throw InsufficientDataError("samuelson check needs at least 2 maturities");
    }
    std::vector<CurvePoint> mean_points, var_points;
    mean_points.reserve(curve.size());
    var_points.reserve(curve.size());
    for (const auto& summary : curve) {
        mean_points.push_back({summary.maturity, summary.mean_abs});
        var_points.push_back({summary.maturity, summary.variance});
    }
    SamuelsonReport report;
    report.market = curve.front().market;
    report.mean_abs = check_monotonicity(mean_points);
    report.variance = check_monotonicity(var_points);
    return report;
}

}  // namespace termstruct
