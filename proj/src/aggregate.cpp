#include "termstruct/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "termstruct/errors.hpp"

namespace termstruct {

AggregateCurve aggregate_exponents(std::span<const TailFit> fits, std::size_t n_tail_floor) {
    struct Accumulator {
        double sum_pos = 0, sum_neg = 0, sum_abs = 0;
        int n_pos = 0, n_neg = 0, n_abs = 0;
    };
    std::map<int, Accumulator> by_maturity;
    for (const auto& fit : fits) {
        if (fit.n_tail < n_tail_floor) continue;
        auto& acc = by_maturity[fit.maturity];
        switch (fit.kind) {
            case TailKind::kPositive: acc.sum_pos += fit.mu; ++acc.n_pos; break;
            case TailKind::kNegative: acc.sum_neg += fit.mu; ++acc.n_neg; break;
            case TailKind::kAbsolute: acc.sum_abs += fit.mu; ++acc.n_abs; break;
        }
    }
    if (by_maturity.empty()) {
        throw InsufficientDataError("no accepted tail fits to aggregate");
    }

    AggregateCurve curve;
    for (const auto& [maturity, acc] : by_maturity) {
        AggregatePoint point;
        point.maturity = maturity;
        point.n_pos = acc.n_pos;
        point.n_neg = acc.n_neg;
        point.n_abs = acc.n_abs;
        if (acc.n_pos > 0) point.mu_bar_pos = acc.sum_pos / acc.n_pos;
        if (acc.n_neg > 0) point.mu_bar_neg = acc.sum_neg / acc.n_neg;
        if (acc.n_abs > 0) point.mu_bar_abs = acc.sum_abs / acc.n_abs;
        if (point.mu_bar_pos && point.mu_bar_neg) {
            point.asymmetry = std::abs(*point.mu_bar_pos - *point.mu_bar_neg);
        }
        curve.points.push_back(point);
    }
    return curve;
}

namespace {

std::optional<double> field_value(const AggregatePoint& point, AggregateField field) {
    switch (field) {
        case AggregateField::kAbs: return point.mu_bar_abs;
        case AggregateField::kPos: return point.mu_bar_pos;
        case AggregateField::kNeg: return point.mu_bar_neg;
        case AggregateField::kAsymmetry: return point.asymmetry;
    }
    return std::nullopt;
}

double sse_around_mean(std::span<const double> values, std::size_t begin, std::size_t end,
                       double* mean_out) {
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += values[i];
    mean /= static_cast<double>(end - begin);
    double sse = 0.0;
    for (std::size_t i = begin; i < end; ++i) sse += (values[i] - mean) * (values[i] - mean);
    if (mean_out != nullptr) *mean_out = mean;
    return sse;
}

}  // namespace

RegimeFit fit_two_plateaus(const AggregateCurve& curve, AggregateField field,
                           double gain_threshold) {
    std::vector<int> maturities;
    std::vector<double> values;
    for (const auto& point : curve.points) {
        if (const auto value = field_value(point, field)) {
            maturities.push_back(point.maturity);
            values.push_back(*value);
        }
    }
    const std::size_t n = values.size();
    if (n < 5) {
        throw InsufficientDataError("two-plateau fit needs at least 5 maturities, got " +
                                    std::to_string(n));
    }

    const double sse_one = sse_around_mean(values, 0, n, nullptr);

    RegimeFit best;
    double best_sse = -1.0;
    int best_mt = 0;
    double best_low = 0.0, best_high = 0.0;
    // Mt = last maturity of the low plateau; >= 2 maturities per side
    for (std::size_t i = 1; i + 2 < n; ++i) {
        double low = 0.0, high = 0.0;
        const double sse = sse_around_mean(values, 0, i + 1, &low) +
                           sse_around_mean(values, i + 1, n, &high);
        if (best_sse < 0.0 || sse < best_sse) {  // ties keep the smaller Mt
            best_sse = sse;
            best_mt = maturities[i];
            best_low = low;
            best_high = high;
        }
    }

    best.level_low = best_low;
    best.level_high = best_high;
    best.sse = best_sse;
    best.sse_gain = sse_one > 0.0 ? 1.0 - best_sse / sse_one : 0.0;
    if (best.sse_gain > gain_threshold) best.transition = best_mt;
    return best;
}

}  // namespace termstruct
