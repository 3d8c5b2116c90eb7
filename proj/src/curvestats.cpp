#include "termstruct/curvestats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "termstruct/errors.hpp"

namespace termstruct {

namespace {

double mean(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double central_variance(std::span<const double> values, double mean_value) {
    double sum = 0.0;
    for (double v : values) {
        const double d = v - mean_value;
        sum += d * d;
    }
    return sum / static_cast<double>(values.size());
}

}  // namespace

double mean_abs(std::span<const double> values) {
    if (values.empty()) {
        throw InsufficientDataError("mean_abs needs at least one observation");
    }
    double sum = 0.0;
    for (double v : values) sum += std::abs(v);
    return sum / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
    if (values.size() < 2) {
        throw InsufficientDataError("variance needs at least two observations");
    }
    return central_variance(values, mean(values));
}

double skewness(std::span<const double> values) {
    if (values.size() < 3) {
        throw InsufficientDataError("skewness needs at least three observations");
    }
    const double m = mean(values);
    const double var = central_variance(values, m);
    if (var <= 0.0) {
        throw DegenerateDataError("skewness undefined at zero variance");
    }
    const double sigma = std::sqrt(var);
    double sum = 0.0;
    for (double v : values) {
        const double z = (v - m) / sigma;
        sum += z * z * z;
    }
    return sum / static_cast<double>(values.size());
}

double kurtosis(std::span<const double> values) {
    if (values.size() < 4) {
        throw InsufficientDataError("kurtosis needs at least four observations");
    }
    const double m = mean(values);
    const double var = central_variance(values, m);
    if (var <= 0.0) {
        throw DegenerateDataError("kurtosis undefined at zero variance");
    }
    const double sigma = std::sqrt(var);
    double sum = 0.0;
    for (double v : values) {
        const double z = (v - m) / sigma;
        sum += z * z * z * z;
    }
    return sum / static_cast<double>(values.size());
}

double mean_abs(const ReturnSeries& series) { return mean_abs(std::span(series.values())); }
double variance(const ReturnSeries& series) { return variance(std::span(series.values())); }
double skewness(const ReturnSeries& series) { return skewness(std::span(series.values())); }
double kurtosis(const ReturnSeries& series) { return kurtosis(std::span(series.values())); }

MomentSummary summarize_moments(const ReturnSeries& series) {
    const auto values = series.values();
    MomentSummary summary;
    summary.market = series.market;
    summary.maturity = series.maturity;
    summary.count = values.size();
    summary.mean_abs = mean_abs(std::span(values));
    summary.variance = variance(std::span(values));
    summary.skewness = skewness(std::span(values));
    summary.kurtosis = kurtosis(std::span(values));
    return summary;
}

std::vector<MomentSummary> moment_term_structure(const Dataset& dataset) {
    std::vector<MomentSummary> summaries;
    summaries.reserve(dataset.series.size());
    for (const auto& series : dataset.series) {
        const std::string tag = series.market + " M=" + std::to_string(series.maturity) + ": ";
        try {
            summaries.push_back(summarize_moments(compute_returns(series)));
        } catch (const InsufficientDataError& e) {
            throw InsufficientDataError(tag + e.what());
        } catch (const DegenerateDataError& e) {
            throw DegenerateDataError(tag + e.what());
        }
    }
    std::sort(summaries.begin(), summaries.end(), [](const auto& a, const auto& b) {
        return std::tie(a.market, a.maturity) < std::tie(b.market, b.maturity);
    });
    return summaries;
}

ContangoIndex contango_index(const Dataset& dataset, std::string_view market, int far_maturity) {
    const auto* far = dataset.find(market, far_maturity);
    if (far == nullptr) {
        throw InsufficientDataError("market " + std::string(market) + " has no maturity rank " +
                                    std::to_string(far_maturity));
    }

    // price-by-date lookup per nearer rank, cheapest rank first
    std::map<int, std::map<Date, double>> nearer;
    for (const auto& series : dataset.series) {
        if (series.market == market && series.maturity < far_maturity) {
            auto& prices = nearer[series.maturity];
            for (const auto& point : series.points) prices.emplace(point.date, point.price);
        }
    }

    ContangoIndex index;
    index.market = std::string(market);
    index.far_maturity = far_maturity;
    index.near_maturity = far_maturity;
    long in_contango = 0;
    for (const auto& point : far->points) {
        for (const auto& [rank, prices] : nearer) {
            const auto near_price = prices.find(point.date);
            if (near_price == prices.end()) continue;
            ++index.records;
            // strict: a zero spread is not a contango
            if (point.price - near_price->second > 0.0) ++in_contango;
            index.near_maturity = std::min(index.near_maturity, rank);
            break;
        }
    }
    if (index.records == 0) {
        throw InsufficientDataError("market " + std::string(market) +
                                    ": no dates with both the near and far maturity");
    }
    index.c = static_cast<double>(in_contango) / static_cast<double>(index.records);
    return index;
}

}  // namespace termstruct
