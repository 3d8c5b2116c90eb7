#include "termstruct/returns.hpp"

#include <cmath>

#include "termstruct/errors.hpp"

namespace termstruct {

std::vector<double> ReturnSeries::values() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& obs : observations) out.push_back(obs.value);
    return out;
}

ReturnSeries compute_returns(const ConstantMaturitySeries& series) {
    if (series.points.size() < 2) {
        throw InsufficientDataError("series " + series.market + " M=" +
                                    std::to_string(series.maturity) +
                                    " has fewer than 2 points, no returns to compute");
    }
    ReturnSeries result;
    result.market = series.market;
    result.maturity = series.maturity;
    result.observations.reserve(series.points.size() - 1);
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        const auto& prev = series.points[i - 1];
        const auto& cur = series.points[i];
        const int dt = days_between(prev.date, cur.date);
        if (dt > 3) {
            ++result.skipped;
            continue;
        }
        const double value = (std::log(cur.price) - std::log(prev.price)) / dt;
        result.observations.push_back({cur.date, dt, value});
    }
    return result;
}

}  // namespace termstruct
