#pragma once

#include <string>
#include <vector>

#include "termstruct/dates.hpp"
#include "termstruct/ingest.hpp"

namespace termstruct {

struct ReturnObservation {
    Date date{};  // date of the later price
    int dt = 1;   // calendar days between the two prices, 1..3
    double value = 0.0;  // log-return per day
};

struct ReturnSeries {
    std::string market;
    int maturity = 0;
    std::vector<ReturnObservation> observations;
    long skipped = 0;  // consecutive pairs dropped by the gap rule

    std::vector<double> values() const;
};

// r = (ln P(t) - ln P(t - dt)) / dt for consecutive prices with a calendar gap
// of at most three days; wider gaps emit nothing and are counted in `skipped`.
ReturnSeries compute_returns(const ConstantMaturitySeries& series);

}  // namespace termstruct
