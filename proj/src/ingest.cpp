#include "termstruct/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "termstruct/errors.hpp"

namespace termstruct {

namespace {

constexpr std::string_view kHeader = "market,obs_date,delivery,settle";

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

double parse_settle(const std::string& text, long line_no) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed price '" + text + "'");
    }
    if (!(value > 0.0)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-positive price '" + text +
                         "'");
    }
    return value;
}

}  // namespace

std::vector<FuturesQuote> parse_quotes(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("line 1: empty input, expected header '" + std::string(kHeader) + "'");
    }
    if (trim(line) != kHeader) {
        throw ParseError("line 1: bad header '" + trim(line) + "', expected '" +
                         std::string(kHeader) + "'");
    }

    std::vector<FuturesQuote> quotes;
    std::set<std::tuple<std::string, Date, DeliveryMonth>> seen;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 4) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 4 columns, got " +
                             std::to_string(fields.size()));
        }
        FuturesQuote quote;
        quote.market = fields[0];
        if (quote.market.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": missing market identifier");
        }
        try {
            quote.obs_date = parse_date(fields[1]);
            quote.delivery = parse_delivery_month(fields[2]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        quote.settle = parse_settle(fields[3], line_no);
        if (quote.delivery < month_of(quote.obs_date)) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": delivery month precedes the observation month");
        }
        if (!seen.emplace(quote.market, quote.obs_date, quote.delivery).second) {
            throw DuplicateRecordError("line " + std::to_string(line_no) +
                                       ": duplicate record (" + quote.market + ", " +
                                       format_date(quote.obs_date) + ", " +
                                       format_delivery_month(quote.delivery) + ")");
        }
        quotes.push_back(std::move(quote));
    }
    return quotes;
}

std::vector<std::string> Dataset::markets() const {
    std::vector<std::string> names;
    for (const auto& s : series) {
        if (names.empty() || names.back() != s.market) names.push_back(s.market);
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

const ConstantMaturitySeries* Dataset::find(std::string_view market, int maturity) const {
    for (const auto& s : series) {
        if (s.market == market && s.maturity == maturity) return &s;
    }
    return nullptr;
}

std::vector<ConstantMaturitySeries> build_constant_maturity(std::span<const FuturesQuote> quotes,
                                                            std::string_view market) {
    // date -> deliveries observed that day; map keys give sorted output order,
    // so input permutation cannot matter.
    std::map<Date, std::map<DeliveryMonth, double>> by_date;
    for (const auto& quote : quotes) {
        if (quote.market != market) continue;
        if (quote.delivery < month_of(quote.obs_date)) continue;  // expired
        by_date[quote.obs_date][quote.delivery] = quote.settle;
    }

    std::map<int, ConstantMaturitySeries> by_rank;
    for (const auto& [date, deliveries] : by_date) {
        int rank = 0;
        for (const auto& [delivery, settle] : deliveries) {
            ++rank;
            auto& series = by_rank[rank];
            if (series.points.empty()) {
                series.market = std::string(market);
                series.maturity = rank;
            }
            series.points.push_back({date, settle});
        }
    }

    std::vector<ConstantMaturitySeries> result;
    result.reserve(by_rank.size());
    for (auto& [rank, series] : by_rank) result.push_back(std::move(series));
    return result;
}

Dataset build_dataset(std::span<const FuturesQuote> quotes) {
    if (quotes.empty()) {
        throw InsufficientDataError("no quotes to build a dataset from");
    }
    std::set<std::string> markets;
    for (const auto& quote : quotes) markets.insert(quote.market);

    Dataset dataset;
    bool first = true;
    for (const auto& market : markets) {
        auto series = build_constant_maturity(quotes, market);
        for (auto& s : series) {
            for (const auto& point : s.points) {
                if (first || point.date < dataset.period.first) dataset.period.first = point.date;
                if (first || dataset.period.last < point.date) dataset.period.last = point.date;
                first = false;
            }
            dataset.series.push_back(std::move(s));
        }
    }
    if (first) {
        throw InsufficientDataError("no unexpired quotes to build a dataset from");
    }
    return dataset;
}

std::vector<Dataset> align_period(std::vector<Dataset> datasets, const AlignOptions& options) {
    if (datasets.empty()) {
        throw InsufficientDataError("align_period requires at least one dataset");
    }

    DateRange window;
    if (options.policy == PeriodPolicy::kExplicit) {
        if (!options.window) {
            throw ConfigError("explicit period policy requires a (start, end) window");
        }
        window = *options.window;
        if (window.last < window.first) {
            throw ConfigError("explicit period window ends before it starts");
        }
    } else {
        window = datasets.front().period;
        for (const auto& dataset : datasets) {
            window.first = std::max(window.first, dataset.period.first);
            window.last = std::min(window.last, dataset.period.last);
        }
        if (window.last < window.first) {
            std::string who;
            for (const auto& dataset : datasets) {
                for (const auto& market : dataset.markets()) {
                    if (!who.empty()) who += ", ";
                    who += market + " [" + format_date(dataset.period.first) + " .. " +
                           format_date(dataset.period.last) + "]";
                }
            }
            throw AlignmentError("no common observation period across markets: " + who);
        }
    }

    for (auto& dataset : datasets) {
        std::vector<ConstantMaturitySeries> kept;
        for (auto& series : dataset.series) {
            const auto cap = options.maturity_caps.find(series.market);
            if (cap != options.maturity_caps.end() && series.maturity > cap->second) continue;
            std::erase_if(series.points, [&](const PricePoint& p) {
                return p.date < window.first || window.last < p.date;
            });
            if (!series.points.empty()) kept.push_back(std::move(series));
        }
        dataset.series = std::move(kept);
        dataset.period = window;
    }
    return datasets;
}

}  // namespace termstruct
