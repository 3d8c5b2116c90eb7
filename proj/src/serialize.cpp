#include "termstruct/serialize.hpp"

#include "termstruct/errors.hpp"

namespace termstruct {

namespace {

void require_schema(const Json& doc, const char* schema) {
    if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != schema) {
        throw InputError(std::string("artifact does not carry schema '") + schema + "'");
    }
}

Json opt_to_json(const std::optional<double>& value) {
    return value ? Json(*value) : Json(nullptr);
}

std::optional<double> opt_from_json(const Json& value) {
    if (value.is_null()) return std::nullopt;
    return value.get<double>();
}

}  // namespace

std::string format_double(double value) { return Json(value).dump(); }

Json dataset_to_json(const Dataset& dataset) {
    Json doc;
    doc["schema"] = kDatasetSchema;
    doc["period"] = {{"first", format_date(dataset.period.first)},
                     {"last", format_date(dataset.period.last)}};
    Json series = Json::array();
    for (const auto& s : dataset.series) {
        Json points = Json::array();
        for (const auto& p : s.points) points.push_back({format_date(p.date), p.price});
        series.push_back(
            {{"market", s.market}, {"maturity", s.maturity}, {"points", std::move(points)}});
    }
    doc["series"] = std::move(series);
    return doc;
}

Dataset dataset_from_json(const Json& doc) {
    require_schema(doc, kDatasetSchema);
    Dataset dataset;
    dataset.period.first = parse_date(doc.at("period").at("first").get<std::string>());
    dataset.period.last = parse_date(doc.at("period").at("last").get<std::string>());
    for (const auto& s : doc.at("series")) {
        ConstantMaturitySeries series;
        series.market = s.at("market").get<std::string>();
        series.maturity = s.at("maturity").get<int>();
        for (const auto& p : s.at("points")) {
            series.points.push_back({parse_date(p.at(0).get<std::string>()),
                                     p.at(1).get<double>()});
        }
        dataset.series.push_back(std::move(series));
    }
    return dataset;
}

Json returns_to_json(std::span<const ReturnSeries> series) {
    Json doc;
    doc["schema"] = kReturnsSchema;
    Json list = Json::array();
    for (const auto& s : series) {
        Json observations = Json::array();
        for (const auto& o : s.observations) {
            observations.push_back({format_date(o.date), o.dt, o.value});
        }
        list.push_back({{"market", s.market},
                        {"maturity", s.maturity},
                        {"skipped", s.skipped},
                        {"observations", std::move(observations)}});
    }
    doc["series"] = std::move(list);
    return doc;
}

std::vector<ReturnSeries> returns_from_json(const Json& doc) {
    require_schema(doc, kReturnsSchema);
    std::vector<ReturnSeries> result;
    for (const auto& s : doc.at("series")) {
        ReturnSeries series;
        series.market = s.at("market").get<std::string>();
        series.maturity = s.at("maturity").get<int>();
        series.skipped = s.at("skipped").get<long>();
        for (const auto& o : s.at("observations")) {
            series.observations.push_back({parse_date(o.at(0).get<std::string>()),
                                           o.at(1).get<int>(), o.at(2).get<double>()});
        }
        result.push_back(std::move(series));
    }
    return result;
}

Json moment_summary_to_json(const MomentSummary& summary) {
    return Json{{"market", summary.market},   {"maturity", summary.maturity},
                {"count", summary.count},     {"mean_abs", summary.mean_abs},
                {"variance", summary.variance}, {"skewness", summary.skewness},
                {"kurtosis", summary.kurtosis}};
}

MomentSummary moment_summary_from_json(const Json& doc) {
    MomentSummary summary;
    summary.market = doc.at("market").get<std::string>();
    summary.maturity = doc.at("maturity").get<int>();
    summary.count = doc.at("count").get<std::size_t>();
    summary.mean_abs = doc.at("mean_abs").get<double>();
    summary.variance = doc.at("variance").get<double>();
    summary.skewness = doc.at("skewness").get<double>();
    summary.kurtosis = doc.at("kurtosis").get<double>();
    return summary;
}

Json contango_to_json(const ContangoIndex& index) {
    return Json{{"market", index.market},
                {"c", index.c},
                {"far_maturity", index.far_maturity},
                {"near_maturity", index.near_maturity},
                {"records", index.records}};
}

Json scaling_fit_to_json(const PowerLawScalingFit& fit) {
    return Json{{"market", fit.market},       {"statistic", fit.statistic},
                {"alpha", fit.alpha},         {"alpha_err", fit.alpha_err},
                {"intercept", fit.intercept}, {"r_squared", fit.r_squared},
                {"m_min", fit.m_min},         {"m_max", fit.m_max},
                {"n_points", fit.n_points}};
}

Json crossover_to_json(const CrossoverReport& report) {
    return Json{{"market", report.market},
                {"statistic", report.statistic},
                {"breakpoint", report.breakpoint ? Json(*report.breakpoint) : Json(nullptr)},
                {"alpha_before", report.alpha_before},
                {"alpha_after", report.alpha_after},
                {"sse_gain", report.sse_gain}};
}

Json samuelson_to_json(const SamuelsonReport& report) {
    return Json{{"market", report.market},
                {"mean_abs",
                 {{"decreasing_fraction", report.mean_abs.decreasing_fraction},
                  {"max_maturity", report.mean_abs.max_maturity}}},
                {"variance",
                 {{"decreasing_fraction", report.variance.decreasing_fraction},
                  {"max_maturity", report.variance.max_maturity}}}};
}

Json tail_fit_to_json(const TailFit& fit) {
    return Json{{"market", fit.market},
                {"maturity", fit.maturity},
                {"kind", std::string(to_string(fit.kind))},
                {"mu", fit.mu},
                {"xmin", fit.xmin},
                {"n_tail", fit.n_tail},
                {"mu_err", opt_to_json(fit.mu_err)},
                {"ks_stat", fit.ks_stat},
                {"gof_p", opt_to_json(fit.gof_p)},
                {"levy_stable", fit.levy_stable}};
}

TailFit tail_fit_from_json(const Json& doc) {
    TailFit fit;
    fit.market = doc.at("market").get<std::string>();
    fit.maturity = doc.at("maturity").get<int>();
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "positive") {
        fit.kind = TailKind::kPositive;
    } else if (kind == "negative") {
        fit.kind = TailKind::kNegative;
    } else if (kind == "absolute") {
        fit.kind = TailKind::kAbsolute;
    } else {
        throw InputError("unknown tail kind '" + kind + "'");
    }
    fit.mu = doc.at("mu").get<double>();
    fit.xmin = doc.at("xmin").get<double>();
    fit.n_tail = doc.at("n_tail").get<std::size_t>();
    fit.mu_err = opt_from_json(doc.at("mu_err"));
    fit.ks_stat = doc.at("ks_stat").get<double>();
    fit.gof_p = opt_from_json(doc.at("gof_p"));
    fit.levy_stable = doc.at("levy_stable").get<bool>();
    return fit;
}

Json aggregate_to_json(const AggregateCurve& curve) {
    Json doc;
    doc["schema"] = kAggregateSchema;
    Json points = Json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"maturity", p.maturity},
                          {"mu_bar_pos", opt_to_json(p.mu_bar_pos)},
                          {"mu_bar_neg", opt_to_json(p.mu_bar_neg)},
                          {"mu_bar_abs", opt_to_json(p.mu_bar_abs)},
                          {"n_pos", p.n_pos},
                          {"n_neg", p.n_neg},
                          {"n_abs", p.n_abs},
                          {"asymmetry", opt_to_json(p.asymmetry)}});
    }
    doc["points"] = std::move(points);
    return doc;
}

AggregateCurve aggregate_from_json(const Json& doc) {
    require_schema(doc, kAggregateSchema);
    AggregateCurve curve;
    for (const auto& p : doc.at("points")) {
        AggregatePoint point;
        point.maturity = p.at("maturity").get<int>();
        point.mu_bar_pos = opt_from_json(p.at("mu_bar_pos"));
        point.mu_bar_neg = opt_from_json(p.at("mu_bar_neg"));
        point.mu_bar_abs = opt_from_json(p.at("mu_bar_abs"));
        point.n_pos = p.at("n_pos").get<int>();
        point.n_neg = p.at("n_neg").get<int>();
        point.n_abs = p.at("n_abs").get<int>();
        point.asymmetry = opt_from_json(p.at("asymmetry"));
        curve.points.push_back(point);
    }
    return curve;
}

Json regime_fit_to_json(const RegimeFit& fit) {
    return Json{{"transition", fit.transition ? Json(*fit.transition) : Json(nullptr)},
                {"level_low", fit.level_low},
                {"level_high", fit.level_high},
                {"sse", fit.sse},
                {"sse_gain", fit.sse_gain}};
}

}  // namespace termstruct
