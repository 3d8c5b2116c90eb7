#include "termstruct/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "termstruct/aggregate.hpp"
#include "termstruct/curvestats.hpp"
#include "termstruct/errors.hpp"
#include "termstruct/random.hpp"
#include "termstruct/returns.hpp"
#include "termstruct/scaling.hpp"
#include "termstruct/version.hpp"

namespace termstruct {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- config ---

void require_keys(const Json& object, std::initializer_list<std::string_view> known,
                  const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

fs::path resolve(const fs::path& base, const fs::path& path) {
    return path.is_absolute() ? path : base / path;
}

void parse_period(const Json& doc, PipelineConfig& config) {
    require_keys(doc, {"policy", "start", "end"}, "period");
    const auto policy = doc.at("policy").get<std::string>();
    if (policy == "intersection") {
        config.period_policy = PeriodPolicy::kIntersection;
    } else if (policy == "explicit") {
        config.period_policy = PeriodPolicy::kExplicit;
        if (!doc.contains("start") || !doc.contains("end")) {
            throw ConfigError("explicit period needs 'start' and 'end'");
        }
        config.period_window = DateRange{parse_date(doc.at("start").get<std::string>()),
                                         parse_date(doc.at("end").get<std::string>())};
    } else {
        throw ConfigError("unknown period policy '" + policy +
                          "', expected 'intersection' or 'explicit'");
    }
}

void parse_synth(const Json& doc, PipelineConfig& config) {
    require_keys(doc,
                 {"records", "maturities", "scale_alpha", "distribution", "tail_mu",
                  "base_scale", "market", "start_date", "csv"},
                 "synth");
    SynthSpec spec;
    if (doc.contains("records")) spec.records = doc.at("records").get<int>();
    if (doc.contains("maturities")) {
        const auto& m = doc.at("maturities");
        if (m.is_array()) {
            spec.maturities = m.get<std::vector<int>>();
        } else if (m.is_object()) {
            require_keys(m, {"from", "to"}, "synth.maturities");
            const int from = m.at("from").get<int>();
            const int to = m.at("to").get<int>();
            if (from > to) throw ConfigError("synth.maturities: from > to");
            for (int i = from; i <= to; ++i) spec.maturities.push_back(i);
        } else {
            throw ConfigError("synth.maturities must be a list or {from, to}");
        }
    }
    if (doc.contains("scale_alpha")) spec.scale_alpha = doc.at("scale_alpha").get<double>();
    if (doc.contains("distribution")) {
        const auto name = doc.at("distribution").get<std::string>();
        if (name == "gaussian") {
            spec.distribution = SynthDistribution::kGaussian;
        } else if (name == "student_t") {
            spec.distribution = SynthDistribution::kStudentT;
        } else if (name == "pareto_symmetric") {
            spec.distribution = SynthDistribution::kParetoSymmetric;
        } else {
            throw ConfigError("unknown synth distribution '" + name + "'");
        }
    }
    if (doc.contains("tail_mu")) {
        const auto& mu = doc.at("tail_mu");
        spec.tail_mu = mu.is_array() ? mu.get<std::vector<double>>()
                                     : std::vector<double>{mu.get<double>()};
    }
    if (doc.contains("base_scale")) spec.base_scale = doc.at("base_scale").get<double>();
    if (doc.contains("market")) spec.market = doc.at("market").get<std::string>();
    if (doc.contains("start_date")) {
        spec.start_date = parse_date(doc.at("start_date").get<std::string>());
    }
    if (doc.contains("csv")) config.synth_csv = doc.at("csv").get<std::string>();
    config.synth = std::move(spec);
}

}  // namespace

PipelineConfig config_from_json(const Json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    require_keys(doc,
                 {"version", "inputs", "output", "seed", "jobs", "period", "maturity_caps",
                  "contango", "scaling", "tails", "aggregate", "synth"},
                 "config");
    if (!doc.contains("version") || doc.at("version") != 1) {
        throw ConfigError("config must declare \"version\": 1");
    }

    PipelineConfig config;
    if (doc.contains("inputs")) {
        for (const auto& input : doc.at("inputs")) {
            config.inputs.push_back(resolve(base_dir, input.get<std::string>()));
        }
    }
    if (doc.contains("output")) {
        config.out_dir = resolve(base_dir, doc.at("output").get<std::string>());
    }
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("jobs")) config.jobs = doc.at("jobs").get<int>();
    if (doc.contains("period")) parse_period(doc.at("period"), config);
    if (doc.contains("maturity_caps")) {
        for (const auto& [market, cap] : doc.at("maturity_caps").items()) {
            config.maturity_caps[market] = cap.get<int>();
        }
    }
    if (doc.contains("contango")) {
        require_keys(doc.at("contango"), {"far_maturity"}, "contango");
        if (doc.at("contango").contains("far_maturity")) {
            config.contango_far_maturity = doc.at("contango").at("far_maturity").get<int>();
        }
    }
    if (doc.contains("scaling")) {
        const auto& scaling = doc.at("scaling");
        require_keys(scaling, {"fit_range", "crossover_gain_threshold", "r_squared_floor"},
                     "scaling");
        if (scaling.contains("fit_range")) {
            const auto range = scaling.at("fit_range").get<std::vector<int>>();
            if (range.size() != 2) throw ConfigError("scaling.fit_range must be [min, max]");
            config.scaling_fit_range = std::make_pair(range[0], range[1]);
        }
        if (scaling.contains("crossover_gain_threshold")) {
            config.crossover_gain_threshold =
                scaling.at("crossover_gain_threshold").get<double>();
        }
        if (scaling.contains("r_squared_floor")) {
            config.r_squared_floor = scaling.at("r_squared_floor").get<double>();
        }
    }
    if (doc.contains("tails")) {
        const auto& tails = doc.at("tails");
        require_keys(tails,
                     {"min_sample", "min_tail", "max_xmin_candidates", "bootstrap_se_b",
                      "gof_b"},
                     "tails");
        if (tails.contains("min_sample")) {
            config.tail_fit.min_sample = tails.at("min_sample").get<std::size_t>();
        }
        if (tails.contains("min_tail")) {
            config.tail_fit.min_tail = tails.at("min_tail").get<std::size_t>();
        }
        if (tails.contains("max_xmin_candidates")) {
            config.tail_fit.max_xmin_candidates =
                tails.at("max_xmin_candidates").get<std::size_t>();
        }
        if (tails.contains("bootstrap_se_b")) {
            config.bootstrap_se_b = tails.at("bootstrap_se_b").get<int>();
        }
        if (tails.contains("gof_b")) config.gof_b = tails.at("gof_b").get<int>();
    }
    if (doc.contains("aggregate")) {
        require_keys(doc.at("aggregate"), {"plateau_gain_threshold"}, "aggregate");
        if (doc.at("aggregate").contains("plateau_gain_threshold")) {
            config.plateau_gain_threshold =
                doc.at("aggregate").at("plateau_gain_threshold").get<double>();
        }
    }
    if (doc.contains("synth")) parse_synth(doc.at("synth"), config);

    validate_config(config);
    return config;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(doc, path.parent_path());
}

void validate_config(const PipelineConfig& config) {
    if (config.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (config.contango_far_maturity < 2) throw ConfigError("contango far maturity must be >= 2");
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(config.crossover_gain_threshold)) {
        throw ConfigError("crossover_gain_threshold must lie in [0, 1]");
    }
    if (!in_unit(config.r_squared_floor)) throw ConfigError("r_squared_floor must lie in [0, 1]");
    if (!in_unit(config.plateau_gain_threshold)) {
        throw ConfigError("plateau_gain_threshold must lie in [0, 1]");
    }
    if (config.scaling_fit_range && config.scaling_fit_range->first >= config.scaling_fit_range->second) {
        throw ConfigError("scaling.fit_range must satisfy min < max");
    }
    if (config.tail_fit.min_sample < 1) throw ConfigError("tails.min_sample must be >= 1");
    if (config.tail_fit.min_tail < 1) throw ConfigError("tails.min_tail must be >= 1");
    if (config.tail_fit.max_xmin_candidates < 2) {
        throw ConfigError("tails.max_xmin_candidates must be >= 2");
    }
    if (config.bootstrap_se_b < 0 || config.gof_b < 0) {
        throw ConfigError("bootstrap replicate counts must be >= 0");
    }
    if ((config.bootstrap_se_b > 0 || config.gof_b > 0) && !config.seed) {
        throw ConfigError("a seed is required whenever any bootstrap B > 0");
    }
}

Json config_to_json(const PipelineConfig& config) {
    Json doc;
    doc["version"] = 1;
    Json inputs = Json::array();
    for (const auto& input : config.inputs) inputs.push_back(input.string());
    doc["inputs"] = std::move(inputs);
    doc["output"] = config.out_dir.string();
    doc["seed"] = config.seed ? Json(*config.seed) : Json(nullptr);
    doc["jobs"] = config.jobs;
    if (config.period_policy == PeriodPolicy::kIntersection) {
        doc["period"] = {{"policy", "intersection"}};
    } else {
        doc["period"] = {{"policy", "explicit"},
                         {"start", format_date(config.period_window->first)},
                         {"end", format_date(config.period_window->last)}};
    }
    Json caps = Json::object();
    for (const auto& [market, cap] : config.maturity_caps) caps[market] = cap;
    doc["maturity_caps"] = std::move(caps);
    doc["contango"] = {{"far_maturity", config.contango_far_maturity}};
    Json scaling;
    if (config.scaling_fit_range) {
        scaling["fit_range"] = {config.scaling_fit_range->first,
                                config.scaling_fit_range->second};
    } else {
        scaling["fit_range"] = nullptr;
    }
    scaling["crossover_gain_threshold"] = config.crossover_gain_threshold;
    scaling["r_squared_floor"] = config.r_squared_floor;
    doc["scaling"] = std::move(scaling);
    doc["tails"] = {{"min_sample", config.tail_fit.min_sample},
                    {"min_tail", config.tail_fit.min_tail},
                    {"max_xmin_candidates", config.tail_fit.max_xmin_candidates},
                    {"bootstrap_se_b", config.bootstrap_se_b},
                    {"gof_b", config.gof_b}};
    doc["aggregate"] = {{"plateau_gain_threshold", config.plateau_gain_threshold}};
    if (config.synth) {
        const auto& spec = *config.synth;
        doc["synth"] = {{"records", spec.records},
                        {"maturities", spec.maturities},
                        {"scale_alpha", spec.scale_alpha},
                        {"distribution", std::string(to_string(spec.distribution))},
                        {"tail_mu", spec.tail_mu},
                        {"base_scale", spec.base_scale},
                        {"market", spec.market},
                        {"start_date", format_date(spec.start_date)},
                        {"csv", config.synth_csv}};
    }
    return doc;
}

// ------------------------------------------------------------- artifacts ---

namespace {

struct StageFiles {
    static constexpr const char* kDataset = "dataset.json";
    static constexpr const char* kReturns = "returns.json";
    static constexpr const char* kMoments = "moments.json";
    static constexpr const char* kScaling = "scaling.json";
    static constexpr const char* kTails = "tails.json";
    static constexpr const char* kAggregate = "aggregate.json";
    static constexpr const char* kReport = "report.jsonl";
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw InputError("failed writing " + path.string());
}

Json load_artifact(const PipelineConfig& config, const char* file, const char* producer) {
    const fs::path path = config.out_dir / file;
    std::ifstream in(path);
    if (!in) {
        throw DependencyError(std::string("missing artifact ") + file + "; run stage '" +
                              producer + "' first");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("artifact " + path.string() + ": " + e.what());
    }
}

// Buffers the stage's report lines and figure files; nothing touches the disk
// until the stage has fully computed.
class StageWriter {
  public:
    StageWriter(const PipelineConfig& config, bool fresh_report)
        : config_(config), fresh_report_(fresh_report) {}

    Json& add_record(std::string_view type) {
        Json record;
        record["schema"] = kReportSchema;
        record["record"] = std::string(type);
        records_.push_back(std::move(record));
        return records_.back();
    }

    void add_warning(std::string_view stage, std::string_view message) {
        auto& record = add_record("warning");
        record["stage"] = std::string(stage);
        record["message"] = std::string(message);
    }

    void stage_artifact(const char* name, const Json& doc) {
        files_.emplace_back(name, doc.dump() + "\n");
    }

    void stage_csv(const char* name, std::string content) {
        files_.emplace_back(name, std::move(content));
    }

    void commit() {
        fs::create_directories(config_.out_dir);
        for (const auto& [name, content] : files_) {
            write_file(config_.out_dir / name, content);
        }
        std::ostringstream lines;
        for (const auto& record : records_) lines << record.dump() << '\n';
        const fs::path report = config_.out_dir / StageFiles::kReport;
        std::ofstream out(report, fresh_report_
                                      ? std::ios::binary | std::ios::trunc
                                      : std::ios::binary | std::ios::app);
        if (!out) throw InputError("cannot open " + report.string() + " for writing");
        out << lines.str();
        if (!out) throw InputError("failed writing " + report.string());
    }

  private:
    const PipelineConfig& config_;
    bool fresh_report_;
    std::vector<Json> records_;
    std::vector<std::pair<const char*, std::string>> files_;
};

std::string csv_field(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string();
}

// ----------------------------------------------------------------- stages ---

void stage_ingest(const PipelineConfig& config) {
    if (config.inputs.empty()) throw ConfigError("no input files configured");

    std::vector<FuturesQuote> quotes;
    for (const auto& path : config.inputs) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open input " + path.string());
        try {
            auto parsed = parse_quotes(in);
            quotes.insert(quotes.end(), std::make_move_iterator(parsed.begin()),
                          std::make_move_iterator(parsed.end()));
        } catch (const DuplicateRecordError& e) {
            throw DuplicateRecordError(path.string() + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": " + e.what());
        }
    }

    // duplicates across files
    std::set<std::tuple<std::string, Date, DeliveryMonth>> seen;
    for (const auto& quote : quotes) {
        if (!seen.emplace(quote.market, quote.obs_date, quote.delivery).second) {
            throw DuplicateRecordError("duplicate record across inputs (" + quote.market +
                                       ", " + format_date(quote.obs_date) + ", " +
                                       format_delivery_month(quote.delivery) + ")");
        }
    }

    // one dataset per market, aligned onto the common (or explicit) period
    std::map<std::string, std::vector<FuturesQuote>> by_market;
    for (auto& quote : quotes) by_market[quote.market].push_back(quote);
    std::vector<Dataset> datasets;
    datasets.reserve(by_market.size());
    for (const auto& [market, market_quotes] : by_market) {
        datasets.push_back(build_dataset(market_quotes));
    }
    AlignOptions align;
    align.policy = config.period_policy;
    align.window = config.period_window;
    align.maturity_caps = config.maturity_caps;
    datasets = align_period(std::move(datasets), align);

    Dataset merged;
    merged.period = datasets.front().period;
    for (auto& dataset : datasets) {
        for (auto& series : dataset.series) merged.series.push_back(std::move(series));
    }
    std::sort(merged.series.begin(), merged.series.end(),
              [](const ConstantMaturitySeries& a, const ConstantMaturitySeries& b) {
                  return std::tie(a.market, a.maturity) < std::tie(b.market, b.maturity);
              });
    if (merged.series.empty()) {
        throw InsufficientDataError("no series left after period alignment");
    }

    StageWriter writer(config, /*fresh_report=*/true);
    auto& header = writer.add_record("run_header");
    header["version"] = kVersion;
    header["rng"] = std::string(rng::kAlgorithm);
    header["config"] = config_to_json(config);

    auto& summary = writer.add_record("dataset_summary");
    summary["markets"] = merged.markets();
    summary["period"] = {format_date(merged.period.first), format_date(merged.period.last)};
    summary["n_series"] = merged.series.size();
    summary["n_quotes"] = quotes.size();

    writer.stage_artifact(StageFiles::kDataset, dataset_to_json(merged));
    writer.commit();
}

void stage_returns(const PipelineConfig& config) {
    const auto dataset = dataset_from_json(load_artifact(config, StageFiles::kDataset, "ingest"));

    StageWriter writer(config, false);
    std::vector<ReturnSeries> all;
    all.reserve(dataset.series.size());
    for (const auto& series : dataset.series) {
        try {
            all.push_back(compute_returns(series));
        } catch (const Error& e) {
            writer.add_warning("returns", e.what());
        }
    }
    if (all.empty()) throw InsufficientDataError("no series with computable returns");

    for (const auto& series : all) {
        auto& record = writer.add_record("return_series");
        record["market"] = series.market;
        record["maturity"] = series.maturity;
        record["observations"] = series.observations.size();
        record["skipped"] = series.skipped;
    }
    writer.stage_artifact(StageFiles::kReturns, returns_to_json(all));
    writer.commit();
}

std::vector<MomentSummary> summaries_from_returns(std::span<const ReturnSeries> series) {
    std::vector<MomentSummary> summaries;
    summaries.reserve(series.size());
    for (const auto& s : series) {
        const std::string tag = s.market + " M=" + std::to_string(s.maturity) + ": ";
        try {
            summaries.push_back(summarize_moments(s));
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

std::string moment_figure_csv(std::span<const MomentSummary> summaries, const char* column,
                              double MomentSummary::*field) {
    std::ostringstream csv;
    csv << "market,maturity," << column << "\n";
    for (const auto& summary : summaries) {
        csv << summary.market << ',' << summary.maturity << ','
            << format_double(summary.*field) << '\n';
    }
    return csv.str();
}

void stage_moments(const PipelineConfig& config) {
    const auto dataset = dataset_from_json(load_artifact(config, StageFiles::kDataset, "ingest"));
    const auto returns = returns_from_json(load_artifact(config, StageFiles::kReturns, "returns"));

    const auto summaries = summaries_from_returns(returns);

    StageWriter writer(config, false);
    std::vector<ContangoIndex> contango;
    for (const auto& market : dataset.markets()) {
        try {
            contango.push_back(contango_index(dataset, market, config.contango_far_maturity));
        } catch (const Error& e) {
            writer.add_warning("moments", std::string("contango ") + market + ": " + e.what());
        }
    }

    for (const auto& summary : summaries) {
        auto& record = writer.add_record("moment_summary");
        record.update(moment_summary_to_json(summary));
    }
    for (const auto& index : contango) {
        auto& record = writer.add_record("contango_index");
        record.update(contango_to_json(index));
    }

    Json artifact;
    artifact["schema"] = kMomentsSchema;
    Json moments = Json::array();
    for (const auto& summary : summaries) moments.push_back(moment_summary_to_json(summary));
    artifact["moments"] = std::move(moments);
    Json contango_json = Json::array();
    for (const auto& index : contango) contango_json.push_back(contango_to_json(index));
    artifact["contango"] = std::move(contango_json);

    writer.stage_artifact(StageFiles::kMoments, artifact);
    writer.stage_csv("fig2_mean_abs.csv",
                     moment_figure_csv(summaries, "mean_abs", &MomentSummary::mean_abs));
    writer.stage_csv("fig3_variance.csv",
                     moment_figure_csv(summaries, "variance", &MomentSummary::variance));
    writer.stage_csv("fig4_skewness.csv",
                     moment_figure_csv(summaries, "skewness", &MomentSummary::skewness));
    writer.stage_csv("fig5_kurtosis.csv",
                     moment_figure_csv(summaries, "kurtosis", &MomentSummary::kurtosis));
    writer.commit();
}

void stage_scaling(const PipelineConfig& config) {
    const auto artifact = load_artifact(config, StageFiles::kMoments, "moments");
    std::vector<MomentSummary> summaries;
    for (const auto& m : artifact.at("moments")) {
        summaries.push_back(moment_summary_from_json(m));
    }

    std::map<std::string, std::vector<MomentSummary>> by_market;
    for (const auto& summary : summaries) by_market[summary.market].push_back(summary);

    StageWriter writer(config, false);
    std::vector<PowerLawScalingFit> fits;
    std::vector<CrossoverReport> crossovers;
    std::vector<SamuelsonReport> samuelson;

    for (const auto& [market, curve] : by_market) {
        for (const auto& [statistic, field] :
             {std::pair{"mean_abs", &MomentSummary::mean_abs},
              std::pair{"variance", &MomentSummary::variance}}) {
            std::vector<CurvePoint> points;
            points.reserve(curve.size());
            for (const auto& summary : curve) {
                points.push_back({summary.maturity, summary.*field});
            }
            try {
                auto fit = fit_power_law_scaling(points, config.scaling_fit_range);
                fit.market = market;
                fit.statistic = statistic;
                fits.push_back(std::move(fit));
            } catch (const Error& e) {
                writer.add_warning("scaling", market + " " + statistic + ": " + e.what());
            }
            try {
                auto crossover = detect_crossover(points, config.crossover_gain_threshold);
                crossover.market = market;
                crossover.statistic = statistic;
                crossovers.push_back(std::move(crossover));
            } catch (const Error& e) {
                writer.add_warning("scaling",
                                   market + " " + statistic + " crossover: " + e.what());
            }
        }
        try {
            samuelson.push_back(samuelson_check(by_market.at(market)));
        } catch (const Error& e) {
            writer.add_warning("scaling", market + " samuelson: " + e.what());
        }
    }

    for (const auto& fit : fits) {
        auto& record = writer.add_record("scaling_fit");
        record.update(scaling_fit_to_json(fit));
        record["power_law_accepted"] = fit.r_squared >= config.r_squared_floor;
        record["r_squared_floor"] = config.r_squared_floor;
    }
    for (const auto& crossover : crossovers) {
        auto& record = writer.add_record("crossover");
        record.update(crossover_to_json(crossover));
    }
    for (const auto& report : samuelson) {
        auto& record = writer.add_record("samuelson");
        record.update(samuelson_to_json(report));
    }

    Json out;
    out["schema"] = kScalingSchema;
    Json fits_json = Json::array();
    for (const auto& fit : fits) {
        Json f = scaling_fit_to_json(fit);
        f["power_law_accepted"] = fit.r_squared >= config.r_squared_floor;
        fits_json.push_back(std::move(f));
    }
    out["fits"] = std::move(fits_json);
    Json crossovers_json = Json::array();
    for (const auto& crossover : crossovers) {
        crossovers_json.push_back(crossover_to_json(crossover));
    }
    out["crossovers"] = std::move(crossovers_json);
    Json samuelson_json = Json::array();
    for (const auto& report : samuelson) samuelson_json.push_back(samuelson_to_json(report));
    out["samuelson"] = std::move(samuelson_json);

    writer.stage_artifact(StageFiles::kScaling, out);
    writer.commit();
}

void stage_tails(const PipelineConfig& config) {
    const auto returns = returns_from_json(load_artifact(config, StageFiles::kReturns, "returns"));

    TailStructureOptions options;
    options.fit = config.tail_fit;
    options.bootstrap_b = config.bootstrap_se_b;
    options.gof_b = config.gof_b;
    options.seed = config.seed.value_or(0);
    options.jobs = config.jobs;
    const auto result = tail_term_structure(std::span<const ReturnSeries>(returns), options);

    StageWriter writer(config, false);
    for (const auto& fit : result.fits) {
        auto& record = writer.add_record("tail_fit");
        record.update(tail_fit_to_json(fit));
    }
    for (const auto& warning : result.warnings) writer.add_warning("tails", warning);

    Json artifact;
    artifact["schema"] = kTailsSchema;
    Json fits = Json::array();
    for (const auto& fit : result.fits) fits.push_back(tail_fit_to_json(fit));
    artifact["fits"] = std::move(fits);
    artifact["warnings"] = result.warnings;
    writer.stage_artifact(StageFiles::kTails, artifact);

    std::ostringstream csv;
    csv << "market,maturity,kind,mu,mu_err,xmin,n_tail,ks_stat,gof_p,levy_stable,levy_boundary\n";
    for (const auto& fit : result.fits) {
        csv << fit.market << ',' << fit.maturity << ',' << to_string(fit.kind) << ','
            << format_double(fit.mu) << ',' << csv_field(fit.mu_err) << ','
            << format_double(fit.xmin) << ',' << fit.n_tail << ','
            << format_double(fit.ks_stat) << ',' << csv_field(fit.gof_p) << ','
            << (fit.levy_stable ? "true" : "false") << ",2\n";
    }
    writer.stage_csv("fig6_7_tails.csv", csv.str());
    writer.commit();
}

void stage_aggregate(const PipelineConfig& config) {
    const auto artifact = load_artifact(config, StageFiles::kTails, "tails");
    std::vector<TailFit> fits;
    for (const auto& f : artifact.at("fits")) fits.push_back(tail_fit_from_json(f));

    const auto curve = aggregate_exponents(fits, config.tail_fit.min_tail);

    StageWriter writer(config, false);
    Json out;
    out["schema"] = kAggregateSchema;
    out.update(aggregate_to_json(curve));

    Json regimes = Json::object();
    for (const auto& [name, field] : {std::pair{"abs", AggregateField::kAbs},
                                      std::pair{"pos", AggregateField::kPos},
                                      std::pair{"neg", AggregateField::kNeg},
                                      std::pair{"asymmetry", AggregateField::kAsymmetry}}) {
        try {
            const auto regime = fit_two_plateaus(curve, field, config.plateau_gain_threshold);
            regimes[name] = regime_fit_to_json(regime);
            auto& record = writer.add_record("regime_fit");
            record["field"] = name;
            record.update(regime_fit_to_json(regime));
        } catch (const Error& e) {
            writer.add_warning("aggregate", std::string(name) + ": " + e.what());
        }
    }
    out["regimes"] = std::move(regimes);

    for (const auto& point : curve.points) {
        auto& record = writer.add_record("aggregate_point");
        record["maturity"] = point.maturity;
        record["mu_bar_pos"] = point.mu_bar_pos ? Json(*point.mu_bar_pos) : Json(nullptr);
        record["mu_bar_neg"] = point.mu_bar_neg ? Json(*point.mu_bar_neg) : Json(nullptr);
        record["mu_bar_abs"] = point.mu_bar_abs ? Json(*point.mu_bar_abs) : Json(nullptr);
        record["n_pos"] = point.n_pos;
        record["n_neg"] = point.n_neg;
        record["n_abs"] = point.n_abs;
        record["asymmetry"] = point.asymmetry ? Json(*point.asymmetry) : Json(nullptr);
    }

    writer.stage_artifact(StageFiles::kAggregate, out);

    std::ostringstream csv;
    csv << "maturity,mu_bar_pos,mu_bar_neg,mu_bar_abs,asymmetry,n_pos,n_neg,n_abs\n";
    for (const auto& point : curve.points) {
        csv << point.maturity << ',' << csv_field(point.mu_bar_pos) << ','
            << csv_field(point.mu_bar_neg) << ',' << csv_field(point.mu_bar_abs) << ','
            << csv_field(point.asymmetry) << ',' << point.n_pos << ',' << point.n_neg << ','
            << point.n_abs << '\n';
    }
    writer.stage_csv("fig8_aggregate.csv", csv.str());
    writer.commit();
}

}  // namespace

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = {"ingest", "returns", "moments",
                                                   "scaling", "tails", "aggregate"};
    return names;
}

void run_stage(std::string_view stage, const PipelineConfig& config) {
    validate_config(config);
    if (stage == "ingest") {
        stage_ingest(config);
    } else if (stage == "returns") {
        stage_returns(config);
    } else if (stage == "moments") {
        stage_moments(config);
    } else if (stage == "scaling") {
        stage_scaling(config);
    } else if (stage == "tails") {
        stage_tails(config);
    } else if (stage == "aggregate") {
        stage_aggregate(config);
    } else {
        std::string valid;
        for (const auto& name : stage_names()) {
            if (!valid.empty()) valid += ", ";
            valid += name;
        }
        throw ConfigError("unknown stage '" + std::string(stage) + "'; valid stages: " + valid);
    }
}

void run_pipeline(const PipelineConfig& config) {
    for (const auto& stage : stage_names()) run_stage(stage, config);
}

void run_synth(const PipelineConfig& config) {
    if (!config.synth) throw ConfigError("config has no synth section");
    SynthSpec spec = *config.synth;
    if (config.seed) spec.seed = *config.seed;  // global seed governs the fixture
    const auto dataset = gen_samuelson_dataset(spec);
    const auto quotes = dataset_to_quotes(dataset);

    fs::create_directories(config.out_dir);
    const fs::path csv_path = config.out_dir / config.synth_csv;
    std::ostringstream csv;
    write_quotes_csv(csv, quotes);
    write_file(csv_path, csv.str());

    Json truth;
    truth["schema"] = "termstruct.synth/1";
    truth["rng"] = std::string(rng::kAlgorithm);
    truth["seed"] = spec.seed;
    truth["spec"] = config_to_json(config)["synth"];
    truth["csv"] = csv_path.string();
    truth["n_quotes"] = quotes.size();
    truth["alpha_mean_expected"] = spec.scale_alpha;
    truth["alpha_var_expected"] = 2.0 * spec.scale_alpha;
    write_file(config.out_dir / "synth_truth.json", truth.dump() + "\n");
}

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ConfigError*>(&error) != nullptr) return 2;
    if (dynamic_cast<const ParseError*>(&error) != nullptr) return 3;
    if (dynamic_cast<const InputError*>(&error) != nullptr) return 3;
    if (dynamic_cast<const DependencyError*>(&error) != nullptr) return 3;
    if (dynamic_cast<const AlignmentError*>(&error) != nullptr) return 4;
    if (dynamic_cast<const InsufficientDataError*>(&error) != nullptr) return 4;
    if (dynamic_cast<const DegenerateDataError*>(&error) != nullptr) return 4;
    if (dynamic_cast<const DomainError*>(&error) != nullptr) return 4;
    return 1;
}

}  // namespace termstruct
