#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "termstruct/ingest.hpp"
#include "termstruct/serialize.hpp"
#include "termstruct/synth.hpp"
#include "termstruct/tails.hpp"

namespace termstruct {

// Everything a run needs; the effective values are echoed into the report so
// the run can be reproduced from the report alone. Parsed from the versioned
// JSON config grammar documented in the README.
struct PipelineConfig {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
    int jobs = 1;

    PeriodPolicy period_policy = PeriodPolicy::kIntersection;
    std::optional<DateRange> period_window;
    std::map<std::string, int, std::less<>> maturity_caps;

    int contango_far_maturity = 9;

    std::optional<std::pair<int, int>> scaling_fit_range;
    double crossover_gain_threshold = 0.5;
    double r_squared_floor = 0.95;  // power-law accept/reject call in the report

    TailFitOptions tail_fit;
    int bootstrap_se_b = 1000;
    int gof_b = 250;

    double plateau_gain_threshold = 0.3;

    std::optional<SynthSpec> synth;
    std::string synth_csv = "quotes.csv";
};

// Throws ConfigError on unreadable files, unknown keys, out-of-range values,
// or a missing seed while any bootstrap B > 0.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir);
Json config_to_json(const PipelineConfig& config);
void validate_config(const PipelineConfig& config);

const std::vector<std::string>& stage_names();  // ingest..aggregate, in run order

// Runs one stage against the artifacts already materialized in out_dir;
// identical outputs to the same stage inside run_pipeline. Missing
// prerequisites raise DependencyError naming the stage to run first.
void run_stage(std::string_view stage, const PipelineConfig& config);

// ingest -> returns -> moments -> scaling -> tails -> aggregate; writes
// report.jsonl plus one plot-data CSV per reproduced figure.
void run_pipeline(const PipelineConfig& config);

// Fixture generation (`synth` command): writes the quotes CSV and a
// ground-truth sidecar into out_dir.
void run_synth(const PipelineConfig& config);

// Exit codes shared by the CLI and documented in the README: 0 success,
// 2 config error, 3 input error, 4 insufficient data.
int exit_code_for(const std::exception& error);

}  // namespace termstruct
