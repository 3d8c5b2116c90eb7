#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "termstruct/errors.hpp"
#include "termstruct/pipeline.hpp"
#include "termstruct/version.hpp"

namespace {

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
};

termstruct::PipelineConfig effective_config(const GlobalFlags& flags, bool config_required) {
    termstruct::PipelineConfig config;
    if (!flags.config_path.empty()) {
        config = termstruct::load_config(flags.config_path);
    } else if (config_required) {
        throw termstruct::ConfigError("--config PATH is required for this command");
    }
    if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.jobs) config.jobs = *flags.jobs;
    termstruct::validate_config(config);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Term-structure statistics for futures markets"};
    app.set_version_flag("--version", termstruct::kVersion);
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "Pipeline config file (JSON)");
    app.add_option("--out", flags.out_dir, "Output directory (overrides config)");
    app.add_option("--seed", flags.seed, "Master seed (overrides config)");
    app.add_option("--jobs", flags.jobs, "Worker threads (overrides config)");

    for (const auto& stage : termstruct::stage_names()) {
        app.add_subcommand(stage, "Run the " + stage + " stage against --out");
    }
    app.add_subcommand("run", "Run the full pipeline");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic quotes CSV with known "
                                              "ground truth");
    struct SynthFlags {
        std::optional<int> records;
        std::optional<double> scale_alpha;
        std::optional<std::string> distribution;
        std::optional<double> tail_mu;
        std::optional<int> maturity_from, maturity_to;
        std::optional<std::string> market;
        std::optional<std::string> csv;
    } synth_flags;
    synth->add_option("--records", synth_flags.records, "Returns per series");
    synth->add_option("--scale-alpha", synth_flags.scale_alpha,
                      "Volatility-scaling exponent beta");
    synth->add_option("--distribution", synth_flags.distribution,
                      "gaussian | student_t | pareto_symmetric");
    synth->add_option("--tail-mu", synth_flags.tail_mu, "Tail exponent (all maturities)");
    synth->add_option("--maturity-from", synth_flags.maturity_from, "First maturity rank");
    synth->add_option("--maturity-to", synth_flags.maturity_to, "Last maturity rank");
    synth->add_option("--market", synth_flags.market, "Market identifier");
    synth->add_option("--csv", synth_flags.csv, "CSV file name inside --out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage/config problems share exit code 2
    }

    try {
        if (synth->parsed()) {
            auto config = effective_config(flags, /*config_required=*/false);
            if (!config.synth) config.synth.emplace();
            auto& spec = *config.synth;
            if (synth_flags.records) spec.records = *synth_flags.records;
            if (synth_flags.scale_alpha) spec.scale_alpha = *synth_flags.scale_alpha;
            if (synth_flags.distribution) {
                const auto& name = *synth_flags.distribution;
                if (name == "gaussian") {
                    spec.distribution = termstruct::SynthDistribution::kGaussian;
                } else if (name == "student_t") {
                    spec.distribution = termstruct::SynthDistribution::kStudentT;
                } else if (name == "pareto_symmetric") {
                    spec.distribution = termstruct::SynthDistribution::kParetoSymmetric;
                } else {
                    throw termstruct::ConfigError("unknown distribution '" + name + "'");
                }
            }
            if (synth_flags.tail_mu) spec.tail_mu = {*synth_flags.tail_mu};
            if (synth_flags.maturity_from || synth_flags.maturity_to) {
                const int from = synth_flags.maturity_from.value_or(1);
                const int to = synth_flags.maturity_to.value_or(from);
                spec.maturities.clear();
                for (int m = from; m <= to; ++m) spec.maturities.push_back(m);
            }
            if (spec.maturities.empty()) {
                for (int m = 1; m <= 15; ++m) spec.maturities.push_back(m);
            }
            if (synth_flags.market) spec.market = *synth_flags.market;
            if (flags.seed) spec.seed = *flags.seed;
            if (synth_flags.csv) config.synth_csv = *synth_flags.csv;
            termstruct::run_synth(config);
            return 0;
        }

        const auto config = effective_config(flags, /*config_required=*/true);
        for (auto* sub : app.get_subcommands()) {
            if (sub->get_name() == "run") {
                termstruct::run_pipeline(config);
            } else {
                termstruct::run_stage(sub->get_name(), config);
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return termstruct::exit_code_for(e);
    }
}
