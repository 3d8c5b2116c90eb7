#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "termstruct/aggregate.hpp"
#include "termstruct/ingest.hpp"
#include "termstruct/tails.hpp"

namespace termstruct {

enum class SynthDistribution { kGaussian, kStudentT, kParetoSymmetric };

std::string_view to_string(SynthDistribution distribution);

// Ground-truth generator spec. tail_mu holds one value or one per maturity:
// the Pareto mu for kParetoSymmetric, the degrees of freedom (= tail exponent)
// for kStudentT; ignored for kGaussian.
struct SynthSpec {
    std::uint64_t seed = 1;
    int records = 2500;  // returns per series
    std::vector<int> maturities;
    std::vector<double> tail_mu = {3.0};
    double scale_alpha = 0.0;  // beta: per-maturity return scale s0 * M^(-beta)
    SynthDistribution distribution = SynthDistribution::kGaussian;
    double base_scale = 0.01;  // s0
    std::string market = "SYNTH";
    Date start_date = std::chrono::year{1998} / 1 / 5;  // a Monday
};

// n inverse-CDF draws x = xmin * u^(-1/mu).
TailSample gen_pareto_sample(double mu, double xmin, std::size_t n, std::uint64_t seed);

// Per maturity M, a business-day price series whose recovered daily
// log-returns are i.i.d. with scale s0 * M^(-beta); prices by cumulative
// exponentiation from P0 = 100. Weekend gaps exercise the dt logic: the
// log-price increment over a gap of dt days is r * dt, so compute_returns
// recovers r exactly.
Dataset gen_samuelson_dataset(const SynthSpec& spec);

// Piecewise-constant absolute-exponent curve plus additive Gaussian noise;
// fixture for the two-plateau fitter.
AggregateCurve gen_step_curve(double level_low, double level_high, int transition,
                              std::span<const int> maturities, double noise_sd,
                              std::uint64_t seed);

// Inverse of the constant-maturity rearrangement for synthetic data: rank M on
// date t becomes the delivery month month(t) + (M - 1), so parsing the emitted
// CSV reproduces the dataset. Assumes every date carries a contiguous rank
// range starting at 1, which the generators guarantee.
std::vector<FuturesQuote> dataset_to_quotes(const Dataset& dataset);

// Same CSV schema parse_quotes consumes.
void write_quotes_csv(std::ostream& out, std::span<const FuturesQuote> quotes);

}  // namespace termstruct
