#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "termstruct/ingest.hpp"
#include "termstruct/returns.hpp"

namespace termstruct {

enum class TailKind { kPositive, kNegative, kAbsolute };

std::string_view to_string(TailKind kind);

struct TailSample {
    TailKind kind = TailKind::kAbsolute;
    std::string market;
    int maturity = 0;
    std::vector<double> values;  // strictly positive; magnitudes for the negative kind
};

struct TailSplit {
    TailSample positive;
    TailSample negative;
    TailSample absolute;
};

// positive <- {r : r > 0}, negative <- {-r : r < 0}, absolute <- {|r| : r != 0}.
TailSplit split_tails(const ReturnSeries& series);

struct TailFitOptions {
    std::size_t min_sample = 100;  // fit_tail precondition on the whole sample
    std::size_t min_tail = 50;     // candidates with fewer points above xmin are skipped
    std::size_t max_xmin_candidates = 250;  // quantile-thinned grid above this many uniques
    std::optional<double> fixed_xmin;       // bypasses the KS search
};

// mu is the CCDF exponent P(X > x) ~ x^(-mu); the continuous MLE estimates the
// density exponent a = mu + 1, so the inverse cubic law reads mu ~ 3.
struct TailFit {
    TailKind kind = TailKind::kAbsolute;
    std::string market;
    int maturity = 0;
    double mu = 0.0;
    double xmin = 0.0;
    std::size_t n_tail = 0;
    std::optional<double> mu_err;  // bootstrap standard error, when requested
    double ks_stat = 0.0;
    std::optional<double> gof_p;   // semi-parametric bootstrap p-value, when requested
    bool levy_stable = false;      // mu < 2, strictly (mu = 2 is not stable)
};

// Threshold-free continuous power-law fit: for every candidate xmin (the
// unique sample values, quantile-thinned to at most max_xmin_candidates) the
// MLE a = 1 + n / sum(ln(x/xmin)) is computed together with the KS distance
// between the empirical tail CCDF and the fitted one; the xmin with the
// smallest KS distance wins (smallest xmin on ties).
TailFit fit_tail(const TailSample& sample, const TailFitOptions& options = {});

// Classification helper used by fit_tail; strict boundary.
bool is_levy_stable(double mu);

// Nonparametric bootstrap: B same-size resamples with replacement, each refit
// (including the xmin search); returns the standard deviation of the B mu
// values. Replicates that fail fit preconditions are redrawn up to a cap.
// Deterministic: replicate i draws from seed (seed, kDomainBootstrap, i).
double bootstrap_se(const TailSample& sample, int b, std::uint64_t seed,
                    const TailFitOptions& options = {});

// Clauset-style semi-parametric goodness of fit: each replicate draws n_tail
// points from the fitted power law and size - n_tail points from the empirical
// body below xmin, is refit, and its KS distance recorded; p is the fraction
// of replicate distances >= the observed one. b = 0 disables (returns nullopt).
std::optional<double> gof_pvalue(const TailFit& fit, const TailSample& sample, int b,
                                 std::uint64_t seed, const TailFitOptions& options = {});

enum class TailAlternative { kExponential, kLognormal };

std::string_view to_string(TailAlternative alternative);

struct LikelihoodRatioReport {
    TailAlternative alternative = TailAlternative::kExponential;
    double lr = 0.0;  // power-law log-likelihood minus alternative, on x >= xmin
    double p = 1.0;   // two-sided Vuong-style significance
};

// The alternative is fit by MLE on the tail region {x >= xmin}: exponential
// shifted to xmin in closed form, lognormal truncated at xmin numerically.
LikelihoodRatioReport likelihood_ratio(const TailFit& fit, const TailSample& sample,
                                       TailAlternative alternative);

// Hill estimator on the k largest order statistics,
// mu = k / sum_{i=1..k} ln(x_(i) / x_(k+1)); comparable to fit_tail's mu.
double hill_estimator(const TailSample& sample, std::size_t k);

struct TailStructureOptions {
    TailFitOptions fit;
    int bootstrap_b = 0;  // 0 disables mu_err
    int gof_b = 0;        // 0 disables gof_p
    std::uint64_t seed = 0;
    int jobs = 1;
};

struct TailStructureResult {
    std::vector<TailFit> fits;  // sorted by (market, maturity, kind)
    std::vector<std::string> warnings;  // per-series failures, not fatal
};

// split_tails + fit_tail (+ optional bootstrap / GoF) across every series of
// the dataset. Cell seeds derive from the cell's position in the sorted
// enumeration, so results do not depend on the worker count.
TailStructureResult tail_term_structure(const Dataset& dataset,
                                        const TailStructureOptions& options = {});

// Same, over already-computed return series (the pipeline's stage path).
TailStructureResult tail_term_structure(std::span<const ReturnSeries> series,
                                        const TailStructureOptions& options = {});

}  // namespace termstruct
