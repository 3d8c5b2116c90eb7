#include "termstruct/tails.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <tuple>

#include "termstruct/errors.hpp"
#include "termstruct/parallel.hpp"
#include "termstruct/random.hpp"

namespace termstruct {

namespace {

constexpr int kReplicateRetryCap = 20;

struct SortedSample {
    std::vector<double> values;  // ascending
    std::vector<double> logs;
};

SortedSample sort_sample(const TailSample& sample) {
    SortedSample sorted;
    sorted.values = sample.values;
    std::sort(sorted.values.begin(), sorted.values.end());
    if (!sorted.values.empty() && !(sorted.values.front() > 0.0)) {
        throw DomainError("tail sample values must be strictly positive");
    }
    sorted.logs.reserve(sorted.values.size());
    for (double v : sorted.values) sorted.logs.push_back(std::log(v));
    return sorted;
}

struct Candidate {
    double xmin = 0.0;
    double mu = 0.0;
    std::size_t n_tail = 0;
    double ks = 0.0;
};

// MLE and KS distance for the tail starting at index i0 with cutoff xmin.
std::optional<Candidate> evaluate_candidate(const SortedSample& sorted, double xmin,
                                            std::size_t i0) {
    const std::size_t size = sorted.values.size();
    const std::size_t n_tail = size - i0;
    if (n_tail == 0) return std::nullopt;
    const double log_xmin = std::log(xmin);

    double denom = 0.0;
    for (std::size_t j = i0; j < size; ++j) denom += sorted.logs[j] - log_xmin;
    if (!(denom > 0.0)) return std::nullopt;  // all tail values at xmin

    Candidate candidate;
    candidate.xmin = xmin;
    candidate.n_tail = n_tail;
    candidate.mu = static_cast<double>(n_tail) / denom;

    const double n = static_cast<double>(n_tail);
    double d = 0.0;
    for (std::size_t j = i0; j < size; ++j) {
        const double model = 1.0 - std::exp(-candidate.mu * (sorted.logs[j] - log_xmin));
        const double below = static_cast<double>(j - i0) / n;
        const double above = static_cast<double>(j - i0 + 1) / n;
        d = std::max(d, std::max(model - below, above - model));
    }
    candidate.ks = d;
    return candidate;
}

std::vector<std::size_t> candidate_indices(const SortedSample& sorted,
                                           std::size_t max_candidates) {
    // first index of each distinct value
    std::vector<std::size_t> unique_starts;
    for (std::size_t i = 0; i < sorted.values.size(); ++i) {
        if (i == 0 || sorted.values[i] != sorted.values[i - 1]) unique_starts.push_back(i);
    }
    if (unique_starts.size() <= max_candidates || max_candidates < 2) return unique_starts;

    // quantile-spaced thinning over the distinct values, keeping both ends
    std::vector<std::size_t> thinned;
    thinned.reserve(max_candidates);
    const std::size_t u = unique_starts.size();
    for (std::size_t j = 0; j < max_candidates; ++j) {
        const std::size_t idx = j * (u - 1) / (max_candidates - 1);
        if (thinned.empty() || unique_starts[idx] != thinned.back()) {
            thinned.push_back(unique_starts[idx]);
        }
    }
    return thinned;
}

TailSample resample_with_replacement(const TailSample& sample, rng::Stream& stream) {
    TailSample resampled;
    resampled.kind = sample.kind;
    resampled.market = sample.market;
    resampled.maturity = sample.maturity;
    resampled.values.reserve(sample.values.size());
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        resampled.values.push_back(sample.values[stream.uniform_index(sample.values.size())]);
    }
    return resampled;
}

double normal_ccdf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Truncated-lognormal negative log-likelihood on {x >= xmin}, parameters
// (m, ln s).
double lognormal_nll(std::span<const double> tail_logs, double log_xmin, double m,
                     double log_s) {
    const double s = std::exp(log_s);
    const double z0 = (log_xmin - m) / s;
    const double tail_mass = normal_ccdf(z0);
    if (!(tail_mass > 0.0)) return std::numeric_limits<double>::infinity();
    double nll = 0.0;
    for (double lx : tail_logs) {
        const double z = (lx - m) / s;
        nll += lx + log_s + 0.5 * std::log(2.0 * std::numbers::pi) + 0.5 * z * z;
    }
    nll += static_cast<double>(tail_logs.size()) * std::log(tail_mass);
    return nll;
}

// Small fixed-budget Nelder-Mead, enough for the 2-parameter MLE above.
std::pair<double, double> nelder_mead_2d(const std::function<double(double, double)>& f,
                                         double x0, double y0) {
    struct Vertex {
        double x, y, value;
    };
    auto make = [&](double x, double y) { return Vertex{x, y, f(x, y)}; };
    std::array<Vertex, 3> simplex = {make(x0, y0), make(x0 + 0.5, y0), make(x0, y0 + 0.5)};
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.value < b.value; };
    for (int iter = 0; iter < 300; ++iter) {
        std::sort(simplex.begin(), simplex.end(), by_value);
        if (std::abs(simplex[2].value - simplex[0].value) <
            1e-12 * (1.0 + std::abs(simplex[0].value))) {
            break;
        }
        const double cx = (simplex[0].x + simplex[1].x) / 2.0;
        const double cy = (simplex[0].y + simplex[1].y) / 2.0;
        const Vertex reflected = make(cx + (cx - simplex[2].x), cy + (cy - simplex[2].y));
        if (reflected.value < simplex[0].value) {
            const Vertex expanded = make(cx + 2.0 * (cx - simplex[2].x),
                                         cy + 2.0 * (cy - simplex[2].y));
            simplex[2] = expanded.value < reflected.value ? expanded : reflected;
        } else if (reflected.value < simplex[1].value) {
            simplex[2] = reflected;
        } else {
            const Vertex contracted = make(cx + 0.5 * (simplex[2].x - cx),
                                           cy + 0.5 * (simplex[2].y - cy));
            if (contracted.value < simplex[2].value) {
                simplex[2] = contracted;
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i] = make((simplex[i].x + simplex[0].x) / 2.0,
                                      (simplex[i].y + simplex[0].y) / 2.0);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_value);
    return {simplex[0].x, simplex[0].y};
}

}  // namespace

std::string_view to_string(TailKind kind) {
    switch (kind) {
        case TailKind::kPositive: return "positive";
        case TailKind::kNegative: return "negative";
        case TailKind::kAbsolute: return "absolute";
    }
    return "unknown";
}

std::string_view to_string(TailAlternative alternative) {
    return alternative == TailAlternative::kExponential ? "exponential" : "lognormal";
}

TailSplit split_tails(const ReturnSeries& series) {
    TailSplit split;
    for (auto* sample : {&split.positive, &split.negative, &split.absolute}) {
        sample->market = series.market;
        sample->maturity = series.maturity;
    }
    split.positive.kind = TailKind::kPositive;
    split.negative.kind = TailKind::kNegative;
    split.absolute.kind = TailKind::kAbsolute;
    for (const auto& obs : series.observations) {
        if (obs.value > 0.0) {
            split.positive.values.push_back(obs.value);
            split.absolute.values.push_back(obs.value);
        } else if (obs.value < 0.0) {
            split.negative.values.push_back(-obs.value);
            split.absolute.values.push_back(-obs.value);
        }
        // zeros excluded everywhere
    }
    return split;
}

bool is_levy_stable(double mu) { return mu < 2.0; }

TailFit fit_tail(const TailSample& sample, const TailFitOptions& options) {
    if (sample.values.size() < options.min_sample) {
        throw InsufficientDataError(
            "tail sample of size " + std::to_string(sample.values.size()) +
            " is below the minimum " + std::to_string(options.min_sample));
    }
    const auto sorted = sort_sample(sample);

    std::optional<Candidate> best;
    bool any_large_enough = false;
    if (options.fixed_xmin) {
        const double xmin = *options.fixed_xmin;
        if (!(xmin > 0.0)) throw DomainError("fixed xmin must be strictly positive");
        const auto i0 = std::lower_bound(sorted.values.begin(), sorted.values.end(), xmin) -
                        sorted.values.begin();
        const std::size_t n_tail = sorted.values.size() - static_cast<std::size_t>(i0);
        if (n_tail >= std::max<std::size_t>(options.min_tail, 1)) {
            any_large_enough = true;
            best = evaluate_candidate(sorted, xmin, static_cast<std::size_t>(i0));
        }
    } else {
        for (const std::size_t i0 : candidate_indices(sorted, options.max_xmin_candidates)) {
            const std::size_t n_tail = sorted.values.size() - i0;
            if (n_tail < std::max<std::size_t>(options.min_tail, 1)) break;  // grid ascends
            any_large_enough = true;
            const auto candidate = evaluate_candidate(sorted, sorted.values[i0], i0);
            if (candidate && (!best || candidate->ks < best->ks)) best = candidate;
        }
    }

    if (!best) {
        if (sorted.values.front() == sorted.values.back()) {
            throw DegenerateDataError("all tail sample values are equal");
        }
        if (!any_large_enough) {
            throw InsufficientDataError("tail size below the minimum " +
                                        std::to_string(options.min_tail) +
                                        " at every candidate xmin");
        }
        throw DegenerateDataError("no usable xmin candidate in tail sample");
    }

    TailFit fit;
    fit.kind = sample.kind;
    fit.market = sample.market;
    fit.maturity = sample.maturity;
    fit.mu = best->mu;
    fit.xmin = best->xmin;
    fit.n_tail = best->n_tail;
    fit.ks_stat = best->ks;
    fit.levy_stable = is_levy_stable(best->mu);
    return fit;
}

double bootstrap_se(const TailSample& sample, int b, std::uint64_t seed,
                    const TailFitOptions& options) {
    if (b < 2) throw ConfigError("bootstrap_se needs B >= 2");
    fit_tail(sample, options);  // surface precondition failures before resampling

    std::vector<double> mus(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) {
        rng::Stream stream(rng::derive_seed(seed, rng::kDomainBootstrap,
                                            static_cast<std::uint64_t>(i)));
        int attempts = 0;
        for (;;) {
            const auto resampled = resample_with_replacement(sample, stream);
            try {
                mus[static_cast<std::size_t>(i)] = fit_tail(resampled, options).mu;
                break;
            } catch (const Error&) {
                if (++attempts > kReplicateRetryCap) {
                    throw BootstrapError("bootstrap replicate " + std::to_string(i) +
                                         " kept failing fit preconditions after " +
                                         std::to_string(kReplicateRetryCap) + " redraws");
                }
            }
        }
    }

    double mean = 0.0;
    for (double m : mus) mean += m;
    mean /= static_cast<double>(b);
    double ss = 0.0;
    for (double m : mus) ss += (m - mean) * (m - mean);
    return std::sqrt(ss / static_cast<double>(b - 1));
}

std::optional<double> gof_pvalue(const TailFit& fit, const TailSample& sample, int b,
                                 std::uint64_t seed, const TailFitOptions& options) {
    if (b <= 0) return std::nullopt;

    std::vector<double> body;
    for (double v : sample.values) {
        if (v < fit.xmin) body.push_back(v);
    }
    const std::size_t n_body = sample.values.size() - fit.n_tail;
    if (n_body > 0 && body.empty()) {
        throw DomainError("gof_pvalue: fit does not match the sample (no body values)");
    }

    int at_least_as_bad = 0;
    for (int i = 0; i < b; ++i) {
        rng::Stream stream(
            rng::derive_seed(seed, rng::kDomainGof, static_cast<std::uint64_t>(i)));
        int attempts = 0;
        for (;;) {
            TailSample replicate;
            replicate.kind = sample.kind;
            replicate.market = sample.market;
            replicate.maturity = sample.maturity;
            replicate.values.reserve(sample.values.size());
            for (std::size_t j = 0; j < fit.n_tail; ++j) {
                replicate.values.push_back(stream.pareto(fit.mu, fit.xmin));
            }
            for (std::size_t j = 0; j < n_body; ++j) {
                replicate.values.push_back(body[stream.uniform_index(body.size())]);
            }
            try {
                if (fit_tail(replicate, options).ks_stat >= fit.ks_stat) ++at_least_as_bad;
                break;
            } catch (const Error&) {
                if (++attempts > kReplicateRetryCap) {
                    throw BootstrapError("goodness-of-fit replicate " + std::to_string(i) +
                                         " kept failing fit preconditions after " +
                                         std::to_string(kReplicateRetryCap) + " redraws");
                }
            }
        }
    }
    return static_cast<double>(at_least_as_bad) / static_cast<double>(b);
}

LikelihoodRatioReport likelihood_ratio(const TailFit& fit, const TailSample& sample,
                                       TailAlternative alternative) {
    std::vector<double> tail;
    for (double v : sample.values) {
        if (v >= fit.xmin) tail.push_back(v);
    }
    if (tail.size() < 2) {
        throw InsufficientDataError("likelihood ratio needs at least 2 tail values");
    }
    std::sort(tail.begin(), tail.end());
    if (tail.front() == tail.back()) {
        throw DegenerateDataError("likelihood ratio undefined on an all-equal tail");
    }

    const std::size_t n = tail.size();
    const double log_xmin = std::log(fit.xmin);
    std::vector<double> tail_logs(n);
    for (std::size_t i = 0; i < n; ++i) tail_logs[i] = std::log(tail[i]);

    std::vector<double> alt_loglik(n);
    if (alternative == TailAlternative::kExponential) {
        double mean = 0.0;
        for (double v : tail) mean += v;
        mean /= static_cast<double>(n);
        const double rate = 1.0 / (mean - fit.xmin);
        for (std::size_t i = 0; i < n; ++i) {
            alt_loglik[i] = std::log(rate) - rate * (tail[i] - fit.xmin);
        }
    } else {
        double m0 = 0.0;
        for (double lx : tail_logs) m0 += lx;
        m0 /= static_cast<double>(n);
        double var0 = 0.0;
        for (double lx : tail_logs) var0 += (lx - m0) * (lx - m0);
        var0 /= static_cast<double>(n);
        const double s0 = std::sqrt(std::max(var0, 1e-8));
        const auto [m, log_s] = nelder_mead_2d(
            [&](double mm, double ls) {
                return lognormal_nll(tail_logs, log_xmin, mm, ls);
            },
            m0, std::log(s0));
        const double s = std::exp(log_s);
        const double tail_mass = normal_ccdf((log_xmin - m) / s);
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (tail_logs[i] - m) / s;
            alt_loglik[i] = -tail_logs[i] - std::log(s) -
                            0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z -
                            std::log(tail_mass);
        }
    }

    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pl_loglik =
            std::log(fit.mu) - log_xmin - (fit.mu + 1.0) * (tail_logs[i] - log_xmin);
        diff[i] = pl_loglik - alt_loglik[i];
    }

    LikelihoodRatioReport report;
    report.alternative = alternative;
    for (double d : diff) report.lr += d;

    double mean_diff = report.lr / static_cast<double>(n);
    double var_diff = 0.0;
    for (double d : diff) var_diff += (d - mean_diff) * (d - mean_diff);
    var_diff /= static_cast<double>(n);
    if (var_diff <= 0.0) {
        report.p = 1.0;
        return report;
    }
    const double z = report.lr / std::sqrt(var_diff * static_cast<double>(n));
    report.p = std::erfc(std::abs(z) / std::numbers::sqrt2);
    return report;
}

double hill_estimator(const TailSample& sample, std::size_t k) {
    const std::size_t n = sample.values.size();
    if (k < 2 || k >= n) {
        throw DomainError("hill estimator needs 2 <= k < n (k=" + std::to_string(k) +
                          ", n=" + std::to_string(n) + ")");
    }
    std::vector<double> sorted = sample.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (!(sorted.back() > 0.0)) {
        throw DomainError("tail sample values must be strictly positive");
    }
    const double log_ref = std::log(sorted[k]);  // x_(k+1) in 1-based terms
    double denom = 0.0;
    for (std::size_t i = 0; i < k; ++i) denom += std::log(sorted[i]) - log_ref;
    if (!(denom > 0.0)) {
        throw DegenerateDataError("hill denominator is zero (tied order statistics)");
    }
    return static_cast<double>(k) / denom;
}

TailStructureResult tail_term_structure(const Dataset& dataset,
                                        const TailStructureOptions& options) {
    std::vector<ReturnSeries> returns;
    returns.reserve(dataset.series.size());
    std::vector<std::string> warnings;
    for (const auto& series : dataset.series) {
        try {
            returns.push_back(compute_returns(series));
        } catch (const Error& e) {
            warnings.push_back(series.market + " M=" + std::to_string(series.maturity) + ": " +
                               e.what());
        }
    }
    auto result = tail_term_structure(std::span<const ReturnSeries>(returns), options);
    result.warnings.insert(result.warnings.begin(),
                           std::make_move_iterator(warnings.begin()),
                           std::make_move_iterator(warnings.end()));
    return result;
}

TailStructureResult tail_term_structure(std::span<const ReturnSeries> series,
                                        const TailStructureOptions& options) {
    struct Cell {
        TailSample sample;
        std::optional<TailFit> fit;
        std::optional<std::string> warning;
    };

    std::vector<Cell> cells;
    TailStructureResult result;
    for (const auto& s : series) {
        auto split = split_tails(s);
        for (auto* sample : {&split.positive, &split.negative, &split.absolute}) {
            cells.push_back({std::move(*sample), std::nullopt, std::nullopt});
        }
    }

    parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
        auto& cell = cells[i];
        const std::uint64_t cell_seed =
            rng::derive_seed(options.seed, rng::kDomainCell, static_cast<std::uint64_t>(i));
        try {
            auto fit = fit_tail(cell.sample, options.fit);
            if (options.bootstrap_b > 0) {
                fit.mu_err = bootstrap_se(cell.sample, options.bootstrap_b, cell_seed,
                                          options.fit);
            }
            fit.gof_p = gof_pvalue(fit, cell.sample, options.gof_b, cell_seed, options.fit);
            cell.fit = std::move(fit);
        } catch (const Error& e) {
            cell.warning = cell.sample.market + " M=" + std::to_string(cell.sample.maturity) +
                           " " + std::string(to_string(cell.sample.kind)) + ": " + e.what();
        }
    });

    for (auto& cell : cells) {
        if (cell.fit) result.fits.push_back(std::move(*cell.fit));
        if (cell.warning) result.warnings.push_back(std::move(*cell.warning));
    }
    std::sort(result.fits.begin(), result.fits.end(), [](const TailFit& a, const TailFit& b) {
        return std::tie(a.market, a.maturity, a.kind) < std::tie(b.market, b.maturity, b.kind);
    });
    return result;
}

}  // namespace termstruct
