#include "termstruct/synth.hpp"

#include <algorithm>
#include <cmath>

#include "termstruct/errors.hpp"
#include "termstruct/random.hpp"
#include "termstruct/serialize.hpp"

namespace termstruct {

std::string_view to_string(SynthDistribution distribution) {
    switch (distribution) {
        case SynthDistribution::kGaussian: return "gaussian";
        case SynthDistribution::kStudentT: return "student_t";
        case SynthDistribution::kParetoSymmetric: return "pareto_symmetric";
    }
    return "unknown";
}

TailSample gen_pareto_sample(double mu, double xmin, std::size_t n, std::uint64_t seed) {
    if (!(mu > 0.0) || !(xmin > 0.0)) {
        throw DomainError("pareto sample needs mu > 0 and xmin > 0");
    }
    TailSample sample;
    sample.kind = TailKind::kAbsolute;
    sample.market = "PARETO";
    sample.maturity = 1;
    sample.values.reserve(n);
    rng::Stream stream(seed);
    for (std::size_t i = 0; i < n; ++i) sample.values.push_back(stream.pareto(mu, xmin));
    return sample;
}

namespace {

void validate_spec(const SynthSpec& spec) {
    if (spec.records < 10) throw ConfigError("synth spec needs at least 10 records");
    if (spec.maturities.empty()) throw ConfigError("synth spec needs maturities");
    for (int m : spec.maturities) {
        if (m < 1) throw ConfigError("maturity ranks start at 1");
    }
    if (spec.tail_mu.size() != 1 && spec.tail_mu.size() != spec.maturities.size()) {
        throw ConfigError("tail_mu must hold one value or one per maturity");
    }
    for (double mu : spec.tail_mu) {
        if (!(mu > 0.0)) throw ConfigError("tail_mu values must be positive");
    }
    if (spec.scale_alpha < 0.0) throw ConfigError("scale exponent must be >= 0");
    if (!(spec.base_scale > 0.0)) throw ConfigError("base scale must be positive");
}

}  // namespace

Dataset gen_samuelson_dataset(const SynthSpec& spec) {
    validate_spec(spec);

    Dataset dataset;
    bool first_point = true;
    for (std::size_t series_index = 0; series_index < spec.maturities.size(); ++series_index) {
        const int maturity = spec.maturities[series_index];
        const double mu = spec.tail_mu.size() == 1 ? spec.tail_mu.front()
                                                   : spec.tail_mu[series_index];
        const double scale =
            spec.base_scale * std::pow(static_cast<double>(maturity), -spec.scale_alpha);
        rng::Stream stream(rng::derive_seed(spec.seed, rng::kDomainSynthSeries, series_index));

        ConstantMaturitySeries series;
        series.market = spec.market;
        series.maturity = maturity;
        series.points.reserve(static_cast<std::size_t>(spec.records) + 1);

        Date date = spec.start_date;
        if (is_weekend(date)) date = next_business_day(date);
        double log_price = std::log(100.0);
        series.points.push_back({date, 100.0});
        for (int i = 0; i < spec.records; ++i) {
            double r = 0.0;
            switch (spec.distribution) {
                case SynthDistribution::kGaussian:
                    r = scale * stream.normal();
                    break;
                case SynthDistribution::kStudentT:
                    r = scale * stream.student_t(mu);
                    break;
                case SynthDistribution::kParetoSymmetric: {
                    const double magnitude = stream.pareto(mu, scale);
                    r = stream.uniform() <= 0.5 ? -magnitude : magnitude;
                    break;
                }
            }
            const Date next = next_business_day(date);
            const int dt = days_between(date, next);
            // increment r*dt so the per-day return recovered through the gap
            // rule equals r exactly
            log_price += r * dt;
            date = next;
            series.points.push_back({date, std::exp(log_price)});
        }

        for (const auto& point : series.points) {
            if (first_point || point.date < dataset.period.first) {
                dataset.period.first = point.date;
            }
            if (first_point || dataset.period.last < point.date) {
                dataset.period.last = point.date;
            }
            first_point = false;
        }
        dataset.series.push_back(std::move(series));
    }
    std::sort(dataset.series.begin(), dataset.series.end(),
              [](const ConstantMaturitySeries& a, const ConstantMaturitySeries& b) {
                  return std::tie(a.market, a.maturity) < std::tie(b.market, b.maturity);
              });
    return dataset;
}

AggregateCurve gen_step_curve(double level_low, double level_high, int transition,
                              std::span<const int> maturities, double noise_sd,
                              std::uint64_t seed) {
    std::vector<int> sorted(maturities.begin(), maturities.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.empty() || transition < sorted.front() || transition >= sorted.back()) {
        throw ConfigError("step transition must lie strictly inside the maturity range");
    }
    rng::Stream stream(rng::derive_seed(seed, rng::kDomainSynthNoise, 0));
    AggregateCurve curve;
    for (int maturity : sorted) {
        AggregatePoint point;
        point.maturity = maturity;
        const double level = maturity <= transition ? level_low : level_high;
        const double noise = noise_sd > 0.0 ? noise_sd * stream.normal() : 0.0;
        point.mu_bar_abs = level + noise;
        point.n_abs = 1;
        curve.points.push_back(point);
    }
    return curve;
}

std::vector<FuturesQuote> dataset_to_quotes(const Dataset& dataset) {
    std::vector<FuturesQuote> quotes;
    for (const auto& series : dataset.series) {
        for (const auto& point : series.points) {
            FuturesQuote quote;
            quote.market = series.market;
            quote.obs_date = point.date;
            quote.delivery = month_of(point.date) + std::chrono::months{series.maturity - 1};
            quote.settle = point.price;
            quotes.push_back(std::move(quote));
        }
    }
    std::sort(quotes.begin(), quotes.end(), [](const FuturesQuote& a, const FuturesQuote& b) {
        return std::tie(a.market, a.obs_date, a.delivery) <
               std::tie(b.market, b.obs_date, b.delivery);
    });
    return quotes;
}

void write_quotes_csv(std::ostream& out, std::span<const FuturesQuote> quotes) {
    out << "market,obs_date,delivery,settle\n";
    for (const auto& quote : quotes) {
        out << quote.market << ',' << format_date(quote.obs_date) << ','
            << format_delivery_month(quote.delivery) << ',' << format_double(quote.settle)
            << '\n';
    }
}

}  // namespace termstruct
