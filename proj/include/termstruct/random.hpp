#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace termstruct::rng {

// Pinned in report metadata so fixtures stay reproducible. Streams are
// mt19937_64 (fully specified by the standard, hence portable) seeded via
// splitmix64 from (master seed, domain, index); variates are produced by our
// own transforms because the std <random> distributions are
// implementation-defined.
inline constexpr std::string_view kAlgorithm = "mt19937_64+splitmix64/1";

// Stream-id domains, so e.g. bootstrap and goodness-of-fit replicates drawn
// from the same master seed never share a stream.
enum : std::uint64_t {
    kDomainBootstrap = 1,
    kDomainGof = 2,
    kDomainSynthSeries = 3,
    kDomainSynthNoise = 4,
    kDomainCell = 5,  // one sub-seed per (market, maturity, kind) cell
};

std::uint64_t splitmix64(std::uint64_t& state);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain, std::uint64_t index);

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    // Uniform on (0, 1]; never 0, so u^(-1/mu) and ln(u) are safe.
    double uniform();

    // Uniform index in [0, n); 128-bit multiply, no modulo bias.
    std::uint64_t uniform_index(std::uint64_t n);

    // Box-Muller.
    double normal();

    // Bailey's polar method; tail exponent equals nu.
    double student_t(double nu);

    // Pareto with CCDF (x/xmin)^(-mu) via inverse CDF.
    double pareto(double mu, double xmin);

  private:
    std::mt19937_64 engine_;
};

// x = xmin * u^(-1/mu); u = 1 maps to xmin exactly.
double pareto_inverse_cdf(double mu, double xmin, double u);

}  // namespace termstruct::rng
