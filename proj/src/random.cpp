#include "termstruct/random.hpp"

#include <cmath>
#include <numbers>

namespace termstruct::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain, std::uint64_t index) {
    std::uint64_t state = master;
    splitmix64(state);
    state ^= splitmix64(state) + domain;
    state ^= splitmix64(state) + index;
    return splitmix64(state);
}

double Stream::uniform() {
    // Top 53 bits; +1 shifts the lattice to (0, 1].
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t Stream::uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
}

double Stream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Stream::student_t(double nu) {
    const double u = uniform();
    const double v = uniform();
    return std::sqrt(nu * (std::pow(u, -2.0 / nu) - 1.0)) *
           std::cos(2.0 * std::numbers::pi * v);
}

double Stream::pareto(double mu, double xmin) {
    return pareto_inverse_cdf(mu, xmin, uniform());
}

double pareto_inverse_cdf(double mu, double xmin, double u) {
    return xmin * std::pow(u, -1.0 / mu);
}

}  // namespace termstruct::rng
