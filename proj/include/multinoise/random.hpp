// random.hpp: seeded random draws with a documented, portable bit mapping
//
// Engine: MT19937-64 (std::mt19937_64, default parameters, seeded with the raw
// 64-bit seed). Mappings are fixed here rather than delegated to
// <random> distributions, whose outputs are implementation-defined:
//   uniform()  = (x >> 11) * 2^-53                      in [0, 1)
//   normal()   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)      (Box-Muller, one draw)
//   complex_normal() = (normal() + i normal()) / sqrt(2)

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace multinoise {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

    double normal()
    {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::complex<double> complex_normal()
    {
        double re = normal();
        double im = normal();
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

private:
    std::mt19937_64 engine_;
};

} // namespace multinoise
