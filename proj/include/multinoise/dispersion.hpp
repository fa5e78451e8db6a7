// dispersion.hpp: reservoir dispersion laws omega(k)
//
//   linear:     omega(k) = v k - omega_0
//   quadratic:  omega(k) = k^2 / (2 m) - omega_0
//
// dimension 3 means a radial reduction: k >= 0 with measure 4 pi k^2 dk.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "multinoise/quadrature.hpp"

namespace multinoise {

struct Dispersion {
    enum class Kind { linear, quadratic };

    Kind kind = Kind::linear;
    double slope = 1.0;   // v, linear only
    double mass = 1.0;    // m, quadratic only
    double offset = 0.0;  // omega_0
    int dimension = 1;

    static Dispersion linear(double v, double omega0 = 0.0, int dim = 1) { return {Kind::linear, v, 1.0, omega0, dim}; }
    static Dispersion quadratic(double m, double omega0 = 0.0, int dim = 1)
    {
        return {Kind::quadratic, 1.0, m, omega0, dim};
    }

    double operator()(double k) const
    {
        return kind == Kind::linear ? slope * k - offset : k * k / (2.0 * mass) - offset;
    }

    double gradient(double k) const { return kind == Kind::linear ? slope : k / mass; }

    double measure(double k) const
    {
        return dimension == 3 ? 4.0 * std::numbers::pi * k * k : 1.0;
    }

    double domain_lo() const { return dimension == 3 ? 0.0 : -std::numeric_limits<double>::infinity(); }

    std::vector<double> stationary_points() const
    {
        if (kind == Kind::quadratic) return {0.0};
        return {};
    }

    // Maximal intervals on which omega is strictly monotone, inside the domain.
    std::vector<Interval> branches() const
    {
        const double inf = std::numeric_limits<double>::infinity();
        if (kind == Kind::linear) return {{domain_lo(), inf}};
        if (dimension == 3) return {{0.0, inf}};
        return {{-inf, 0.0}, {0.0, inf}};
    }

    // Solutions of omega(k) = e, one per branch at most, in increasing order.
    std::vector<double> roots(double e) const
    {
        if (kind == Kind::linear) {
            double k = (e + offset) / slope;
            if (k < domain_lo()) return {};
            return {k};
        }
        double s = 2.0 * mass * (e + offset);
        if (s < 0.0) return {};
        double k = std::sqrt(s);
        if (dimension == 3 || k == 0.0) return {k};
        return {-k, k};
    }

    // Inverse of omega restricted to branch b (index into branches()).
    double inverse(std::size_t b, double e) const
    {
        if (kind == Kind::linear) return (e + offset) / slope;
        double k = std::sqrt(std::max(0.0, 2.0 * mass * (e + offset)));
        return (dimension == 1 && b == 0) ? -k : k;
    }

    // Lowest value of omega on the domain.
    double minimum() const
    {
        if (kind == Kind::quadratic) return -offset;
        return -std::numeric_limits<double>::infinity();
    }
};

inline void validate(const Dispersion& d)
{
    if (d.dimension != 1 && d.dimension != 3) throw std::invalid_argument("dispersion: dimension must be 1 or 3");
    if (!std::isfinite(d.offset)) throw std::invalid_argument("dispersion: offset must be finite");
    if (d.kind == Dispersion::Kind::linear) {
        if (!(d.slope != 0.0) || !std::isfinite(d.slope)) throw std::invalid_argument("dispersion: slope must be nonzero");
        if (d.dimension == 3) throw std::invalid_argument("dispersion: radial reduction needs a quadratic law");
    } else if (!(d.mass > 0.0) || !std::isfinite(d.mass)) {
        throw std::invalid_argument("dispersion: mass must be positive");
    }
}

inline std::string to_string(Dispersion::Kind k) { return k == Dispersion::Kind::linear ? "linear" : "quadratic"; }

// Largest |omega| over a union of intervals.
inline double max_abs_omega(const Dispersion& d, const std::vector<Interval>& support)
{
    double m = 0.0;
    for (const auto& iv : support) {
        m = std::max({m, std::abs(d(iv.lo)), std::abs(d(iv.hi))});
        for (double s : d.stationary_points())
            if (iv.contains(s)) m = std::max(m, std::abs(d(s)));
    }
    return m;
}

inline double max_abs_gradient(const Dispersion& d, const std::vector<Interval>& support)
{
    double m = 0.0;
    for (const auto& iv : support) m = std::max({m, std::abs(d.gradient(iv.lo)), std::abs(d.gradient(iv.hi))});
    return m;
}

// Support restricted to the dispersion's domain.
inline std::vector<Interval> clip_to_domain(const Dispersion& d, std::vector<Interval> support)
{
    double lo = d.domain_lo();
    for (auto& iv : support) iv.lo = std::max(iv.lo, lo);
    return merge_intervals(std::move(support));
}

} // namespace multinoise
