// quadrature.hpp: panelled adaptive Gauss-Kronrod, fixed Gauss rules, Gauss-Hermite
//
// Adaptive integration is Boost.Math's recursive G7/K15 rule applied on
// caller-supplied panels. Panels keep every feature of an atom-built integrand
// (a Gaussian bump of known width) resolved by the initial sampling, which an
// adaptive rule started on one huge interval cannot guarantee.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "multinoise/errors.hpp"
#include "multinoise/format.hpp"

namespace multinoise {

struct QuadratureOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-13;
    unsigned max_depth = 12;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Sorted union of possibly overlapping intervals.
inline std::vector<Interval> merge_intervals(std::vector<Interval> parts)
{
    std::erase_if(parts, [](const Interval& iv) { return !(iv.hi > iv.lo); });
    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& iv : parts) {
        if (!out.empty() && iv.lo <= out.back().hi)
            out.back().hi = std::max(out.back().hi, iv.hi);
        else
            out.push_back(iv);
    }
    return out;
}

// Cuts each interval into equal panels no wider than max_width. Every point in
// `breaks` that falls strictly inside an interval becomes a panel boundary.
inline std::vector<Interval> make_panels(const std::vector<Interval>& support, double max_width,
                                         const std::vector<double>& breaks = {})
{
    std::vector<Interval> pieces;
    for (const auto& iv : support) {
        std::vector<double> cuts{iv.lo};
        for (double b : breaks)
            if (b > iv.lo && b < iv.hi) cuts.push_back(b);
        cuts.push_back(iv.hi);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) pieces.push_back({cuts[i], cuts[i + 1]});
    }
    std::vector<Interval> panels;
    for (const auto& p : pieces) {
        auto count = static_cast<std::size_t>(std::ceil(p.length() / max_width));
        count = std::max<std::size_t>(count, 1);
        double h = p.length() / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            double lo = p.lo + h * static_cast<double>(i);
            double hi = (i + 1 == count) ? p.hi : p.lo + h * static_cast<double>(i + 1);
            panels.push_back({lo, hi});
        }
    }
    return panels;
}

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    double l1 = 0.0;
};

template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opt = {})
{
    using T = std::invoke_result_t<F&, double>;
    QuadratureResult<T> r;
    if (a == b) return r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, opt.max_depth, opt.rel_tol,
                                                                            &r.error, &r.l1);
    if (!(r.error <= std::max(opt.abs_tol, 10.0 * opt.rel_tol * r.l1)))
        throw QuadratureFailure("adaptive Gauss-Kronrod on [" + format_double(a) + ", " + format_double(b) +
                                "] reached error " + format_double(r.error) + " with |f|_1 = " +
                                format_double(r.l1));
    return r;
}

// Sum of adaptive integrals over panels, accumulated in panel order.
template <class F>
auto integrate_panels(F&& f, const std::vector<Interval>& panels, const QuadratureOptions& opt = {})
{
    using T = std::invoke_result_t<F&, double>;
    QuadratureResult<T> total;
    for (const auto& p : panels) {
        auto r = integrate_adaptive(f, p.lo, p.hi, opt);
        total.value += r.value;
        total.error += r.error;
        total.l1 += r.l1;
    }
    return total;
}

struct NodeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// 20-point Gauss-Legendre on each panel.
inline NodeRule gauss_legendre_panels(const std::vector<Interval>& panels)
{
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    NodeRule rule;
    for (const auto& p : panels) {
        double mid = 0.5 * (p.lo + p.hi);
        double half = 0.5 * p.length();
        // abscissa() holds the 10 non-negative nodes in increasing order
        for (std::size_t i = x.size(); i-- > 0;) {
            rule.nodes.push_back(mid - half * x[i]);
            rule.weights.push_back(half * w[i]);
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            rule.nodes.push_back(mid + half * x[i]);
            rule.weights.push_back(half * w[i]);
        }
    }
    return rule;
}

// Fixed G7/K15 pair on one panel: Kronrod nodes plus both weight sets, used when
// integrand values are tabulated once and reused (the sigma memo in wcl_gamma).
struct KronrodPanel {
    std::array<double, 15> nodes{};
    std::array<double, 15> kronrod_weights{};
    std::array<double, 15> gauss_weights{};  // zero on the Kronrod-only nodes
};

inline KronrodPanel kronrod_panel(double a, double b)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& x = GK::abscissa();     // 8 values, x[0] = 0, increasing
    const auto& wk = GK::weights();
    const auto& wg = G::weights();      // 4 values, wg[0] at x = 0
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    KronrodPanel p;
    std::size_t idx = 0;
    for (std::size_t i = x.size(); i-- > 1;) {
        p.nodes[idx] = mid - half * x[i];
        p.kronrod_weights[idx] = half * wk[i];
        p.gauss_weights[idx] = (i % 2 == 0) ? half * wg[i / 2] : 0.0;
        ++idx;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        p.nodes[idx] = mid + half * x[i];
        p.kronrod_weights[idx] = half * wk[i];
        p.gauss_weights[idx] = (i % 2 == 0) ? half * wg[i / 2] : 0.0;
        ++idx;
    }
    return p;
}

// Gauss-Hermite rule for weight exp(-x^2) (Golub-Welsch). Exact for
// polynomials of degree <= 2q - 1. Rules are built once per q and cached.
inline const NodeRule& gauss_hermite(std::size_t q)
{
    constexpr std::size_t max_q = 96;
    if (q == 0 || q > max_q) throw std::out_of_range("gauss_hermite: order out of range");
    static std::array<NodeRule, max_q + 1> cache;
    static std::array<std::once_flag, max_q + 1> flags;
    std::call_once(flags[q], [q] {
        Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
        for (std::size_t k = 1; k < q; ++k) {
            double off = std::sqrt(static_cast<double>(k) / 2.0);
            auto i = static_cast<Eigen::Index>(k);
            jacobi(i, i - 1) = off;
            jacobi(i - 1, i) = off;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
        NodeRule rule;
        const double mass = std::sqrt(std::numbers::pi);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(q); ++i) {
            rule.nodes.push_back(eig.eigenvalues()(i));
            double v0 = eig.eigenvectors()(0, i);
            rule.weights.push_back(mass * v0 * v0);
        }
        cache[q] = std::move(rule);
    });
    return cache[q];
}

} // namespace multinoise
