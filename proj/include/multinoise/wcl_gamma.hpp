// wcl_gamma.hpp: weak-coupling coefficients
//
//   I(sigma) = \int dk mu(k) e^{i sigma omega(k)} |g(k)|^2
//   gamma_n  = (i^n / n!) \int dsigma sigma^n I(sigma)               (oscillatory route)
//            = (2 pi / n!) (-1)^n rho^{(n)}(0),                       (energy-shell route)
//   rho(E)   = sum_{omega(k) = E} mu(k) |g(k)|^2 / |omega'(k)|
//
// The sigma integral is taken inner-k-first, truncated at the first Sigma on a
// doubling ladder past which |I| has dropped below tail_tolerance * I(0).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "multinoise/dispersion.hpp"
#include "multinoise/errors.hpp"
#include "multinoise/format.hpp"
#include "multinoise/parallel.hpp"
#include "multinoise/quadrature.hpp"
#include "multinoise/schwartz.hpp"

namespace multinoise {

struct GammaOptions {
    double tail_tolerance = 1e-12;  // |I(sigma)| / I(0) on [Sigma/2, Sigma]
    double sigma_start = 8.0;
    double sigma_cap = 2048.0;
    double residue_rel = 1e-8;
    double residue_floor = 1e-14;
    double degenerate_gradient = 1e-6;
    QuadratureOptions quad{};
};

// --- I(sigma) ----------------------------------------------------------------

inline std::vector<Interval> momentum_support(const Dispersion& d, const TestFunction& g)
{
    return clip_to_domain(d, numerical_support(g));
}

inline double momentum_panel_width(const Dispersion& d, const TestFunction& g, const std::vector<Interval>& support,
                                   double sigma)
{
    const TestFunction* fs[] = {&g};
    double w = resolving_panel_width(fs);
    double grad = max_abs_gradient(d, support);
    if (sigma != 0.0 && grad > 0.0) w = std::min(w, 2.0 * std::numbers::pi / (std::abs(sigma) * grad));
    return w;
}

// Panels already resolve the carrier; deeper bisection only piles up per-leaf
// roundoff in the Kronrod error estimate of an oscillatory integrand.
inline constexpr QuadratureOptions i_sigma_quadrature{1e-14, 1e-12, 4};

// Adaptive evaluation of I(sigma).
inline cplx i_sigma(const Dispersion& d, const TestFunction& g, double sigma,
                    const QuadratureOptions& opt = i_sigma_quadrature)
{
    auto support = momentum_support(d, g);
    auto panels = make_panels(support, momentum_panel_width(d, g, support, sigma), d.stationary_points());
    auto integrand = [&](double k) {
        double a = std::norm(evaluate(g, k)) * d.measure(k);
        return a * std::polar(1.0, sigma * d(k));
    };
    return integrate_panels(integrand, panels, opt).value;
}

// Fixed momentum rule resolving every |sigma| <= sigma_max:
// I(sigma) = sum_j weight_j e^{i sigma omega_j}.
struct MomentumGrid {
    std::vector<double> omega;
    std::vector<double> weight;
    double sigma_max = 0.0;
};

inline MomentumGrid momentum_grid(const Dispersion& d, const TestFunction& g, double sigma_max)
{
    auto support = momentum_support(d, g);
    auto rule = gauss_legendre_panels(
        make_panels(support, momentum_panel_width(d, g, support, sigma_max), d.stationary_points()));
    MomentumGrid grid;
    grid.sigma_max = sigma_max;
    grid.omega.reserve(rule.nodes.size());
    grid.weight.reserve(rule.nodes.size());
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        double k = rule.nodes[j];
        grid.omega.push_back(d(k));
        grid.weight.push_back(rule.weights[j] * d.measure(k) * std::norm(evaluate(g, k)));
    }
    return grid;
}

inline cplx evaluate(const MomentumGrid& grid, double sigma)
{
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < grid.omega.size(); ++j) {
        double phase = sigma * grid.omega[j];
        re += grid.weight[j] * std::cos(phase);
        im += grid.weight[j] * std::sin(phase);
    }
    return {re, im};
}

// --- sigma memo ----------------------------------------------------------------

struct SigmaTable {
    double sigma_max = 0.0;
    double norm = 0.0;                 // I(0)
    std::vector<KronrodPanel> panels;  // on [0, sigma_max]
    std::vector<cplx> plus;            // I(+sigma) at panel nodes, 15 per panel
    std::vector<cplx> minus;           // I(-sigma), evaluated independently
};

// First Sigma on the ladder sigma_start * 2^j with
// max_{Sigma/2 <= |sigma| <= Sigma} |I(sigma)| <= tail_tolerance * I(0).
inline double sigma_truncation(const Dispersion& d, const TestFunction& g, int n_max, const GammaOptions& opt = {})
{
    constexpr int samples = 64;
    for (double s = opt.sigma_start; s <= opt.sigma_cap; s *= 2.0) {
        MomentumGrid grid = momentum_grid(d, g, s);
        double norm = evaluate(grid, 0.0).real();
        if (norm == 0.0) return s;
        auto peaks = parallel_map(samples + 1, [&](std::size_t i) {
            double sigma = 0.5 * s * (1.0 + static_cast<double>(i) / samples);
            return std::max(std::abs(evaluate(grid, sigma)), std::abs(evaluate(grid, -sigma)));
        });
        double peak = *std::max_element(peaks.begin(), peaks.end());
        if (peak <= opt.tail_tolerance * norm) return s;
    }
    throw SlowDecay("|I(sigma)| has not decayed below the truncation bound by sigma = " +
                    std::to_string(opt.sigma_cap) + " (order " + std::to_string(n_max) + ")");
}

inline SigmaTable sigma_table(const Dispersion& d, const TestFunction& g, int n_max, const GammaOptions& opt = {})
{
    validate(d);
    SigmaTable t;
    t.sigma_max = sigma_truncation(d, g, n_max, opt);
    MomentumGrid grid = momentum_grid(d, g, t.sigma_max);
    t.norm = evaluate(grid, 0.0).real();
    double top = max_abs_omega(d, momentum_support(d, g));
    double width = top > 0.0 ? std::numbers::pi / top : t.sigma_max;
    for (const auto& p : make_panels({{0.0, t.sigma_max}}, width)) t.panels.push_back(kronrod_panel(p.lo, p.hi));

    auto values = parallel_map(t.panels.size(), [&](std::size_t p) {
        std::array<cplx, 30> v;
        for (std::size_t i = 0; i < 15; ++i) {
            double sigma = t.panels[p].nodes[i];
            v[i] = evaluate(grid, sigma);
            v[15 + i] = evaluate(grid, -sigma);
        }
        return v;
    });
    t.plus.reserve(15 * t.panels.size());
    t.minus.reserve(15 * t.panels.size());
    for (const auto& v : values) {
        t.plus.insert(t.plus.end(), v.begin(), v.begin() + 15);
        t.minus.insert(t.minus.end(), v.begin() + 15, v.end());
    }
    return t;
}

struct GammaValue {
    int n = 0;
    double value = 0.0;
    double imag_residue = 0.0;
    double error = 0.0;  // |Kronrod - Gauss|
    double sigma_max = 0.0;
};

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline GammaValue gamma_from_table(const SigmaTable& t, int n, const GammaOptions& opt = {})
{
    if (n < 0) throw std::invalid_argument("gamma: negative order");
    const double parity = (n % 2 == 0) ? 1.0 : -1.0;
    cplx kronrod{}, gauss{};
    for (std::size_t p = 0; p < t.panels.size(); ++p) {
        for (std::size_t i = 0; i < 15; ++i) {
            double sigma = t.panels[p].nodes[i];
            cplx v = std::pow(sigma, n) * (t.plus[15 * p + i] + parity * t.minus[15 * p + i]);
            kronrod += t.panels[p].kronrod_weights[i] * v;
            gauss += t.panels[p].gauss_weights[i] * v;
        }
    }
    cplx scale = i_pow(n) / factorial(n);
    cplx raw = scale * kronrod;
    GammaValue g;
    g.n = n;
    g.value = raw.real();
    g.imag_residue = raw.imag();
    g.error = std::abs(scale * (kronrod - gauss));
    g.sigma_max = t.sigma_max;
    if (!(std::abs(raw.imag()) <= opt.residue_rel * (std::abs(raw.real()) + opt.residue_floor)))
        throw ImaginaryResidue("gamma_" + std::to_string(n) + " = " + format_double(raw.real()) + " + " +
                               format_double(raw.imag()) + "i");
    return g;
}

inline GammaValue gamma_osc(const Dispersion& d, const TestFunction& g, int n, const GammaOptions& opt = {})
{
    return gamma_from_table(sigma_table(d, g, n, opt), n, opt);
}

// All requested orders from one shared memo table.
inline std::vector<GammaValue> gamma_osc(const Dispersion& d, const TestFunction& g, const std::vector<int>& orders,
                                         const GammaOptions& opt = {})
{
    if (orders.empty()) return {};
    const SigmaTable t = sigma_table(d, g, *std::max_element(orders.begin(), orders.end()), opt);
    return parallel_map(orders.size(), [&](std::size_t i) { return gamma_from_table(t, orders[i], opt); });
}

// --- energy shell ---------------------------------------------------------------

inline double shell_density(const Dispersion& d, const TestFunction& g, double e)
{
    double rho = 0.0;
    for (double k : d.roots(e)) {
        double grad = std::abs(d.gradient(k));
        if (grad == 0.0) continue;
        rho += d.measure(k) * std::norm(evaluate(g, k)) / grad;
    }
    return rho;
}

struct DerivativeEstimate {
    double value = 0.0;
    double error = 0.0;
};

// n-th derivative at 0 from central differences
//   D(h) = h^{-n} sum_j (-1)^j C(n,j) f((n/2 - j) h)
// refined by Ridders' extrapolation in h^2.
template <class F>
DerivativeEstimate richardson_derivative(F&& f, int n, double h0)
{
    if (n == 0) return {f(0.0), 0.0};
    constexpr int ntab = 10;
    constexpr double con = 1.4;
    constexpr double con2 = con * con;
    constexpr double safe = 2.0;
    auto central = [&](double h) {
        double sum = 0.0, binom = 1.0;
        for (int j = 0; j <= n; ++j) {
            sum += ((j % 2 == 0) ? binom : -binom) * f((0.5 * n - j) * h);
            binom = binom * (n - j) / (j + 1);
        }
        return sum / std::pow(h, n);
    };
    std::array<std::array<double, ntab>, ntab> a{};
    DerivativeEstimate best{0.0, std::numeric_limits<double>::infinity()};
    double h = h0;
    a[0][0] = central(h);
    best.value = a[0][0];
    for (int i = 1; i < ntab; ++i) {
        h /= con;
        a[0][i] = central(h);
        double fac = con2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            double err = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
            if (err <= best.error) {
                best = {a[j][i], err};
            }
        }
        if (std::abs(a[i][i] - a[i - 1][i - 1]) >= safe * best.error) break;
    }
    return best;
}

// Scale on which rho varies near E = 0, and the largest admissible FD step.
inline double shell_step(const Dispersion& d, const TestFunction& g, int n)
{
    double width = std::numeric_limits<double>::infinity();
    for (const auto& t : g.terms()) width = std::min(width, t.atom.width / std::sqrt(1.0 + t.atom.degree()));
    double h = std::numeric_limits<double>::infinity();
    for (double k : d.roots(0.0)) h = std::min(h, 0.5 * std::abs(d.gradient(k)) * width);
    double reach = std::max(0.5 * n, 1.0);
    if (std::isfinite(d.minimum())) h = std::min(h, 0.9 * std::abs(d.minimum()) / reach);
    if (!std::isfinite(h)) h = 0.5 * width * max_abs_gradient(d, momentum_support(d, g));
    return h;
}

inline double gamma_shell(const Dispersion& d, const TestFunction& g, int n, const GammaOptions& opt = {})
{
    validate(d);
    if (n < 0) throw std::invalid_argument("gamma_shell: negative order");
    auto support = momentum_support(d, g);
    for (double k : d.roots(0.0)) {
        bool inside = std::any_of(support.begin(), support.end(), [&](const Interval& iv) { return iv.contains(k); });
        if (inside && std::abs(d.gradient(k)) < opt.degenerate_gradient)
            throw DegenerateRoot("|omega'(" + format_double(k) + ")| = " + format_double(std::abs(d.gradient(k))));
    }
    double h0 = shell_step(d, g, n);
    if (!(h0 > 0.0)) throw DegenerateRoot("energy shell touches the bottom of the band");
    auto est = richardson_derivative([&](double e) { return shell_density(d, g, e); }, n, h0);
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return 2.0 * std::numbers::pi / factorial(n) * sign * est.value;
}

// --- support condition --------------------------------------------------------

struct SupportReport {
    double epsilon = 0.0;
    std::vector<Interval> support;
    std::vector<double> stationary_inside;
    bool passed = true;
};

inline SupportReport check_support(const Dispersion& d, const TestFunction& g, double epsilon)
{
    SupportReport r;
    r.epsilon = epsilon;
    r.support = clip_to_domain(d, effective_support(g, epsilon));
    for (double s : d.stationary_points())
        for (const auto& iv : r.support)
            if (iv.contains(s)) {
                r.stationary_inside.push_back(s);
                break;
            }
    r.passed = r.stationary_inside.empty();
    return r;
}

// --- table ----------------------------------------------------------------------

struct GammaRow {
    int n = 0;
    double gamma_osc = 0.0;
    double gamma_shell = 0.0;
    double rel_diff = 0.0;
};

struct GammaTable {
    std::vector<GammaRow> rows;
};

inline double gamma_rel_diff(double osc, double shell) { return std::abs(osc - shell) / (std::abs(shell) + 1e-10); }

inline GammaTable gamma_table(const Dispersion& d, const TestFunction& g, const std::vector<int>& orders,
                              const GammaOptions& opt = {})
{
    auto osc = gamma_osc(d, g, orders, opt);
    auto shell = parallel_map(orders.size(), [&](std::size_t i) { return gamma_shell(d, g, orders[i], opt); });
    GammaTable t;
    for (std::size_t i = 0; i < orders.size(); ++i)
        t.rows.push_back({orders[i], osc[i].value, shell[i], gamma_rel_diff(osc[i].value, shell[i])});
    return t;
}

inline std::string to_csv(const GammaTable& t)
{
    std::ostringstream out;
    out << "n,gamma_osc,gamma_shell,rel_diff\n";
    for (const auto& r : t.rows)
        out << r.n << ',' << format_double(r.gamma_osc) << ',' << format_double(r.gamma_shell) << ','
            << format_double(r.rel_diff) << '\n';
    return out.str();
}

} // namespace multinoise
