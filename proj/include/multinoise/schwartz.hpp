// schwartz.hpp: Gaussian-Hermite test functions with exact derivative and Fourier calculus
//
// An Atom is  P(u) exp(-u^2/2) exp(i m t)  with  u = (t - c)/w  and
// P(u) = sum_k p_k H_k(u)  (physicists' Hermite polynomials). The class is
// closed under d/dt and under the Fourier transform
//     (F h)(x) = (2 pi)^(-1/2) \int e^{i t x} h(t) dt,
// and both maps act on the coefficient list without approximation.
//
// Inner products:
//   l2_inner          exact (Gauss-Hermite after a complex shift of the contour)
//   weighted_inner    \int |x|^n conj(f_F) h_F dx, adaptive quadrature split at x = 0
//   indefinite_inner  i^n gamma \int conj(f^{(n)}) h dt, exact

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "multinoise/errors.hpp"
#include "multinoise/quadrature.hpp"

namespace multinoise {

using cplx = std::complex<double>;

// i^n for integer n >= 0.
inline cplx i_pow(int n)
{
    switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

struct Atom {
    double center = 0.0;
    double width = 1.0;
    double modulation = 0.0;
    std::vector<cplx> poly{cplx{1.0, 0.0}};  // Hermite coefficients in u = (t - center)/width

    std::size_t degree() const { return poly.empty() ? 0 : poly.size() - 1; }

    friend bool operator==(const Atom&, const Atom&) = default;
};

inline void validate(const Atom& a)
{
    if (!(a.width > 0.0) || !std::isfinite(a.width)) throw std::invalid_argument("Atom: width must be positive");
    if (a.poly.empty()) throw std::invalid_argument("Atom: polynomial coefficient list is empty");
    if (!std::isfinite(a.center) || !std::isfinite(a.modulation))
        throw std::invalid_argument("Atom: center and modulation must be finite");
}

// sum_k p_k H_k(u); U is double or std::complex<double>.
template <class U>
cplx hermite_series(std::span<const cplx> p, U u)
{
    using V = std::conditional_t<std::is_same_v<U, double>, double, cplx>;
    if (p.empty()) return {};
    V h_prev = V(1.0);
    cplx sum = p[0] * cplx(h_prev);
    if (p.size() == 1) return sum;
    V h = V(2.0) * u;
    sum += p[1] * cplx(h);
    for (std::size_t k = 1; k + 1 < p.size(); ++k) {
        V h_next = V(2.0) * u * h - V(2.0 * static_cast<double>(k)) * h_prev;
        h_prev = h;
        h = h_next;
        sum += p[k + 1] * cplx(h);
    }
    return sum;
}

inline cplx evaluate(const Atom& a, double t)
{
    double u = (t - a.center) / a.width;
    return hermite_series<double>(a.poly, u) * std::exp(-0.5 * u * u) * std::polar(1.0, a.modulation * t);
}

// d/dt of an atom, staying in the class:
//   d/du [H_k e^{-u^2/2}] = (k H_{k-1} - H_{k+1}/2) e^{-u^2/2}
inline Atom derivative(const Atom& a)
{
    Atom d = a;
    d.poly.assign(a.poly.size() + 1, cplx{});
    const double inv_w = 1.0 / a.width;
    const cplx im{0.0, a.modulation};
    for (std::size_t k = 0; k < a.poly.size(); ++k) {
        const cplx pk = a.poly[k];
        if (k > 0) d.poly[k - 1] += pk * (static_cast<double>(k) * inv_w);
        d.poly[k + 1] -= pk * (0.5 * inv_w);
        d.poly[k] += pk * im;
    }
    while (d.poly.size() > 1 && d.poly.back() == cplx{}) d.poly.pop_back();
    return d;
}

struct Term {
    cplx coefficient{1.0, 0.0};
    Atom atom;

    friend bool operator==(const Term&, const Term&) = default;
};

class TestFunction {
public:
    TestFunction() = default;

    explicit TestFunction(Atom atom, cplx coefficient = {1.0, 0.0})
    {
        validate(atom);
        terms_.push_back({coefficient, std::move(atom)});
    }

    explicit TestFunction(std::vector<Term> terms) : terms_(std::move(terms))
    {
        for (const auto& t : terms_) validate(t.atom);
    }

    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    bool is_zero() const
    {
        return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
            return t.coefficient == cplx{} ||
                   std::all_of(t.atom.poly.begin(), t.atom.poly.end(), [](cplx c) { return c == cplx{}; });
        });
    }

    TestFunction& operator+=(const TestFunction& other)
    {
        terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
        return *this;
    }

    TestFunction& operator*=(cplx s)
    {
        for (auto& t : terms_) t.coefficient *= s;
        return *this;
    }

    friend TestFunction operator+(TestFunction a, const TestFunction& b) { return a += b; }
    friend TestFunction operator-(TestFunction a, const TestFunction& b) { return a += b * cplx{-1.0, 0.0}; }
    friend TestFunction operator*(TestFunction a, cplx s) { return a *= s; }
    friend TestFunction operator*(cplx s, TestFunction a) { return a *= s; }

    // Structural (term-by-term) equality, not equality as functions.
    friend bool operator==(const TestFunction&, const TestFunction&) = default;

private:
    std::vector<Term> terms_;
};

// Unit-L2-norm Gaussian (pi w^2)^{-1/4} exp(-(t-c)^2/(2w^2)) exp(i m t).
inline TestFunction gaussian(double center = 0.0, double width = 1.0, double modulation = 0.0)
{
    Atom a{center, width, modulation, {cplx{1.0, 0.0}}};
    return TestFunction(a, std::pow(std::numbers::pi * width * width, -0.25));
}

// Normalized k-th Hermite function, optionally shifted, scaled and modulated.
inline TestFunction hermite_function(std::size_t k, double center = 0.0, double width = 1.0, double modulation = 0.0)
{
    Atom a{center, width, modulation, std::vector<cplx>(k + 1, cplx{})};
    a.poly[k] = 1.0;
    double norm2 = std::sqrt(std::numbers::pi) * width;
    for (std::size_t j = 1; j <= k; ++j) norm2 *= 2.0 * static_cast<double>(j);
    return TestFunction(a, 1.0 / std::sqrt(norm2));
}

inline cplx evaluate(const TestFunction& f, double t)
{
    cplx sum{};
    for (const auto& term : f.terms()) sum += term.coefficient * evaluate(term.atom, t);
    return sum;
}

inline TestFunction derivative(const TestFunction& f, int order = 1)
{
    if (order < 0) throw std::invalid_argument("derivative: negative order");
    std::vector<Term> terms = f.terms();
    for (int m = 0; m < order; ++m)
        for (auto& t : terms) t.atom = derivative(t.atom);
    return TestFunction(std::move(terms));
}

// Fourier transform with kernel e^{itx}/sqrt(2 pi). Per atom:
//   center -> -m, width -> 1/w, modulation -> c,
//   coefficient *= w e^{imc},  p_k -> i^k p_k.
inline TestFunction fourier(const TestFunction& f)
{
    std::vector<Term> out;
    out.reserve(f.size());
    for (const auto& t : f.terms()) {
        const Atom& a = t.atom;
        Atom b{-a.modulation, 1.0 / a.width, a.center, a.poly};
        for (std::size_t k = 0; k < b.poly.size(); ++k) b.poly[k] *= i_pow(static_cast<int>(k));
        out.push_back({t.coefficient * a.width * std::polar(1.0, a.modulation * a.center), std::move(b)});
    }
    return TestFunction(std::move(out));
}

// t -> f(t - s)
inline TestFunction shift(const TestFunction& f, double s)
{
    std::vector<Term> out = f.terms();
    for (auto& t : out) {
        t.coefficient *= std::polar(1.0, -t.atom.modulation * s);
        t.atom.center += s;
    }
    return TestFunction(std::move(out));
}

// \int conj(A1) A2 dt for a pair of weighted atoms. The product is
// Q(t) exp(-a t^2 + beta t + e0) with complex beta; shifting the contour to the
// stationary point t* = beta/(2a) leaves a real Gaussian weight, and
// Gauss-Hermite with enough nodes integrates the polynomial Q exactly.
inline cplx l2_inner(const Term& x, const Term& y)
{
    const Atom& a1 = x.atom;
    const Atom& a2 = y.atom;
    const double iw1 = 1.0 / (a1.width * a1.width);
    const double iw2 = 1.0 / (a2.width * a2.width);
    const double a = 0.5 * (iw1 + iw2);
    const double dm = a2.modulation - a1.modulation;
    const double b_re = a1.center * iw1 + a2.center * iw2;
    const cplx beta{b_re, dm};
    const double dc = a1.center - a2.center;
    const cplx exponent{-dc * dc / (2.0 * (a1.width * a1.width + a2.width * a2.width)) - dm * dm / (4.0 * a),
                        b_re * dm / (2.0 * a)};
    const cplx t_star = beta / (2.0 * a);
    const double sa = std::sqrt(a);

    std::vector<cplx> p1(a1.poly.size());
    std::transform(a1.poly.begin(), a1.poly.end(), p1.begin(), [](cplx c) { return std::conj(c); });

    const std::size_t q = (a1.degree() + a2.degree()) / 2 + 2;
    const NodeRule& gh = gauss_hermite(q);
    cplx sum{};
    for (std::size_t j = 0; j < q; ++j) {
        const cplx t = gh.nodes[j] / sa + t_star;
        const cplx u1 = (t - a1.center) / a1.width;
        const cplx u2 = (t - a2.center) / a2.width;
        sum += gh.weights[j] * hermite_series<cplx>(p1, u1) * hermite_series<cplx>(a2.poly, u2);
    }
    return std::conj(x.coefficient) * y.coefficient * std::exp(exponent) / sa * sum;
}

inline cplx l2_inner(const TestFunction& f, const TestFunction& h)
{
    cplx sum{};
    for (const auto& x : f.terms())
        for (const auto& y : h.terms()) sum += l2_inner(x, y);
    return sum;
}

// --- envelopes ---------------------------------------------------------------

// M(u) = sum_k |p_k| Ht_k(|u|) e^{-u^2/2}, where Ht obeys the Hermite recurrence
// with all signs positive, so |P(u) e^{-u^2/2}| <= M(u). M decreases for |u| > sqrt(deg).
inline double envelope_majorant(std::span<const cplx> p, double u)
{
    u = std::abs(u);
    double h_prev = 1.0;
    double sum = std::abs(p[0]);
    if (p.size() > 1) {
        double h = 2.0 * u;
        sum += std::abs(p[1]) * h;
        for (std::size_t k = 1; k + 1 < p.size(); ++k) {
            double h_next = 2.0 * u * h + 2.0 * static_cast<double>(k) * h_prev;
            h_prev = h;
            h = h_next;
            sum += std::abs(p[k + 1]) * h;
        }
    }
    return sum * std::exp(-0.5 * u * u);
}

// Smallest R >= sqrt(deg) with scale * M(u) <= threshold for all |u| >= R.
inline double envelope_radius(const Atom& a, double scale, double threshold)
{
    double r0 = std::sqrt(static_cast<double>(a.degree()));
    if (scale * envelope_majorant(a.poly, r0) <= threshold) return r0;
    double lo = r0;
    double hi = r0 + 1.0;
    while (scale * envelope_majorant(a.poly, hi) > threshold) {
        lo = hi;
        hi = r0 + 2.0 * (hi - r0);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (scale * envelope_majorant(a.poly, mid) > threshold ? lo : hi) = mid;
    }
    return hi;
}

// Overapproximation of {t : |f(t)| > threshold}, as a union of per-atom windows
// (each atom window guarantees |atom| <= threshold outside it).
inline std::vector<Interval> effective_support(const TestFunction& f, double threshold)
{
    std::vector<Interval> parts;
    for (const auto& t : f.terms()) {
        double scale = std::abs(t.coefficient);
        if (scale == 0.0) continue;
        double r = envelope_radius(t.atom, scale, threshold) * t.atom.width;
        parts.push_back({t.atom.center - r, t.atom.center + r});
    }
    return merge_intervals(std::move(parts));
}

// Per-atom windows outside which each atom is below `relative` times its own
// envelope peak. Used to truncate quadrature ranges.
inline std::vector<Interval> numerical_support(const TestFunction& f, double relative = 1e-18)
{
    std::vector<Interval> parts;
    for (const auto& t : f.terms()) {
        if (t.coefficient == cplx{}) continue;
        const Atom& a = t.atom;
        double peak = 0.0;
        for (double u = 0.0; u <= std::sqrt(static_cast<double>(a.degree())) + 1.0; u += 0.05)
            peak = std::max(peak, envelope_majorant(a.poly, u));
        double r = envelope_radius(a, 1.0, relative * peak) * a.width;
        parts.push_back({a.center - r, a.center + r});
    }
    return merge_intervals(std::move(parts));
}

// Widest panel that still samples every atom's Gaussian width and carrier period.
inline double resolving_panel_width(std::span<const TestFunction* const> fs)
{
    double w = std::numeric_limits<double>::infinity();
    for (const TestFunction* f : fs)
        for (const auto& t : f->terms()) {
            w = std::min(w, t.atom.width / std::sqrt(1.0 + static_cast<double>(t.atom.degree())));
            if (t.atom.modulation != 0.0) w = std::min(w, 2.0 * std::numbers::pi / std::abs(t.atom.modulation));
        }
    return w;
}

// --- H_n forms ---------------------------------------------------------------

inline double abs_pow(double x, int n) { return n == 0 ? 1.0 : std::pow(std::abs(x), n); }

// (f, h)_{H_n} = \int |x|^n conj(f_F(x)) h_F(x) dx
inline cplx weighted_inner(int n, const TestFunction& f, const TestFunction& h, const QuadratureOptions& opt = {})
{
    if (n < 0) throw std::invalid_argument("weighted_inner: negative order");
    if (f.is_zero() || h.is_zero()) return {};
    const TestFunction ff = fourier(f);
    const TestFunction hf = fourier(h);
    auto support = numerical_support(ff);
    auto hs = numerical_support(hf);
    support.insert(support.end(), hs.begin(), hs.end());
    support = merge_intervals(std::move(support));
    const TestFunction* both[] = {&ff, &hf};
    const auto panels = make_panels(support, resolving_panel_width(both), {0.0});
    auto integrand = [&](double x) { return abs_pow(x, n) * std::conj(evaluate(ff, x)) * evaluate(hf, x); };
    return integrate_panels(integrand, panels, opt).value;
}

// <f, h>_n = i^n gamma \int conj(f^{(n)}(t)) h(t) dt, the commutator kernel of c^-_n(f), c^+_n(h).
inline cplx indefinite_inner(int n, double gamma, const TestFunction& f, const TestFunction& h)
{
    if (n < 0) throw std::invalid_argument("indefinite_inner: negative order");
    if (gamma == 0.0) throw ZeroGamma("gamma_n must be nonzero (order " + std::to_string(n) + ")");
    return i_pow(n) * gamma * l2_inner(derivative(f, n), h);
}

// --- frequency grids and the metric operator ---------------------------------

// Orientation s of the metric eta = F^{-1} (s sign) F for odd n, fixed so that
// (f, eta h)_{H_n} equals indefinite_inner(n, 1, f, h). With the e^{itx} kernel
// (f^{(n)})_F = (-ix)^n f_F, so the kernel is (-1)^n x^n = -|x|^n sign(x) for odd n.
inline constexpr int odd_metric_orientation = -1;

// Pointwise symbol of eta_n on the frequency axis: s sign(x) for odd n,
// identity for even n (the even-order form is the positive one).
inline double metric_symbol(int n, double x)
{
    if (n % 2 == 0) return 1.0;
    return odd_metric_orientation * (x >= 0.0 ? 1.0 : -1.0);
}

struct FrequencyGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
};

struct GridFunction {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<cplx> values;
};

// Symmetric 20-point Gauss-Legendre panels on [-X, 0] U [0, X]. Gauss nodes are
// interior, so x = 0 is never sampled and no panel straddles the sign jump.
inline FrequencyGrid make_frequency_grid(std::span<const TestFunction> functions, double refine = 0.5)
{
    std::vector<const TestFunction*> ptrs;
    std::vector<TestFunction> transformed;
    transformed.reserve(functions.size());
    double reach = 0.0;
    for (const auto& f : functions) {
        transformed.push_back(fourier(f));
        for (const auto& iv : numerical_support(transformed.back()))
            reach = std::max({reach, std::abs(iv.lo), std::abs(iv.hi)});
    }
    for (const auto& f : transformed) ptrs.push_back(&f);
    if (reach == 0.0) reach = 1.0;
    double width = refine * resolving_panel_width(ptrs);
    if (!std::isfinite(width)) width = reach;
    auto half = gauss_legendre_panels(make_panels({{0.0, reach}}, width));
    FrequencyGrid grid;
    for (std::size_t i = half.nodes.size(); i-- > 0;) {
        grid.nodes.push_back(-half.nodes[i]);
        grid.weights.push_back(half.weights[i]);
    }
    grid.nodes.insert(grid.nodes.end(), half.nodes.begin(), half.nodes.end());
    grid.weights.insert(grid.weights.end(), half.weights.begin(), half.weights.end());
    return grid;
}

inline void validate(const FrequencyGrid& g)
{
    const auto& x = g.nodes;
    if (x.size() != g.weights.size()) throw std::invalid_argument("FrequencyGrid: nodes/weights size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) throw std::invalid_argument("FrequencyGrid: node at 0");
        if (i > 0 && !(x[i] > x[i - 1])) throw std::invalid_argument("FrequencyGrid: nodes not increasing");
        if (x[i] != -x[x.size() - 1 - i]) throw std::invalid_argument("FrequencyGrid: nodes not symmetric");
        if (!(g.weights[i] > 0.0)) throw std::invalid_argument("FrequencyGrid: non-positive weight");
    }
}

inline GridFunction to_grid(const TestFunction& f, const FrequencyGrid& grid)
{
    validate(grid);
    const TestFunction ff = fourier(f);
    GridFunction u{grid.nodes, grid.weights, std::vector<cplx>(grid.nodes.size())};
    for (std::size_t i = 0; i < u.nodes.size(); ++i) u.values[i] = evaluate(ff, u.nodes[i]);
    return u;
}

inline GridFunction metric_apply(int n, GridFunction u)
{
    for (std::size_t i = 0; i < u.nodes.size(); ++i) {
        if (u.nodes[i] == 0.0) throw std::invalid_argument("metric_apply: grid contains x = 0");
        u.values[i] *= metric_symbol(n, u.nodes[i]);
    }
    return u;
}

// eta_+ (sign = +1) or eta_- (sign = -1): (I +- eta)/2
inline GridFunction metric_projector(int n, const GridFunction& u, int sign)
{
    GridFunction eta_u = metric_apply(n, u);
    GridFunction out = u;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        out.values[i] = 0.5 * (u.values[i] + static_cast<double>(sign) * eta_u.values[i]);
    return out;
}

// sum_j w_j |x_j|^n conj(u_j) v_j
inline cplx grid_inner(int n, const GridFunction& u, const GridFunction& v)
{
    if (u.nodes != v.nodes) throw std::invalid_argument("grid_inner: grids differ");
    cplx sum{};
    for (std::size_t i = 0; i < u.nodes.size(); ++i)
        sum += u.weights[i] * abs_pow(u.nodes[i], n) * std::conj(u.values[i]) * v.values[i];
    return sum;
}

} // namespace multinoise
