// wick.hpp: vacuum correlations as sums over admissible pair partitions
//
// A pair (j,k), j<k, is admissible when letter j annihilates and letter k
// creates. Multipole pairs carry lambda^{2n} i^n gamma_n \int conj(f^{(n)}) h;
// reservoir pairs the smeared two-point function
//
//   \iint conj(f(t)) h(tau) lambda^{-2} I((tau - t)/lambda^2) dt dtau
//     = 2 pi \int du rho(lambda^2 u) conj(f_F(u)) h_F(u),
//
// the second form obtained from u = omega(k)/lambda^2 on each monotone branch.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "multinoise/dispersion.hpp"
#include "multinoise/errors.hpp"
#include "multinoise/parallel.hpp"
#include "multinoise/quadrature.hpp"
#include "multinoise/schwartz.hpp"
#include "multinoise/sign.hpp"
#include "multinoise/wcl_gamma.hpp"

namespace multinoise {

inline constexpr std::size_t max_word_length = 12;

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // 0-based, first < second, sorted by first

    friend bool operator==(const Matching&, const Matching&) = default;
};

namespace detail {

inline void extend_matchings(std::span<const Sign> signs, std::vector<char>& used, Matching& current,
                             std::vector<Matching>& out)
{
    int first = -1;
    for (std::size_t i = 0; i < signs.size(); ++i)
        if (!used[i]) {
            first = static_cast<int>(i);
            break;
        }
    if (first < 0) {
        out.push_back(current);
        return;
    }
    if (signs[static_cast<std::size_t>(first)] != Sign::minus) return;
    used[static_cast<std::size_t>(first)] = 1;
    for (std::size_t k = static_cast<std::size_t>(first) + 1; k < signs.size(); ++k) {
        if (used[k] || signs[k] != Sign::plus) continue;
        used[k] = 1;
        current.pairs.emplace_back(first, static_cast<int>(k));
        extend_matchings(signs, used, current, out);
        current.pairs.pop_back();
        used[k] = 0;
    }
    used[static_cast<std::size_t>(first)] = 0;
}

} // namespace detail

inline std::vector<Matching> enumerate_matchings(std::span<const Sign> signs)
{
    if (signs.size() > max_word_length)
        throw std::invalid_argument("word length " + std::to_string(signs.size()) + " exceeds " +
                                    std::to_string(max_word_length));
    std::vector<Matching> out;
    if (signs.size() % 2 != 0) return out;
    std::vector<char> used(signs.size(), 0);
    Matching current;
    detail::extend_matchings(signs, used, current, out);
    return out;
}

// Sum over admissible matchings of the product of pair(j, k). Each distinct
// pair is evaluated once; products and the sum run in enumeration order.
template <class PairFn>
cplx wick_sum(std::span<const Sign> signs, PairFn&& pair)
{
    auto matchings = enumerate_matchings(signs);
    if (matchings.empty()) return {};
    const std::size_t m = signs.size();
    std::vector<std::pair<int, int>> needed;
    std::vector<int> slot(m * m, -1);
    for (const auto& mt : matchings)
        for (auto [j, k] : mt.pairs) {
            auto idx = static_cast<std::size_t>(j) * m + static_cast<std::size_t>(k);
            if (slot[idx] < 0) {
                slot[idx] = static_cast<int>(needed.size());
                needed.emplace_back(j, k);
            }
        }
    auto values = parallel_map(needed.size(), [&](std::size_t i) { return cplx(pair(needed[i].first, needed[i].second)); });
    cplx sum{};
    for (const auto& mt : matchings) {
        cplx prod{1.0, 0.0};
        for (auto [j, k] : mt.pairs) prod *= values[static_cast<std::size_t>(slot[static_cast<std::size_t>(j) * m + static_cast<std::size_t>(k)])];
        sum += prod;
    }
    return sum;
}

// --- pair values ---------------------------------------------------------------

inline cplx noise_pair(int n, double gamma, double lambda, const TestFunction& f_minus, const TestFunction& f_plus)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("noise_pair: lambda must be positive");
    return std::pow(lambda, 2 * n) * indefinite_inner(n, gamma, f_minus, f_plus);
}

struct ReservoirChannel {
    Dispersion dispersion;
    TestFunction form_factor;
    double lambda = 1.0;
};

inline void validate(const ReservoirChannel& ch)
{
    validate(ch.dispersion);
    if (!(ch.lambda > 0.0)) throw std::invalid_argument("reservoir channel: lambda must be positive");
    if (ch.form_factor.is_zero()) throw std::invalid_argument("reservoir channel: zero form factor");
}

// Energy window outside which rho vanishes to working precision.
inline Interval shell_energy_range(const Dispersion& d, const TestFunction& g)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& iv : momentum_support(d, g)) {
        for (double k : {iv.lo, iv.hi}) {
            lo = std::min(lo, d(k));
            hi = std::max(hi, d(k));
        }
        for (double s : d.stationary_points())
            if (iv.contains(s)) lo = std::min(lo, d(s));
    }
    return {lo, hi};
}

inline cplx reservoir_pair(const ReservoirChannel& ch, const TestFunction& f_minus, const TestFunction& f_plus,
                           const QuadratureOptions& opt = {})
{
    validate(ch);
    if (f_minus.is_zero() || f_plus.is_zero()) return {};
    const double l2 = ch.lambda * ch.lambda;
    const TestFunction fm = fourier(f_minus);
    const TestFunction fp = fourier(f_plus);

    // u-window: where both spectra live and rho(lambda^2 u) can be nonzero
    auto sm = numerical_support(fm);
    auto sp = numerical_support(fp);
    Interval shell = shell_energy_range(ch.dispersion, ch.form_factor);
    std::vector<Interval> window;
    for (const auto& a : sm)
        for (const auto& b : sp) {
            Interval iv{std::max({a.lo, b.lo, shell.lo / l2}), std::min({a.hi, b.hi, shell.hi / l2})};
            if (iv.hi > iv.lo) window.push_back(iv);
        }
    window = merge_intervals(std::move(window));
    if (window.empty()) return {};

    std::vector<double> breaks;
    for (double s : ch.dispersion.stationary_points()) breaks.push_back(ch.dispersion(s) / l2);
    const TestFunction* fs[] = {&fm, &fp};
    double width = resolving_panel_width(fs);
    double e_scale = std::numeric_limits<double>::infinity();
    for (const auto& t : ch.form_factor.terms())
        e_scale = std::min(e_scale, t.atom.width * std::max(std::abs(ch.dispersion.gradient(t.atom.center)), t.atom.width));
    width = std::min(width, e_scale / l2);

    const bool diagonal = f_minus == f_plus;
    auto integrand = [&](double u) {
        double rho = shell_density(ch.dispersion, ch.form_factor, l2 * u);
        if (rho == 0.0) return cplx{};
        cplx a = evaluate(fm, u);
        return diagonal ? cplx(rho * std::norm(a)) : rho * std::conj(a) * evaluate(fp, u);
    };
    return 2.0 * std::numbers::pi * integrate_panels(integrand, make_panels(window, width, breaks), opt).value;
}

// --- words -----------------------------------------------------------------------

struct Letter {
    enum class Channel { noise, reservoir };

    Sign sign = Sign::plus;
    Channel channel = Channel::noise;
    int order = 0;  // multipole order, noise letters only
    TestFunction smear;

    static Letter noise(Sign s, int n, TestFunction f) { return {s, Channel::noise, n, std::move(f)}; }
    static Letter reservoir(Sign s, TestFunction f) { return {s, Channel::reservoir, 0, std::move(f)}; }
};

struct NoiseParams {
    std::vector<double> gammas;  // indexed by order
    double lambda = 1.0;

    double gamma(int n) const
    {
        if (n < 0 || static_cast<std::size_t>(n) >= gammas.size())
            throw std::out_of_range("no gamma for order " + std::to_string(n));
        return gammas[static_cast<std::size_t>(n)];
    }
};

inline std::vector<Sign> signs_of(std::span<const Letter> word)
{
    std::vector<Sign> s;
    for (const auto& l : word) s.push_back(l.sign);
    return s;
}

inline void check_word(std::span<const Letter> word, Letter::Channel channel)
{
    for (const auto& l : word) {
        if (l.channel != channel) throw std::invalid_argument("correlation: mixed noise and reservoir letters");
        if (l.smear.is_zero()) throw std::invalid_argument("correlation: zero smearing function");
    }
}

inline cplx correlation(std::span<const Letter> word, const NoiseParams& params)
{
    check_word(word, Letter::Channel::noise);
    auto signs = signs_of(word);
    return wick_sum(signs, [&](int j, int k) -> cplx {
        const Letter& a = word[static_cast<std::size_t>(j)];
        const Letter& b = word[static_cast<std::size_t>(k)];
        if (a.order != b.order) return {};
        return noise_pair(a.order, params.gamma(a.order), params.lambda, a.smear, b.smear);
    });
}

inline cplx correlation(std::span<const Letter> word, const ReservoirChannel& ch, const QuadratureOptions& opt = {})
{
    check_word(word, Letter::Channel::reservoir);
    auto signs = signs_of(word);
    return wick_sum(signs, [&](int j, int k) {
        return reservoir_pair(ch, word[static_cast<std::size_t>(j)].smear, word[static_cast<std::size_t>(k)].smear, opt);
    });
}

} // namespace multinoise
