// asymptotics.hpp: truncated multipole expansions against exact reservoir
// correlations, and log-log convergence rates over a lambda grid
//
// Grading: the order-n pair carries lambda^{2n}. Expanding rho(lambda^2 u) in
// reservoir_pair term by term gives exactly the noise pairs, so the remainder
// after order N is O(lambda^{2N+2}). The alternative grading lambda^n is
// evaluated on the same grid and fitted for comparison only.

#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "multinoise/errors.hpp"
#include "multinoise/format.hpp"
#include "multinoise/parallel.hpp"
#include "multinoise/schwartz.hpp"
#include "multinoise/sign.hpp"
#include "multinoise/wick.hpp"

namespace multinoise {

enum class Grading { quadratic, linear };  // lambda^{2n} or lambda^n per order-n pair

inline std::string to_string(Grading g) { return g == Grading::quadratic ? "lambda^2n" : "lambda^n"; }

inline double grading_power(Grading g, int n) { return g == Grading::quadratic ? 2.0 * n : 1.0 * n; }

// Below this an error is indistinguishable from quadrature noise.
inline constexpr double error_floor = 1e-13;

struct ExpansionPoint {
    double lambda = 0.0;
    int order = 0;
    cplx lhs;
    cplx rhs;
    double abs_error = 0.0;
};

inline ExpansionPoint make_point(double lambda, int order, cplx lhs, cplx rhs)
{
    return {lambda, order, lhs, rhs, std::abs(lhs - rhs)};
}

inline cplx truncated_pair(int N, double lambda, const TestFunction& f_minus, const TestFunction& f_plus,
                           std::span<const double> gammas, Grading grading = Grading::quadratic)
{
    if (N < 0) throw std::invalid_argument("truncated_pair: negative order");
    if (static_cast<std::size_t>(N) >= gammas.size())
        throw std::invalid_argument("truncated_pair: no gamma for order " + std::to_string(N));
    if (!(lambda > 0.0)) throw std::invalid_argument("truncated_pair: lambda must be positive");
    cplx sum{};
    for (int n = 0; n <= N; ++n) {
        double g = gammas[static_cast<std::size_t>(n)];
        if (g == 0.0) continue;
        sum += std::pow(lambda, grading_power(grading, n)) * indefinite_inner(n, g, f_minus, f_plus);
    }
    return sum;
}

inline ReservoirChannel at_lambda(ReservoirChannel ch, double lambda)
{
    ch.lambda = lambda;
    return ch;
}

inline ExpansionPoint kernel_point(int N, double lambda, const TestFunction& f_minus, const TestFunction& f_plus,
                                   const ReservoirChannel& ch, std::span<const double> gammas,
                                   Grading grading = Grading::quadratic, const QuadratureOptions& opt = {})
{
    cplx lhs = reservoir_pair(at_lambda(ch, lambda), f_minus, f_plus, opt);
    cplx rhs = truncated_pair(N, lambda, f_minus, f_plus, gammas, grading);
    return make_point(lambda, N, lhs, rhs);
}

inline double kernel_error(int N, double lambda, const TestFunction& f_minus, const TestFunction& f_plus,
                           const ReservoirChannel& ch, std::span<const double> gammas, const QuadratureOptions& opt = {})
{
    return kernel_point(N, lambda, f_minus, f_plus, ch, gammas, Grading::quadratic, opt).abs_error;
}

inline void check_correlation_word(std::span<const Sign> signs, std::span<const TestFunction> smears)
{
    if (signs.size() != smears.size()) throw std::invalid_argument("correlation word: signs and smears differ in length");
    if (signs.empty() || signs.size() % 2 != 0 || signs.size() > 8)
        throw std::invalid_argument("correlation word: length must be even and at most 8");
    std::size_t minus = 0;
    for (Sign s : signs) minus += s == Sign::minus;
    if (2 * minus != signs.size()) throw std::invalid_argument("correlation word: unbalanced signs");
    for (const auto& f : smears)
        if (f.is_zero()) throw std::invalid_argument("correlation word: zero smearing function");
}

// Noise side: per-letter orders 0..N with only equal orders pairing, which
// factorizes into one truncated sum per contracted pair.
inline cplx truncated_correlation(std::span<const Sign> signs, std::span<const TestFunction> smears, int N,
                                  double lambda, std::span<const double> gammas, Grading grading = Grading::quadratic)
{
    check_correlation_word(signs, smears);
    return wick_sum(signs, [&](int j, int k) {
        return truncated_pair(N, lambda, smears[static_cast<std::size_t>(j)], smears[static_cast<std::size_t>(k)],
                              gammas, grading);
    });
}

inline cplx reservoir_correlation(std::span<const Sign> signs, std::span<const TestFunction> smears,
                                  const ReservoirChannel& ch, const QuadratureOptions& opt = {})
{
    check_correlation_word(signs, smears);
    std::vector<Letter> word;
    for (std::size_t i = 0; i < signs.size(); ++i) word.push_back(Letter::reservoir(signs[i], smears[i]));
    return correlation(word, ch, opt);
}

inline ExpansionPoint correlation_point(std::span<const Sign> signs, std::span<const TestFunction> smears, int N,
                                        double lambda, const ReservoirChannel& ch, std::span<const double> gammas,
                                        Grading grading = Grading::quadratic, const QuadratureOptions& opt = {})
{
    cplx lhs = reservoir_correlation(signs, smears, at_lambda(ch, lambda), opt);
    cplx rhs = truncated_correlation(signs, smears, N, lambda, gammas, grading);
    return make_point(lambda, N, lhs, rhs);
}

inline double correlation_error(std::span<const Sign> signs, std::span<const TestFunction> smears, int N,
                                double lambda, const ReservoirChannel& ch, std::span<const double> gammas,
                                const QuadratureOptions& opt = {})
{
    return correlation_point(signs, smears, N, lambda, ch, gammas, Grading::quadratic, opt).abs_error;
}

// --- rates ----------------------------------------------------------------------

struct LineFit {
    double slope = 0.0;
    double r_squared = 0.0;  // 0 when log(error) has no spread
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - my - fit.slope * (x[i] - mx);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
    return fit;
}

struct RateReport {
    std::vector<ExpansionPoint> points;
    double fitted_slope = 0.0;
    double r_squared = 0.0;
    Grading grading = Grading::quadratic;
};

inline RateReport fit_rate(std::vector<ExpansionPoint> points, Grading grading = Grading::quadratic)
{
    if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].lambda > 0.0)) throw std::invalid_argument("fit_rate: lambda must be positive");
        if (points[i].order != points[0].order) throw std::invalid_argument("fit_rate: points of different order");
        if (i > 0 && !(points[i].lambda < points[i - 1].lambda))
            throw std::invalid_argument("fit_rate: lambdas must be strictly decreasing");
    }
    for (const auto& p : points)
        if (!(p.abs_error > error_floor))
            throw BelowFloor("error " + format_double(p.abs_error) + " at lambda " + format_double(p.lambda) +
                             " is below " + format_double(error_floor));
    std::vector<double> x, y;
    for (const auto& p : points) {
        x.push_back(std::log(p.lambda));
        y.push_back(std::log(p.abs_error));
    }
    LineFit fit = fit_line(x, y);
    return {std::move(points), fit.slope, fit.r_squared, grading};
}

// Expected remainder exponent for truncation order N.
inline double expected_slope(Grading g, int N) { return g == Grading::quadratic ? 2.0 * N + 2.0 : N + 1.0; }

inline constexpr double slope_margin = 0.5;
inline constexpr double min_r_squared = 0.98;

inline bool meets_rate(const RateReport& r, int N)
{
    return r.fitted_slope >= expected_slope(r.grading, N) - slope_margin && r.r_squared >= min_r_squared;
}

// --- studies -------------------------------------------------------------------

inline void check_lambda_grid(std::span<const double> lambdas)
{
    if (lambdas.size() < 3) throw std::invalid_argument("lambda grid: need at least 3 values");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) throw std::invalid_argument("lambda grid: values must be positive");
        if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw std::invalid_argument("lambda grid: must be strictly decreasing");
    }
}

struct RateStudy {
    int order = 0;
    RateReport primary;      // lambda^{2n}
    RateReport alternative;  // lambda^n, same reservoir values
    bool below_floor = false;
    std::string floor_message;
};

namespace detail {

inline RateStudy assemble_study(int N, const std::vector<cplx>& lhs, std::span<const double> lambdas,
                                const std::vector<cplx>& rhs_quadratic, const std::vector<cplx>& rhs_linear)
{
    RateStudy s;
    s.order = N;
    std::vector<ExpansionPoint> pq, pl;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        pq.push_back(make_point(lambdas[i], N, lhs[i], rhs_quadratic[i]));
        pl.push_back(make_point(lambdas[i], N, lhs[i], rhs_linear[i]));
    }
    try {
        s.primary = fit_rate(pq, Grading::quadratic);
    } catch (const BelowFloor& e) {
        s.below_floor = true;
        s.floor_message = e.what();
        s.primary.points = std::move(pq);
        s.primary.grading = Grading::quadratic;
    }
    try {
        s.alternative = fit_rate(pl, Grading::linear);
    } catch (const BelowFloor&) {
        s.alternative.points = std::move(pl);
        s.alternative.grading = Grading::linear;
    }
    return s;
}

} // namespace detail

inline bool passed(const RateStudy& s) { return s.below_floor || meets_rate(s.primary, s.order); }

inline RateStudy kernel_study(int N, std::span<const double> lambdas, const TestFunction& f_minus,
                              const TestFunction& f_plus, const ReservoirChannel& ch, std::span<const double> gammas,
                              const QuadratureOptions& opt = {})
{
    check_lambda_grid(lambdas);
    auto lhs = parallel_map(lambdas.size(),
                            [&](std::size_t i) { return reservoir_pair(at_lambda(ch, lambdas[i]), f_minus, f_plus, opt); });
    std::vector<cplx> rq, rl;
    for (double l : lambdas) {
        rq.push_back(truncated_pair(N, l, f_minus, f_plus, gammas, Grading::quadratic));
        rl.push_back(truncated_pair(N, l, f_minus, f_plus, gammas, Grading::linear));
    }
    return detail::assemble_study(N, lhs, lambdas, rq, rl);
}

inline RateStudy correlation_study(int N, std::span<const double> lambdas, std::span<const Sign> signs,
                                   std::span<const TestFunction> smears, const ReservoirChannel& ch,
                                   std::span<const double> gammas, const QuadratureOptions& opt = {})
{
    check_lambda_grid(lambdas);
    check_correlation_word(signs, smears);
    auto lhs = parallel_map(lambdas.size(), [&](std::size_t i) {
        return reservoir_correlation(signs, smears, at_lambda(ch, lambdas[i]), opt);
    });
    std::vector<cplx> rq, rl;
    for (double l : lambdas) {
        rq.push_back(truncated_correlation(signs, smears, N, l, gammas, Grading::quadratic));
        rl.push_back(truncated_correlation(signs, smears, N, l, gammas, Grading::linear));
    }
    return detail::assemble_study(N, lhs, lambdas, rq, rl);
}

// --- serialization -----------------------------------------------------------------

inline std::string expansion_csv_header() { return "lambda,N,lhs_re,lhs_im,rhs_re,rhs_im,abs_error\n"; }

inline std::string to_csv_row(const ExpansionPoint& p)
{
    return format_double(p.lambda) + "," + std::to_string(p.order) + "," + format_double(p.lhs.real()) + "," +
           format_double(p.lhs.imag()) + "," + format_double(p.rhs.real()) + "," + format_double(p.rhs.imag()) + "," +
           format_double(p.abs_error) + "\n";
}

inline std::string to_csv(std::span<const ExpansionPoint> points)
{
    std::string out = expansion_csv_header();
    for (const auto& p : points) out += to_csv_row(p);
    return out;
}

inline nlohmann::ordered_json to_json(const RateReport& r)
{
    return {{"slope", r.fitted_slope},
            {"r_squared", r.r_squared},
            {"n_points", r.points.size()},
            {"grading", to_string(r.grading)}};
}

inline nlohmann::ordered_json to_json(const RateStudy& s)
{
    nlohmann::ordered_json j = to_json(s.primary);
    j["N"] = s.order;
    j["expected_slope"] = expected_slope(Grading::quadratic, s.order);
    j["min_slope"] = expected_slope(Grading::quadratic, s.order) - slope_margin;
    j["min_r_squared"] = min_r_squared;
    j["below_floor"] = s.below_floor;
    j["passed"] = passed(s);
    nlohmann::ordered_json alt = to_json(s.alternative);
    alt["hypothesis_slope"] = expected_slope(Grading::linear, s.order);
    j["alternative"] = alt;
    return j;
}

} // namespace multinoise
