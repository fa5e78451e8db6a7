// study.hpp: study configuration and the four batch commands
//
// Commands are pure: they return the exit code and the artifacts to write,
// and the caller does the file system work. ConfigError, SupportConditionFailed
// and OracleMismatch are thrown before any artifact exists; invariant and rate
// failures return their report together with a nonzero code.

#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "multinoise/asymptotics.hpp"
#include "multinoise/errors.hpp"
#include "multinoise/format.hpp"
#include "multinoise/json_io.hpp"
#include "multinoise/rep_check.hpp"
#include "multinoise/wcl_gamma.hpp"

namespace multinoise {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int support = 3;
inline constexpr int oracle = 4;
inline constexpr int invariant = 5;
inline constexpr int rate = 6;
} // namespace exit_code

inline constexpr int max_gamma_order = 6;

struct WordSpec {
    std::vector<Sign> signs;
    std::vector<std::size_t> smears;  // indices into StudyConfig::smears
};

struct StudyConfig {
    Dispersion dispersion;
    TestFunction form_factor;
    std::vector<int> orders;
    std::vector<double> lambda_grid;

    std::size_t basis_size = 6;
    int particle_cap = 4;
    int sector_max = 3;

    double quad_abs = 1e-14;
    double quad_rel = 1e-13;
    double assert_rel = 1e-6;
    double support_epsilon = 1e-10;

    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string format = "csv";

    std::vector<TestFunction> smears;
    std::vector<int> kernel_truncations{0, 1};
    std::vector<std::pair<std::size_t, std::size_t>> kernel_pairs{{0, 1}};
    std::vector<int> corr_truncations{0};
    std::vector<WordSpec> words;

    int rep_draws = 50;
    std::vector<double> rep_gammas;  // empty: gamma_osc of the configured channel
    bool transpose_pairing = false;

    QuadratureOptions quadrature() const { return {quad_abs, quad_rel, QuadratureOptions{}.max_depth}; }

    GammaOptions gamma_options() const
    {
        GammaOptions g;
        g.quad = quadrature();
        return g;
    }

    ReservoirChannel channel() const { return {dispersion, form_factor, 1.0}; }
};

// --- parsing ------------------------------------------------------------------------

namespace detail {

inline std::vector<double> number_list(const json& j, const std::string& where)
{
    if (!j.is_array()) throw ConfigError(where + ": expected a list");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<int> int_list(const json& j, const std::string& where)
{
    if (!j.is_array()) throw ConfigError(where + ": expected a list");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline double positive(const json& j, const char* key, double fallback, const std::string& where)
{
    double v = number_or(j, key, fallback, where);
    if (!(v > 0.0)) throw ConfigError(where + "." + key + " must be positive");
    return v;
}

inline std::vector<Sign> parse_signs(const json& j, const std::string& where)
{
    if (!j.is_string()) throw ConfigError(where + ": expected a string of '-' and '+'");
    std::vector<Sign> out;
    for (char c : j.get<std::string>()) {
        if (c != '-' && c != '+') throw ConfigError(where + ": unexpected character '" + std::string(1, c) + "'");
        out.push_back(sign_from_char(c));
    }
    return out;
}

inline std::size_t smear_index(const json& j, std::size_t count, const std::string& where)
{
    int i = integer(j, where);
    if (i < 0 || static_cast<std::size_t>(i) >= count) throw ConfigError(where + ": no smear with index " + std::to_string(i));
    return static_cast<std::size_t>(i);
}

inline std::vector<int> truncation_list(const json& j, const std::string& where)
{
    auto out = int_list(j, where);
    if (out.empty()) throw ConfigError(where + ": empty");
    for (int n : out)
        if (n < 0 || n >= max_gamma_order) throw ConfigError(where + ": truncation order out of range");
    return out;
}

} // namespace detail

inline StudyConfig parse_config(const json& j)
{
    using namespace detail;
    expect_keys(j, "config", {"dispersion", "form_factor", "orders", "lambda_grid", "truncation", "tolerances", "seed",
                              "output", "smears", "kernel", "correlation", "rep_check"});
    StudyConfig c;
    if (!j.contains("dispersion")) throw ConfigError("config: missing 'dispersion'");
    if (!j.contains("form_factor")) throw ConfigError("config: missing 'form_factor'");
    c.dispersion = dispersion_from_json(j.at("dispersion"), "dispersion");
    c.form_factor = test_function_from_json(j.at("form_factor"), "form_factor");

    if (j.contains("orders")) c.orders = int_list(j.at("orders"), "orders");
    for (int n : c.orders)
        if (n < 0 || n > max_gamma_order) throw ConfigError("orders: " + std::to_string(n) + " outside 0.." + std::to_string(max_gamma_order));
    if (std::set<int>(c.orders.begin(), c.orders.end()).size() != c.orders.size()) throw ConfigError("orders: duplicates");

    if (!j.contains("lambda_grid")) throw ConfigError("config: missing 'lambda_grid'");
    c.lambda_grid = number_list(j.at("lambda_grid"), "lambda_grid");
    if (c.lambda_grid.empty()) throw ConfigError("lambda_grid: empty");
    for (std::size_t i = 0; i < c.lambda_grid.size(); ++i) {
        if (!(c.lambda_grid[i] > 0.0)) throw ConfigError("lambda_grid: values must be positive");
        if (i > 0 && !(c.lambda_grid[i] < c.lambda_grid[i - 1])) throw ConfigError("lambda_grid: must be strictly decreasing");
    }

    if (j.contains("truncation")) {
        const json& t = j.at("truncation");
        expect_keys(t, "truncation", {"basis_size", "particle_cap", "sector_max"});
        if (t.contains("basis_size")) {
            int m = integer(t.at("basis_size"), "truncation.basis_size");
            if (m < 2 || m > 12) throw ConfigError("truncation.basis_size must be in 2..12");
            c.basis_size = static_cast<std::size_t>(m);
        }
        if (t.contains("particle_cap")) c.particle_cap = integer(t.at("particle_cap"), "truncation.particle_cap");
        if (c.particle_cap < 2 || c.particle_cap > 8) throw ConfigError("truncation.particle_cap must be in 2..8");
        if (t.contains("sector_max")) c.sector_max = integer(t.at("sector_max"), "truncation.sector_max");
        if (c.sector_max < 0 || c.sector_max > max_gamma_order) throw ConfigError("truncation.sector_max out of range");
    }

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        expect_keys(t, "tolerances", {"quad_abs", "quad_rel", "assert_rel", "support_epsilon"});
        c.quad_abs = positive(t, "quad_abs", c.quad_abs, "tolerances");
        c.quad_rel = positive(t, "quad_rel", c.quad_rel, "tolerances");
        c.assert_rel = positive(t, "assert_rel", c.assert_rel, "tolerances");
        c.support_epsilon = positive(t, "support_epsilon", c.support_epsilon, "tolerances");
    }

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        expect_keys(o, "output", {"directory", "format"});
        if (o.contains("directory")) {
            if (!o.at("directory").is_string() || o.at("directory").get<std::string>().empty())
                throw ConfigError("output.directory: expected a nonempty string");
            c.out_dir = o.at("directory").get<std::string>();
        }
        if (o.contains("format")) {
            if (!o.at("format").is_string()) throw ConfigError("output.format: expected a string");
            c.format = o.at("format").get<std::string>();
        }
    }
    if (c.format != "csv" && c.format != "json") throw ConfigError("output.format must be csv or json");

    if (j.contains("smears")) {
        const json& s = j.at("smears");
        if (!s.is_array()) throw ConfigError("smears: expected a list of functions");
        for (std::size_t i = 0; i < s.size(); ++i) c.smears.push_back(test_function_from_json(s[i], "smears[" + std::to_string(i) + "]"));
    }

    if (j.contains("kernel")) {
        const json& k = j.at("kernel");
        expect_keys(k, "kernel", {"truncations", "pairs"});
        if (k.contains("truncations")) c.kernel_truncations = truncation_list(k.at("truncations"), "kernel.truncations");
        if (k.contains("pairs")) {
            const json& p = k.at("pairs");
            if (!p.is_array() || p.empty()) throw ConfigError("kernel.pairs: expected a nonempty list");
            c.kernel_pairs.clear();
            for (std::size_t i = 0; i < p.size(); ++i) {
                std::string where = "kernel.pairs[" + std::to_string(i) + "]";
                if (!p[i].is_array() || p[i].size() != 2) throw ConfigError(where + ": expected [minus, plus]");
                c.kernel_pairs.emplace_back(smear_index(p[i][0], c.smears.size(), where),
                                            smear_index(p[i][1], c.smears.size(), where));
            }
        }
    }

    if (j.contains("correlation")) {
        const json& k = j.at("correlation");
        expect_keys(k, "correlation", {"truncations", "words"});
        if (k.contains("truncations")) c.corr_truncations = truncation_list(k.at("truncations"), "correlation.truncations");
        if (k.contains("words")) {
            const json& w = k.at("words");
            if (!w.is_array()) throw ConfigError("correlation.words: expected a list");
            for (std::size_t i = 0; i < w.size(); ++i) {
                std::string where = "correlation.words[" + std::to_string(i) + "]";
                expect_keys(w[i], where, {"signs", "smears"});
                if (!w[i].contains("signs") || !w[i].contains("smears")) throw ConfigError(where + ": needs signs and smears");
                WordSpec spec;
                spec.signs = parse_signs(w[i].at("signs"), where + ".signs");
                const json& idx = w[i].at("smears");
                if (!idx.is_array()) throw ConfigError(where + ".smears: expected a list");
                for (std::size_t m = 0; m < idx.size(); ++m)
                    spec.smears.push_back(smear_index(idx[m], c.smears.size(), where + ".smears"));
                std::vector<TestFunction> fs;
                for (std::size_t m : spec.smears) fs.push_back(c.smears[m]);
                try {
                    check_correlation_word(spec.signs, fs);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(where + ": " + e.what());
                }
                c.words.push_back(std::move(spec));
            }
        }
    }

    if (j.contains("rep_check")) {
        const json& r = j.at("rep_check");
        expect_keys(r, "rep_check", {"draws", "gammas", "fault_injection"});
        if (r.contains("draws")) c.rep_draws = integer(r.at("draws"), "rep_check.draws");
        if (c.rep_draws < 1) throw ConfigError("rep_check.draws must be positive");
        if (r.contains("gammas")) {
            c.rep_gammas = number_list(r.at("gammas"), "rep_check.gammas");
            for (double g : c.rep_gammas)
                if (g == 0.0) throw ConfigError("rep_check.gammas: zero gamma");
        }
        if (r.contains("fault_injection")) {
            const json& f = r.at("fault_injection");
            if (!f.is_string()) throw ConfigError("rep_check.fault_injection: expected a string");
            std::string mode = f.get<std::string>();
            if (mode == "transpose_pairing")
                c.transpose_pairing = true;
            else if (mode != "none")
                throw ConfigError("rep_check.fault_injection: unknown mode '" + mode + "'");
        }
    }
    return c;
}

inline StudyConfig parse_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

// --- commands -------------------------------------------------------------------------

struct Artifact {
    std::string name;
    std::string content;
};

struct CommandOutcome {
    int exit_code = exit_code::ok;
    std::vector<Artifact> artifacts;
    std::string summary;
};

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline SupportReport require_support(const StudyConfig& c, bool force)
{
    auto report = check_support(c.dispersion, c.form_factor, c.support_epsilon);
    if (!report.passed && !force) {
        std::string at;
        for (double s : report.stationary_inside) at += (at.empty() ? "" : ", ") + format_double(s);
        throw SupportConditionFailed("stationary point(s) of omega inside the support of g: " + at);
    }
    return report;
}

inline json to_json(const SupportReport& r)
{
    json support = json::array();
    for (const auto& iv : r.support) support.push_back(json::array({iv.lo, iv.hi}));
    return {{"epsilon", r.epsilon}, {"support", support}, {"stationary_inside", r.stationary_inside}, {"passed", r.passed}};
}

inline CommandOutcome cmd_gamma(const StudyConfig& c, bool force = false)
{
    if (c.orders.empty()) throw ConfigError("orders: empty");
    auto support = require_support(c, force);
    GammaTable table = gamma_table(c.dispersion, c.form_factor, c.orders, c.gamma_options());

    CommandOutcome out;
    std::string worst;
    for (const auto& r : table.rows) {
        if (r.n == 0 && r.gamma_osc < -1e-12) {
            out.exit_code = exit_code::invariant;
            worst = "gamma_0 = " + format_double(r.gamma_osc) + " is negative";
        }
        if (!(r.rel_diff <= c.assert_rel) && out.exit_code == exit_code::ok) {
            out.exit_code = exit_code::oracle;
            worst = "order " + std::to_string(r.n) + ": rel_diff " + format_double(r.rel_diff) + " exceeds " +
                    format_double(c.assert_rel);
        }
    }
    if (c.format == "csv") {
        out.artifacts.push_back({"gamma.csv", to_csv(table)});
    } else {
        json rows = json::array();
        for (const auto& r : table.rows)
            rows.push_back({{"n", r.n}, {"gamma_osc", r.gamma_osc}, {"gamma_shell", r.gamma_shell}, {"rel_diff", r.rel_diff}});
        out.artifacts.push_back({"gamma.json", dump({{"dispersion", to_json(c.dispersion)},
                                                     {"support", to_json(support)},
                                                     {"tolerance", c.assert_rel},
                                                     {"rows", rows}})});
    }
    out.summary = worst.empty() ? "gamma: " + std::to_string(table.rows.size()) + " orders, oracle agreement within " +
                                      format_double(c.assert_rel)
                                : "gamma: " + worst;
    return out;
}

inline std::vector<double> rep_check_gammas(const StudyConfig& c)
{
    if (!c.rep_gammas.empty()) {
        if (static_cast<int>(c.rep_gammas.size()) <= c.sector_max)
            throw ConfigError("rep_check.gammas: need one value per sector order 0.." + std::to_string(c.sector_max));
        return c.rep_gammas;
    }
    std::vector<int> orders;
    for (int n = 0; n <= c.sector_max; ++n) orders.push_back(n);
    std::vector<double> out;
    for (const auto& g : gamma_osc(c.dispersion, c.form_factor, orders, c.gamma_options())) out.push_back(g.value);
    return out;
}

inline CommandOutcome cmd_rep_check(const StudyConfig& c)
{
    RepCheckOptions opt;
    opt.sector_max = c.sector_max;
    opt.basis_size = c.basis_size;
    opt.particle_cap = c.particle_cap;
    opt.draws = c.rep_draws;
    opt.seed = c.seed;
    opt.gammas = rep_check_gammas(c);
    opt.transpose_pairing = c.transpose_pairing;
    RepCheckReport report = rep_check(opt);

    CommandOutcome out;
    out.exit_code = report.passed() ? exit_code::ok : exit_code::invariant;
    if (c.format == "csv") {
        std::string csv = "check,max_residual,tolerance,passed\n";
        for (const auto& r : report.checks)
            csv += r.name + "," + format_double(r.max_residual) + "," + format_double(r.tolerance) + "," +
                   (r.passed ? "true" : "false") + "\n";
        out.artifacts.push_back({"rep_check.csv", csv});
    } else {
        json checks = json::array();
        for (const auto& r : report.checks)
            checks.push_back({{"name", r.name}, {"max_residual", r.max_residual}, {"tolerance", r.tolerance}, {"passed", r.passed}});
        out.artifacts.push_back({"rep_check.json", dump({{"seed", c.seed},
                                                         {"basis_size", c.basis_size},
                                                         {"particle_cap", c.particle_cap},
                                                         {"sector_max", c.sector_max},
                                                         {"draws", c.rep_draws},
                                                         {"gammas", opt.gammas},
                                                         {"fault_injection", c.transpose_pairing ? "transpose_pairing" : "none"},
                                                         {"passed", report.passed()},
                                                         {"checks", checks}})});
    }
    std::string failed;
    for (const auto& r : report.checks)
        if (!r.passed) failed += (failed.empty() ? "" : ", ") + r.name;
    out.summary = failed.empty() ? "rep-check: all " + std::to_string(report.checks.size()) + " checks passed"
                                 : "rep-check: failed " + failed;
    return out;
}

// gamma_0..gamma_n_max, cross-checked against the energy-shell oracle.
inline std::vector<double> verified_gammas(const StudyConfig& c, int n_max)
{
    std::vector<int> orders;
    for (int n = 0; n <= n_max; ++n) orders.push_back(n);
    GammaTable t = gamma_table(c.dispersion, c.form_factor, orders, c.gamma_options());
    std::vector<double> out;
    for (const auto& r : t.rows) {
        if (!(r.rel_diff <= c.assert_rel))
            throw OracleMismatch("gamma_" + std::to_string(r.n) + ": oscillatory " + format_double(r.gamma_osc) +
                                 " vs shell " + format_double(r.gamma_shell));
        out.push_back(r.gamma_osc);
    }
    return out;
}

inline std::string expansion_table(std::span<const ExpansionPoint> points, const std::string& format)
{
    if (format == "csv") return to_csv(points);
    json rows = json::array();
    for (const auto& p : points)
        rows.push_back({{"lambda", p.lambda},
                        {"N", p.order},
                        {"lhs", complex_to_json(p.lhs)},
                        {"rhs", complex_to_json(p.rhs)},
                        {"abs_error", p.abs_error}});
    return dump(rows);
}

namespace detail {

inline void check_rate_grid(const StudyConfig& c)
{
    if (c.lambda_grid.size() < 3) throw ConfigError("lambda_grid: a rate fit needs at least 3 values");
}

inline void add_study(CommandOutcome& out, const std::string& stem, const RateStudy& s, json extra,
                      const std::string& format)
{
    out.artifacts.push_back({stem + "." + format, expansion_table(s.primary.points, format)});
    json j = to_json(s);
    for (auto& [k, v] : extra.items()) j[k] = v;
    out.artifacts.push_back({stem + "_rate.json", dump(j)});
    if (!passed(s)) out.exit_code = exit_code::rate;
}

} // namespace detail

inline CommandOutcome cmd_kernel_check(const StudyConfig& c, bool force = false)
{
    detail::check_rate_grid(c);
    for (auto [a, b] : c.kernel_pairs)
        if (a >= c.smears.size() || b >= c.smears.size())
            throw ConfigError("kernel.pairs: smear index out of range (" + std::to_string(c.smears.size()) + " smears)");
    require_support(c, force);
    int n_max = *std::max_element(c.kernel_truncations.begin(), c.kernel_truncations.end());
    auto gammas = verified_gammas(c, n_max);

    CommandOutcome out;
    std::size_t studies = 0, failed = 0;
    for (int N : c.kernel_truncations)
        for (std::size_t p = 0; p < c.kernel_pairs.size(); ++p) {
            auto [a, b] = c.kernel_pairs[p];
            auto s = kernel_study(N, c.lambda_grid, c.smears[a], c.smears[b], c.channel(), gammas, c.quadrature());
            ++studies;
            failed += !passed(s);
            detail::add_study(out, "kernel_N" + std::to_string(N) + "_pair" + std::to_string(p), s,
                              {{"pair", json::array({a, b})}, {"gammas", std::vector<double>(gammas.begin(), gammas.begin() + N + 1)}},
                              c.format);
        }
    out.summary = "kernel-check: " + std::to_string(studies - failed) + "/" + std::to_string(studies) + " studies meet the rate";
    return out;
}

inline CommandOutcome cmd_corr_check(const StudyConfig& c, bool force = false)
{
    detail::check_rate_grid(c);
    if (c.words.empty()) throw ConfigError("correlation.words: corr-check needs at least one word");
    require_support(c, force);
    int n_max = *std::max_element(c.corr_truncations.begin(), c.corr_truncations.end());
    auto gammas = verified_gammas(c, n_max);

    CommandOutcome out;
    std::size_t studies = 0, failed = 0;
    for (int N : c.corr_truncations)
        for (std::size_t w = 0; w < c.words.size(); ++w) {
            const auto& spec = c.words[w];
            std::vector<TestFunction> fs;
            for (std::size_t m : spec.smears) fs.push_back(c.smears[m]);
            auto s = correlation_study(N, c.lambda_grid, spec.signs, fs, c.channel(), gammas, c.quadrature());
            ++studies;
            failed += !passed(s);
            std::string signs;
            for (Sign x : spec.signs) signs += to_char(x);
            detail::add_study(out, "corr_N" + std::to_string(N) + "_word" + std::to_string(w), s,
                              {{"signs", signs}, {"smears", spec.smears}}, c.format);
        }
    out.summary = "corr-check: " + std::to_string(studies - failed) + "/" + std::to_string(studies) + " studies meet the rate";
    return out;
}

} // namespace multinoise
