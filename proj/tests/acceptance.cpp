// acceptance.cpp: one pass/fail line per acceptance criterion
//
// Criteria 4-7 run on the shipped catalog configs; criterion 7 drives the
// multinoise executable twice per command and compares the artifacts byte
// for byte.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "multinoise/asymptotics.hpp"
#include "multinoise/pseudo_fock.hpp"
#include "multinoise/rep_check.hpp"
#include "multinoise/study.hpp"
#include "multinoise/wcl_gamma.hpp"

namespace fs = std::filesystem;
using namespace multinoise;

namespace {

struct Line {
    int criterion;
    bool passed;
    std::string detail;
};

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

StudyConfig load(const std::string& name)
{
    return parse_config_text(read_file(fs::path(MULTINOISE_CONFIG_DIR) / name));
}

const std::vector<std::string> catalogs{"catalog_linear.json", "catalog_quadratic.json"};

RepCheckOptions criterion_options()
{
    RepCheckOptions opt;
    opt.sector_max = 3;
    opt.basis_size = 6;
    opt.particle_cap = 4;
    opt.draws = 50;
    opt.seed = 20261019;
    opt.gammas = {1.3, -0.8, 2.1, 0.6};
    return opt;
}

Line criterion_1()
{
    auto opt = criterion_options();
    auto checks = check_commutators(rep_check_sectors(opt), opt);
    bool ok = true;
    std::string detail = "sectors 0..3, M=6, K=4, 50 draws:";
    for (const auto& c : checks) {
        ok = ok && c.passed && c.tolerance == 1e-10;
        detail += " " + c.name + " " + sci(c.max_residual);
    }
    return {1, ok, detail + " (tol 1e-10)"};
}

Line criterion_2()
{
    auto opt = criterion_options();
    auto c = check_adjointness(rep_check_sectors(opt), opt);
    return {2, c.passed && c.tolerance == 1e-10,
            "<c-(f)Phi,Psi> = <Phi,c+(f)Psi>, 50 draws x 4 sectors: max rel " + sci(c.max_residual) + " (tol 1e-10)"};
}

Line criterion_3()
{
    auto opt = criterion_options();
    auto checks = check_metric(rep_check_sectors(opt), opt);
    bool ok = true;
    std::string detail;
    for (const auto& c : checks) {
        ok = ok && c.passed;
        detail += c.name + " " + sci(c.max_residual) + "; ";
    }
    // the witness again, as a one-particle Fock vector
    auto f = hermite_function(0, 0.0, 1.0, -5.0);
    auto s = Sector::build(1, 1.0, {f}, 2);
    auto one = create(f, FockVector::vacuum(s));
    cplx norm = fock_inner(one, one);
    bool witness = std::abs(norm - cplx{-5.0, 0.0}) <= 1e-6;
    ok = ok && witness && checks[1].tolerance == 1e-8;
    return {3, ok, detail + "Fock <f,f> = " + sci(norm.real()) + (norm.imag() == 0.0 ? "" : "+" + sci(norm.imag()) + "i") +
                       " (want -5 +- 1e-6)"};
}

Line criterion_4()
{
    bool ok = true;
    std::string detail;
    for (const auto& name : catalogs) {
        auto c = load(name);
        std::vector<int> orders{0, 1, 2, 3};
        auto osc = gamma_osc(c.dispersion, c.form_factor, orders, c.gamma_options());
        double worst_diff = 0.0, worst_im = 0.0;
        for (std::size_t i = 0; i < orders.size(); ++i) {
            double shell = gamma_shell(c.dispersion, c.form_factor, orders[i], c.gamma_options());
            worst_diff = std::max(worst_diff, gamma_rel_diff(osc[i].value, shell));
            worst_im = std::max(worst_im, osc[i].imag_residue / (std::abs(osc[i].value) + 1e-14));
        }
        bool row_ok = worst_diff <= 1e-6 && worst_im <= 1e-8 && osc[0].value >= -1e-12;
        ok = ok && row_ok;
        detail += to_string(c.dispersion.kind) + ": rel_diff " + sci(worst_diff) + ", |Im| " + sci(worst_im) +
                  ", gamma_0 " + sci(osc[0].value) + "; ";
    }
    double g0 = gamma_osc(Dispersion::linear(1.0, 0.0), hermite_function(0), 0).value;
    double target = 2.0 * std::sqrt(std::numbers::pi);
    bool closed = std::abs(g0 - target) <= 1e-6 * target;
    return {4, ok && closed, detail + "omega=k, g=phi_0: gamma_0 " + format_double(g0) + " vs 2 sqrt(pi)"};
}

Line criterion_5()
{
    bool ok = true;
    std::string detail;
    for (const auto& name : catalogs) {
        auto c = load(name);
        auto gammas = verified_gammas(c, 1);
        for (int N : {0, 1}) {
            auto s = kernel_study(N, c.lambda_grid, c.smears[0], c.smears[1], c.channel(), gammas, c.quadrature());
            bool row = !s.below_floor && s.primary.fitted_slope >= 2.0 * N + 1.5 && s.primary.r_squared >= 0.98;
            ok = ok && row;
            detail += to_string(c.dispersion.kind) + " N=" + std::to_string(N) + " slope " + sci(s.primary.fitted_slope) +
                      " r2 " + sci(s.primary.r_squared) + " (lambda^n fit " + sci(s.alternative.fitted_slope) + "); ";
        }
    }
    return {5, ok, detail + "need slope >= 2N+1.5, r2 >= 0.98"};
}

Line criterion_6()
{
    bool ok = true;
    std::string detail;
    std::vector<Sign> signs{Sign::minus, Sign::minus, Sign::plus, Sign::plus};
    for (const auto& name : catalogs) {
        auto c = load(name);
        auto gammas = verified_gammas(c, 0);
        std::vector<TestFunction> smears{c.smears[0], c.smears[1], c.smears[0], c.smears[1]};
        auto s = correlation_study(0, c.lambda_grid, signs, smears, c.channel(), gammas, c.quadrature());
        bool row = !s.below_floor && s.primary.fitted_slope >= 1.5;
        ok = ok && row;
        detail += to_string(c.dispersion.kind) + " (--++) N=0 slope " + sci(s.primary.fitted_slope) + "; ";
    }
    auto opt = criterion_options();
    auto fw = check_fock_wick(opt);
    ok = ok && fw.passed && fw.tolerance == 1e-8;
    return {6, ok, detail + "Fock-Wick length <= 6: max rel " + sci(fw.max_residual) + " (tol 1e-8)"};
}

int run_cli(const std::string& args)
{
    std::string cmd = std::string("\"") + MULTINOISE_CLI + "\" " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Line criterion_7()
{
    fs::path root = fs::temp_directory_path() / ("multinoise_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    bool ok = true;
    int runs = 0, files = 0;
    std::string detail;
    for (const auto& name : catalogs) {
        fs::path config = fs::path(MULTINOISE_CONFIG_DIR) / name;
        for (const char* command : {"gamma", "rep-check", "kernel-check", "corr-check"})
            for (const char* format : {"csv", "json"}) {
                std::string tag = fs::path(name).stem().string() + "_" + command + "_" + format;
                std::vector<fs::path> dirs{root / (tag + "_a"), root / (tag + "_b")};
                for (const auto& d : dirs) {
                    int code = run_cli(std::string(command) + " --config \"" + config.string() + "\" --out \"" +
                                       d.string() + "\" --format " + format + " --seed 7");
                    ++runs;
                    if (code != 0) {
                        ok = false;
                        detail += tag + " exit " + std::to_string(code) + "; ";
                    }
                }
                std::vector<fs::path> names;
                if (fs::exists(dirs[0]))
                    for (const auto& e : fs::directory_iterator(dirs[0])) names.push_back(e.path().filename());
                if (names.empty()) {
                    ok = false;
                    detail += tag + " wrote nothing; ";
                }
                for (const auto& n : names) {
                    ++files;
                    if (!fs::exists(dirs[1] / n) || read_file(dirs[0] / n) != read_file(dirs[1] / n)) {
                        ok = false;
                        detail += tag + "/" + n.string() + " differs; ";
                    }
                }
                std::size_t second = 0;
                if (fs::exists(dirs[1]))
                    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dirs[1])) ++second;
                if (second != names.size()) {
                    ok = false;
                    detail += tag + " file sets differ; ";
                }
            }
    }
    fs::remove_all(root);
    return {7, ok, std::to_string(runs) + " runs, " + std::to_string(files) + " artifacts compared byte for byte" +
                       (detail.empty() ? "" : ": " + detail)};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Line()>>> criteria{
        {"CCR", criterion_1},
        {"pseudo-adjointness", criterion_2},
        {"metric operator", criterion_3},
        {"gamma coefficients", criterion_4},
        {"kernel expansion rate", criterion_5},
        {"four-point rate and Fock-Wick", criterion_6},
        {"CLI determinism", criterion_7},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Line line;
        try {
            line = criteria[i].second();
        } catch (const std::exception& e) {
            line = {static_cast<int>(i + 1), false, std::string("threw: ") + e.what()};
        }
        failures += !line.passed;
        std::cout << "criterion " << line.criterion << " " << (line.passed ? "PASS" : "FAIL") << "  " << criteria[i].first
                  << ": " << line.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
