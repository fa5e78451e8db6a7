// rep_check.hpp: numerical checks of the pseudo-Fock representation
//
// Each check draws random data from the seeded Rng and reports the largest
// relative residual seen. Residuals compare the Fock-space operators against
// quantities computed directly from the test functions (indefinite_inner,
// Wick sums), so an inconsistent sector (for example a transposed pairing
// matrix) shows up as a large residual.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "multinoise/pseudo_fock.hpp"
#include "multinoise/random.hpp"
#include "multinoise/schwartz.hpp"
#include "multinoise/wick.hpp"

namespace multinoise {

struct RepCheckOptions {
    int sector_max = 3;
    std::size_t basis_size = 6;
    int particle_cap = 4;
    int draws = 50;
    std::uint64_t seed = 1;
    std::vector<double> gammas;  // one per order 0..sector_max
    bool transpose_pairing = false;
};

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct RepCheckReport {
    std::vector<CheckResult> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
};

inline constexpr double rep_tolerance = 1e-10;
inline constexpr double metric_tolerance = 1e-8;
inline constexpr double wick_tolerance = 1e-8;
inline constexpr double witness_tolerance = 1e-6;

// Hermite functions 0..M-3 and two Gaussians modulated at +-2; the Gaussians
// give complex, non-symmetric Gram and pairing matrices.
inline std::vector<TestFunction> rep_check_basis(std::size_t m)
{
    if (m < 2) throw std::invalid_argument("rep-check basis needs at least 2 functions");
    std::vector<TestFunction> b;
    for (std::size_t k = 0; k + 2 < m; ++k) b.push_back(hermite_function(k));
    b.push_back(gaussian(0.0, 1.0, 2.0));
    b.push_back(gaussian(0.0, 1.0, -2.0));
    return b;
}

namespace detail {

inline Vector random_vector(Rng& rng, Eigen::Index m)
{
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = rng.complex_normal();
    return v;
}

inline FockVector random_fock(Rng& rng, const SectorPtr& s, int max_rank)
{
    std::vector<Vector> c;
    for (int k = 0; k <= max_rank; ++k) c.push_back(symmetrize(random_vector(rng, int_pow(s->size(), k)), s->size(), k));
    return FockVector(s, std::move(c));
}

inline TestFunction combine(const std::vector<TestFunction>& basis, const Vector& alpha)
{
    TestFunction f;
    for (Eigen::Index a = 0; a < alpha.size(); ++a) f += basis[static_cast<std::size_t>(a)] * alpha(a);
    return f;
}

inline double ratio(double residual, double scale) { return scale > 0.0 ? residual / scale : residual; }

inline double rel(cplx a, cplx b) { return ratio(std::abs(a - b), std::max(std::abs(a), std::abs(b))); }

inline CheckResult finish(std::string name, double residual, double tolerance)
{
    return {std::move(name), residual, tolerance, residual <= tolerance};
}

} // namespace detail

inline std::vector<SectorPtr> rep_check_sectors(const RepCheckOptions& opt)
{
    if (static_cast<int>(opt.gammas.size()) <= opt.sector_max)
        throw std::invalid_argument("rep-check: need a gamma for every sector order");
    SectorOptions so;
    so.transpose_pairing = opt.transpose_pairing;
    std::vector<SectorPtr> sectors;
    auto basis = rep_check_basis(opt.basis_size);
    for (int n = 0; n <= opt.sector_max; ++n)
        sectors.push_back(Sector::build(n, opt.gammas[static_cast<std::size_t>(n)], basis, opt.particle_cap, so));
    return sectors;
}

// [a(f), c(h)] = <f, h>_n on random vectors below the cap, and the
// creator/creator and annihilator/annihilator commutators vanish.
inline std::vector<CheckResult> check_commutators(const std::vector<SectorPtr>& sectors, const RepCheckOptions& opt)
{
    Rng rng(opt.seed);
    double ccr = 0.0, cc = 0.0, aa = 0.0;
    for (const auto& s : sectors) {
        const auto m = static_cast<Eigen::Index>(s->size());
        for (int d = 0; d < opt.draws; ++d) {
            Vector f = detail::random_vector(rng, m), h = detail::random_vector(rng, m);
            cplx fh = indefinite_inner(s->order(), s->gamma(), detail::combine(s->basis(), f),
                                       detail::combine(s->basis(), h));
            auto low = detail::random_fock(rng, s, s->particle_cap() - 1);
            auto ac = annihilate(f, create(h, low));
            auto ca = create(h, annihilate(f, low));
            double scale = std::max({positive_norm(ac), positive_norm(ca), std::abs(fh) * positive_norm(low)});
            ccr = std::max(ccr, detail::ratio(positive_norm(ac - ca - fh * low), scale));

            auto two_below = detail::random_fock(rng, s, std::max(0, s->particle_cap() - 2));
            auto fh_c = create(f, create(h, two_below));
            auto hf_c = create(h, create(f, two_below));
            cc = std::max(cc, detail::ratio(positive_norm(fh_c - hf_c), std::max(positive_norm(fh_c), positive_norm(hf_c))));

            auto full = detail::random_fock(rng, s, s->particle_cap());
            auto fh_a = annihilate(f, annihilate(h, full));
            auto hf_a = annihilate(h, annihilate(f, full));
            aa = std::max(aa, detail::ratio(positive_norm(fh_a - hf_a), std::max(positive_norm(fh_a), positive_norm(hf_a))));
        }
    }
    return {detail::finish("ccr", ccr, rep_tolerance), detail::finish("creators_commute", cc, rep_tolerance),
            detail::finish("annihilators_commute", aa, rep_tolerance)};
}

// <c-(f) Phi, Psi> = <Phi, c+(f) Psi>.
inline CheckResult check_adjointness(const std::vector<SectorPtr>& sectors, const RepCheckOptions& opt)
{
    Rng rng(opt.seed + 1);
    double worst = 0.0;
    for (const auto& s : sectors) {
        const auto m = static_cast<Eigen::Index>(s->size());
        for (int d = 0; d < opt.draws; ++d) {
            Vector f = detail::random_vector(rng, m);
            auto phi = detail::random_fock(rng, s, s->particle_cap());
            auto psi = detail::random_fock(rng, s, s->particle_cap() - 1);
            worst = std::max(worst, detail::rel(fock_inner(annihilate(f, phi), psi), fock_inner(phi, create(f, psi))));
        }
    }
    return detail::finish("pseudo_adjointness", worst, rep_tolerance);
}

// One-particle metric: exact involution on the grid, eta-weighted form
// against the commutator kernel, and the second-quantized metric against the
// pairing-weighted Fock inner product.
inline std::vector<CheckResult> check_metric(const std::vector<SectorPtr>& sectors, const RepCheckOptions& opt)
{
    Rng rng(opt.seed + 2);
    double involution = 0.0, two_route = 0.0, lifted = 0.0;
    for (const auto& s : sectors) {
        const int n = s->order();
        const auto m = static_cast<Eigen::Index>(s->size());
        for (int d = 0; d < std::min(opt.draws, 10); ++d) {
            auto f = detail::combine(s->basis(), detail::random_vector(rng, m));
            auto h = detail::combine(s->basis(), detail::random_vector(rng, m));
            std::vector<TestFunction> both{f, h};
            auto grid = make_frequency_grid(both);
            auto uf = to_grid(f, grid);
            auto uh = to_grid(h, grid);
            auto twice = metric_apply(n, metric_apply(n, uh));
            for (std::size_t i = 0; i < uh.values.size(); ++i)
                involution = std::max(involution, std::abs(twice.values[i] - uh.values[i]));
            two_route = std::max(two_route, detail::rel(s->gamma() * grid_inner(n, uf, metric_apply(n, uh)),
                                                        indefinite_inner(n, s->gamma(), f, h)));
        }
        Matrix eta = s->metric_matrix();
        for (int d = 0; d < std::min(opt.draws, 5); ++d) {
            auto phi = detail::random_fock(rng, s, s->particle_cap());
            auto psi = detail::random_fock(rng, s, s->particle_cap());
            lifted = std::max(lifted, detail::rel(fock_inner(phi, psi, true), fock_inner(phi, second_quantize(eta, psi), false)));
        }
    }

    // <f, f>_1 = -5 for f = phi_0 e^{-5it} at unit gamma
    auto witness_f = hermite_function(0, 0.0, 1.0, -5.0);
    double witness = std::abs(indefinite_inner(1, 1.0, witness_f, witness_f) - cplx{-5.0, 0.0});

    return {detail::finish("metric_involution", involution, 0.0),
            detail::finish("metric_two_route", two_route, metric_tolerance),
            detail::finish("metric_second_quantized", lifted, metric_tolerance),
            detail::finish("negative_norm_witness", witness, witness_tolerance)};
}

// Vacuum expectations of noise words through the Fock representation against
// the Wick sum, over every sign pattern up to length 6. A word may stack up to
// six creators, so these sectors get their own cap.
inline CheckResult check_fock_wick(const RepCheckOptions& opt)
{
    constexpr std::size_t max_len = 6;
    SectorOptions so;
    so.transpose_pairing = opt.transpose_pairing;
    auto basis = rep_check_basis(opt.basis_size);
    std::vector<SectorPtr> low;
    for (int n = 0; n <= std::min(opt.sector_max, 2); ++n)
        low.push_back(Sector::build(n, opt.gammas[static_cast<std::size_t>(n)], basis, static_cast<int>(max_len), so));
    FockSpace space(low);
    std::vector<double> gammas;
    for (const auto& s : low) gammas.push_back(s->gamma());
    NoiseParams params{gammas, 1.0};
    const int orders = static_cast<int>(low.size());

    Rng rng(opt.seed + 3);
    double worst = 0.0;
    for (std::size_t len = 2; len <= max_len; len += 2)
        for (unsigned mask = 0; mask < (1u << len); ++mask)
            for (int draw = 0; draw < 2; ++draw) {
                std::vector<Letter> word;
                std::vector<NoiseLetter> fock_word;
                for (std::size_t i = 0; i < len; ++i) {
                    Sign s = (mask >> i) & 1u ? Sign::plus : Sign::minus;
                    int n = draw == 0 ? static_cast<int>(mask % static_cast<unsigned>(orders))
                                      : static_cast<int>(rng.index(static_cast<std::size_t>(orders)));
                    auto f = detail::combine(basis, detail::random_vector(rng, static_cast<Eigen::Index>(basis.size())));
                    word.push_back(Letter::noise(s, n, f));
                    fock_word.push_back({s, n, f});
                }
                cplx wick = correlation(word, params);
                cplx fock = multi_inner(MultiSectorState::vacuum(), apply_word(space, fock_word, MultiSectorState::vacuum()));
                worst = std::max(worst, std::abs(wick - fock) / std::max({std::abs(wick), std::abs(fock), 1e-300}));
            }
    return detail::finish("fock_wick", worst, wick_tolerance);
}

inline RepCheckReport rep_check(const RepCheckOptions& opt)
{
    auto sectors = rep_check_sectors(opt);
    RepCheckReport r;
    for (auto& c : check_commutators(sectors, opt)) r.checks.push_back(std::move(c));
    r.checks.push_back(check_adjointness(sectors, opt));
    for (auto& c : check_metric(sectors, opt)) r.checks.push_back(std::move(c));
    r.checks.push_back(check_fock_wick(opt));
    return r;
}

} // namespace multinoise
