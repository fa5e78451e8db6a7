// pseudo_fock.hpp: truncated symmetric Fock sectors with indefinite metric
//
// A Sector fixes a multipole order n, its scale gamma_n and M basis test
// functions b_a. A k-particle component is a symmetric rank-k tensor T over
// basis indices, standing for  f_k(t_1..t_k) = sum T[a_1..a_k] b_{a_1}(t_1)...b_{a_k}(t_k).
// Tensors are stored flat with the first slot most significant.
//
//   create:      T'[a_1..a_{k+1}] = (k+1)^{-1/2} sum_i alpha_{a_i} T[a_1..^a_i..a_{k+1}]
//   annihilate:  T'[a_2..a_k]     = k^{1/2} sum_{a_1} v_{a_1} T[a_1..a_k],   v_a = <f, b_a>_n
//   fock_inner:  sum_k  conj(Phi_k) . K^{(x)k} Psi_k,  K = pairing (metric on) or gram (off)

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "multinoise/errors.hpp"
#include "multinoise/schwartz.hpp"
#include "multinoise/sign.hpp"

namespace multinoise {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct SectorOptions {
    double max_condition = 1e10;
    double span_tolerance = 1e-8;
    bool transpose_pairing = false;  // fault injection for the representation checks
};

class Sector {
public:
    static std::shared_ptr<const Sector> build(int n, double gamma, std::vector<TestFunction> basis, int particle_cap,
                                               const SectorOptions& opt = {})
    {
        if (n < 0) throw std::invalid_argument("Sector: negative order");
        if (gamma == 0.0) throw ZeroGamma("sector " + std::to_string(n));
        if (particle_cap < 1) throw std::invalid_argument("Sector: particle_cap must be >= 1");
        if (basis.empty()) throw std::invalid_argument("Sector: empty basis");

        auto s = std::shared_ptr<Sector>(new Sector());
        s->order_ = n;
        s->gamma_ = gamma;
        s->cap_ = particle_cap;
        s->span_tolerance_ = opt.span_tolerance;
        s->basis_ = std::move(basis);
        const auto m = static_cast<Eigen::Index>(s->basis_.size());
        s->gram_ = Matrix::Zero(m, m);
        s->pairing_ = Matrix::Zero(m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = a; b < m; ++b) {
                cplx g = weighted_inner(n, s->basis_[a], s->basis_[b]);
                if (a == b) g = g.real();
                s->gram_(a, b) = g;
                s->gram_(b, a) = std::conj(g);
            }
            for (Eigen::Index b = 0; b < m; ++b)
                s->pairing_(a, b) = indefinite_inner(n, gamma, s->basis_[a], s->basis_[b]);
        }
        if (opt.transpose_pairing) s->pairing_.transposeInPlace();

        Eigen::SelfAdjointEigenSolver<Matrix> eig(s->gram_, Eigen::EigenvaluesOnly);
        double lo = eig.eigenvalues().minCoeff();
        double hi = eig.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo >= opt.max_condition)
            throw IllConditionedBasis("gram matrix of sector " + std::to_string(n) + " has eigenvalues in [" +
                                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
        s->build_sampling();
        return s;
    }

    int order() const { return order_; }
    double gamma() const { return gamma_; }
    int particle_cap() const { return cap_; }
    Eigen::Index size() const { return gram_.rows(); }
    const std::vector<TestFunction>& basis() const { return basis_; }
    const Matrix& gram() const { return gram_; }
    const Matrix& pairing() const { return pairing_; }

    // Matrix of the metric operator in the basis: gram^{-1} pairing.
    Matrix metric_matrix() const { return gram_.llt().solve(pairing_); }

    // Basis coefficients of f by weighted least squares on time-domain samples;
    // NotInSpan if the relative residual exceeds the span tolerance.
    Vector coefficients(const TestFunction& f) const
    {
        std::vector<Interval> support = sample_support_;
        auto extra = numerical_support(f);
        support.insert(support.end(), extra.begin(), extra.end());
        support = merge_intervals(std::move(support));
        std::vector<const TestFunction*> fs{&f};
        for (const auto& b : basis_) fs.push_back(&b);
        auto rule = gauss_legendre_panels(make_panels(support, 0.5 * resolving_panel_width(fs)));

        const auto rows = static_cast<Eigen::Index>(rule.nodes.size());
        Matrix design(rows, size());
        Vector rhs(rows);
        for (Eigen::Index i = 0; i < rows; ++i) {
            double t = rule.nodes[static_cast<std::size_t>(i)];
            double sw = std::sqrt(rule.weights[static_cast<std::size_t>(i)]);
            for (Eigen::Index a = 0; a < size(); ++a) design(i, a) = sw * evaluate(basis_[static_cast<std::size_t>(a)], t);
            rhs(i) = sw * evaluate(f, t);
        }
        double f_norm = rhs.norm();
        if (f_norm == 0.0) return Vector::Zero(size());
        Vector alpha = design.colPivHouseholderQr().solve(rhs);
        double residual = (design * alpha - rhs).norm() / f_norm;
        if (residual > span_tolerance_)
            throw NotInSpan("relative residual " + std::to_string(residual) + " in sector " + std::to_string(order_));
        return alpha;
    }

    // v_a = <f, b_a>_n for f = sum_c alpha_c b_c.
    Vector pairing_vector(const Vector& alpha) const { return (alpha.adjoint() * pairing_).transpose(); }

private:
    Sector() = default;

    void build_sampling()
    {
        std::vector<Interval> parts;
        for (const auto& b : basis_) {
            auto s = numerical_support(b);
            parts.insert(parts.end(), s.begin(), s.end());
        }
        sample_support_ = merge_intervals(std::move(parts));
    }

    int order_ = 0;
    double gamma_ = 1.0;
    int cap_ = 1;
    double span_tolerance_ = 1e-8;
    std::vector<TestFunction> basis_;
    Matrix gram_;
    Matrix pairing_;
    std::vector<Interval> sample_support_;
};

using SectorPtr = std::shared_ptr<const Sector>;

inline Eigen::Index int_pow(Eigen::Index base, int exp)
{
    Eigen::Index r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

class FockVector {
public:
    FockVector(SectorPtr sector, std::vector<Vector> components)
        : sector_(std::move(sector)), components_(std::move(components))
    {
        if (!sector_) throw std::invalid_argument("FockVector: null sector");
        if (components_.empty()) components_.push_back(Vector::Zero(1));
        if (static_cast<int>(components_.size()) > sector_->particle_cap() + 1)
            throw CapacityExceeded("FockVector: rank beyond particle cap");
        for (std::size_t k = 0; k < components_.size(); ++k)
            if (components_[k].size() != int_pow(sector_->size(), static_cast<int>(k)))
                throw std::invalid_argument("FockVector: component " + std::to_string(k) + " has wrong size");
    }

    static FockVector vacuum(SectorPtr sector)
    {
        std::vector<Vector> c{Vector::Ones(1)};
        return FockVector(std::move(sector), std::move(c));
    }

    static FockVector zero(SectorPtr sector) { return FockVector(std::move(sector), {Vector::Zero(1)}); }

    const Sector& sector() const { return *sector_; }
    const SectorPtr& sector_ptr() const { return sector_; }
    int max_rank() const { return static_cast<int>(components_.size()) - 1; }
    const std::vector<Vector>& components() const { return components_; }

    // Zero tensor for ranks beyond the stored ones.
    Vector component(int k) const
    {
        if (k <= max_rank()) return components_[static_cast<std::size_t>(k)];
        return Vector::Zero(int_pow(sector_->size(), k));
    }

    int top_nonzero_rank() const
    {
        for (int k = max_rank(); k >= 0; --k)
            if (!components_[static_cast<std::size_t>(k)].isZero(0.0)) return k;
        return -1;
    }

    cplx at(std::span<const Eigen::Index> idx) const
    {
        int k = static_cast<int>(idx.size());
        if (k > max_rank()) return {};
        Eigen::Index flat = 0;
        for (auto a : idx) flat = flat * sector_->size() + a;
        return components_[static_cast<std::size_t>(k)](flat);
    }

    FockVector& operator+=(const FockVector& o)
    {
        check_same(o);
        if (o.max_rank() > max_rank()) {
            for (int k = max_rank() + 1; k <= o.max_rank(); ++k)
                components_.push_back(Vector::Zero(int_pow(sector_->size(), k)));
        }
        for (int k = 0; k <= o.max_rank(); ++k) components_[static_cast<std::size_t>(k)] += o.components_[static_cast<std::size_t>(k)];
        return *this;
    }

    FockVector& operator*=(cplx s)
    {
        for (auto& c : components_) c *= s;
        return *this;
    }

    friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
    friend FockVector operator-(FockVector a, const FockVector& b) { return a += b * cplx{-1.0, 0.0}; }
    friend FockVector operator*(FockVector a, cplx s) { return a *= s; }
    friend FockVector operator*(cplx s, FockVector a) { return a *= s; }

    void check_same(const FockVector& o) const
    {
        if (o.sector_ != sector_)
            throw SectorMismatch("vectors belong to different sectors (orders " + std::to_string(sector_->order()) +
                                 " and " + std::to_string(o.sector_->order()) + ")");
    }

private:
    SectorPtr sector_;
    std::vector<Vector> components_;
};

namespace detail {

inline void to_digits(Eigen::Index flat, Eigen::Index m, int k, std::vector<Eigen::Index>& digits)
{
    digits.resize(static_cast<std::size_t>(k));
    for (int j = k - 1; j >= 0; --j) {
        digits[static_cast<std::size_t>(j)] = flat % m;
        flat /= m;
    }
}

// Applies `kernel` to every slot of a rank-k tensor.
inline Vector apply_slotwise(const Matrix& kernel, Vector t, int k)
{
    const Eigen::Index m = kernel.rows();
    for (int slot = 0; slot < k; ++slot) {
        Eigen::Index inner = int_pow(m, k - 1 - slot);
        Eigen::Index outer = int_pow(m, slot);
        for (Eigen::Index o = 0; o < outer; ++o) {
            Eigen::Map<Matrix> block(t.data() + o * m * inner, inner, m);
            block = (block * kernel.transpose()).eval();
        }
    }
    return t;
}

} // namespace detail

inline bool is_symmetric(const FockVector& phi, double tol = 1e-12)
{
    const Eigen::Index m = phi.sector().size();
    std::vector<Eigen::Index> d;
    for (int k = 2; k <= phi.max_rank(); ++k) {
        const Vector& t = phi.components()[static_cast<std::size_t>(k)];
        double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
        for (Eigen::Index flat = 0; flat < t.size(); ++flat) {
            detail::to_digits(flat, m, k, d);
            for (int i = 0; i + 1 < k; ++i) {
                std::swap(d[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(i + 1)]);
                if (std::abs(phi.at(d) - t(flat)) > tol * scale) return false;
                std::swap(d[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(i + 1)]);
            }
        }
    }
    return true;
}

// Symmetrization (average over all slot permutations) of an arbitrary tensor.
inline Vector symmetrize(const Vector& t, Eigen::Index m, int k)
{
    if (k < 2) return t;
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::vector<Eigen::Index> d, p;
    Vector out = Vector::Zero(t.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    do {
        ++count;
        for (Eigen::Index flat = 0; flat < t.size(); ++flat) {
            detail::to_digits(flat, m, k, d);
            Eigen::Index q = 0;
            for (int j = 0; j < k; ++j) q = q * m + d[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
            out(flat) += t(q);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out / static_cast<double>(count);
}

inline FockVector create(const Vector& alpha, const FockVector& phi)
{
    const Sector& s = phi.sector();
    const Eigen::Index m = s.size();
    if (alpha.size() != m) throw std::invalid_argument("create: coefficient vector size mismatch");
    int top = phi.top_nonzero_rank();
    if (top >= s.particle_cap())
        throw CapacityExceeded("create on a " + std::to_string(top) + "-particle component with cap " +
                               std::to_string(s.particle_cap()));
    int out_rank = std::max(top + 1, 0);
    std::vector<Vector> out(static_cast<std::size_t>(out_rank + 1));
    out[0] = Vector::Zero(1);
    std::vector<Eigen::Index> d;
    for (int k = 0; k < out_rank; ++k) {
        const Vector t = phi.component(k);
        Vector r(int_pow(m, k + 1));
        const double norm = 1.0 / std::sqrt(static_cast<double>(k + 1));
        for (Eigen::Index flat = 0; flat < r.size(); ++flat) {
            detail::to_digits(flat, m, k + 1, d);
            cplx acc{};
            for (int i = 0; i <= k; ++i) {
                Eigen::Index rest = 0;
                for (int j = 0; j <= k; ++j)
                    if (j != i) rest = rest * m + d[static_cast<std::size_t>(j)];
                acc += alpha(d[static_cast<std::size_t>(i)]) * t(rest);
            }
            r(flat) = norm * acc;
        }
        out[static_cast<std::size_t>(k + 1)] = std::move(r);
    }
    return FockVector(phi.sector_ptr(), std::move(out));
}

inline FockVector create(const TestFunction& f, const FockVector& phi)
{
    return create(phi.sector().coefficients(f), phi);
}

inline FockVector annihilate(const Vector& alpha, const FockVector& phi)
{
    const Sector& s = phi.sector();
    const Eigen::Index m = s.size();
    if (alpha.size() != m) throw std::invalid_argument("annihilate: coefficient vector size mismatch");
    const Vector v = s.pairing_vector(alpha);
    int top = std::max(phi.max_rank() - 1, 0);
    std::vector<Vector> out(static_cast<std::size_t>(top + 1));
    for (int k = 1; k <= phi.max_rank(); ++k) {
        const Vector& t = phi.components()[static_cast<std::size_t>(k)];
        Eigen::Index block = int_pow(m, k - 1);
        Vector r = Vector::Zero(block);
        for (Eigen::Index a = 0; a < m; ++a) r += v(a) * t.segment(a * block, block);
        out[static_cast<std::size_t>(k - 1)] = std::sqrt(static_cast<double>(k)) * r;
    }
    if (phi.max_rank() == 0) out[0] = Vector::Zero(1);
    return FockVector(phi.sector_ptr(), std::move(out));
}

inline FockVector annihilate(const TestFunction& f, const FockVector& phi)
{
    return annihilate(phi.sector().coefficients(f), phi);
}

inline FockVector apply(Sign sign, const Vector& alpha, const FockVector& phi)
{
    return sign == Sign::plus ? create(alpha, phi) : annihilate(alpha, phi);
}

inline cplx fock_inner(const FockVector& phi, const FockVector& psi, bool use_metric = true)
{
    phi.check_same(psi);
    const Matrix& kernel = use_metric ? phi.sector().pairing() : phi.sector().gram();
    cplx sum{};
    int top = std::min(phi.max_rank(), psi.max_rank());
    for (int k = 0; k <= top; ++k) {
        const Vector& a = phi.components()[static_cast<std::size_t>(k)];
        const Vector& b = psi.components()[static_cast<std::size_t>(k)];
        sum += a.dot(detail::apply_slotwise(kernel, b, k));  // Eigen's dot conjugates the left operand
    }
    return sum;
}

// Positive (gram) norm.
inline double positive_norm(const FockVector& phi) { return std::sqrt(std::max(0.0, fock_inner(phi, phi, false).real())); }

// Slotwise application of a one-particle matrix (second quantization of it).
inline FockVector second_quantize(const Matrix& op, const FockVector& phi)
{
    std::vector<Vector> out;
    for (int k = 0; k <= phi.max_rank(); ++k)
        out.push_back(detail::apply_slotwise(op, phi.components()[static_cast<std::size_t>(k)], k));
    return FockVector(phi.sector_ptr(), std::move(out));
}

// --- infinite tensor product over sectors ------------------------------------

class FockSpace {
public:
    explicit FockSpace(std::vector<SectorPtr> sectors) : sectors_(std::move(sectors))
    {
        for (std::size_t n = 0; n < sectors_.size(); ++n)
            if (!sectors_[n] || sectors_[n]->order() != static_cast<int>(n))
                throw std::invalid_argument("FockSpace: sector list must be indexed by multipole order");
    }

    int sector_count() const { return static_cast<int>(sectors_.size()); }

    const SectorPtr& sector(int n) const
    {
        if (n < 0 || n >= sector_count())
            throw SectorMismatch("no sector of order " + std::to_string(n) + " in this space");
        return sectors_[static_cast<std::size_t>(n)];
    }

private:
    std::vector<SectorPtr> sectors_;
};

// One product vector: sectors absent from `factors` are at their vacuum.
struct ProductTerm {
    cplx coefficient{1.0, 0.0};
    std::map<int, FockVector> factors;
};

struct MultiSectorState {
    std::vector<ProductTerm> terms;

    static MultiSectorState vacuum() { return {{ProductTerm{}}}; }

    MultiSectorState& operator+=(const MultiSectorState& o)
    {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        return *this;
    }
};

namespace detail {

inline cplx product_inner(const ProductTerm& x, const ProductTerm& y)
{
    cplx value = std::conj(x.coefficient) * y.coefficient;
    auto ix = x.factors.begin();
    auto iy = y.factors.begin();
    while (ix != x.factors.end() || iy != y.factors.end()) {
        if (iy == y.factors.end() || (ix != x.factors.end() && ix->first < iy->first)) {
            value *= std::conj(ix->second.component(0)(0));  // <phi, vac>
            ++ix;
        } else if (ix == x.factors.end() || iy->first < ix->first) {
            value *= iy->second.component(0)(0);  // <vac, psi>
            ++iy;
        } else {
            value *= fock_inner(ix->second, iy->second, true);
            ++ix;
            ++iy;
        }
        if (value == cplx{}) break;
    }
    return value;
}

} // namespace detail

inline cplx multi_inner(const MultiSectorState& phi, const MultiSectorState& psi)
{
    cplx sum{};
    for (const auto& x : phi.terms)
        for (const auto& y : psi.terms) sum += detail::product_inner(x, y);
    return sum;
}

struct NoiseLetter {
    Sign sign = Sign::plus;
    int order = 0;
    TestFunction smear;
};

// Applies the word right to left: the last letter acts first.
inline MultiSectorState apply_word(const FockSpace& space, std::span<const NoiseLetter> word, MultiSectorState state)
{
    std::vector<Vector> alphas;
    alphas.reserve(word.size());
    for (const auto& l : word) alphas.push_back(space.sector(l.order)->coefficients(l.smear));
    for (std::size_t i = word.size(); i-- > 0;) {
        const NoiseLetter& l = word[i];
        for (auto& term : state.terms) {
            auto it = term.factors.find(l.order);
            if (it == term.factors.end())
                it = term.factors.emplace(l.order, FockVector::vacuum(space.sector(l.order))).first;
            it->second = apply(l.sign, alphas[i], it->second);
        }
    }
    return state;
}

} // namespace multinoise
