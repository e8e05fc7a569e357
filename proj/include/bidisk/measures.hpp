#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "bidisk/bipoly.hpp"
#include "bidisk/errors.hpp"

namespace bidisk {

/// Settings for the adaptive torus quadrature: a uniform trapezoidal grid,
/// doubled from a power-of-two start until successive normalized tables
/// agree within tol in sup norm. The grid is N x (aspect_w * N); aspect 1
/// (square) is right for generic densities, while densities pinched along
/// the diagonal of the torus (dilated boundary zeros) alias like
/// exp(-eps*(N_theta+N_phi)) and are far cheaper to resolve with a long
/// thin grid. max_grid caps the larger dimension.
template <class Scalar = double>
struct QuadratureOptions {
    Scalar tol = Scalar(1e-12);
    int initial_grid = 64;
    int max_grid = 1 << 14;
    int max_grid_1d = 1 << 20;
    int aspect_w = 1;
};

/// Fourier moments rho_hat(j,k) = int z^j w^k drho over the torus, stored on
/// the window |j| <= jmax, |k| <= kmax. Construction enforces
/// rho_hat(0,0) = 1 and exact conjugate symmetry rho_hat(-j,-k) =
/// conj(rho_hat(j,k)).
template <class Scalar = double>
class MomentTable {
public:
    using Complex = std::complex<Scalar>;

    MomentTable(int jmax, int kmax)
        : jmax_(checked(jmax)), kmax_(checked(kmax)),
          entries_(CoeffGrid<Scalar>::Zero(2 * jmax_ + 1, 2 * kmax_ + 1)) {
        entries_(jmax_, kmax_) = Complex(1);
    }

    int jmax() const { return jmax_; }
    int kmax() const { return kmax_; }

    bool in_window(int j, int k) const {
        return std::abs(j) <= jmax_ && std::abs(k) <= kmax_;
    }

    Complex at(int j, int k) const {
        if (!in_window(j, k))
            throw WindowTooSmallError("moment index outside table window");
        return entries_(j + jmax_, k + kmax_);
    }

    /// Sets (j,k) and its conjugate mirror (-j,-k).
    void set(int j, int k, Complex value) {
        if (!in_window(j, k))
            throw WindowTooSmallError("moment index outside table window");
        entries_(j + jmax_, k + kmax_) = value;
        entries_(jmax_ - j, kmax_ - k) = std::conj(value);
    }

    /// Windowed copy; the requested window must fit inside this one.
    MomentTable rewindowed(int jmax, int kmax) const {
        if (jmax > jmax_ || kmax > kmax_)
            throw WindowTooSmallError("moment table window too small for request");
        MomentTable out(jmax, kmax);
        for (int j = -jmax; j <= jmax; ++j)
            for (int k = -kmax; k <= kmax; ++k)
                out.entries_(j + jmax, k + kmax) = at(j, k);
        return out;
    }

    const CoeffGrid<Scalar>& entries() const { return entries_; }

    /// Validates the probability-measure invariants on externally supplied
    /// data, then enforces them exactly.
    static MomentTable from_entries(int jmax, int kmax, CoeffGrid<Scalar> raw,
                                    Scalar tol = Scalar(1e-9)) {
        if (raw.rows() != 2 * jmax + 1 || raw.cols() != 2 * kmax + 1)
            throw InputError("moment entry grid does not match window");
        MomentTable out(jmax, kmax);
        if (std::abs(raw(jmax, kmax) - Complex(1)) > tol)
            throw InputError("moment table must have rho_hat(0,0) = 1");
        for (int j = -jmax; j <= jmax; ++j)
            for (int k = -kmax; k <= kmax; ++k) {
                const Complex v = raw(j + jmax, k + kmax);
                const Complex mirror = raw(jmax - j, kmax - k);
                if (std::abs(v - std::conj(mirror)) > tol)
                    throw InputError("moment table violates conjugate symmetry");
                if (std::abs(v) > Scalar(1) + tol)
                    throw InputError("moments of a probability measure satisfy |rho_hat| <= 1");
            }
        for (int j = 0; j <= jmax; ++j)
            for (int k = -kmax; k <= kmax; ++k) {
                if (j == 0 && k < 0) continue;
                const Complex v = (raw(j + jmax, k + kmax) +
                                   std::conj(raw(jmax - j, kmax - k))) / Scalar(2);
                out.set(j, k, v);
            }
        out.entries_(jmax, kmax) = Complex(1);
        return out;
    }

private:
    static int checked(int d) {
        if (d < 0) throw InputError("moment window must be nonnegative");
        return d;
    }

    int jmax_, kmax_;
    CoeffGrid<Scalar> entries_;
};

namespace measure_kind {

template <class Scalar>
struct Lebesgue {};

template <class Scalar>
struct BernsteinSzego {
    BiPoly<Scalar> q;
    std::optional<Scalar> c; // advisory; normalization is always recomputed
};

/// Nonnegative density samples on a uniform grid_n x grid_n torus grid,
/// theta-index major: values[a*grid_n + b] ~ density(theta_a, phi_b).
template <class Scalar>
struct GridDensity {
    int grid_n = 0;
    std::vector<Scalar> values;
};

template <class Scalar>
struct Moments {
    MomentTable<Scalar> table;
};

} // namespace measure_kind

/// A probability measure on the 2-torus, in one of four representations.
template <class Scalar = double>
class Measure {
public:
    using LebesgueK = measure_kind::Lebesgue<Scalar>;
    using BernsteinSzegoK = measure_kind::BernsteinSzego<Scalar>;
    using GridDensityK = measure_kind::GridDensity<Scalar>;
    using MomentsK = measure_kind::Moments<Scalar>;
    using Kind = std::variant<LebesgueK, BernsteinSzegoK, GridDensityK, MomentsK>;

    static Measure lebesgue() { return Measure(LebesgueK{}); }

    static Measure bernstein_szego(BiPoly<Scalar> q, std::optional<Scalar> c = std::nullopt) {
        if (sup_coeff(q) == Scalar(0))
            throw InputError("Bernstein-Szego polynomial must be nonzero");
        if (c && *c <= Scalar(0))
            throw InputError("Bernstein-Szego constant must be positive");
        return Measure(BernsteinSzegoK{std::move(q), c});
    }

    static Measure grid_density(int grid_n, std::vector<Scalar> values) {
        if (grid_n <= 0 || values.size() != static_cast<size_t>(grid_n) * grid_n)
            throw InputError("grid density needs grid_n^2 values");
        Scalar mass(0);
        for (Scalar v : values) {
            if (!(v >= Scalar(0))) throw InputError("grid density values must be nonnegative");
            mass += v;
        }
        if (mass == Scalar(0)) throw InputError("grid density must have positive mass");
        return Measure(GridDensityK{grid_n, std::move(values)});
    }

    static Measure from_moments(MomentTable<Scalar> table) {
        return Measure(MomentsK{std::move(table)});
    }

    const Kind& kind() const { return kind_; }

    bool is_lebesgue() const { return std::holds_alternative<LebesgueK>(kind_); }
    bool is_bernstein_szego() const { return std::holds_alternative<BernsteinSzegoK>(kind_); }
    bool is_grid_density() const { return std::holds_alternative<GridDensityK>(kind_); }
    bool is_moment_table() const { return std::holds_alternative<MomentsK>(kind_); }

    const BernsteinSzegoK& as_bernstein_szego() const { return std::get<BernsteinSzegoK>(kind_); }
    const GridDensityK& as_grid_density() const { return std::get<GridDensityK>(kind_); }
    const MomentsK& as_moments() const { return std::get<MomentsK>(kind_); }

private:
    explicit Measure(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

namespace detail {

// Compensated accumulation; summation order is fixed by the callers so
// results are bit-reproducible.
template <class T>
struct KahanSum {
    T sum{}, carry{};
    void add(T v) {
        const T y = v - carry;
        const T t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

template <class Scalar>
struct RawTable {
    MomentTable<Scalar> table;
    Scalar mass = 0; // un-normalized quadrature mass of the density
    int grid_n = 0;
};

// One trapezoidal pass over an n_theta x n_phi uniform torus grid.
// density(a, b) evaluates at (theta_a, phi_b); the per-row inner sums S_k
// gather the w-frequencies first, so the total cost is
// O(n_theta * n_phi * (kmax + eval)).
template <class Scalar, class Density>
RawTable<Scalar> torus_quadrature_pass(Density&& density, int n_theta, int n_phi, int jmax,
                                       int kmax) {
    using C = std::complex<Scalar>;
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    std::vector<C> theta_circle(n_theta), phi_circle(n_phi);
    for (int a = 0; a < n_theta; ++a)
        theta_circle[a] = std::polar(Scalar(1), two_pi * Scalar(a) / Scalar(n_theta));
    for (int b = 0; b < n_phi; ++b)
        phi_circle[b] = std::polar(Scalar(1), two_pi * Scalar(b) / Scalar(n_phi));

    std::vector<std::vector<KahanSum<C>>> row_sums(jmax + 1);
    for (auto& r : row_sums) r.resize(2 * kmax + 1);
    KahanSum<Scalar> mass_acc;

    std::vector<KahanSum<C>> sk(kmax + 1);
    for (int a = 0; a < n_theta; ++a) {
        for (auto& s : sk) s = {};
        for (int b = 0; b < n_phi; ++b) {
            const Scalar u = density(a, b, theta_circle, phi_circle);
            C wk(u, 0);
            sk[0].add(wk);
            for (int k = 1; k <= kmax; ++k) {
                wk *= phi_circle[b];
                sk[k].add(wk);
            }
        }
        mass_acc.add(sk[0].sum.real());
        C zj(1, 0);
        for (int j = 0; j <= jmax; ++j) {
            for (int k = 0; k <= kmax; ++k) {
                row_sums[j][kmax + k].add(zj * sk[k].sum);
                if (k > 0) row_sums[j][kmax - k].add(zj * std::conj(sk[k].sum));
            }
            zj *= theta_circle[a];
        }
    }

    RawTable<Scalar> out{MomentTable<Scalar>(jmax, kmax), Scalar(0), n_theta};
    const Scalar cell = Scalar(1) / (Scalar(n_theta) * Scalar(n_phi));
    out.mass = mass_acc.sum * cell;
    if (!(out.mass > Scalar(0)))
        throw InputError("density quadrature produced non-positive mass");
    for (int j = 0; j <= jmax; ++j)
        for (int k = -kmax; k <= kmax; ++k) {
            if (j == 0 && k < 0) continue;
            out.table.set(j, k, row_sums[j][kmax + k].sum * cell / out.mass);
        }
    return out;
}

template <class Scalar>
Scalar table_sup_diff(const MomentTable<Scalar>& a, const MomentTable<Scalar>& b) {
    return (a.entries() - b.entries()).cwiseAbs().maxCoeff();
}

// Adaptive doubling ladder for the Bernstein-Szego density 1/|q|^2.
template <class Scalar>
RawTable<Scalar> bs_quadrature(const BiPoly<Scalar>& q, int jmax, int kmax,
                               const QuadratureOptions<Scalar>& opts) {
    using C = std::complex<Scalar>;
    const Scalar coeff_scale = sup_coeff(q);
    if (coeff_scale == Scalar(0))
        throw InputError("Bernstein-Szego polynomial must be nonzero");
    const Scalar vanish2 = Scalar(1e-13) * coeff_scale * (Scalar(1e-13) * coeff_scale);

    const int aspect = std::max(opts.aspect_w, 1);
    int n_grid = opts.initial_grid;
    while (n_grid < 4 * (std::max(jmax, kmax) + 1)) n_grid *= 2;

    auto run = [&](int n) {
        // Collapse q(z_a, w) to a univariate polynomial per row, then Horner.
        std::vector<C> row_coeffs(q.deg_w() + 1);
        int cached_row = -1;
        auto density = [&](int a, int b, const std::vector<C>& theta_circle,
                           const std::vector<C>& phi_circle) -> Scalar {
            if (a != cached_row) {
                for (int k = 0; k <= q.deg_w(); ++k) {
                    C acc(0);
                    for (int j = q.deg_z(); j >= 0; --j)
                        acc = acc * theta_circle[a] + q.coeffs()(j, k);
                    row_coeffs[k] = acc;
                }
                cached_row = a;
            }
            C v(0);
            for (int k = q.deg_w(); k >= 0; --k) v = v * phi_circle[b] + row_coeffs[k];
            const Scalar mod2 = std::norm(v);
            if (mod2 <= vanish2)
                throw DensityNotPositiveError("polynomial vanishes on the quadrature grid");
            return Scalar(1) / mod2;
        };
        return torus_quadrature_pass<Scalar>(density, n, n * aspect, jmax, kmax);
    };

    RawTable<Scalar> prev = run(n_grid);
    while (true) {
        if (2 * n_grid * aspect > opts.max_grid)
            throw NoConvergenceError("torus quadrature did not converge within the grid cap");
        n_grid *= 2;
        RawTable<Scalar> next = run(n_grid);
        const Scalar diff = table_sup_diff(prev.table, next.table);
        const Scalar mass_diff = std::abs(next.mass - prev.mass) / next.mass;
        prev = std::move(next);
        if (std::max(diff, mass_diff) < opts.tol) break;
    }
    return prev;
}

} // namespace detail

/// Fourier moments of a measure on the requested window. Lebesgue and
/// moment-table inputs are exact; grid densities are integrated at their own
/// resolution; Bernstein-Szego densities use the adaptive doubling ladder.
template <class Scalar>
MomentTable<Scalar> moments(const Measure<Scalar>& measure, int jmax, int kmax,
                            const QuadratureOptions<Scalar>& opts = {}) {
    if (measure.is_lebesgue()) return MomentTable<Scalar>(jmax, kmax);
    if (measure.is_moment_table())
        return measure.as_moments().table.rewindowed(jmax, kmax);
    if (measure.is_grid_density()) {
        const auto& g = measure.as_grid_density();
        auto density = [&](int a, int b, const auto&, const auto&) -> Scalar {
            return g.values[static_cast<size_t>(a) * g.grid_n + b];
        };
        return detail::torus_quadrature_pass<Scalar>(density, g.grid_n, g.grid_n, jmax, kmax)
            .table;
    }
    return detail::bs_quadrature(measure.as_bernstein_szego().q, jmax, kmax, opts).table;
}

/// The normalization constant of the Bernstein-Szego measure of q:
/// c with 1/c^2 = int_{T^2} |q|^{-2} against normalized Lebesgue measure.
template <class Scalar>
Scalar bs_constant(const BiPoly<Scalar>& q, const QuadratureOptions<Scalar>& opts = {}) {
    return Scalar(1) / std::sqrt(detail::bs_quadrature(q, 0, 0, opts).mass);
}

/// Hermitian Toeplitz-structured Gram matrix of a monomial ordering:
/// G[(a,b),(c,d)] = rho_hat(a-c, b-d).
template <class Scalar = double>
struct GramMatrix {
    std::vector<std::pair<int, int>> ordering;
    CoeffGrid<Scalar> entries;
};

template <class Scalar>
GramMatrix<Scalar> gram(const MomentTable<Scalar>& table,
                        const std::vector<std::pair<int, int>>& ordering) {
    const int dim = static_cast<int>(ordering.size());
    GramMatrix<Scalar> out{ordering, CoeffGrid<Scalar>(dim, dim)};
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            out.entries(r, c) = table.at(ordering[r].first - ordering[c].first,
                                         ordering[r].second - ordering[c].second);
    return out;
}

template <class Scalar = double>
struct NondegeneracyReport {
    bool verdict = false;
    Scalar min_pivot = 0;
};

/// Positive definiteness of the full-box Gram at the level, decided by the
/// minimum LDL^* pivot against tol times the largest diagonal entry.
template <class Scalar>
NondegeneracyReport<Scalar> is_nondegenerate(const Measure<Scalar>& measure, int deg_z, int deg_w,
                                             Scalar pivot_tol = Scalar(1e-10),
                                             const QuadratureOptions<Scalar>& opts = {}) {
    const auto table = moments(measure, deg_z, deg_w, opts);
    std::vector<std::pair<int, int>> box;
    for (int j = 0; j <= deg_z; ++j)
        for (int k = 0; k <= deg_w; ++k) box.emplace_back(j, k);
    const auto g = gram(table, box);
    Eigen::LDLT<CoeffGrid<Scalar>> ldlt(g.entries);
    NondegeneracyReport<Scalar> out;
    out.min_pivot = ldlt.vectorD().real().minCoeff();
    const Scalar max_diag = g.entries.diagonal().real().maxCoeff();
    out.verdict = ldlt.info() == Eigen::Success && out.min_pivot > pivot_tol * max_diag;
    return out;
}

/// <p, q> = sum a_alpha conj(b_beta) rho_hat(alpha - beta).
template <class Scalar>
ComplexT<Scalar> inner_product(const MomentTable<Scalar>& table, const BiPoly<Scalar>& p,
                               const BiPoly<Scalar>& q) {
    ComplexT<Scalar> acc(0);
    for (int j1 = 0; j1 <= p.deg_z(); ++j1)
        for (int k1 = 0; k1 <= p.deg_w(); ++k1) {
            const auto a = p.coeffs()(j1, k1);
            if (a == ComplexT<Scalar>(0)) continue;
            for (int j2 = 0; j2 <= q.deg_z(); ++j2)
                for (int k2 = 0; k2 <= q.deg_w(); ++k2) {
                    const auto b = q.coeffs()(j2, k2);
                    if (b == ComplexT<Scalar>(0)) continue;
                    acc += a * std::conj(b) * table.at(j1 - j2, k1 - k2);
                }
        }
    return acc;
}

template <class Scalar = double>
struct SliceMoments {
    std::vector<std::complex<Scalar>> moments; // sigma_hat(k), k = -kmax..kmax
    int kmax = 0;
    Scalar c = 0;

    std::complex<Scalar> at(int k) const {
        if (std::abs(k) > kmax) throw WindowTooSmallError("slice moment outside window");
        return moments[static_cast<size_t>(k + kmax)];
    }
};

/// Moments of the one-variable slice measure
///   d sigma_{z0} = c_{z0}^2 / (2 pi i |q(z0,w)|^2) dw/w
/// for |k| <= q.deg_w(), plus the normalizing constant c_{z0}. The slice
/// polynomial must be zero-free on the unit circle.
template <class Scalar>
SliceMoments<Scalar> slice_bs(const BiPoly<Scalar>& q, ComplexT<Scalar> z0,
                              const QuadratureOptions<Scalar>& opts = {}) {
    using C = ComplexT<Scalar>;
    const auto coeffs = slice_coeffs(q, SliceAxis::fix_z, z0);
    Scalar scale = 0;
    for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == Scalar(0)) throw ZeroSliceError("slice polynomial is identically zero");
    for (const auto& root : detail::univariate_roots(coeffs, Scalar(1e-12)))
        if (std::abs(std::abs(root) - Scalar(1)) <= Scalar(1e-9))
            throw ZeroOnCircleError("slice polynomial has a root on the unit circle");

    const int kmax = q.deg_w();
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    auto run = [&](int n) {
        std::vector<detail::KahanSum<C>> sums(kmax + 1);
        detail::KahanSum<Scalar> mass;
        for (int b = 0; b < n; ++b) {
            const C w = std::polar(Scalar(1), two_pi * Scalar(b) / Scalar(n));
            C v(0);
            for (int k = kmax; k >= 0; --k) v = v * w + coeffs[k];
            const Scalar u = Scalar(1) / std::norm(v);
            mass.add(u);
            C wk(u, 0);
            sums[0].add(wk);
            for (int k = 1; k <= kmax; ++k) {
                wk *= w;
                sums[k].add(wk);
            }
        }
        std::pair<std::vector<C>, Scalar> out;
        out.second = mass.sum / Scalar(n);
        out.first.resize(kmax + 1);
        for (int k = 0; k <= kmax; ++k) out.first[k] = sums[k].sum / Scalar(n) / out.second;
        return out;
    };

    int n = std::max(opts.initial_grid, 4 * (kmax + 1));
    auto prev = run(n);
    while (true) {
        if (2 * n > opts.max_grid_1d)
            throw NoConvergenceError("circle quadrature did not converge within the grid cap");
        n *= 2;
        auto next = run(n);
        Scalar diff = std::abs(next.second - prev.second) / next.second;
        for (int k = 0; k <= kmax; ++k)
            diff = std::max(diff, std::abs(next.first[k] - prev.first[k]));
        prev = std::move(next);
        if (diff < opts.tol) break;
    }

    SliceMoments<Scalar> out;
    out.kmax = kmax;
    out.c = Scalar(1) / std::sqrt(prev.second);
    out.moments.resize(2 * kmax + 1);
    out.moments[kmax] = C(1);
    for (int k = 1; k <= kmax; ++k) {
        out.moments[kmax + k] = prev.first[k];
        out.moments[kmax - k] = std::conj(prev.first[k]);
    }
    return out;
}

} // namespace bidisk
