#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bidisk/bipoly.hpp"
#include "bidisk/certificate.hpp"
#include "bidisk/errors.hpp"
#include "bidisk/kernelpoly.hpp"
#include "bidisk/kernels.hpp"
#include "bidisk/measures.hpp"
#include "bidisk/stability.hpp"

namespace bidisk {

enum class MulTag { none, one_minus_zz, one_minus_ww, both };

inline const char* mul_tag_name(MulTag tag) {
    switch (tag) {
        case MulTag::none: return "1";
        case MulTag::one_minus_zz: return "(1-z.zeta~)";
        case MulTag::one_minus_ww: return "(1-w.omega~)";
        case MulTag::both: return "(1-z.zeta~)(1-w.omega~)";
    }
    return "?";
}

template <class Scalar = double>
struct IdentityPart {
    std::string name;
    MulTag tag = MulTag::none;
    KernelPoly<Scalar> kernel; // before the multiplier is applied
};

template <class Scalar>
KernelPoly<Scalar> apply_mul_tag(const IdentityPart<Scalar>& part) {
    switch (part.tag) {
        case MulTag::none: return part.kernel;
        case MulTag::one_minus_zz: return mul_one_minus_zz(part.kernel);
        case MulTag::one_minus_ww: return mul_one_minus_ww(part.kernel);
        case MulTag::both: return mul_one_minus_zz(mul_one_minus_ww(part.kernel));
    }
    throw InputError("unknown multiplier tag");
}

/// Decomposition of p.p~ - p~.p~~ into multiplier-weighted subspace kernels
/// plus a bracket that vanishes exactly when the automatic orthogonality
/// condition holds. Each part carries its multiplier tag, so the report is
/// self-describing: lhs = sum over parts of apply_mul_tag(part).
template <class Scalar = double>
struct IdentityReport {
    GwPolynomial<Scalar> p;
    KernelPoly<Scalar> lhs;
    std::vector<IdentityPart<Scalar>> rhs_parts;
    Scalar residual = 0;    // relative sup norm of lhs minus the assembled sum
    Scalar bracket_sup = 0; // sup of the bracket terms, relative to sup lhs
};

template <class Scalar>
IdentityReport<Scalar> fundamental_identity(const MomentTable<Scalar>& table, int n, int m,
                                            Scalar pivot_tol = Scalar(1e-10)) {
    IdentityReport<Scalar> out;
    out.p = gw_polynomial(table, n, m, pivot_tol);
    out.lhs = outer(out.p.poly, out.p.poly) - outer(reflect(out.p.poly), reflect(out.p.poly));

    auto part = [&](const char* name, MulTag tag, NamedSubspace which) {
        return IdentityPart<Scalar>{name, tag, kernel_of_subspace(table, which, n, m, pivot_tol)};
    };
    out.rhs_parts.push_back(part("rperpdn", MulTag::one_minus_zz, NamedSubspace::r_perp_dn));
    out.rhs_parts.push_back(part("uperplt", MulTag::one_minus_ww, NamedSubspace::u_perp_lt));
    out.rhs_parts.push_back(part("sm", MulTag::both, NamedSubspace::sm));

    const auto k_ur_lt = kernel_of_subspace(table, NamedSubspace::ur_perp_lt, n, m, pivot_tol);
    const auto k_u_lt = out.rhs_parts[1].kernel;
    const auto k_ll_rt = kernel_of_subspace(table, NamedSubspace::ll_perp_rt, n, m, pivot_tol);
    const auto k_d_rt = kernel_of_subspace(table, NamedSubspace::d_perp_rt, n, m, pivot_tol);
    out.rhs_parts.push_back({"urperplt-uperplt", MulTag::none, k_ur_lt - k_u_lt});
    out.rhs_parts.push_back({"dperprt-llperprt", MulTag::none, k_d_rt - k_ll_rt});

    KernelPoly<Scalar> rhs(n, m);
    for (const auto& p : out.rhs_parts) rhs = rhs + apply_mul_tag(p);
    const Scalar scale = std::max(sup_coeff(out.lhs), std::numeric_limits<Scalar>::min());
    out.residual = (out.lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff() / scale;
    out.bracket_sup =
        sup_coeff(out.rhs_parts[3].kernel + out.rhs_parts[4].kernel) / scale;
    return out;
}

template <class Scalar>
IdentityReport<Scalar> fundamental_identity(const Measure<Scalar>& measure, int n, int m,
                                            const QuadratureOptions<Scalar>& opts = {}) {
    return fundamental_identity(moments(measure, n, m, opts), n, m);
}

template <class Scalar = double>
struct GwCheck {
    bool holds = false;
    Scalar deviation = 0;
};

/// The automatic orthogonality condition, as equality of two subspace
/// kernels; deviation is their relative sup-norm coefficient distance.
template <class Scalar>
GwCheck<Scalar> check_gw(const MomentTable<Scalar>& table, int n, int m,
                         Scalar tol = Scalar(1e-8)) {
    const auto k1 = kernel_of_subspace(table, NamedSubspace::ur_perp_lt, n, m);
    const auto k2 = kernel_of_subspace(table, NamedSubspace::u_perp_lt, n, m);
    GwCheck<Scalar> out;
    out.deviation = rel_residual(k1, k2);
    out.holds = out.deviation < tol;
    return out;
}

template <class Scalar>
GwCheck<Scalar> check_gw(const Measure<Scalar>& measure, int n, int m, Scalar tol = Scalar(1e-8),
                         const QuadratureOptions<Scalar>& opts = {}) {
    return check_gw(moments(measure, n, m, opts), n, m, tol);
}

/// The two Christoffel-Darboux lines. Line 1 pairs the bottom family with
/// the right one, line 2 the top family with the left one; both reproduce
/// the same left side when the orthogonality condition holds.
template <class Scalar = double>
struct CdDecomposition {
    GwPolynomial<Scalar> p;
    std::vector<BiPoly<Scalar>> a_down, b_right; // line 1
    std::vector<BiPoly<Scalar>> a_up, b_left;    // line 2
    Scalar residual_line1 = 0, residual_line2 = 0;
    Scalar cross_residual = 0; // the two assembled lines against each other
};

template <class Scalar>
CdDecomposition<Scalar> cd_decompose(const MomentTable<Scalar>& table, int n, int m,
                                     Scalar tol = Scalar(1e-8)) {
    const auto gw = check_gw(table, n, m, tol);
    if (!gw.holds) {
        std::ostringstream msg;
        msg << "the Christoffel-Darboux decomposition requires the automatic "
               "orthogonality condition; deviation = " << gw.deviation;
        throw GwConditionFailsError(msg.str());
    }
    CdDecomposition<Scalar> out;
    out.p = gw_polynomial(table, n, m);
    out.a_down = orthonormal_basis(table, resolve(NamedSubspace::r_perp_dn, n, m)).polys;
    out.b_right = orthonormal_basis(table, resolve(NamedSubspace::u_perp_rt, n, m)).polys;
    out.a_up = orthonormal_basis(table, resolve(NamedSubspace::r_perp_up, n, m)).polys;
    out.b_left = orthonormal_basis(table, resolve(NamedSubspace::u_perp_lt, n, m)).polys;

    const auto lhs =
        outer(out.p.poly, out.p.poly) - outer(reflect(out.p.poly), reflect(out.p.poly));
    auto assemble = [&](const std::vector<BiPoly<Scalar>>& a,
                        const std::vector<BiPoly<Scalar>>& b) {
        KernelPoly<Scalar> sum_a(n, m), sum_b(n, m);
        for (const auto& e : a) {
            const auto q = at_level(e, n, m);
            sum_a = sum_a + outer(q, q);
        }
        for (const auto& e : b) {
            const auto q = at_level(e, n, m);
            sum_b = sum_b + outer(q, q);
        }
        return mul_one_minus_zz(sum_a) + mul_one_minus_ww(sum_b);
    };
    const auto line1 = assemble(out.a_down, out.b_right);
    const auto line2 = assemble(out.a_up, out.b_left);
    out.residual_line1 = rel_residual(lhs, line1);
    out.residual_line2 = rel_residual(lhs, line2);
    out.cross_residual = rel_residual(line1, line2);
    return out;
}

template <class Scalar>
CdDecomposition<Scalar> cd_decompose(const Measure<Scalar>& measure, int n, int m,
                                     Scalar tol = Scalar(1e-8),
                                     const QuadratureOptions<Scalar>& opts = {}) {
    return cd_decompose(moments(measure, n, m, opts), n, m, tol);
}

template <class Scalar = double>
struct BsRoundtrip {
    bool gw_holds = false;
    Scalar gw_deviation = 0;
    bool p_stable = false;
    Scalar kernel_match = std::numeric_limits<Scalar>::infinity();
    GwPolynomial<Scalar> p;
};

/// Full round trip of the approximation theorem: extract p, test its
/// stability, rebuild the Bernstein-Szego measure of p, and compare moment
/// box kernels. For measures satisfying the orthogonality condition all
/// three reports come back clean; its failure shows up as a kernel mismatch.
template <class Scalar>
BsRoundtrip<Scalar> bs_roundtrip(const Measure<Scalar>& measure, int n, int m,
                                 Scalar tol = Scalar(1e-8),
                                 const QuadratureOptions<Scalar>& opts = {}) {
    const auto table = moments(measure, n, m, opts);
    BsRoundtrip<Scalar> out;
    const auto gw = check_gw(table, n, m, tol);
    out.gw_holds = gw.holds;
    out.gw_deviation = gw.deviation;
    out.p = gw_polynomial(table, n, m);
    out.p_stable = is_stable(out.p.poly, SweepGrid{}, opts).stable;
    if (!out.p_stable) return out;
    const auto mu = Measure<Scalar>::bernstein_szego(out.p.poly);
    const auto k_rho = kernel_of_span(table, IndexSet::box(n, m), n, m);
    const auto k_mu = kernel_of_span(moments(mu, n, m, opts), IndexSet::box(n, m), n, m);
    out.kernel_match = rel_residual(k_mu, k_rho);
    return out;
}

template <class Scalar = double>
struct ColeWermerResult {
    SosCertificate<Scalar> certificate; // for the dilated target
    Scalar residual = 0;                // identity residual of the certificate
    Scalar p_distance = 0;              // sup-norm coefficient distance |P - P_r|
    Scalar r = 1;
};

/// Two-family sum-of-squares decomposition of |P|^2 - |P~|^2 through the
/// Bernstein-Szego measure of the dilated polynomial P_r(z,w) = P(rz,rw).
/// For r = 1 the input must be stable; for r < 1 the caller asserts
/// zero-freeness on the open bidisk and the certificate is for P_r, with the
/// distance |P - P_r| reported as the limiting-quality indicator.
template <class Scalar>
ColeWermerResult<Scalar> cole_wermer(const BiPoly<Scalar>& p, int n, int m, Scalar r,
                                     const QuadratureOptions<Scalar>& opts = {}) {
    if (sup_coeff(p) == Scalar(0)) throw InputError("cole_wermer needs a nonzero polynomial");
    if (!(r > Scalar(0) && r <= Scalar(1))) throw InputError("r must lie in (0, 1]");
    const auto target = at_level(p, n, m);
    if (r == Scalar(1)) {
        const auto verdict = is_stable(target);
        if (!verdict.stable)
            throw NotStableError("r = 1 requires a polynomial with no zeros in the closed bidisk");
    }

    BiPoly<Scalar> dilated = target;
    QuadratureOptions<Scalar> eff = opts;
    if (r < Scalar(1)) {
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= m; ++k)
                dilated.at(j, k) *= std::pow(r, Scalar(j + k));
        // A dilated boundary zero leaves a density pinch of width ~(1-r)
        // along one torus diagonal; its aliasing decays like
        // exp(-(1-r)(N_theta+N_phi)), so a long thin grid reaches the same
        // accuracy at a small fraction of the square-grid cost.
        const Scalar eps = Scalar(1) - r;
        int aspect = 1;
        while (aspect < Scalar(0.9) / std::sqrt(eps) && aspect < 1024) aspect *= 2;
        eff.aspect_w = std::max(eff.aspect_w, aspect);
        eff.max_grid = std::max(eff.max_grid, eff.aspect_w * (1 << 13));
    }

    const auto raw = detail::bs_quadrature(dilated, n, m, eff);
    const auto gw = check_gw(raw.table, n, m, Scalar(1e-8));
    if (!gw.holds)
        throw InconclusiveError("orthogonality condition failed numerically for a "
                                "Bernstein-Szego measure");

    ColeWermerResult<Scalar> out;
    out.r = r;
    out.certificate.deg_z = n;
    out.certificate.deg_w = m;
    out.certificate.c = Scalar(1) / std::sqrt(raw.mass);
    out.certificate.target = dilated;
    out.certificate.a_polys =
        orthonormal_basis(raw.table, resolve(NamedSubspace::r_perp_dn, n, m)).polys;
    out.certificate.b_polys =
        orthonormal_basis(raw.table, resolve(NamedSubspace::u_perp_rt, n, m)).polys;
    out.residual = certificate_residual(out.certificate);
    out.p_distance = (target.coeffs() - dilated.coeffs()).cwiseAbs().maxCoeff();
    return out;
}

template <class Scalar = double>
struct GPolyCheck {
    KernelPoly<Scalar> g; // level (n, max(m-1,0)), polynomial in all four slots
    int w_degree = -1;
    Scalar residual = 0;
};

/// Divides q(z,w)conj(q(zeta,omega)) - (z.zeta~)^n q~(1/zeta~,w)conj(q~(1/z~,omega))
/// exactly by (1 - w.omega~) via the coefficient recursion. The quotient has
/// degree at most m-1 in both w-type slots; the division residual is
/// recomputed from scratch against the quotient.
template <class Scalar>
GPolyCheck<Scalar> g_polynomial_check(const BiPoly<Scalar>& q, Scalar tol = Scalar(1e-10)) {
    using C = ComplexT<Scalar>;
    const int n = q.deg_z(), m = q.deg_w();
    const auto& a = q.coeffs();

    // numerator tensor: N[j,k,l,s] = a_{j,k} conj(a_{l,s}) - a_{j,m-s} conj(a_{l,m-k})
    KernelPoly<Scalar> numer(n, m);
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= m; ++k)
            for (int l = 0; l <= n; ++l)
                for (int s = 0; s <= m; ++s)
                    numer.at(j, k, l, s) =
                        a(j, k) * std::conj(a(l, s)) - a(j, m - s) * std::conj(a(l, m - k));

    GPolyCheck<Scalar> out;
    out.g = KernelPoly<Scalar>(n, std::max(m - 1, 0));
    if (m == 0) {
        out.residual = sup_coeff(numer); // identically zero numerator
        return out;
    }
    for (int j = 0; j <= n; ++j)
        for (int l = 0; l <= n; ++l)
            for (int k = 0; k < m; ++k)
                for (int s = 0; s < m; ++s) {
                    C v = numer.at(j, k, l, s);
                    if (k > 0 && s > 0) v += out.g.at(j, k - 1, l, s - 1);
                    out.g.at(j, k, l, s) = v;
                }

    // residual of N - (1 - w.omega~) G over the full level-(n,m) window
    const Scalar scale = std::max(sup_coeff(numer), std::numeric_limits<Scalar>::min());
    Scalar worst = 0;
    for (int j = 0; j <= n; ++j)
        for (int l = 0; l <= n; ++l)
            for (int k = 0; k <= m; ++k)
                for (int s = 0; s <= m; ++s) {
                    C v = numer.at(j, k, l, s);
                    if (k < m && s < m) v -= out.g.at(j, k, l, s);
                    if (k > 0 && s > 0) v += out.g.at(j, k - 1, l, s - 1);
                    worst = std::max(worst, std::abs(v));
                }
    out.residual = worst / scale;
    if (out.residual > tol)
        throw NotDivisibleError("numerator is not divisible by (1 - w.omega~) at tolerance");

    const Scalar g_scale = sup_coeff(out.g);
    for (int k = m - 1; k >= 0 && out.w_degree < 0; --k)
        for (int j = 0; j <= n && out.w_degree < 0; ++j)
            for (int l = 0; l <= n && out.w_degree < 0; ++l)
                for (int s = 0; s < m && out.w_degree < 0; ++s)
                    if (std::abs(out.g.at(j, k, l, s)) > Scalar(1e-12) * g_scale ||
                        std::abs(out.g.at(j, s, l, k)) > Scalar(1e-12) * g_scale)
                        out.w_degree = k;
    return out;
}

} // namespace bidisk
