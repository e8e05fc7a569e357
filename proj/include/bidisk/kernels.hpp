#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "bidisk/bipoly.hpp"
#include "bidisk/errors.hpp"
#include "bidisk/kernelpoly.hpp"
#include "bidisk/measures.hpp"

namespace bidisk {

using Index2 = std::pair<int, int>;

/// Finite set of monomial exponents (j,k), kept sorted in j-major order.
class IndexSet {
public:
    IndexSet() = default;

    explicit IndexSet(std::vector<Index2> elems) : elems_(std::move(elems)) {
        for (const auto& [j, k] : elems_)
            if (j < 0 || k < 0) throw InputError("monomial indices must be nonnegative");
        std::sort(elems_.begin(), elems_.end());
        elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
    }

    static IndexSet rectangle(int j_lo, int j_hi, int k_lo, int k_hi) {
        std::vector<Index2> e;
        for (int j = j_lo; j <= j_hi; ++j)
            for (int k = k_lo; k <= k_hi; ++k) e.emplace_back(j, k);
        return IndexSet(std::move(e));
    }

    static IndexSet box(int deg_z, int deg_w) { return rectangle(0, deg_z, 0, deg_w); }

    bool contains(Index2 idx) const {
        return std::binary_search(elems_.begin(), elems_.end(), idx);
    }

    bool subset_of(const IndexSet& other) const {
        return std::includes(other.elems_.begin(), other.elems_.end(),
                             elems_.begin(), elems_.end());
    }

    IndexSet without(Index2 idx) const {
        std::vector<Index2> e;
        e.reserve(elems_.size());
        for (const auto& t : elems_)
            if (t != idx) e.push_back(t);
        return IndexSet(std::move(e));
    }

    /// Image under (j,k) -> (n-j, m-k); all indices must fit the level.
    IndexSet reflected(int deg_z, int deg_w) const {
        std::vector<Index2> e;
        e.reserve(elems_.size());
        for (const auto& [j, k] : elems_) {
            if (j > deg_z || k > deg_w)
                throw InputError("index set does not fit the reflection level");
            e.emplace_back(deg_z - j, deg_w - k);
        }
        return IndexSet(std::move(e));
    }

    int max_deg_z() const {
        int d = 0;
        for (const auto& [j, k] : elems_) d = std::max(d, j);
        return d;
    }
    int max_deg_w() const {
        int d = 0;
        for (const auto& [j, k] : elems_) d = std::max(d, k);
        return d;
    }

    bool empty() const { return elems_.empty(); }
    int size() const { return static_cast<int>(elems_.size()); }
    const std::vector<Index2>& elems() const { return elems_; }

private:
    std::vector<Index2> elems_;
};

/// The subspace span(S) minus-perp span(T): all members of span(S)
/// orthogonal to span(T) under the measure at hand. Requires T subset S.
struct SubspaceSpec {
    IndexSet span;
    IndexSet perp;

    void validate() const {
        if (!perp.subset_of(span))
            throw BadSpecError("perp index set must be contained in the span");
    }

    SubspaceSpec reflected(int deg_z, int deg_w) const {
        return SubspaceSpec{span.reflected(deg_z, deg_w), perp.reflected(deg_z, deg_w)};
    }
};

/// The named subspaces of the degree-(n,m) monomial box used by the kernel
/// identities. Each resolves to an explicit SubspaceSpec at a given level.
enum class NamedSubspace {
    box,       // full box, no orthogonality constraint
    ll_perp,   // box members orthogonal to everything but the constant
    ur_perp,   // box members orthogonal to everything but the top corner
    r_perp_dn, // right-trimmed box minus-perp its bottom part
    r_perp_up, // right-trimmed box minus-perp its top part
    u_perp_lt, // top-trimmed box minus-perp its left part
    u_perp_rt, // top-trimmed box minus-perp its right part
    ur_perp_lt,// corner-punctured box minus-perp the right-trimmed box
    ll_perp_rt,// corner-punctured box minus-perp the left-shifted box
    d_perp_rt, // bottom-trimmed box minus-perp its right part
    sm         // the small box, no orthogonality constraint
};

inline SubspaceSpec resolve(NamedSubspace which, int n, int m) {
    const IndexSet box = IndexSet::box(n, m);
    switch (which) {
        case NamedSubspace::box:
            return {box, IndexSet{}};
        case NamedSubspace::ll_perp:
            return {box, box.without({0, 0})};
        case NamedSubspace::ur_perp:
            return {box, box.without({n, m})};
        case NamedSubspace::r_perp_dn:
            return {IndexSet::rectangle(0, n - 1, 0, m), IndexSet::rectangle(0, n - 1, 0, m - 1)};
        case NamedSubspace::r_perp_up:
            return {IndexSet::rectangle(0, n - 1, 0, m), IndexSet::rectangle(0, n - 1, 1, m)};
        case NamedSubspace::u_perp_lt:
            return {IndexSet::rectangle(0, n, 0, m - 1), IndexSet::rectangle(0, n - 1, 0, m - 1)};
        case NamedSubspace::u_perp_rt:
            return {IndexSet::rectangle(0, n, 0, m - 1), IndexSet::rectangle(1, n, 0, m - 1)};
        case NamedSubspace::ur_perp_lt:
            return {box.without({n, m}), IndexSet::rectangle(0, n - 1, 0, m)};
        case NamedSubspace::ll_perp_rt:
            return {box.without({0, 0}), IndexSet::rectangle(1, n, 0, m)};
        case NamedSubspace::d_perp_rt:
            return {IndexSet::rectangle(0, n, 1, m), IndexSet::rectangle(1, n, 1, m)};
        case NamedSubspace::sm:
            return {IndexSet::rectangle(0, n - 1, 0, m - 1), IndexSet{}};
    }
    throw InputError("unknown named subspace");
}

inline const char* subspace_name(NamedSubspace which) {
    switch (which) {
        case NamedSubspace::box: return "box";
        case NamedSubspace::ll_perp: return "llperp";
        case NamedSubspace::ur_perp: return "urperp";
        case NamedSubspace::r_perp_dn: return "rperpdn";
        case NamedSubspace::r_perp_up: return "rperpup";
        case NamedSubspace::u_perp_lt: return "uperplt";
        case NamedSubspace::u_perp_rt: return "uperprt";
        case NamedSubspace::ur_perp_lt: return "urperplt";
        case NamedSubspace::ll_perp_rt: return "llperprt";
        case NamedSubspace::d_perp_rt: return "dperprt";
        case NamedSubspace::sm: return "sm";
    }
    return "?";
}

inline NamedSubspace parse_subspace_name(const std::string& name) {
    for (NamedSubspace ns : {NamedSubspace::box, NamedSubspace::ll_perp, NamedSubspace::ur_perp,
                             NamedSubspace::r_perp_dn, NamedSubspace::r_perp_up,
                             NamedSubspace::u_perp_lt, NamedSubspace::u_perp_rt,
                             NamedSubspace::ur_perp_lt, NamedSubspace::ll_perp_rt,
                             NamedSubspace::d_perp_rt, NamedSubspace::sm})
        if (name == subspace_name(ns)) return ns;
    throw InputError("unknown subspace name: " + name);
}

/// Ordered list of polynomials orthonormal under the originating measure.
template <class Scalar = double>
struct OrthoBasis {
    std::vector<BiPoly<Scalar>> polys;

    int size() const { return static_cast<int>(polys.size()); }
};

namespace detail {

template <class Scalar>
Eigen::LLT<CoeffGrid<Scalar>> cholesky_or_throw(const CoeffGrid<Scalar>& g, Scalar tol,
                                                const char* what) {
    Eigen::LLT<CoeffGrid<Scalar>> llt(g);
    if (llt.info() != Eigen::Success)
        throw DegenerateError(std::string("Gram matrix is not positive definite in ") + what);
    const Scalar max_diag = g.diagonal().real().maxCoeff();
    const auto l_diag = llt.matrixLLT().diagonal().real();
    if ((l_diag.array() * l_diag.array()).minCoeff() <= tol * max_diag)
        throw DegenerateError(std::string("Cholesky pivot below tolerance in ") + what);
    return llt;
}

} // namespace detail

/// Orthonormal basis of the subspace: each free monomial (span minus perp,
/// j-major order) is projected off span(perp) via a Gram solve, and the
/// projected family is orthonormalized by an unpivoted Cholesky of its Gram,
/// which fixes both order and phases. Polynomials are emitted at the tight
/// level of the span's bounding box.
template <class Scalar>
OrthoBasis<Scalar> orthonormal_basis(const MomentTable<Scalar>& table, const SubspaceSpec& spec,
                                     Scalar pivot_tol = Scalar(1e-10)) {
    using C = ComplexT<Scalar>;
    spec.validate();
    OrthoBasis<Scalar> out;
    std::vector<Index2> free;
    for (const auto& idx : spec.span.elems())
        if (!spec.perp.contains(idx)) free.push_back(idx);
    if (free.empty()) return out;

    const int bz = spec.span.max_deg_z(), bw = spec.span.max_deg_w();
    const int nfree = static_cast<int>(free.size());
    std::vector<BiPoly<Scalar>> projected;
    projected.reserve(nfree);

    if (spec.perp.empty()) {
        for (const auto& [j, k] : free)
            projected.push_back(BiPoly<Scalar>::monomial(j, k, bz, bw));
    } else {
        const auto& perp_idx = spec.perp.elems();
        const auto g_pp = gram(table, perp_idx);
        const auto llt = detail::cholesky_or_throw(g_pp.entries, pivot_tol, "orthonormal_basis");
        for (const auto& [j, k] : free) {
            Eigen::Matrix<C, Eigen::Dynamic, 1> y(spec.perp.size());
            for (int t = 0; t < spec.perp.size(); ++t)
                y(t) = table.at(j - perp_idx[t].first, k - perp_idx[t].second);
            // <u, v_t> = 0 for u = v_f - sum alpha_t v_t requires
            // G^T alpha = y, i.e. G conj(alpha) = conj(y).
            Eigen::Matrix<C, Eigen::Dynamic, 1> alpha = llt.solve(y.conjugate()).conjugate();
            BiPoly<Scalar> u = BiPoly<Scalar>::monomial(j, k, bz, bw);
            for (int t = 0; t < spec.perp.size(); ++t)
                u.at(perp_idx[t].first, perp_idx[t].second) -= alpha(t);
            projected.push_back(std::move(u));
        }
    }

    CoeffGrid<Scalar> h(nfree, nfree);
    for (int r = 0; r < nfree; ++r)
        for (int c = 0; c < nfree; ++c)
            h(r, c) = inner_product(table, projected[r], projected[c]);
    const auto llt_h = detail::cholesky_or_throw(h, pivot_tol, "orthonormal_basis");
    // Coordinate vectors pair as a^T H conj(b), so with H = L L^* the
    // orthonormalizing coordinates are the columns of L^{-T} (upper
    // triangular with positive diagonal, which fixes order and phases).
    CoeffGrid<Scalar> coords = llt_h.matrixL()
                                   .transpose()
                                   .solve(CoeffGrid<Scalar>::Identity(nfree, nfree));
    out.polys.reserve(nfree);
    for (int i = 0; i < nfree; ++i) {
        BiPoly<Scalar> e(bz, bw);
        for (int f = 0; f <= i; ++f) e = e + coords(f, i) * projected[f];
        out.polys.push_back(std::move(e));
    }
    return out;
}

/// Reproducing kernel of span(S): v(z,w)^T G^{-1}-transpose conj(v(zeta,omega))
/// in tensor form, cross-checked against the orthonormal-basis (Bergman)
/// construction. The tensor is emitted at the given level with entries only
/// on S x S.
template <class Scalar>
KernelPoly<Scalar> kernel_of_span(const MomentTable<Scalar>& table, const IndexSet& span,
                                  int deg_z, int deg_w, Scalar pivot_tol = Scalar(1e-10),
                                  Scalar cross_tol = Scalar(1e-8)) {
    KernelPoly<Scalar> out(deg_z, deg_w);
    if (span.empty()) return out;
    if (span.max_deg_z() > deg_z || span.max_deg_w() > deg_w)
        throw BadSpecError("index set does not fit the requested kernel level");

    const auto& idx = span.elems();
    const auto g = gram(table, idx);
    const auto llt = detail::cholesky_or_throw(g.entries, pivot_tol, "kernel_of_span");
    CoeffGrid<Scalar> inv = llt.solve(CoeffGrid<Scalar>::Identity(span.size(), span.size()));
    for (int r = 0; r < span.size(); ++r)
        for (int c = 0; c < span.size(); ++c)
            out.at(idx[r].first, idx[r].second, idx[c].first, idx[c].second) = inv(c, r);

    // Bergman identity route; the two constructions must agree.
    const auto basis = orthonormal_basis(table, SubspaceSpec{span, IndexSet{}}, pivot_tol);
    KernelPoly<Scalar> bergman(deg_z, deg_w);
    for (const auto& e : basis.polys) bergman = bergman + outer(at_level(e, deg_z, deg_w),
                                                                at_level(e, deg_z, deg_w));
    if (rel_residual(out, bergman) > cross_tol)
        throw InconclusiveError("Gram-inverse and Bergman kernels disagree");
    return out;
}

/// Kernel of a relative orthocomplement: K(span) - K(perp).
template <class Scalar>
KernelPoly<Scalar> kernel_of_subspace(const MomentTable<Scalar>& table, const SubspaceSpec& spec,
                                      int deg_z, int deg_w, Scalar pivot_tol = Scalar(1e-10)) {
    spec.validate();
    return kernel_of_span(table, spec.span, deg_z, deg_w, pivot_tol) -
           kernel_of_span(table, spec.perp, deg_z, deg_w, pivot_tol);
}

template <class Scalar>
KernelPoly<Scalar> kernel_of_subspace(const MomentTable<Scalar>& table, NamedSubspace which,
                                      int deg_z, int deg_w, Scalar pivot_tol = Scalar(1e-10)) {
    return kernel_of_subspace(table, resolve(which, deg_z, deg_w), deg_z, deg_w, pivot_tol);
}

/// Kernel of the shifted subspace z*V (or w*V), which is the tensor shift of
/// the kernel of V.
template <class Scalar>
KernelPoly<Scalar> shifted_kernel(const KernelPoly<Scalar>& k, VarAxis axis) {
    return shift_kernel(k, axis);
}

/// Residual of the reflection identity: the kernel of the reflected
/// subspace against the double reflection of the original kernel.
template <class Scalar>
Scalar reflected_subspace_kernel_check(const MomentTable<Scalar>& table, const SubspaceSpec& spec,
                                       int deg_z, int deg_w, Scalar pivot_tol = Scalar(1e-10)) {
    const auto k = kernel_of_subspace(table, spec, deg_z, deg_w, pivot_tol);
    const auto k_reflected =
        kernel_of_subspace(table, spec.reflected(deg_z, deg_w), deg_z, deg_w, pivot_tol);
    return rel_residual(k_reflected, double_reflect(k));
}

template <class Scalar = double>
struct GwPolynomial {
    BiPoly<Scalar> poly;
    // set when the constant term was too small to fix the phase, in which
    // case the first nonzero coefficient in j-major order is made positive
    bool phase_fallback = false;
};

/// The distinguished unit-norm polynomial spanning the one-dimensional
/// subspace of box members orthogonal to every nonconstant monomial,
/// phase-normalized so its value at the origin is real and positive.
template <class Scalar>
GwPolynomial<Scalar> gw_polynomial(const MomentTable<Scalar>& table, int deg_z, int deg_w,
                                   Scalar pivot_tol = Scalar(1e-10)) {
    const auto basis =
        orthonormal_basis(table, resolve(NamedSubspace::ll_perp, deg_z, deg_w), pivot_tol);
    if (basis.size() != 1)
        throw DegenerateError("distinguished subspace is not one-dimensional");
    GwPolynomial<Scalar> out;
    out.poly = basis.polys[0];
    const auto p00 = out.poly.at(0, 0);
    const Scalar norm = out.poly.coeffs().norm();
    if (std::abs(p00) >= Scalar(1e-10) * norm) {
        out.poly = (std::conj(p00) / std::abs(p00)) * out.poly;
        out.poly.at(0, 0) = ComplexT<Scalar>(std::abs(p00));
        return out;
    }
    out.phase_fallback = true;
    for (int j = 0; j <= deg_z; ++j)
        for (int k = 0; k <= deg_w; ++k) {
            const auto a = out.poly.at(j, k);
            if (std::abs(a) > Scalar(1e-10) * norm) {
                out.poly = (std::conj(a) / std::abs(a)) * out.poly;
                out.poly.at(j, k) = ComplexT<Scalar>(std::abs(a));
                return out;
            }
        }
    throw DegenerateError("distinguished polynomial has no usable phase reference");
}

// Measure-level conveniences: build the moment table on the level window.

template <class Scalar>
KernelPoly<Scalar> kernel_of_span(const Measure<Scalar>& measure, const IndexSet& span,
                                  int deg_z, int deg_w,
                                  const QuadratureOptions<Scalar>& opts = {}) {
    return kernel_of_span(moments(measure, deg_z, deg_w, opts), span, deg_z, deg_w);
}

template <class Scalar>
KernelPoly<Scalar> kernel_of_subspace(const Measure<Scalar>& measure, const SubspaceSpec& spec,
                                      int deg_z, int deg_w,
                                      const QuadratureOptions<Scalar>& opts = {}) {
    return kernel_of_subspace(moments(measure, deg_z, deg_w, opts), spec, deg_z, deg_w);
}

template <class Scalar>
OrthoBasis<Scalar> orthonormal_basis(const Measure<Scalar>& measure, const SubspaceSpec& spec,
                                     int deg_z, int deg_w,
                                     const QuadratureOptions<Scalar>& opts = {}) {
    return orthonormal_basis(moments(measure, deg_z, deg_w, opts), spec);
}

template <class Scalar>
GwPolynomial<Scalar> gw_polynomial(const Measure<Scalar>& measure, int deg_z, int deg_w,
                                   const QuadratureOptions<Scalar>& opts = {}) {
    return gw_polynomial(moments(measure, deg_z, deg_w, opts), deg_z, deg_w);
}

} // namespace bidisk
