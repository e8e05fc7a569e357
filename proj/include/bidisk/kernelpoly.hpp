#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "bidisk/bipoly.hpp"
#include "bidisk/errors.hpp"

namespace bidisk {

/// Four-index coefficient tensor
///   K(z,w; zeta,omega) = sum c[j,k,l,s] z^j w^k conj(zeta)^l conj(omega)^s,
/// holomorphic in (z,w) and anti-holomorphic in (zeta,omega), stored as a
/// square matrix over the j-major monomial ordering: row = (j,k),
/// col = (l,s). A conjugate-symmetric tensor is exactly a self-adjoint
/// matrix in this layout.
template <class Scalar = double>
class KernelPoly {
public:
    using Complex = std::complex<Scalar>;
    using Mat = CoeffGrid<Scalar>;

    KernelPoly() : deg_z_(0), deg_w_(0), mat_(Mat::Zero(1, 1)) {}

    KernelPoly(int deg_z, int deg_w)
        : deg_z_(checked(deg_z)), deg_w_(checked(deg_w)),
          mat_(Mat::Zero(side(), side())) {}

    KernelPoly(int deg_z, int deg_w, Mat mat)
        : deg_z_(checked(deg_z)), deg_w_(checked(deg_w)), mat_(std::move(mat)) {
        if (mat_.rows() != side() || mat_.cols() != side())
            throw InputError("KernelPoly matrix does not match declared level");
    }

    int deg_z() const { return deg_z_; }
    int deg_w() const { return deg_w_; }
    int side() const { return (deg_z_ + 1) * (deg_w_ + 1); }

    int index(int j, int k) const { return j * (deg_w_ + 1) + k; }

    Complex& at(int j, int k, int l, int s) {
        check(j, k);
        check(l, s);
        return mat_(index(j, k), index(l, s));
    }
    const Complex& at(int j, int k, int l, int s) const {
        check(j, k);
        check(l, s);
        return mat_(index(j, k), index(l, s));
    }

    const Mat& matrix() const { return mat_; }
    Mat& matrix() { return mat_; }

private:
    static int checked(int d) {
        if (d < 0) throw InputError("kernel level must be nonnegative");
        return d;
    }
    void check(int j, int k) const {
        if (j < 0 || j > deg_z_ || k < 0 || k > deg_w_)
            throw InputError("kernel index outside declared level");
    }

    int deg_z_, deg_w_;
    Mat mat_;
};

template <class Scalar>
Scalar sup_coeff(const KernelPoly<Scalar>& k) {
    return k.matrix().cwiseAbs().maxCoeff();
}

template <class Scalar>
bool same_level(const KernelPoly<Scalar>& a, const KernelPoly<Scalar>& b) {
    return a.deg_z() == b.deg_z() && a.deg_w() == b.deg_w();
}

template <class Scalar>
KernelPoly<Scalar> operator+(const KernelPoly<Scalar>& a, const KernelPoly<Scalar>& b) {
    if (!same_level(a, b)) throw LevelMismatchError("kernel add requires equal levels");
    return KernelPoly<Scalar>(a.deg_z(), a.deg_w(), a.matrix() + b.matrix());
}

template <class Scalar>
KernelPoly<Scalar> operator-(const KernelPoly<Scalar>& a, const KernelPoly<Scalar>& b) {
    if (!same_level(a, b)) throw LevelMismatchError("kernel sub requires equal levels");
    return KernelPoly<Scalar>(a.deg_z(), a.deg_w(), a.matrix() - b.matrix());
}

template <class Scalar>
KernelPoly<Scalar> operator*(ComplexT<Scalar> c, const KernelPoly<Scalar>& k) {
    return KernelPoly<Scalar>(k.deg_z(), k.deg_w(), (c * k.matrix()).eval());
}

template <class Scalar>
KernelPoly<Scalar> operator*(Scalar c, const KernelPoly<Scalar>& k) {
    return ComplexT<Scalar>(c) * k;
}

/// Rank-one tensor p(z,w) * conj(q(zeta,omega)); Hermitian when p == q.
template <class Scalar>
KernelPoly<Scalar> outer(const BiPoly<Scalar>& p, const BiPoly<Scalar>& q) {
    if (p.deg_z() != q.deg_z() || p.deg_w() != q.deg_w())
        throw LevelMismatchError("outer requires equal declared levels");
    const int n = p.deg_z(), m = p.deg_w();
    KernelPoly<Scalar> out(n, m);
    Eigen::Matrix<ComplexT<Scalar>, Eigen::Dynamic, 1> vp(out.side()), vq(out.side());
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= m; ++k) {
            vp(out.index(j, k)) = p.coeffs()(j, k);
            vq(out.index(j, k)) = q.coeffs()(j, k);
        }
    out.matrix() = vp * vq.adjoint();
    return out;
}

/// Double reflection at the declared level: c[j,k,l,s] -> c[n-l,m-s,n-j,m-k]
/// (a pure reindexing, no conjugation). Involutive. Under the j-major
/// layout this is reverse-both-axes followed by transpose.
template <class Scalar>
KernelPoly<Scalar> double_reflect(const KernelPoly<Scalar>& k) {
    return KernelPoly<Scalar>(k.deg_z(), k.deg_w(),
                              k.matrix().reverse().transpose().eval());
}

/// Full tensor contraction against (z,w) and conj(zeta,omega).
template <class Scalar>
ComplexT<Scalar> kernel_eval(const KernelPoly<Scalar>& k, const PointPair<Scalar>& pts) {
    using C = ComplexT<Scalar>;
    Eigen::Matrix<C, Eigen::Dynamic, 1> vzw(k.side()), vzo(k.side());
    for (int j = 0; j <= k.deg_z(); ++j)
        for (int kk = 0; kk <= k.deg_w(); ++kk) {
            vzw(k.index(j, kk)) = std::pow(pts.z, j) * std::pow(pts.w, kk);
            vzo(k.index(j, kk)) = std::pow(pts.zeta, j) * std::pow(pts.omega, kk);
        }
    return (vzw.transpose() * k.matrix() * vzo.conjugate())(0, 0);
}

/// Evaluate on the diagonal (zeta,omega) = (z,w). The result of a Hermitian
/// tensor is real; a residual imaginary part above tol (relative to the
/// coefficient scale) raises NonHermitian.
template <class Scalar>
Scalar diag_eval(const KernelPoly<Scalar>& k, ComplexT<Scalar> z, ComplexT<Scalar> w,
                 Scalar tol = Scalar(1e-10)) {
    const auto v = kernel_eval(k, PointPair<Scalar>{z, w, z, w});
    const Scalar scale = std::max(sup_coeff(k), Scalar(1));
    if (std::abs(v.imag()) > tol * scale)
        throw NonHermitianError("diagonal evaluation has non-real value");
    return v.real();
}

template <class Scalar>
bool is_hermitian(const KernelPoly<Scalar>& k, Scalar tol = Scalar(1e-12)) {
    const Scalar scale = std::max(sup_coeff(k), Scalar(1));
    return (k.matrix() - k.matrix().adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

enum class VarAxis { z, w };

namespace detail {

template <class Scalar>
void require_headroom(const KernelPoly<Scalar>& k, VarAxis axis) {
    const int n = k.deg_z(), m = k.deg_w();
    for (int j = 0; j <= n; ++j)
        for (int kk = 0; kk <= m; ++kk)
            for (int l = 0; l <= n; ++l)
                for (int s = 0; s <= m; ++s) {
                    const bool top = axis == VarAxis::z ? (j == n || l == n)
                                                        : (kk == m || s == m);
                    if (top && k.at(j, kk, l, s) != ComplexT<Scalar>(0))
                        throw HeadroomOverflowError("kernel shift has no degree headroom");
                }
}

} // namespace detail

/// Tensor shift implementing multiplication by z*conj(zeta) (axis z) or
/// w*conj(omega) (axis w) within the declared level. Requires one index of
/// headroom: the top-degree coefficients must vanish.
template <class Scalar>
KernelPoly<Scalar> shift_kernel(const KernelPoly<Scalar>& k, VarAxis axis) {
    detail::require_headroom(k, axis);
    const int n = k.deg_z(), m = k.deg_w();
    KernelPoly<Scalar> out(n, m);
    if (axis == VarAxis::z) {
        for (int j = 0; j < n; ++j)
            for (int kk = 0; kk <= m; ++kk)
                for (int l = 0; l < n; ++l)
                    for (int s = 0; s <= m; ++s)
                        out.at(j + 1, kk, l + 1, s) = k.at(j, kk, l, s);
    } else {
        for (int j = 0; j <= n; ++j)
            for (int kk = 0; kk < m; ++kk)
                for (int l = 0; l <= n; ++l)
                    for (int s = 0; s < m; ++s)
                        out.at(j, kk + 1, l, s + 1) = k.at(j, kk, l, s);
    }
    return out;
}

/// (1 - z*conj(zeta)) * K, as K minus its z-shift.
template <class Scalar>
KernelPoly<Scalar> mul_one_minus_zz(const KernelPoly<Scalar>& k) {
    return k - shift_kernel(k, VarAxis::z);
}

/// (1 - w*conj(omega)) * K, as K minus its w-shift.
template <class Scalar>
KernelPoly<Scalar> mul_one_minus_ww(const KernelPoly<Scalar>& k) {
    return k - shift_kernel(k, VarAxis::w);
}

/// Relative sup-norm coefficient distance: sup|A-B| over the larger of the
/// two coefficient scales; zero when both tensors vanish.
template <class Scalar>
Scalar rel_residual(const KernelPoly<Scalar>& a, const KernelPoly<Scalar>& b) {
    if (!same_level(a, b)) throw LevelMismatchError("residual requires equal levels");
    const Scalar diff = (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
    const Scalar scale = std::max(sup_coeff(a), sup_coeff(b));
    if (scale == Scalar(0)) return Scalar(0);
    return diff / scale;
}

} // namespace bidisk
