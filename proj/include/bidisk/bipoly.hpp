#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "bidisk/errors.hpp"

namespace bidisk {

template <class Scalar>
using ComplexT = std::complex<Scalar>;

template <class Scalar>
using CoeffGrid = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Bivariate polynomial sum_{j,k} a_{j,k} z^j w^k with an explicitly declared
/// degree (deg_z, deg_w). The declared degree is part of the object's
/// identity: reflection happens at the declared level, so the constant 1 at
/// level (1,1) and at level (0,0) are different objects. Coefficients are
/// stored on the full (deg_z+1) x (deg_w+1) grid; the j-major linearization
/// index(j,k) = j*(deg_w+1)+k is used everywhere, including file formats.
template <class Scalar = double>
class BiPoly {
public:
    using Complex = std::complex<Scalar>;
    using Grid = CoeffGrid<Scalar>;

    BiPoly() : coeffs_(Grid::Zero(1, 1)) {}

    BiPoly(int deg_z, int deg_w) : coeffs_(Grid::Zero(checked(deg_z) + 1, checked(deg_w) + 1)) {}

    BiPoly(int deg_z, int deg_w, Grid coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.rows() != deg_z + 1 || coeffs_.cols() != deg_w + 1)
            throw InputError("BiPoly coefficient grid does not match declared degree");
    }

    static BiPoly constant(Complex value, int deg_z = 0, int deg_w = 0) {
        BiPoly p(deg_z, deg_w);
        p.coeffs_(0, 0) = value;
        return p;
    }

    static BiPoly monomial(int j, int k, int deg_z, int deg_w, Complex value = Complex(1)) {
        BiPoly p(deg_z, deg_w);
        p.at(j, k) = value;
        return p;
    }

    int deg_z() const { return static_cast<int>(coeffs_.rows()) - 1; }
    int deg_w() const { return static_cast<int>(coeffs_.cols()) - 1; }

    Complex& at(int j, int k) {
        check_index(j, k);
        return coeffs_(j, k);
    }
    const Complex& at(int j, int k) const {
        check_index(j, k);
        return coeffs_(j, k);
    }

    const Grid& coeffs() const { return coeffs_; }
    Grid& coeffs() { return coeffs_; }

private:
    static int checked(int d) {
        if (d < 0) throw InputError("polynomial degree must be nonnegative");
        return d;
    }
    void check_index(int j, int k) const {
        if (j < 0 || j > deg_z() || k < 0 || k > deg_w())
            throw InputError("coefficient index outside declared degree grid");
    }

    Grid coeffs_;
};

/// Evaluation point (z,w) paired with the conjugated point (zeta,omega) a
/// kernel polynomial is evaluated against.
template <class Scalar = double>
struct PointPair {
    std::complex<Scalar> z, w, zeta, omega;
};

template <class Scalar>
Scalar sup_coeff(const BiPoly<Scalar>& p) {
    return p.coeffs().cwiseAbs().maxCoeff();
}

/// Horner evaluation, outer loop in z, inner in w.
template <class Scalar>
ComplexT<Scalar> eval(const BiPoly<Scalar>& p, ComplexT<Scalar> z, ComplexT<Scalar> w) {
    const auto& a = p.coeffs();
    ComplexT<Scalar> acc(0);
    for (int j = p.deg_z(); j >= 0; --j) {
        ComplexT<Scalar> row(0);
        for (int k = p.deg_w(); k >= 0; --k) row = row * w + a(j, k);
        acc = acc * z + row;
    }
    return acc;
}

template <class Scalar>
ComplexT<Scalar> eval(const BiPoly<Scalar>& p, const std::pair<ComplexT<Scalar>, ComplexT<Scalar>>& zw) {
    return eval(p, zw.first, zw.second);
}

/// Reflection at the declared level: a_{j,k} -> conj(a_{n-j,m-k}).
/// On the torus |reflect(p)| = |p|; applying it twice is the identity.
template <class Scalar>
BiPoly<Scalar> reflect(const BiPoly<Scalar>& p) {
    return BiPoly<Scalar>(p.deg_z(), p.deg_w(), p.coeffs().reverse().conjugate());
}

/// Re-declare p at a (weakly) larger level, zero-padding the grid.
template <class Scalar>
BiPoly<Scalar> at_level(const BiPoly<Scalar>& p, int deg_z, int deg_w) {
    if (deg_z < p.deg_z() || deg_w < p.deg_w())
        throw LevelMismatchError("cannot re-declare a polynomial at a smaller level");
    BiPoly<Scalar> out(deg_z, deg_w);
    out.coeffs().topLeftCorner(p.deg_z() + 1, p.deg_w() + 1) = p.coeffs();
    return out;
}

template <class Scalar>
BiPoly<Scalar> operator+(const BiPoly<Scalar>& a, const BiPoly<Scalar>& b) {
    if (a.deg_z() != b.deg_z() || a.deg_w() != b.deg_w())
        throw LevelMismatchError("add requires equal declared levels");
    return BiPoly<Scalar>(a.deg_z(), a.deg_w(), a.coeffs() + b.coeffs());
}

template <class Scalar>
BiPoly<Scalar> operator-(const BiPoly<Scalar>& a, const BiPoly<Scalar>& b) {
    if (a.deg_z() != b.deg_z() || a.deg_w() != b.deg_w())
        throw LevelMismatchError("sub requires equal declared levels");
    return BiPoly<Scalar>(a.deg_z(), a.deg_w(), a.coeffs() - b.coeffs());
}

template <class Scalar>
BiPoly<Scalar> operator*(ComplexT<Scalar> c, const BiPoly<Scalar>& p) {
    return BiPoly<Scalar>(p.deg_z(), p.deg_w(), (c * p.coeffs()).eval());
}

template <class Scalar>
BiPoly<Scalar> operator*(Scalar c, const BiPoly<Scalar>& p) {
    return ComplexT<Scalar>(c) * p;
}

/// Product re-levels to the sum of the declared degrees.
template <class Scalar>
BiPoly<Scalar> operator*(const BiPoly<Scalar>& a, const BiPoly<Scalar>& b) {
    BiPoly<Scalar> out(a.deg_z() + b.deg_z(), a.deg_w() + b.deg_w());
    for (int j1 = 0; j1 <= a.deg_z(); ++j1)
        for (int k1 = 0; k1 <= a.deg_w(); ++k1) {
            const auto c1 = a.coeffs()(j1, k1);
            if (c1 == ComplexT<Scalar>(0)) continue;
            for (int j2 = 0; j2 <= b.deg_z(); ++j2)
                for (int k2 = 0; k2 <= b.deg_w(); ++k2)
                    out.coeffs()(j1 + j2, k1 + k2) += c1 * b.coeffs()(j2, k2);
        }
    return out;
}

enum class SliceAxis {
    fix_z, // substitute z, leaving a univariate polynomial in w
    fix_w  // substitute w, leaving a univariate polynomial in z
};

/// Coefficients of the univariate slice polynomial, ascending degree.
template <class Scalar>
std::vector<ComplexT<Scalar>> slice_coeffs(const BiPoly<Scalar>& p, SliceAxis axis,
                                           ComplexT<Scalar> value) {
    std::vector<ComplexT<Scalar>> out;
    if (axis == SliceAxis::fix_z) {
        out.resize(p.deg_w() + 1);
        for (int k = 0; k <= p.deg_w(); ++k) {
            ComplexT<Scalar> acc(0);
            for (int j = p.deg_z(); j >= 0; --j) acc = acc * value + p.coeffs()(j, k);
            out[k] = acc;
        }
    } else {
        out.resize(p.deg_z() + 1);
        for (int j = 0; j <= p.deg_z(); ++j) {
            ComplexT<Scalar> acc(0);
            for (int k = p.deg_w(); k >= 0; --k) acc = acc * value + p.coeffs()(j, k);
            out[j] = acc;
        }
    }
    return out;
}

namespace detail {

// Parlett-Reinsch style diagonal balancing with power-of-two scale factors,
// so the scaling itself is exact in floating point.
template <class Scalar>
void balance_companion(CoeffGrid<Scalar>& m) {
    const int dim = static_cast<int>(m.rows());
    const Scalar gamma = Scalar(0.9);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < dim; ++i) {
            const Scalar row_norm = m.row(i).template lpNorm<1>();
            const Scalar col_norm = m.col(i).template lpNorm<1>();
            if (row_norm == Scalar(0) || col_norm == Scalar(0)) continue;
            int exponent = 0;
            std::frexp(static_cast<double>(row_norm / col_norm), &exponent);
            exponent /= 2;
            if (exponent == 0) continue;
            const Scalar scaled_col = std::ldexp(static_cast<double>(col_norm), exponent);
            const Scalar scaled_row = std::ldexp(static_cast<double>(row_norm), -exponent);
            if (scaled_col + scaled_row < gamma * (col_norm + row_norm)) {
                const Scalar up = std::ldexp(1.0, exponent);
                const Scalar down = std::ldexp(1.0, -exponent);
                m.row(i) *= down;
                m.col(i) *= up;
                changed = true;
            }
        }
    }
}

template <class Scalar>
std::vector<ComplexT<Scalar>> univariate_roots(std::vector<ComplexT<Scalar>> c, Scalar trim_rel_tol) {
    Scalar scale = 0;
    for (const auto& v : c) scale = std::max(scale, std::abs(v));
    if (scale == Scalar(0)) throw ZeroSliceError("slice polynomial is identically zero");
    // degree drops at slice boundaries are expected; trim leading coefficients
    while (c.size() > 1 && std::abs(c.back()) <= trim_rel_tol * scale) c.pop_back();
    const int degree = static_cast<int>(c.size()) - 1;
    std::vector<ComplexT<Scalar>> roots;
    if (degree == 0) return roots;
    CoeffGrid<Scalar> companion = CoeffGrid<Scalar>::Zero(degree, degree);
    for (int i = 0; i + 1 < degree; ++i) companion(i + 1, i) = ComplexT<Scalar>(1);
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -c[i] / c[degree];
    balance_companion(companion);
    Eigen::ComplexEigenSolver<CoeffGrid<Scalar>> solver(companion, /*computeEigenvectors=*/false);
    roots.reserve(degree);
    for (int i = 0; i < degree; ++i) roots.push_back(solver.eigenvalues()(i));
    return roots;
}

} // namespace detail

/// All roots (with multiplicity) of the univariate polynomial obtained by
/// fixing one variable, via a balanced companion matrix. Throws ZeroSlice if
/// the slice vanishes identically.
template <class Scalar>
std::vector<ComplexT<Scalar>> slice_roots(const BiPoly<Scalar>& p, SliceAxis axis,
                                          ComplexT<Scalar> value,
                                          Scalar trim_rel_tol = Scalar(1e-12)) {
    return detail::univariate_roots(slice_coeffs(p, axis, value), trim_rel_tol);
}

} // namespace bidisk
