#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "bidisk/bipoly.hpp"
#include "bidisk/errors.hpp"
#include "bidisk/kernelpoly.hpp"

namespace bidisk {

/// Sum-of-squares witness for |q|^2 - |reflect(q)|^2 at level (n,m):
///   |q|^2 - |q~|^2 = c^2 [ (1-|z|^2) sum|A_j|^2 + (1-|w|^2) sum|B_k|^2
///                          + (1-|z|^2)(1-|w|^2) sum|C_i|^2 ]
/// with deg A <= (n-1,m), deg B <= (n,m-1), deg C <= (n-1,m-1). The C family
/// is absent in the pure Christoffel-Darboux form. Self-contained: it can be
/// verified with no reference to the measure it came from.
template <class Scalar = double>
struct SosCertificate {
    int deg_z = 0, deg_w = 0;
    Scalar c = 1;
    std::vector<BiPoly<Scalar>> a_polys;
    std::vector<BiPoly<Scalar>> b_polys;
    std::optional<std::vector<BiPoly<Scalar>>> c_polys;
    BiPoly<Scalar> target;
};

namespace detail {

template <class Scalar>
KernelPoly<Scalar> bergman_sum(const std::vector<BiPoly<Scalar>>& polys, int deg_z, int deg_w,
                               int bound_z, int bound_w, const char* family) {
    KernelPoly<Scalar> acc(deg_z, deg_w);
    for (const auto& p : polys) {
        if (p.deg_z() > bound_z || p.deg_w() > bound_w)
            throw InputError(std::string("certificate ") + family +
                             " family exceeds its degree bound");
        const auto q = at_level(p, deg_z, deg_w);
        acc = acc + outer(q, q);
    }
    return acc;
}

} // namespace detail

/// The polarized left side q(z,w)conj(q(zeta,omega)) minus its reflected
/// counterpart.
template <class Scalar>
KernelPoly<Scalar> certificate_lhs(const SosCertificate<Scalar>& cert) {
    if (cert.target.deg_z() != cert.deg_z || cert.target.deg_w() != cert.deg_w)
        throw InputError("certificate target level does not match certificate level");
    return outer(cert.target, cert.target) -
           outer(reflect(cert.target), reflect(cert.target));
}

/// The certificate right side assembled as a kernel tensor at the
/// certificate level.
template <class Scalar>
KernelPoly<Scalar> certificate_rhs(const SosCertificate<Scalar>& cert) {
    const int n = cert.deg_z, m = cert.deg_w;
    auto rhs = mul_one_minus_zz(detail::bergman_sum(cert.a_polys, n, m, n - 1, m, "A")) +
               mul_one_minus_ww(detail::bergman_sum(cert.b_polys, n, m, n, m - 1, "B"));
    if (cert.c_polys)
        rhs = rhs + mul_one_minus_zz(mul_one_minus_ww(
                  detail::bergman_sum(*cert.c_polys, n, m, n - 1, m - 1, "C")));
    return KernelPoly<Scalar>(n, m, (ComplexT<Scalar>(cert.c * cert.c) * rhs.matrix()).eval());
}

/// Relative sup-norm residual of the certificate identity, recomputed from
/// the stored families alone.
template <class Scalar>
Scalar certificate_residual(const SosCertificate<Scalar>& cert) {
    return rel_residual(certificate_lhs(cert), certificate_rhs(cert));
}

/// margin(z,w) = |q|^2 - |q~|^2 - c^2 (1-|z|^2)(1-|w|^2); nonnegative on the
/// closed bidisk for a valid certificate.
template <class Scalar>
Scalar certificate_margin(const SosCertificate<Scalar>& cert, ComplexT<Scalar> z,
                          ComplexT<Scalar> w) {
    const Scalar qq = std::norm(eval(cert.target, z, w));
    const Scalar rr = std::norm(eval(reflect(cert.target), z, w));
    const Scalar zz = std::norm(z), ww = std::norm(w);
    return qq - rr - cert.c * cert.c * (Scalar(1) - zz) * (Scalar(1) - ww);
}

} // namespace bidisk
