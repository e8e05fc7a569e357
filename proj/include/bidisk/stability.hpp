#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>

#include "bidisk/bipoly.hpp"
#include "bidisk/certificate.hpp"
#include "bidisk/errors.hpp"
#include "bidisk/kernels.hpp"
#include "bidisk/measures.hpp"

namespace bidisk {

struct SweepGrid {
    int radial_steps = 64;
    int angular_steps = 128;
};

template <class Scalar = double>
struct SweepResult {
    std::optional<std::pair<std::complex<Scalar>, std::complex<Scalar>>> witness;
    Scalar min_modulus = 0; // smallest |q| seen on the torus grid
};

/// Grid falsifier: fix one variable on a polar grid of the closed disk and
/// look for slice roots with modulus <= 1 + 1e-9, in both variable roles.
/// A clean sweep is only a semi-decision; a found zero is definite.
template <class Scalar>
SweepResult<Scalar> sweep_for_zero(const BiPoly<Scalar>& q, const SweepGrid& grid = {}) {
    using C = std::complex<Scalar>;
    if (sup_coeff(q) == Scalar(0)) throw InputError("sweep needs a nonzero polynomial");
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    const int radial = std::max(grid.radial_steps, 2);
    const int angular = std::max(grid.angular_steps, 4);

    SweepResult<Scalar> out;
    out.min_modulus = std::numeric_limits<Scalar>::infinity();
    for (int a = 0; a < angular; ++a)
        for (int b = 0; b < angular; ++b) {
            const C z = std::polar(Scalar(1), two_pi * Scalar(a) / Scalar(angular));
            const C w = std::polar(Scalar(1), two_pi * Scalar(b) / Scalar(angular));
            out.min_modulus = std::min(out.min_modulus, std::abs(eval(q, z, w)));
        }

    auto clamp_disk = [](C v) {
        const Scalar r = std::abs(v);
        return r > Scalar(1) ? C(v / r) : v;
    };

    for (SliceAxis axis : {SliceAxis::fix_z, SliceAxis::fix_w}) {
        for (int ir = 0; ir < radial && !out.witness; ++ir) {
            const Scalar radius = Scalar(ir) / Scalar(radial - 1);
            for (int ia = 0; ia < angular && !out.witness; ++ia) {
                const C fixed = std::polar(radius, two_pi * Scalar(ia) / Scalar(angular));
                std::vector<C> roots;
                try {
                    roots = slice_roots(q, axis, fixed);
                } catch (const ZeroSliceError&) {
                    // the whole slice vanishes, so any point on it is a zero
                    out.witness = axis == SliceAxis::fix_z ? std::make_pair(fixed, C(0))
                                                           : std::make_pair(C(0), fixed);
                    break;
                }
                for (const C& root : roots) {
                    if (std::abs(root) > Scalar(1) + Scalar(1e-9)) continue;
                    const C other = clamp_disk(root);
                    out.witness = axis == SliceAxis::fix_z ? std::make_pair(fixed, other)
                                                           : std::make_pair(other, fixed);
                    break;
                }
            }
        }
    }
    if (out.witness)
        out.min_modulus =
            std::min(out.min_modulus, std::abs(eval(q, out.witness->first, out.witness->second)));
    return out;
}

template <class Scalar = double>
struct StabilityConstants {
    Scalar thm_c = 0; // 1/thm_c = int |q|^{-2}; scales (1-|z|^2)(1-|w|^2) directly
    Scalar sos_c = 0; // sqrt(thm_c); the scale stored in certificates
};

/// The sharp constants of the stability inequality. Zero-freeness on the
/// torus is asserted with a boundary sweep before integrating.
template <class Scalar>
StabilityConstants<Scalar> stability_constant(const BiPoly<Scalar>& q,
                                              const QuadratureOptions<Scalar>& opts = {},
                                              int angular_steps = 256) {
    using C = std::complex<Scalar>;
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    for (SliceAxis axis : {SliceAxis::fix_z, SliceAxis::fix_w})
        for (int a = 0; a < angular_steps; ++a) {
            const C fixed = std::polar(Scalar(1), two_pi * Scalar(a) / Scalar(angular_steps));
            std::vector<C> roots;
            try {
                roots = slice_roots(q, axis, fixed);
            } catch (const ZeroSliceError&) {
                throw ZeroOnTorusError("polynomial vanishes identically on a torus slice");
            }
            for (const C& root : roots)
                if (std::abs(std::abs(root) - Scalar(1)) <= Scalar(1e-9))
                    throw ZeroOnTorusError("polynomial has a zero on the torus");
        }
    const Scalar mass = detail::bs_quadrature(q, 0, 0, opts).mass;
    StabilityConstants<Scalar> out;
    out.thm_c = Scalar(1) / mass;
    out.sos_c = std::sqrt(out.thm_c);
    return out;
}

template <class Scalar = double>
struct CertificateResult {
    SosCertificate<Scalar> certificate;
    Scalar residual = 0;    // relative sup-norm residual of the identity
    Scalar sm_min_diag = 0; // sampled minimum of the C-family square sum
    StabilityConstants<Scalar> constants;
};

namespace detail {

inline double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

template <class Scalar>
std::pair<std::complex<Scalar>, std::complex<Scalar>> halton_bidisk_point(std::uint64_t index) {
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    const Scalar rz = std::sqrt(Scalar(halton(index, 2)));
    const Scalar tz = two_pi * Scalar(halton(index, 3));
    const Scalar rw = std::sqrt(Scalar(halton(index, 5)));
    const Scalar tw = two_pi * Scalar(halton(index, 7));
    return {std::polar(rz, tz), std::polar(rw, tw)};
}

} // namespace detail

/// Constructs the three-family certificate from the Bernstein-Szego measure
/// of q itself: the families are orthonormal bases of the three subspaces
/// whose weighted squares reproduce |q|^2 - |q~|^2. Requires a sweep-clean q.
template <class Scalar>
CertificateResult<Scalar> stability_certificate(const BiPoly<Scalar>& q,
                                                const QuadratureOptions<Scalar>& opts = {},
                                                const SweepGrid& grid = {}) {
    const auto sweep = sweep_for_zero(q, grid);
    if (sweep.witness)
        throw NotStableError("polynomial has a zero in the closed bidisk");

    const int n = q.deg_z(), m = q.deg_w();
    const auto raw = detail::bs_quadrature(q, n, m, opts);
    const Scalar c = Scalar(1) / std::sqrt(raw.mass);

    CertificateResult<Scalar> out;
    out.constants.thm_c = c * c;
    out.constants.sos_c = c;
    out.certificate.deg_z = n;
    out.certificate.deg_w = m;
    out.certificate.c = c;
    out.certificate.target = q;
    out.certificate.a_polys =
        orthonormal_basis(raw.table, resolve(NamedSubspace::r_perp_dn, n, m)).polys;
    out.certificate.b_polys =
        orthonormal_basis(raw.table, resolve(NamedSubspace::u_perp_lt, n, m)).polys;
    out.certificate.c_polys =
        orthonormal_basis(raw.table, resolve(NamedSubspace::sm, n, m)).polys;
    out.residual = certificate_residual(out.certificate);

    // The constant function is a unit vector of the small box, so the
    // C-family square sum dominates 1 on the closed bidisk. At degenerate
    // levels (n or m zero) the small box is empty and the bound is vacuous.
    Scalar min_diag = std::numeric_limits<Scalar>::infinity();
    if (!out.certificate.c_polys->empty()) {
        auto c_sum_at = [&](std::complex<Scalar> z, std::complex<Scalar> w) {
            Scalar s(0);
            for (const auto& p : *out.certificate.c_polys) s += std::norm(eval(p, z, w));
            return s;
        };
        min_diag = std::min(min_diag, c_sum_at({0, 0}, {0, 0}));
        for (std::uint64_t i = 1; i <= 128; ++i) {
            const auto [z, w] = detail::halton_bidisk_point<Scalar>(i);
            min_diag = std::min(min_diag, c_sum_at(z, w));
        }
    }
    out.sm_min_diag = min_diag;
    return out;
}

enum class StabilityMethod { sweep, certificate, both };

template <class Scalar = double>
struct StabilityVerdict {
    bool stable = false;
    std::optional<std::pair<std::complex<Scalar>, std::complex<Scalar>>> witness;
    Scalar min_modulus = 0;
    StabilityMethod method = StabilityMethod::sweep;
    std::optional<SosCertificate<Scalar>> certificate;
    std::optional<StabilityConstants<Scalar>> constants;
    Scalar certificate_residual = 0;
};

/// Two-phase decision: the sweep can only falsify; a positive verdict
/// additionally requires a verified certificate. A clean sweep whose
/// certificate construction fails numerically raises Inconclusive rather
/// than guessing.
template <class Scalar>
StabilityVerdict<Scalar> is_stable(const BiPoly<Scalar>& q, const SweepGrid& grid = {},
                                   const QuadratureOptions<Scalar>& opts = {},
                                   Scalar cert_tol = Scalar(1e-8)) {
    StabilityVerdict<Scalar> out;
    const auto sweep = sweep_for_zero(q, grid);
    out.min_modulus = sweep.min_modulus;
    if (sweep.witness) {
        out.stable = false;
        out.witness = sweep.witness;
        out.method = StabilityMethod::sweep;
        return out;
    }
    try {
        auto cert = stability_certificate(q, opts, grid);
        if (cert.residual > cert_tol) {
            std::ostringstream msg;
            msg << "certificate residual " << cert.residual << " exceeds tolerance " << cert_tol;
            throw InconclusiveError(msg.str());
        }
        if (cert.sm_min_diag < Scalar(1) - Scalar(1e-8))
            throw InconclusiveError("certificate square sum fails the unit lower bound");
        out.stable = true;
        out.method = StabilityMethod::both;
        out.certificate = std::move(cert.certificate);
        out.constants = cert.constants;
        out.certificate_residual = cert.residual;
        return out;
    } catch (const InconclusiveError&) {
        throw;
    } catch (const Error& e) {
        throw InconclusiveError(std::string("sweep was clean but the certificate "
                                            "construction failed: ") + e.what());
    }
}

template <class Scalar = double>
struct VerificationReport {
    Scalar coeff_residual = 0;
    Scalar min_margin = 0;
};

/// Independent check of a certificate: recompute the coefficient identity
/// from the stored families and evaluate the diagonal margin on quasi-random
/// closed-bidisk samples. Reports; never trusts.
template <class Scalar>
VerificationReport<Scalar> verify_certificate(const SosCertificate<Scalar>& cert,
                                              int samples = 4096, std::uint64_t seed = 0) {
    VerificationReport<Scalar> out;
    out.coeff_residual = certificate_residual(cert);
    Scalar min_margin = std::numeric_limits<Scalar>::infinity();
    for (int i = 0; i < samples; ++i) {
        const auto [z, w] = detail::halton_bidisk_point<Scalar>(seed + 1 + i);
        min_margin = std::min(min_margin, certificate_margin(cert, z, w));
    }
    out.min_margin = min_margin;
    return out;
}

} // namespace bidisk
