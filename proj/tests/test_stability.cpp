#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "bidisk/generators.hpp"
#include "bidisk/stability.hpp"

using namespace bidisk;
using Cplx = std::complex<double>;

namespace {

BiPoly<double> separable(double a, double b) {
    BiPoly<double> q(1, 1);
    q.at(0, 0) = a * b;
    q.at(0, 1) = -a;
    q.at(1, 0) = -b;
    q.at(1, 1) = 1;
    return q;
}

BiPoly<double> two_minus_z_minus_w() {
    BiPoly<double> q(1, 1);
    q.at(0, 0) = 2;
    q.at(0, 1) = -1;
    q.at(1, 0) = -1;
    return q;
}

} // namespace

TEST_CASE("sweep finds boundary zeros with torus witnesses") {
    auto res = sweep_for_zero(two_minus_z_minus_w());
    REQUIRE(res.witness.has_value());
    const auto [z, w] = *res.witness;
    CHECK(std::abs(z - Cplx(1)) < 1e-9);
    CHECK(std::abs(w - Cplx(1)) < 1e-9);
    CHECK(std::abs(eval(two_minus_z_minus_w(), z, w)) < 1e-9);

    CHECK_FALSE(sweep_for_zero(separable(2, 2)).witness.has_value());

    // q = z w has a zero slice at z = 0
    auto res2 = sweep_for_zero(BiPoly<double>::monomial(1, 1, 1, 1));
    REQUIRE(res2.witness.has_value());
    CHECK(std::abs(eval(BiPoly<double>::monomial(1, 1, 1, 1), res2.witness->first,
                        res2.witness->second)) == 0.0);
}

TEST_CASE("stability verdicts") {
    auto good = is_stable(separable(2, 2));
    CHECK(good.stable);
    CHECK(good.method == StabilityMethod::both);
    REQUIRE(good.constants.has_value());
    CHECK(good.constants->sos_c == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(good.certificate_residual < 1e-8);

    auto bad = is_stable(two_minus_z_minus_w());
    CHECK_FALSE(bad.stable);
    CHECK(bad.method == StabilityMethod::sweep);
    REQUIRE(bad.witness.has_value());
    CHECK(std::abs(eval(two_minus_z_minus_w(), bad.witness->first, bad.witness->second)) <
          1e-6 * sup_coeff(two_minus_z_minus_w()));

    BiPoly<double> zw(1, 1);
    zw.at(0, 0) = 1;
    zw.at(1, 1) = -0.5; // 1 - 0.5 z w: slice roots satisfy |w| = 2/|z| >= 2
    CHECK(is_stable(zw).stable);

    BiPoly<double> wide(1, 1);
    wide.at(0, 0) = 4;
    wide.at(0, 1) = -1;
    wide.at(1, 0) = -1; // 4 - z - w
    CHECK(is_stable(wide).stable);
}

TEST_CASE("stability constants") {
    auto one = stability_constant(BiPoly<double>::constant(1.0, 1, 1));
    CHECK(one.thm_c == doctest::Approx(1.0));
    CHECK(one.sos_c == doctest::Approx(1.0));

    auto sep = stability_constant(separable(2, 2));
    CHECK(sep.thm_c == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(sep.sos_c == doctest::Approx(3.0).epsilon(1e-10));

    BiPoly<double> z1(1, 0);
    z1.at(0, 0) = 2;
    z1.at(1, 0) = -1;
    auto c1 = stability_constant(z1);
    CHECK(c1.thm_c == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(c1.sos_c == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));

    CHECK_THROWS_AS(stability_constant(two_minus_z_minus_w()), ZeroOnTorusError);
}

TEST_CASE("sharp constant trend for the separable family") {
    for (double a : {1.5, 2.0, 3.0}) {
        auto c = stability_constant(separable(a, a));
        const double expected = (a * a - 1.0) * (a * a - 1.0);
        CHECK(c.thm_c == doctest::Approx(expected).epsilon(1e-8));
        // consistency between the two emitted normalizations
        CHECK(c.sos_c * c.sos_c == doctest::Approx(c.thm_c).epsilon(1e-12));
    }
}

TEST_CASE("constant consistency with the quadrature mass") {
    auto q = separable(2, 2);
    const double c = bs_constant(q);
    const double mass = 1.0 / (stability_constant(q).thm_c);
    CHECK(c * c * mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("certificate for the separable example") {
    auto res = stability_certificate(separable(2, 2));
    CHECK(res.residual < 1e-10);
    CHECK(res.sm_min_diag >= 1.0 - 1e-10);
    const auto& cert = res.certificate;
    CHECK(cert.c == doctest::Approx(3.0).epsilon(1e-10));
    REQUIRE(cert.a_polys.size() == 1);
    REQUIRE(cert.b_polys.size() == 1);
    REQUIRE(cert.c_polys.has_value());
    REQUIRE(cert.c_polys->size() == 1);
    const double s3 = std::sqrt(3.0);
    // A = (2w-1)/sqrt3, B = (2z-1)/sqrt3, C = {1}
    CHECK(std::abs(cert.a_polys[0].at(0, 1) - Cplx(2 / s3)) < 1e-8);
    CHECK(std::abs(cert.a_polys[0].at(0, 0) - Cplx(-1 / s3)) < 1e-8);
    CHECK(std::abs(cert.b_polys[0].at(1, 0) - Cplx(2 / s3)) < 1e-8);
    CHECK(std::abs(cert.b_polys[0].at(0, 0) - Cplx(-1 / s3)) < 1e-8);
    CHECK(std::abs((*cert.c_polys)[0].at(0, 0) - Cplx(1)) < 1e-10);
}

TEST_CASE("certificate for the trivial polynomial at level (1,1)") {
    auto res = stability_certificate(BiPoly<double>::constant(1.0, 1, 1));
    const auto& cert = res.certificate;
    CHECK(res.residual < 1e-12);
    CHECK(cert.c == doctest::Approx(1.0));
    REQUIRE(cert.a_polys.size() == 1);
    REQUIRE(cert.b_polys.size() == 1);
    CHECK(std::abs(cert.a_polys[0].at(0, 1) - Cplx(1)) < 1e-10); // w
    CHECK(std::abs(cert.b_polys[0].at(1, 0) - Cplx(1)) < 1e-10); // z
    // 1 - |zw|^2 = (1-|z|^2)|w|^2 + (1-|w|^2)|z|^2 + (1-|z|^2)(1-|w|^2)
    CHECK(certificate_margin(cert, Cplx(0), Cplx(0)) == doctest::Approx(0.0));
}

TEST_CASE("random dominant-constant certificates at level (2,2)") {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 3; ++t) {
        auto q = random_stable_poly(2, 2, rng);
        auto res = stability_certificate(q);
        CHECK(res.residual < 1e-8);
        CHECK(res.certificate.a_polys.size() == 2);
        CHECK(res.certificate.b_polys.size() == 2);
        CHECK(res.certificate.c_polys->size() == 4);
        CHECK(res.sm_min_diag >= 1.0 - 1e-8);

        auto ver = verify_certificate(res.certificate, 512);
        CHECK(ver.coeff_residual < 1e-8);
        CHECK(ver.min_margin >= -1e-8 * sup_coeff(q) * sup_coeff(q));
    }
}

TEST_CASE("verification catches corruption") {
    auto res = stability_certificate(separable(2, 2));
    auto ver = verify_certificate(res.certificate, 2048);
    CHECK(ver.coeff_residual < 1e-10);
    CHECK(ver.min_margin >= -1e-10);

    auto corrupted = res.certificate;
    corrupted.a_polys[0].at(0, 1) += 0.1;
    CHECK(verify_certificate(corrupted, 128).coeff_residual > 1e-3);
}

TEST_CASE("unstable inputs never certify") {
    CHECK_THROWS_AS(stability_certificate(two_minus_z_minus_w()), NotStableError);

    // even a hand-assembled certificate that borrows valid families from a
    // stable polynomial fails verification against the unstable target
    auto donor = stability_certificate(separable(2, 2)).certificate;
    donor.target = two_minus_z_minus_w();
    CHECK(verify_certificate(donor, 256).coeff_residual > 1e-2);
}

TEST_CASE("near-boundary zeros yield inconclusive, never a guess") {
    // stable, but the zero sits 1e-4 off the torus: the sweep is clean and
    // the quadrature hits a small grid cap, so no positive verdict is made
    BiPoly<double> q(1, 0);
    q.at(0, 0) = 1.0001;
    q.at(1, 0) = -1;
    QuadratureOptions<double> tight;
    tight.max_grid = 1 << 10;
    CHECK_FALSE(sweep_for_zero(q).witness.has_value());
    CHECK_THROWS_AS(is_stable(q, SweepGrid{}, tight), InconclusiveError);
}

TEST_CASE("one-variable levels degenerate cleanly") {
    BiPoly<double> q(2, 0);
    q.at(0, 0) = 2;
    q.at(1, 0) = -1; // 2 - z at level (2,0)
    auto res = stability_certificate(q);
    CHECK(res.residual < 1e-10);
    CHECK(res.certificate.a_polys.size() == 2);
    CHECK(res.certificate.b_polys.empty());
    CHECK(res.certificate.c_polys->empty());
    CHECK(is_stable(q).stable);
}
