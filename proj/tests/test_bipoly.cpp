#include <doctest.h>

#include <complex>
#include <random>

#include "bidisk/bipoly.hpp"
#include "bidisk/kernelpoly.hpp"

using namespace bidisk;
using Cplx = std::complex<double>;

namespace {

BiPoly<double> separable_2z2w() {
    // (2-z)(2-w) = 4 - 2w - 2z + zw
    BiPoly<double> p(1, 1);
    p.at(0, 0) = 4;
    p.at(0, 1) = -2;
    p.at(1, 0) = -2;
    p.at(1, 1) = 1;
    return p;
}

BiPoly<double> two_minus_z_minus_w() {
    BiPoly<double> p(1, 1);
    p.at(0, 0) = 2;
    p.at(0, 1) = -1;
    p.at(1, 0) = -1;
    return p;
}

BiPoly<double> random_poly(int n, int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BiPoly<double> p(n, m);
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= m; ++k) p.at(j, k) = Cplx(u(rng), u(rng));
    return p;
}

} // namespace

TEST_CASE("eval") {
    BiPoly<double> p(1, 1);
    p.at(0, 0) = 1;
    p.at(1, 1) = 2;
    CHECK(eval(p, Cplx(0), Cplx(0)) == Cplx(1));

    CHECK(eval(separable_2z2w(), Cplx(1), Cplx(1)) == Cplx(1));
    CHECK(eval(two_minus_z_minus_w(), Cplx(1), Cplx(1)) == Cplx(0));
}

TEST_CASE("reflect at the declared level") {
    auto one = BiPoly<double>::constant(1.0, 1, 1);
    auto r = reflect(one);
    CHECK(r.at(1, 1) == Cplx(1));
    CHECK(r.at(0, 0) == Cplx(0));

    BiPoly<double> p(1, 1);
    p.at(0, 0) = 1;
    p.at(1, 1) = 2;
    auto rp = reflect(p);
    CHECK(rp.at(0, 0) == Cplx(2));
    CHECK(rp.at(1, 1) == Cplx(1));

    auto rq = reflect(separable_2z2w());
    CHECK(rq.at(0, 0) == Cplx(1));
    CHECK(rq.at(0, 1) == Cplx(-2));
    CHECK(rq.at(1, 0) == Cplx(-2));
    CHECK(rq.at(1, 1) == Cplx(4));
}

TEST_CASE("reflect involution and torus modulus") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    for (int t = 0; t < 20; ++t) {
        auto p = random_poly(3, 2, rng);
        auto rr = reflect(reflect(p));
        CHECK((rr.coeffs() - p.coeffs()).cwiseAbs().maxCoeff() == 0.0);

        const Cplx z = std::polar(1.0, angle(rng)), w = std::polar(1.0, angle(rng));
        CHECK(std::abs(std::abs(eval(reflect(p), z, w)) - std::abs(eval(p, z, w))) < 1e-12);
    }
}

TEST_CASE("level mismatch is rejected") {
    BiPoly<double> a(1, 1), b(2, 1);
    CHECK_THROWS_AS(a + b, LevelMismatchError);
    CHECK_THROWS_AS(a - b, LevelMismatchError);
}

TEST_CASE("product re-levels") {
    BiPoly<double> a(1, 0), b(0, 1);
    a.at(0, 0) = 2;
    a.at(1, 0) = -1;
    b.at(0, 0) = 2;
    b.at(0, 1) = -1;
    auto p = a * b;
    CHECK(p.deg_z() == 1);
    CHECK(p.deg_w() == 1);
    CHECK((p.coeffs() - separable_2z2w().coeffs()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("double reflection") {
    auto one = BiPoly<double>::constant(1.0, 1, 1);
    auto k = outer(one, one);
    auto dr = double_reflect(k);
    CHECK(dr.at(1, 1, 1, 1) == Cplx(1));
    CHECK(dr.at(0, 0, 0, 0) == Cplx(0));

    KernelPoly<double> zz(1, 1);
    zz.at(1, 0, 1, 0) = 1; // z * conj(zeta)
    auto drz = double_reflect(zz);
    CHECK(drz.at(0, 1, 0, 1) == Cplx(1)); // w * conj(omega)
    CHECK(drz.matrix().cwiseAbs().sum() == 1.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    KernelPoly<double> r(2, 2);
    for (int j = 0; j <= 2; ++j)
        for (int k2 = 0; k2 <= 2; ++k2)
            for (int l = 0; l <= 2; ++l)
                for (int s = 0; s <= 2; ++s) r.at(j, k2, l, s) = Cplx(u(rng), u(rng));
    CHECK(rel_residual(double_reflect(double_reflect(r)), r) == 0.0);
}

TEST_CASE("kernel evaluation") {
    // Lebesgue box kernel at level (1,1): sum z^j w^k zeta~^j omega~^k
    KernelPoly<double> k(1, 1);
    for (int j = 0; j <= 1; ++j)
        for (int kk = 0; kk <= 1; ++kk) k.at(j, kk, j, kk) = 1;
    CHECK(kernel_eval(k, PointPair<double>{0, 0, 0, 0}) == Cplx(1));
    CHECK(diag_eval(k, Cplx(1), Cplx(1)) == doctest::Approx(4.0));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        BiPoly<double> p(2, 1);
        for (int j = 0; j <= 2; ++j)
            for (int kk = 0; kk <= 1; ++kk) p.at(j, kk) = Cplx(u(rng), u(rng));
        const Cplx z(u(rng), u(rng)), w(u(rng), u(rng));
        const double d = diag_eval(outer(p, p), z, w);
        CHECK(d >= 0.0);
        CHECK(d == doctest::Approx(std::norm(eval(p, z, w))).epsilon(1e-12));
    }
}

TEST_CASE("diag_eval rejects non-hermitian tensors") {
    KernelPoly<double> k(1, 1);
    k.at(1, 0, 0, 0) = Cplx(0, 1); // no conjugate partner
    CHECK_THROWS_AS(diag_eval(k, Cplx(0.5, 0), Cplx(0, 0)), NonHermitianError);
}

TEST_CASE("outer and rank-one subtraction") {
    auto one = BiPoly<double>::constant(1.0, 1, 1);
    auto k = outer(one, one);
    CHECK(k.at(0, 0, 0, 0) == Cplx(1));
    CHECK(sup_coeff(k) == 1.0);

    auto diff = k - outer(reflect(one), reflect(one));
    CHECK(diff.at(0, 0, 0, 0) == Cplx(1));
    CHECK(diff.at(1, 1, 1, 1) == Cplx(-1));
}

TEST_CASE("kernel shifts") {
    KernelPoly<double> one(1, 1);
    one.at(0, 0, 0, 0) = 1;
    auto sz = shift_kernel(one, VarAxis::z);
    CHECK(sz.at(1, 0, 1, 0) == Cplx(1));

    KernelPoly<double> full(1, 1);
    full.at(1, 1, 1, 1) = 1;
    CHECK_THROWS_AS(shift_kernel(full, VarAxis::z), HeadroomOverflowError);
    CHECK_THROWS_AS(shift_kernel(full, VarAxis::w), HeadroomOverflowError);
}

TEST_CASE("slice roots") {
    BiPoly<double> p(1, 1);
    p.at(0, 0) = 1;
    p.at(1, 1) = -0.5; // 1 - 0.5 z w
    auto roots = slice_roots(p, SliceAxis::fix_z, Cplx(1));
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0] - Cplx(2)) < 1e-12);

    auto q = separable_2z2w();
    auto rz = slice_roots(q, SliceAxis::fix_w, Cplx(0));
    REQUIRE(rz.size() == 1);
    CHECK(std::abs(rz[0] - Cplx(2)) < 1e-12);

    auto rw = slice_roots(two_minus_z_minus_w(), SliceAxis::fix_z, Cplx(1));
    REQUIRE(rw.size() == 1);
    CHECK(std::abs(rw[0] - Cplx(1)) < 1e-12);
}

TEST_CASE("slice root residuals") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 25; ++t) {
        auto p = random_poly(2, 3, rng);
        const Cplx z0(u(rng), u(rng));
        const double scale = sup_coeff(p);
        for (const auto& w : slice_roots(p, SliceAxis::fix_z, z0))
            CHECK(std::abs(eval(p, z0, w)) <=
                  1e-8 * scale * std::max(1.0, std::pow(std::abs(w), 3)));
    }
}

TEST_CASE("zero slice is detected") {
    auto zw = BiPoly<double>::monomial(1, 1, 1, 1);
    CHECK_THROWS_AS(slice_roots(zw, SliceAxis::fix_z, Cplx(0)), ZeroSliceError);
}

TEST_CASE("templated scalar also instantiates") {
    BiPoly<long double> p(1, 1);
    p.at(0, 0) = std::complex<long double>(2);
    p.at(1, 0) = std::complex<long double>(-1);
    auto r = reflect(p);
    CHECK(r.at(0, 1) == std::complex<long double>(-1));
    CHECK(eval(p, std::complex<long double>(1), std::complex<long double>(0)) ==
          std::complex<long double>(1));
}
