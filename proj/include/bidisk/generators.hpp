#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bidisk/bipoly.hpp"
#include "bidisk/measures.hpp"

namespace bidisk {

/// Certified random stable polynomial: coefficients drawn uniformly from the
/// unit disk and the constant term set to 1 plus the sum of the other
/// moduli, which forces zero-freeness on the closed bidisk by the triangle
/// inequality.
template <class Scalar = double>
BiPoly<Scalar> random_stable_poly(int deg_z, int deg_w, std::mt19937_64& rng) {
    std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    BiPoly<Scalar> q(deg_z, deg_w);
    Scalar total = 0;
    for (int j = 0; j <= deg_z; ++j)
        for (int k = 0; k <= deg_w; ++k) {
            if (j == 0 && k == 0) continue;
            const Scalar radius = std::sqrt(unit(rng));
            const Scalar angle = two_pi * unit(rng);
            q.at(j, k) = std::polar(radius, angle);
            total += radius;
        }
    q.at(0, 0) = ComplexT<Scalar>(Scalar(1) + total);
    return q;
}

/// Smooth random trigonometric density 1 + 0.8*u on an N x N torus grid,
/// with u a low-degree trig polynomial normalized to sup 1 and the result
/// floored away from zero.
template <class Scalar = double>
Measure<Scalar> random_grid_density(int grid_n, std::mt19937_64& rng, int max_harmonic = 3,
                                    int terms = 6) {
    std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
    std::uniform_int_distribution<int> harmonic(0, max_harmonic);
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    std::vector<Scalar> u(static_cast<size_t>(grid_n) * grid_n, Scalar(0));
    for (int t = 0; t < terms; ++t) {
        const int j = harmonic(rng), k = harmonic(rng);
        const Scalar amp = Scalar(2) * unit(rng) - Scalar(1);
        const Scalar phase = two_pi * unit(rng);
        for (int a = 0; a < grid_n; ++a)
            for (int b = 0; b < grid_n; ++b)
                u[static_cast<size_t>(a) * grid_n + b] +=
                    amp * std::cos(two_pi * (Scalar(j * a + k * b)) / Scalar(grid_n) + phase);
    }
    Scalar sup(0);
    for (Scalar v : u) sup = std::max(sup, std::abs(v));
    if (sup == Scalar(0)) sup = Scalar(1);
    std::vector<Scalar> values(u.size());
    for (size_t i = 0; i < u.size(); ++i)
        values[i] = std::max(Scalar(1) + Scalar(0.8) * u[i] / sup, Scalar(1e-3));
    return Measure<Scalar>::grid_density(grid_n, std::move(values));
}

} // namespace bidisk
