#include "mmdflow/density.hpp"
#include "mmdflow/errors.hpp"
#include "mmdflow/functional.hpp"
#include "mmdflow/isotonic.hpp"
#include "mmdflow/quantile_grid.hpp"
#include "mmdflow/target.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace mmdflow;

namespace {

QuantileGrid grid_of(const Measure& m, std::size_t n) { return sample_quantile_grid(m, n); }

QuantileGrid constant_grid(double v, std::size_t n) { return QuantileGrid(std::vector<double>(n, v)); }

// Random nondecreasing grid: cumulative sum of nonnegative increments with
// occasional flat runs, so some points share values.
QuantileGrid random_monotone(std::mt19937_64& rng, std::size_t n, double lo, double spread) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    double x = lo + spread * (u(rng) - 0.5);
    for (std::size_t i = 0; i < n; ++i) {
        if (u(rng) > 0.2) x += spread * u(rng) / static_cast<double>(n);
        v[i] = x;
    }
    return QuantileGrid(std::move(v));
}

} // namespace

TEST_CASE("w2_distance examples") {
    CHECK(w2_distance(constant_grid(-1.0, 10), constant_grid(2.5, 10)) == doctest::Approx(3.5));
    const auto g = grid_of(Measure::gaussian(0, 1), 100);
    CHECK(w2_distance(g, g) == 0.0);
    const double d = w2_distance(grid_of(Measure::gaussian(5, 1), 1000), grid_of(Measure::gaussian(-5, 1), 1000));
    CHECK(std::abs(d - 10.0) <= 1e-3);
    CHECK_THROWS_AS(w2_distance(constant_grid(0, 3), constant_grid(0, 4)), DimensionMismatch);
    const auto a = grid_of(Measure::laplace(0, 1), 50), b = grid_of(Measure::uniform(0, 1), 50);
    CHECK(w2_distance(a, b) == w2_distance(b, a));
}

TEST_CASE("isometry: grid W2 converges to the analytic value for shifted copies") {
    double prev = kInf;
    for (std::size_t n : {100, 1000, 10000}) {
        const double d = w2_distance(grid_of(Measure::laplace(1, 2), n), grid_of(Measure::laplace(-2, 2), n));
        CHECK(std::abs(d - 3.0) <= prev);
        prev = std::abs(d - 3.0);
    }
    CHECK(prev <= 1e-10);
    // Different shapes with a closed form: W2(U[0,1], U[0,2])^2 = int (s - 2s)^2 = 1/3.
    const double d = w2_distance(grid_of(Measure::uniform(0, 1), 4000), grid_of(Measure::uniform(0, 2), 4000));
    CHECK(d == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-6));
}

TEST_CASE("mmd_squared examples") {
    CHECK(mmd_squared(Measure::dirac(0), Measure::dirac(1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mmd_squared(Measure::uniform(0, 1), Measure::uniform(0, 1)) < 1e-8);
    // Oracle: direct quadrature of (1 - x)^2 over (0, 1).
    double oracle = 0.0;
    const int cells = 100000;
    for (int i = 0; i < cells; ++i) {
        const double x = (i + 0.5) / cells;
        oracle += (1.0 - x) * (1.0 - x) / cells;
    }
    CHECK(mmd_squared(Measure::dirac(0), Measure::uniform(0, 1)) == doctest::Approx(oracle).epsilon(1e-8));
    for (const auto& m : {Measure::gaussian(3, 2), Measure::laplace(0, 1), Measure::folded_normal(2, 1),
                          Measure::discrete({-1, 0.5, 2}, {0.2, 0.3, 0.5})})
        CHECK(mmd_squared(m, m) < 1e-8);
}

TEST_CASE("functional_F examples") {
    const Target d0(Measure::dirac(0)), d1(Measure::dirac(1)), u(Measure::uniform(0, 1));
    CHECK(functional_F(constant_grid(0.0, 100), d0) == doctest::Approx(0.0));
    // F = MMD^2(delta_0, delta_1) - 0.
    CHECK(functional_F(constant_grid(0.0, 100), d1) ==
          doctest::Approx(mmd_squared(Measure::dirac(0), Measure::dirac(1))).epsilon(1e-10));

    // Brute-force oracle for nu = U[0,1]:
    //   int (1-2s) Q(s) ds + int int |Q(s) - Q(t)| ds dt  with Q(s) = s.
    const int m = 2000;
    double oracle = 0.0;
    for (int i = 0; i < m; ++i) {
        const double s = (i + 0.5) / m;
        oracle += (1.0 - 2.0 * s) * s / m;
        for (int j = 0; j < m; ++j) oracle += std::abs(s - (j + 0.5) / m) / (double(m) * m);
    }
    CHECK(oracle == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
    CHECK(functional_F(grid_of(Measure::uniform(0, 1), 1000), u) == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
    // Self term: F(Q_nu) + (1/2) int int K dnu dnu = MMD^2 = 0.
    CHECK(kernel_self_term(u) == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("subgradient examples") {
    for (auto sel : {SubgradientSelection::Minimal, SubgradientSelection::Left, SubgradientSelection::Right}) {
        const Target g(Measure::gaussian(0, 1));
        const auto f = subgradient(grid_of(Measure::gaussian(0, 1), 1000), g, sel);
        for (double v : f) CHECK(std::abs(v) <= 2.0 / 1000);
    }
    const Target d0(Measure::dirac(0));
    const auto q = constant_grid(-1.0, 8);
    for (auto sel : {SubgradientSelection::Left, SubgradientSelection::Right}) {
        const auto f = subgradient(q, d0, sel);
        for (std::size_t i = 0; i < 8; ++i) CHECK(f[i] == doctest::Approx(-2.0 * q.s(i)));
    }
    const auto f0 = subgradient(constant_grid(0.0, 8), d0, SubgradientSelection::Minimal);
    for (double v : f0) CHECK(v == 0.0);
    const auto left = subgradient(constant_grid(0.0, 8), d0, SubgradientSelection::Left);
    const auto right = subgradient(constant_grid(0.0, 8), d0, SubgradientSelection::Right);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(left[i] < 0.0);
        CHECK(right[i] > 0.0);
    }
}

TEST_CASE("subgradients lie in [-2, 2]") {
    std::mt19937_64 rng(3);
    const Target t(Measure::discrete({-1, 0, 1}, {0.2, 0.5, 0.3}));
    for (int k = 0; k < 50; ++k) {
        const auto g = random_monotone(rng, 64, 0.0, 6.0);
        for (auto sel : {SubgradientSelection::Minimal, SubgradientSelection::Left, SubgradientSelection::Right})
            for (double v : subgradient(g, t, sel)) CHECK((v >= -2.0 && v <= 2.0));
    }
}

TEST_CASE("gradient_continuous examples") {
    const Target u(Measure::uniform(0, 1));
    for (double v : gradient_continuous(grid_of(Measure::uniform(0, 1), 1000), u)) CHECK(std::abs(v) <= 1e-12);
    const auto g = constant_grid(0.0, 10);
    const auto f = gradient_continuous(g, Target(Measure::gaussian(0, 1)));
    for (std::size_t i = 0; i < 10; ++i) CHECK(f[i] == doctest::Approx(2.0 * (0.5 - g.s(i))));
    CHECK_THROWS_AS(gradient_continuous(g, Target(Measure::dirac(0))), AtomicTargetError);
}

TEST_CASE("F is convex along random segments") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    for (const auto& nu : {Measure::gaussian(0, 1), Measure::discrete({-1, 0.5, 2}, {0.3, 0.3, 0.4}),
                           Measure::mixture({0.5, 0.5}, {Measure::uniform(-2, -1), Measure::uniform(1, 3)})}) {
        const Target t(nu);
        for (int k = 0; k < 100; ++k) {
            const auto a = random_monotone(rng, 50, 0.0, 8.0), b = random_monotone(rng, 50, 1.0, 8.0);
            const double l = lam(rng);
            std::vector<double> c(50);
            for (std::size_t i = 0; i < 50; ++i) c[i] = l * a[i] + (1 - l) * b[i];
            CHECK(functional_F(QuantileGrid(c), t) <= l * functional_F(a, t) + (1 - l) * functional_F(b, t) + 1e-10);
        }
    }
}

TEST_CASE("subgradient inequality on random pairs") {
    std::mt19937_64 rng(9);
    std::size_t failures = 0;
    for (const auto& nu : {Measure::gaussian(0, 1), Measure::discrete({-1, 0.5, 2}, {0.3, 0.3, 0.4}),
                           Measure::laplace(1, 0.5)}) {
        const Target t(nu);
        for (int k = 0; k < 100; ++k) {
            auto g = random_monotone(rng, 40, 0.0, 5.0);
            if (k % 5 == 0) g = constant_grid(0.5, 40); // sits on an atom
            const auto h = random_monotone(rng, 40, 0.5, 5.0);
            for (auto sel : {SubgradientSelection::Minimal, SubgradientSelection::Left, SubgradientSelection::Right}) {
                const auto f = subgradient(g, t, sel);
                std::vector<double> d(40);
                for (std::size_t i = 0; i < 40; ++i) d[i] = h[i] - g[i];
                if (functional_F(h, t) < functional_F(g, t) + grid_dot(f, d) - 1e-8) ++failures;
            }
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("gradient matches finite differences") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> z(0.0, 1.0);
    for (const auto& nu : {Measure::gaussian(0, 1), Measure::laplace(0.5, 2), Measure::folded_normal(2, 1)}) {
        const Target t(nu);
        const auto g = grid_of(Measure::gaussian(0.3, 1.5), 200);
        const auto grad = gradient_continuous(g, t);
        for (int k = 0; k < 10; ++k) {
            std::vector<double> d(200), plus(200), minus(200);
            for (std::size_t i = 0; i < 200; ++i) d[i] = z(rng);
            const double h = 1e-5;
            for (std::size_t i = 0; i < 200; ++i) {
                plus[i] = g[i] + h * d[i];
                minus[i] = g[i] - h * d[i];
            }
            const double fd = (functional_F(QuantileGrid(plus), t) - functional_F(QuantileGrid(minus), t)) / (2 * h);
            const double an = grid_dot(grad, d);
            CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST_CASE("density_and_atoms examples") {
    const auto two = density_and_atoms(grid_of(Measure::discrete({0, 1}, {0.5, 0.5}), 1000));
    REQUIRE(two.atoms.size() == 2);
    CHECK(two.atoms[0].location == 0.0);
    CHECK(two.atoms[0].mass == doctest::Approx(0.5));
    CHECK(two.atoms[1].location == 1.0);
    CHECK(two.atoms[1].mass == doctest::Approx(0.5));
    CHECK(two.segments.empty());

    const std::size_t n = 2000;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::min(2.0 * ((i + 0.5) / n) - 1.0, 0.0);
    const auto half = density_and_atoms(QuantileGrid(v));
    REQUIRE(half.atoms.size() == 1);
    CHECK(half.atoms[0].location == 0.0);
    CHECK(std::abs(half.atoms[0].mass - 0.5) <= 2.0 / n);
    REQUIRE(half.segments.size() == 1);
    CHECK(half.segments[0].density == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(half.segments[0].x_lo + 1.0) <= 2.0 / n);
    CHECK(std::abs(half.segments[0].x_hi) <= 2.0 / n);
    CHECK(std::abs(half.total_mass() - 1.0) <= 2.0 / n);

    const auto u = density_and_atoms(grid_of(Measure::uniform(0, 1), 1000));
    CHECK(u.atoms.empty());
    REQUIRE(u.segments.size() == 1);
    CHECK(u.segments[0].density == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(u.total_mass() - 1.0) <= 2.0 / 1000);
}

TEST_CASE("isotonic projection") {
    CHECK(isotonic_projection({1, 3, 2, 4}) == std::vector<double>{1, 2.5, 2.5, 4});
    CHECK(isotonic_projection({3, 2, 1}) == std::vector<double>{2, 2, 2});
    CHECK(isotonic_projection({}).empty());
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> y(30);
        for (auto& v : y) v = z(rng);
        const auto p = isotonic_projection(y);
        CHECK(std::is_sorted(p.begin(), p.end()));
        // Projection onto a cone: mean is preserved and residual is orthogonal to p.
        double sy = 0, sp = 0, dot = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            sy += y[i];
            sp += p[i];
            dot += (y[i] - p[i]) * p[i];
        }
        CHECK(sy == doctest::Approx(sp));
        CHECK(std::abs(dot) <= 1e-10);
    }
}

TEST_CASE("target precomputation") {
    const Target d(Measure::discrete({0, 1}, {0.25, 0.75}));
    REQUIRE(d.atoms());
    CHECK(d.atoms()->size() == 2);
    CHECK((*d.atoms())[0].cumulative == 0.25);
    CHECK((*d.atoms())[1].cumulative == 1.0);
    CHECK(*d.l_low_q() == 0.0);
    CHECK(std::isinf(*d.lip_q()));
    CHECK(*Target(Measure::dirac(2)).lip_q() == 0.0);

    const Target u(Measure::uniform(0, 2));
    CHECK_FALSE(u.atoms());
    CHECK(*u.l_low_q() == doctest::Approx(2.0));
    CHECK(*u.lip_q() == doctest::Approx(2.0));
    const Target g(Measure::gaussian(0, 2));
    CHECK(*g.l_low_q() == doctest::Approx(std::sqrt(2 * M_PI) * 2).epsilon(1e-6));
    CHECK(std::isinf(*g.lip_q()));
    CHECK_FALSE(Target(Measure::mixture({0.5, 0.5}, {Measure::dirac(0), Measure::uniform(0, 1)})).atoms());
}
