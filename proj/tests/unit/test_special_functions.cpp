#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gpsar/error.hpp"
#include "gpsar/special_functions.hpp"
#include "oracles.hpp"

using namespace gpsar;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

struct Row {
    double x, j0, y0, j1, y1;
};

// 30-digit mpmath values, rounded to double.
const Row kTable[] = {
    {1e-6, 0.99999999999975, -8.8690314816594437, 4.9999999999993748e-7, -636619.77237217504},
    {0.5, 0.93846980724081290, -0.44451873350670656, 0.24226845767487389, -1.4714723926702431},
    {1.0, 0.765197686557966551, 0.0882569642156769580, 0.440050585744933516, -0.781212821300288717},
    {8.0, 0.17165080713755391, 0.22352148938756622, 0.23463634685391462, -0.15806046173124749},
    {12.0, 0.047689310796833537, -0.22523731263436143, -0.22344710449062761, -0.057099218260896521},
    {25.0, 0.096266783275958116, -0.12724943226800614, -0.12535024958028990, -0.098829964783237410},
    {100.0, 0.019985850304223122, -0.077244313365083152, -0.077145352014112158, -0.020372312002759793},
    {1e4, -0.0070961603533888015, 0.0036478055589866059, 0.0036474507555295803, 0.0070963427525364951},
};

} // namespace

TEST_CASE("hankel1 reference table")
{
    for (const auto& r : kTable) {
        CAPTURE(r.x);
        CHECK(rel(hankel1(0, r.x), {r.j0, r.y0}) < 1e-12);
        CHECK(rel(hankel1(1, r.x), {r.j1, r.y1}) < 1e-12);
    }
    const Complex h0 = hankel1(0, 1.0), h1 = hankel1(1, 1.0);
    CHECK(h0.real() == doctest::Approx(0.7651976866).epsilon(1e-10));
    CHECK(h0.imag() == doctest::Approx(0.0882569642).epsilon(1e-9));
    CHECK(h1.real() == doctest::Approx(0.4400505857).epsilon(1e-10));
    CHECK(h1.imag() == doctest::Approx(-0.7812128213).epsilon(1e-10));
}

TEST_CASE("hankel1 against Boost on a log grid")
{
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double x = std::pow(10.0, -6.0 + 10.0 * i / 1999.0);
        worst = std::max({worst, rel(hankel1(0, x), oracle::hankel1(0, x)), rel(hankel1(1, x), oracle::hankel1(1, x))});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("Wronskian")
{
    for (double x : {0.5, 5.0, 50.0}) {
        const HankelPair h = hankel01(x);
        const double w = h.h1.real() * h.h0.imag() - h.h0.real() * h.h1.imag();
        CHECK(std::abs(w - 2.0 / (std::numbers::pi * x)) / (2.0 / (std::numbers::pi * x)) < 1e-12);
    }
}

TEST_CASE("regime switchover continuity")
{
    using namespace gpsar::detail;
    for (double x : {kSeriesLimit, kAsymptoticLimit}) {
        const double left = std::nextafter(x, 0.0);
        const HankelPair a = x == kSeriesLimit ? hankel01_series(left) : hankel01_neumann(left);
        const HankelPair b = x == kSeriesLimit ? hankel01_neumann(x) : hankel01_asymptotic(x);
        CHECK(rel(a.h0, b.h0) < 1e-11);
        CHECK(rel(a.h1, b.h1) < 1e-11);
    }
}

TEST_CASE("hankel1 domain errors")
{
    CHECK_THROWS_AS(hankel1(0, 0.0), DomainError);
    CHECK_THROWS_AS(hankel1(0, -1.0), DomainError);
    CHECK_THROWS_AS(hankel1(2, 1.0), DomainError);
    CHECK_THROWS_AS(hankel1(0, std::nan("")), DomainError);
}

TEST_CASE("greens2d values and symmetry")
{
    const Complex g = greens2d(1.0, {1.0, 0.0});
    CHECK(rel(g, {-0.0220642410539192395, 0.191299421639491638}) < 1e-12);
    CHECK(greens2d(1.0, {0.6, 0.8}) == greens2d(1.0, {1.0, 0.0}));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 20; ++i) {
        const Vec2 r{u(rng), u(rng)};
        CHECK(greens2d(1.3, r) == greens2d(1.3, -r));
    }
    CHECK_THROWS_AS(greens2d(1.0, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(greens2d_normal_deriv(1.0, {0.0, 0.0}, {1.0, 0.0}), DomainError);
}

TEST_CASE("greens2d normal derivative")
{
    const Complex d = greens2d_normal_deriv(1.0, {1.0, 0.0}, {1.0, 0.0});
    CHECK(rel(d, {-0.195303205325072179, -0.110012646436233379}) < 1e-12);
    CHECK(greens2d_normal_deriv(2.0, {0.3, 0.4}, {0.8, -0.6}) == Complex{0.0, 0.0});

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uk(0.2, 4.0), ur(-6.0, 6.0), ua(0.0, 2.0 * std::numbers::pi);
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
        const double k = uk(rng);
        Vec2 r{ur(rng), ur(rng)};
        if (norm(r) < 0.3)
            r = 0.3 / norm(r) * r + Vec2{0.3, 0.0};
        const double a = ua(rng);
        const Vec2 n{std::cos(a), std::sin(a)};
        const Complex fd = (greens2d(k, r + h * n) - greens2d(k, r - h * n)) / (2.0 * h);
        const Complex an = greens2d_normal_deriv(k, r, n);
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("Helmholtz residual of G")
{
    for (double k : {0.5, 3.0}) {
        const double h = 1e-3 / k;
        for (Vec2 r : {Vec2{1.0, 0.5}, Vec2{-2.0, 3.0}, Vec2{0.1, -4.0}}) {
            const Complex lap = (greens2d(k, r + Vec2{h, 0}) + greens2d(k, r - Vec2{h, 0}) +
                                 greens2d(k, r + Vec2{0, h}) + greens2d(k, r - Vec2{0, h}) - 4.0 * greens2d(k, r)) /
                                (h * h);
            const Complex g = greens2d(k, r);
            CHECK(std::abs(lap + k * k * g) <= 1e-4 * std::abs(g) * k * k);
        }
    }
}
