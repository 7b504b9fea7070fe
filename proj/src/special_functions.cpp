#include "gpsar/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpsar/error.hpp"

namespace gpsar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
constexpr Complex kI{0.0, 1.0};

} // namespace

namespace detail {

// Ascending power series in t = x^2/4. Y0 and Y1 use the logarithmic form with
// harmonic numbers H_k.
HankelPair hankel01_series(double x)
{
    const double t = 0.25 * x * x;
    const double log_term = std::log(0.5 * x) + kEulerGamma;

    double j0 = 0.0, y0_sum = 0.0;
    double j1_sum = 0.0, y1_sum = 0.0;

    double term0 = 1.0;  // (-t)^k / (k!)^2
    double term1 = 1.0;  // (-t)^k / (k! (k+1)!)
    double harmonic = 0.0;
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            term0 *= -t / (double(k) * k);
            term1 *= -t / (double(k) * (k + 1));
            harmonic += 1.0 / k;
        }
        const double harmonic_next = harmonic + 1.0 / (k + 1);
        j0 += term0;
        y0_sum -= harmonic * term0;
        j1_sum += term1;
        y1_sum += (harmonic + harmonic_next) * term1;
        if (std::abs(term0) < 1e-18 * std::abs(j0) + 1e-300 && std::abs(term1) < 1e-18 * std::abs(j1_sum) && k > 2)
            break;
    }
    const double j1 = 0.5 * x * j1_sum;
    const double y0 = (2.0 / kPi) * (log_term * j0 + y0_sum);
    const double y1 = (2.0 / kPi) * log_term * j1 - 2.0 / (kPi * x) - (x / (2.0 * kPi)) * y1_sum;
    return {Complex{j0, y0}, Complex{j1, y1}};
}

// Miller backward recurrence for J_n, normalized by J0 + 2 sum J_2k = 1, with the
// Neumann series for Y0 and Y1 accumulated on the same pass.
HankelPair hankel01_neumann(double x)
{
    int start = static_cast<int>(x) + 40;
    if (start % 2 != 0)
        ++start;

    double j_next = 0.0;    // J_{n+1}
    double j_curr = 1e-30;  // J_n
    double norm = 0.0;
    double s0 = 0.0;        // sum_{k>=1} (-1)^k J_2k / k
    double s1 = 0.0;        // sum_{k>=1} (-1)^(k+1) (2k+1)/(k(k+1)) J_{2k+1}
    double j0 = 0.0, j1 = 0.0;

    for (int n = start; n >= 0; --n) {
        if (n % 2 == 0) {
            if (n == 0) {
                norm += j_curr;
            } else {
                const int k = n / 2;
                norm += 2.0 * j_curr;
                s0 += ((k % 2 == 0) ? 1.0 : -1.0) * j_curr / k;
            }
        } else if (n >= 3) {
            const int k = (n - 1) / 2;
            s1 += ((k % 2 == 0) ? -1.0 : 1.0) * (2.0 * k + 1.0) / (double(k) * (k + 1)) * j_curr;
        }
        if (n == 1)
            j1 = j_curr;
        if (n == 0) {
            j0 = j_curr;
            break;
        }
        const double j_prev = (2.0 * n / x) * j_curr - j_next;
        j_next = j_curr;
        j_curr = j_prev;
        if (std::abs(j_curr) > 1e250) {
            const double scale = 1e-250;
            j_curr *= scale;
            j_next *= scale;
            norm *= scale;
            s0 *= scale;
            s1 *= scale;
            j1 *= scale;
        }
    }

    j0 /= norm;
    j1 /= norm;
    s0 /= norm;
    s1 /= norm;

    const double log_term = std::log(0.5 * x) + kEulerGamma;
    const double y0 = (2.0 / kPi) * (log_term * j0 - 2.0 * s0);
    const double y1 = (2.0 / kPi) * ((log_term - 1.0) * j1 - j0 / x + s1);
    return {Complex{j0, y0}, Complex{j1, y1}};
}

// Hankel asymptotic expansion. The carrier exp(i x) is built from cos(x) and
// sin(x) directly so no rounding of x - pi/4 enters the phase at large x.
HankelPair hankel01_asymptotic(double x)
{
    auto series = [x](double nu) {
        const double mu = 4.0 * nu * nu;
        Complex sum{1.0, 0.0};
        Complex term{1.0, 0.0};
        double prev = 1.0;
        for (int k = 1; k < 60; ++k) {
            const double odd = 2.0 * k - 1.0;
            term *= kI * ((mu - odd * odd) / (8.0 * k * x));
            const double mag = std::abs(term);
            if (mag > prev)
                break;
            sum += term;
            prev = mag;
            if (mag < 1e-17)
                break;
        }
        return sum;
    };

    const double amp = std::sqrt(2.0 / (kPi * x));
    const Complex carrier{std::cos(x), std::sin(x)};
    const double r = std::numbers::sqrt2 / 2.0;
    const Complex shift0{r, -r};   // exp(-i pi/4)
    const Complex shift1{-r, -r};  // exp(-3 i pi/4)
    return {amp * carrier * shift0 * series(0.0), amp * carrier * shift1 * series(1.0)};
}

} // namespace detail

HankelPair hankel01(double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("hankel1: argument must be finite and positive, got " + std::to_string(x));
    if (x < detail::kSeriesLimit)
        return detail::hankel01_series(x);
    if (x < detail::kAsymptoticLimit)
        return detail::hankel01_neumann(x);
    return detail::hankel01_asymptotic(x);
}

Complex hankel1(int order, double x)
{
    if (order != 0 && order != 1)
        throw DomainError("hankel1: unsupported order " + std::to_string(order));
    const HankelPair h = hankel01(x);
    return order == 0 ? h.h0 : h.h1;
}

Complex greens2d(double k, const Vec2& r)
{
    const double dist = norm(r);
    if (dist == 0.0)
        throw DomainError("greens2d: singular at r = 0");
    if (!(k > 0.0))
        throw DomainError("greens2d: wavenumber must be positive");
    return 0.25 * kI * hankel1(0, k * dist);
}

Complex greens2d_normal_deriv(double k, const Vec2& r, const Vec2& n)
{
    return greens2d_with_deriv(k, r, n).normal_deriv;
}

GreenPair greens2d_with_deriv(double k, const Vec2& r, const Vec2& n)
{
    const double dist = norm(r);
    if (dist == 0.0)
        throw DomainError("greens2d: singular at r = 0");
    if (!(k > 0.0))
        throw DomainError("greens2d: wavenumber must be positive");
    const HankelPair h = hankel01(k * dist);
    const double cos_angle = dot(n, r) / dist;
    return {0.25 * kI * h.h0, -0.25 * kI * k * cos_angle * h.h1};
}

} // namespace gpsar
