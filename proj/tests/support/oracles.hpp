#pragma once

// Reference implementations used only by the tests. They rely on Boost.Math so
// they share no code with the library kernels they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include "gpsar/vec2.hpp"

namespace oracle {

using Complex = std::complex<double>;

inline Complex hankel1(int n, double x)
{
    return {boost::math::cyl_bessel_j(n, x), boost::math::cyl_neumann(n, x)};
}

inline Complex hankel1_prime(int n, double x)
{
    return {boost::math::cyl_bessel_j_prime(n, x), boost::math::cyl_neumann_prime(n, x)};
}

inline Complex greens(double k, const gpsar::Vec2& r)
{
    return Complex(0.0, 0.25) * hankel1(0, k * gpsar::norm(r));
}

// Penetrable cylinder at the origin, line source at `src`; scattered field at `p`.
// Truncation is fixed and generous rather than adaptive.
inline Complex cylinder_scattered(double k1, double k2, double eps1, double eps2, double a, const gpsar::Vec2& src,
                                  const gpsar::Vec2& p, int orders = 90)
{
    using boost::math::cyl_bessel_j;
    using boost::math::cyl_bessel_j_prime;
    const double rs = gpsar::norm(src), rp = gpsar::norm(p);
    const double dtheta = std::atan2(p.z, p.x) - std::atan2(src.z, src.x);
    const double g1 = k1 / eps1, g2 = k2 / eps2;
    Complex sum{0.0, 0.0};
    for (int n = -orders; n <= orders; ++n) {
        const Complex alpha = Complex(0.0, 0.25) * hankel1(n, k1 * rs);
        const double num = g2 * cyl_bessel_j(n, k1 * a) * cyl_bessel_j_prime(n, k2 * a) -
                           g1 * cyl_bessel_j_prime(n, k1 * a) * cyl_bessel_j(n, k2 * a);
        const Complex den = g1 * hankel1_prime(n, k1 * a) * cyl_bessel_j(n, k2 * a) -
                            g2 * hankel1(n, k1 * a) * cyl_bessel_j_prime(n, k2 * a);
        sum += alpha * num / den * hankel1(n, k1 * rp) * std::polar(1.0, n * dtheta);
    }
    return sum;
}

} // namespace oracle
