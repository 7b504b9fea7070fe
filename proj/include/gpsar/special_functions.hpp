#pragma once

#include <complex>

#include "gpsar/vec2.hpp"

namespace gpsar {

using Complex = std::complex<double>;

/// H0 and H1 of the first kind evaluated at one argument.
struct HankelPair {
    Complex h0;
    Complex h1;
};

/// Hankel function of the first kind H_n^(1)(x) = J_n(x) + i Y_n(x) for n in {0, 1}
/// and real x > 0. Throws DomainError otherwise.
Complex hankel1(int order, double x);

/// Both orders at once; shares the work of the underlying evaluation.
HankelPair hankel01(double x);

/// Free-space 2-D Helmholtz Green's function (i/4) H0^(1)(k|r|).
Complex greens2d(double k, const Vec2& r);

/// n . grad G at r, i.e. -(ik/4) H1^(1)(k|r|) (n . r)/|r|.
Complex greens2d_normal_deriv(double k, const Vec2& r, const Vec2& n);

/// Value and normal derivative of the Green's function from one Hankel evaluation.
struct GreenPair {
    Complex value;
    Complex normal_deriv;
};
GreenPair greens2d_with_deriv(double k, const Vec2& r, const Vec2& n);

namespace detail {

// Individual evaluation regimes, exposed for switchover tests.
inline constexpr double kSeriesLimit = 8.0;
inline constexpr double kAsymptoticLimit = 25.0;

HankelPair hankel01_series(double x);
HankelPair hankel01_neumann(double x);
HankelPair hankel01_asymptotic(double x);

} // namespace detail

} // namespace gpsar
