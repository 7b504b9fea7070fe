#pragma once

#include <span>
#include <vector>

#include "gpsar/special_functions.hpp"
#include "gpsar/vec2.hpp"

namespace gpsar {

/// J_0..J_nmax at x > 0 by normalized backward recurrence.
std::vector<double> bessel_j_orders(int nmax, double x);
/// Y_0..Y_nmax at x > 0 by forward recurrence from Y_0, Y_1.
std::vector<double> bessel_y_orders(int nmax, double x);

/// Scattered exterior field of a penetrable circular cylinder (radius a, centered
/// at the origin, background k1 / eps_r1, interior k2 / eps_r2) illuminated by the
/// line source G_{k1}(r - source). Transmission conditions u1 = u2 and
/// eps_r1^-1 d_nu u1 = eps_r2^-1 d_nu u2. `source` and `points` are relative to
/// the cylinder center and must lie outside it.
std::vector<Complex> cylinder_series_oracle(double k1, double k2, double eps_r1, double eps_r2, double radius,
                                            const Vec2& source, std::span<const Vec2> points);

} // namespace gpsar
