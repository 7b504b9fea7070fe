#include "gpsar/cylinder_oracle.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gpsar/error.hpp"

namespace gpsar {

namespace {

constexpr int kMaxOrder = 400;
constexpr double kTolerance = 1e-14;

struct OrderTables {
    std::vector<double> j, y;

    // n-th derivative helpers: C'_n(x) = C_{n-1}(x) - (n/x) C_n(x), with C'_0 = -C_1.
    double jp(int n, double x) const { return n == 0 ? -j[1] : j[n - 1] - n / x * j[n]; }
    double yp(int n, double x) const { return n == 0 ? -y[1] : y[n - 1] - n / x * y[n]; }
    Complex h(int n) const { return {j[n], y[n]}; }
    Complex hp(int n, double x) const { return {jp(n, x), yp(n, x)}; }
};

OrderTables tables(int nmax, double x)
{
    return {bessel_j_orders(nmax + 1, x), bessel_y_orders(nmax + 1, x)};
}

} // namespace

std::vector<double> bessel_j_orders(int nmax, double x)
{
    if (!(x > 0.0) || nmax < 0)
        throw DomainError("bessel_j_orders: need x > 0 and nmax >= 0");
    int start = std::max(nmax, static_cast<int>(x)) + 40 + static_cast<int>(std::sqrt(40.0 * std::max(nmax, 1)));
    if (start % 2 != 0)
        ++start;
    std::vector<double> j(static_cast<std::size_t>(start + 2), 0.0);
    j[start + 1] = 0.0;
    j[start] = 1e-300;
    double norm = 0.0;
    for (int n = start; n >= 1; --n) {
        j[n - 1] = (2.0 * n / x) * j[n] - j[n + 1];
        if (std::abs(j[n - 1]) > 1e250) {
            for (int m = n - 1; m <= start; ++m)
                j[m] *= 1e-250;
            norm *= 1e-250;
        }
        if ((n - 1) % 2 == 0)
            norm += (n - 1 == 0 ? 1.0 : 2.0) * j[n - 1];
    }
    j.resize(static_cast<std::size_t>(nmax + 1));
    for (auto& v : j)
        v /= norm;
    // Anchor to the independently evaluated J0 to remove normalization drift.
    const double j0 = hankel01(x).h0.real();
    if (std::abs(j[0]) > 1e-3) {
        const double s = j0 / j[0];
        for (auto& v : j)
            v *= s;
    }
    return j;
}

std::vector<double> bessel_y_orders(int nmax, double x)
{
    if (!(x > 0.0) || nmax < 0)
        throw DomainError("bessel_y_orders: need x > 0 and nmax >= 0");
    const HankelPair h = hankel01(x);
    std::vector<double> y(static_cast<std::size_t>(std::max(nmax, 1) + 1));
    y[0] = h.h0.imag();
    y[1] = h.h1.imag();
    for (int n = 1; n < nmax; ++n)
        y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1];
    y.resize(static_cast<std::size_t>(nmax + 1));
    return y;
}

std::vector<Complex> cylinder_series_oracle(double k1, double k2, double eps_r1, double eps_r2, double radius,
                                            const Vec2& source, std::span<const Vec2> points)
{
    if (!(k1 > 0.0) || !(k2 > 0.0) || !(radius > 0.0) || !(eps_r1 > 0.0) || !(eps_r2 > 0.0))
        throw DomainError("cylinder oracle: wavenumbers, permittivities and radius must be positive");
    const double rho_s = norm(source);
    if (!(rho_s > radius))
        throw DomainError("cylinder oracle: source must lie outside the cylinder");
    double rho_min = rho_s;
    for (const auto& p : points) {
        if (!(norm(p) > radius))
            throw DomainError(fmt::format("cylinder oracle: point ({}, {}) is not outside the cylinder", p.x, p.z));
        rho_min = std::min(rho_min, norm(p));
    }

    const double xa1 = k1 * radius, xa2 = k2 * radius;
    const OrderTables t1 = tables(kMaxOrder, xa1);
    const OrderTables t2 = tables(kMaxOrder, xa2);
    const OrderTables ts = tables(kMaxOrder, k1 * rho_s);
    const OrderTables tm = tables(kMaxOrder, k1 * rho_min);
    const double g1 = k1 / eps_r1, g2 = k2 / eps_r2;

    // A_n multiplies H_n(k1 rho) cos(n (theta - theta_s)); A_{-n} folds into the factor 2.
    std::vector<Complex> coeff;
    int quiet = 0;
    for (int n = 0; n < kMaxOrder; ++n) {
        const Complex alpha = Complex(0.0, 0.25) * ts.h(n);
        const double num_re = g2 * t1.j[n] * t2.jp(n, xa2) - g1 * t1.jp(n, xa1) * t2.j[n];
        const Complex den = g1 * t1.hp(n, xa1) * t2.j[n] - g2 * t1.h(n) * t2.jp(n, xa2);
        const Complex a = alpha * num_re / den;
        coeff.push_back(a);
        const double size = std::abs(a * tm.h(n));
        const double scale = std::abs(coeff.front() * tm.h(0));
        if (n > xa1 && size < kTolerance * std::max(scale, 1e-300)) {
            if (++quiet == 3)
                break;
        } else {
            quiet = 0;
        }
        if (n == kMaxOrder - 1)
            throw SolverError("cylinder oracle: series did not converge within the order cap");
    }

    const double theta_s = std::atan2(source.z, source.x);
    const int orders = static_cast<int>(coeff.size());
    std::vector<Complex> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        const double rho = norm(p);
        const double theta = std::atan2(p.z, p.x);
        const OrderTables tp = tables(orders, k1 * rho);
        Complex sum = coeff[0] * tp.h(0);
        for (int n = 1; n < orders; ++n)
            sum += 2.0 * coeff[n] * tp.h(n) * std::cos(n * (theta - theta_s));
        out.push_back(sum);
    }
    return out;
}

} // namespace gpsar
