#include "gpsar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <unsupported/Eigen/FFT>

#include "gpsar/error.hpp"

namespace gpsar {

namespace {

constexpr double kPi = std::numbers::pi;
using cvec = std::vector<std::complex<double>>;

// Signed frequency index of FFT bin j for an n-point transform.
int signed_index(int j, int n) { return j <= n / 2 ? j : j - n; }

double ipow(double base, int exponent)
{
    double out = 1.0;
    for (int i = 0; i < exponent; ++i)
        out *= base;
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Surfaces

double RoughSurface::height_at(double x) const
{
    const auto n = static_cast<int>(points.size());
    const double h = spacing();
    double u = (x + 0.5 * length) / h;
    u -= std::floor(u / n) * n;
    const int i0 = std::min(static_cast<int>(std::floor(u)), n - 1);
    const int i1 = (i0 + 1) % n;
    const double w = u - i0;
    return (1.0 - w) * points[i0].z + w * points[i1].z;
}

double RoughSurface::max_height() const
{
    double out = -std::numeric_limits<double>::infinity();
    for (const auto& p : points)
        out = std::max(out, p.z);
    return out;
}

double RoughSurface::min_height() const
{
    double out = std::numeric_limits<double>::infinity();
    for (const auto& p : points)
        out = std::min(out, p.z);
    return out;
}

void MfsOffsets::validate() const
{
    if (!(interface > 0.0) || !(target > 0.0))
        throw DomainError("MFS source offsets must be strictly positive");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> surface_grid(double length, int count)
{
    std::vector<double> x(count);
    for (int p = 0; p < count; ++p)
        x[p] = -0.5 * length + p * length / count;
    return x;
}

std::vector<Vec2> surface_normals(std::span<const double> heights, double length)
{
    const auto n = static_cast<int>(heights.size());
    cvec h(heights.begin(), heights.end());
    cvec spec;
    Eigen::FFT<double> fft;
    fft.fwd(spec, h);
    for (int j = 0; j < n; ++j) {
        const int s = signed_index(j, n);
        if (2 * s == n)
            spec[j] = 0.0;
        else
            spec[j] *= std::complex<double>(0.0, 2.0 * kPi * s / length);
    }
    cvec deriv;
    fft.inv(deriv, spec);

    std::vector<Vec2> normals(n);
    for (int p = 0; p < n; ++p) {
        const double slope = deriv[p].real();
        const double scale = 1.0 / std::sqrt(1.0 + slope * slope);
        normals[p] = {-slope * scale, scale};
    }
    return normals;
}

RoughSurface surface_from_heights(double length, std::span<const double> heights)
{
    const auto n = static_cast<int>(heights.size());
    if (n < 2 || !(length > 0.0))
        throw DomainError("surface needs at least two samples and a positive length");
    RoughSurface s;
    s.length = length;
    const auto x = surface_grid(length, n);
    s.points.resize(n);
    for (int p = 0; p < n; ++p)
        s.points[p] = {x[p], heights[p]};
    s.normals = surface_normals(heights, length);
    return s;
}

RoughSurface generate_gaussian_surface(double length, int count, double h_rms, double corr_len,
                                       std::uint64_t seed)
{
    if (!is_power_of_two(count) || count < 64)
        throw DomainError(fmt::format("surface sample count must be a power of two >= 64, got {}", count));
    if (!(length > 0.0) || !(h_rms >= 0.0) || !(corr_len > 0.0))
        throw DomainError("surface needs length > 0, h_rms >= 0 and corr_len > 0");

    auto spectrum = [&](double kappa) {
        return h_rms * h_rms * corr_len / (2.0 * std::sqrt(kPi)) *
               std::exp(-kappa * kappa * corr_len * corr_len / 4.0);
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Coefficients F_j of h(x) = (1/L) sum_j F_j exp(i k_j x), k_j = 2 pi j / L,
    // with E|F_j|^2 = 2 pi L W(k_j) and F_{-j} = conj(F_j).
    const int half = count / 2;
    cvec coeff(count, 0.0);
    for (int j = 0; j <= half; ++j) {
        const double kappa = 2.0 * kPi * j / length;
        const double amp = std::sqrt(2.0 * kPi * length * spectrum(kappa));
        std::complex<double> f;
        if (j == 0 || j == half) {
            f = amp * gauss(rng);
        } else {
            const double re = gauss(rng);
            const double im = gauss(rng);
            f = amp * std::complex<double>(re, im) / std::numbers::sqrt2;
        }
        // exp(i k_j x_p) = (-1)^j exp(2 pi i j p / P) because x_0 = -L/2.
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        coeff[j] = sign * f;
        if (j != 0 && j != half)
            coeff[count - j] = sign * std::conj(f);
    }

    cvec samples;
    Eigen::FFT<double> fft;
    fft.inv(samples, coeff);  // includes the 1/P factor

    std::vector<double> heights(count);
    for (int p = 0; p < count; ++p)
        heights[p] = samples[p].real() * count / length + 0.0;

    RoughSurface s = surface_from_heights(length, heights);
    s.h_rms = h_rms;
    s.corr_len = corr_len;
    s.seed = seed;
    return s;
}

RoughSurface flat_surface(double length, int count)
{
    std::vector<double> heights(count, 0.0);
    return surface_from_heights(length, heights);
}

RoughSurface refine_surface(const RoughSurface& surface, int count)
{
    const auto n = static_cast<int>(surface.size());
    if (count < n)
        throw DomainError("refine_surface: target count must not be smaller than the source");
    cvec h(n);
    for (int p = 0; p < n; ++p)
        h[p] = surface.points[p].z;
    cvec spec;
    Eigen::FFT<double> fft;
    fft.fwd(spec, h);

    cvec padded(count, 0.0);
    for (int j = 0; j < n; ++j) {
        const int s = signed_index(j, n);
        if (2 * s == n && count > n) {
            padded[s] += 0.5 * spec[j];
            padded[count - s] += 0.5 * spec[j];
        } else {
            padded[s >= 0 ? s : count + s] += spec[j];
        }
    }
    cvec fine;
    fft.inv(fine, padded);
    std::vector<double> heights(count);
    for (int p = 0; p < count; ++p)
        heights[p] = fine[p].real() * count / n;

    RoughSurface out = surface_from_heights(surface.length, heights);
    out.h_rms = surface.h_rms;
    out.corr_len = surface.corr_len;
    out.seed = surface.seed;
    return out;
}

SurfaceStats surface_statistics(const RoughSurface& surface)
{
    const auto n = static_cast<int>(surface.size());
    if (n < 2)
        throw DomainError("surface_statistics: need at least two samples");
    double mean = 0.0;
    for (const auto& p : surface.points)
        mean += p.z;
    mean /= n;
    cvec h(n);
    double var = 0.0;
    for (int p = 0; p < n; ++p) {
        h[p] = surface.points[p].z - mean;
        var += std::norm(h[p]);
    }
    var /= n;
    SurfaceStats out;
    out.rms = std::sqrt(var);
    if (var == 0.0)
        return out;

    // Wiener-Khinchin: circular autocorrelation from the power spectrum.
    cvec spec, acf;
    Eigen::FFT<double> fft;
    fft.fwd(spec, h);
    for (auto& c : spec)
        c = std::norm(c);
    fft.inv(acf, spec);
    const double threshold = acf[0].real() / std::exp(1.0);
    for (int lag = 1; lag <= n / 2; ++lag) {
        const double prev = acf[lag - 1].real(), cur = acf[lag].real();
        if (cur < threshold) {
            const double frac = (prev - threshold) / (prev - cur);
            out.corr_len = (lag - 1 + frac) * surface.spacing();
            break;
        }
    }
    return out;
}

void save_surface_csv(const RoughSurface& surface, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << fmt::format("# L={:.17g} P={} h_rms={:.17g} corr_len={:.17g} seed={}\n", surface.length,
                       surface.size(), surface.h_rms, surface.corr_len, surface.seed);
    for (const auto& p : surface.points)
        out << fmt::format("{:.17g},{:.17g}\n", p.x, p.z);
    if (!out)
        throw IoError("write failed for " + path.string());
}

RoughSurface load_surface_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw IoError(path.string() + ":1: missing surface header");

    double length = 0.0, h_rms = 0.0, corr_len = 0.0;
    long count = -1;
    std::uint64_t seed = 0;
    std::istringstream header(line.substr(2));
    std::string token;
    while (header >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw IoError(path.string() + ":1: malformed header token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        try {
            if (key == "L")
                length = std::stod(value);
            else if (key == "P")
                count = std::stol(value);
            else if (key == "h_rms")
                h_rms = std::stod(value);
            else if (key == "corr_len")
                corr_len = std::stod(value);
            else if (key == "seed")
                seed = std::stoull(value);
        } catch (const std::exception&) {
            throw IoError(path.string() + ":1: bad value for " + key);
        }
    }
    if (count <= 0 || !(length > 0.0))
        throw IoError(path.string() + ":1: header must define L and P");

    std::vector<double> heights;
    heights.reserve(count);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw IoError(fmt::format("{}:{}: expected 'x,h'", path.string(), lineno));
        try {
            heights.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IoError(fmt::format("{}:{}: unparsable height", path.string(), lineno));
        }
    }
    if (static_cast<long>(heights.size()) != count)
        throw IoError(fmt::format("{}: header declares P={} but {} rows were read", path.string(), count,
                                  heights.size()));
    RoughSurface s = surface_from_heights(length, heights);
    s.h_rms = h_rms;
    s.corr_len = corr_len;
    s.seed = seed;
    return s;
}

// ---------------------------------------------------------------------------
// Targets

namespace {

struct CurveSample {
    Vec2 point;
    Vec2 tangent;
};

struct CurveEvaluator {
    double t;

    CurveSample operator()(const KiteShape& k) const
    {
        return {k.center + Vec2{k.a * std::cos(t) + k.b * std::cos(2 * t) - k.c, k.d * std::sin(t)},
                {-k.a * std::sin(t) - 2 * k.b * std::sin(2 * t), k.d * std::cos(t)}};
    }
    CurveSample operator()(const CircleShape& c) const
    {
        return {c.center + c.radius * Vec2{std::cos(t), std::sin(t)}, c.radius * Vec2{-std::sin(t), std::cos(t)}};
    }
    CurveSample operator()(const EllipseShape& e) const
    {
        return {e.center + Vec2{e.semi_x * std::cos(t), e.semi_z * std::sin(t)},
                {-e.semi_x * std::sin(t), e.semi_z * std::cos(t)}};
    }
    CurveSample operator()(const StarShape& s) const
    {
        const double rho = s.base_radius + s.amplitude * std::cos(s.lobes * t);
        const double drho = -s.lobes * s.amplitude * std::sin(s.lobes * t);
        const Vec2 dir{std::cos(t), -std::sin(t)};
        const Vec2 ddir{-std::sin(t), -std::cos(t)};
        return {s.center + rho * dir, drho * dir + rho * ddir};
    }
    CurveSample operator()(const RectangleShape& r) const
    {
        // r(t) = g^(-1/(2s)), g = (cos t / a)^(2s) + (sin t / b)^(2s)
        const double a = 0.5 * r.width, b = 0.5 * r.height;
        const int s2 = 2 * r.exponent;
        const double ca = std::cos(t) / a, sb = std::sin(t) / b;
        const double g = ipow(ca, s2) + ipow(sb, s2);
        const double dg = s2 * ipow(ca, s2 - 1) * (-std::sin(t) / a) + s2 * ipow(sb, s2 - 1) * (std::cos(t) / b);
        const double rad = std::pow(g, -1.0 / s2);
        const double drad = -(1.0 / s2) * rad / g * dg;
        const Vec2 dir{std::cos(t), std::sin(t)};
        const Vec2 ddir{-std::sin(t), std::cos(t)};
        return {r.center + rad * dir, drad * dir + rad * ddir};
    }
};

struct ShapeValidator {
    void operator()(const KiteShape& k) const
    {
        if (!(k.a > 0.0) || !(k.d > 0.0))
            throw DomainError("kite needs positive a and d coefficients");
    }
    void operator()(const CircleShape& c) const
    {
        if (!(c.radius > 0.0))
            throw DomainError("circle radius must be positive");
    }
    void operator()(const EllipseShape& e) const
    {
        if (!(e.semi_x > 0.0) || !(e.semi_z > 0.0))
            throw DomainError("ellipse semi-axes must be positive");
    }
    void operator()(const StarShape& s) const
    {
        if (!(s.base_radius > 0.0) || !(std::abs(s.amplitude) < s.base_radius) || s.lobes < 1)
            throw DomainError("star needs base_radius > |amplitude| and at least one lobe");
    }
    void operator()(const RectangleShape& r) const
    {
        if (!(r.width > 0.0) || !(r.height > 0.0) || r.exponent < 1)
            throw DomainError("rectangle needs positive width, height and exponent");
    }
};

double signed_area(std::span<const Vec2> pts)
{
    double twice = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[(i + 1) % n];
        twice += a.x * b.z - b.x * a.z;
    }
    return 0.5 * twice;
}

Vec2 polygon_centroid(std::span<const Vec2> pts)
{
    double twice = 0.0, cx = 0.0, cz = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[(i + 1) % n];
        const double cross = a.x * b.z - b.x * a.z;
        twice += cross;
        cx += (a.x + b.x) * cross;
        cz += (a.z + b.z) * cross;
    }
    return {cx / (3.0 * twice), cz / (3.0 * twice)};
}

} // namespace

std::string shape_name(const TargetShape& shape)
{
    static const char* names[] = {"kite", "circle", "ellipse", "star", "rectangle"};
    return names[shape.index()];
}

TargetShape default_shape(const std::string& name)
{
    if (name == "kite")
        return KiteShape{};
    if (name == "circle")
        return CircleShape{};
    if (name == "ellipse")
        return EllipseShape{};
    if (name == "star")
        return StarShape{};
    if (name == "rectangle")
        return RectangleShape{};
    throw DomainError("unknown target shape '" + name + "'");
}

TargetBoundary make_target(const TargetShape& shape, int count)
{
    if (count < 16)
        throw DomainError(fmt::format("target needs at least 16 samples, got {}", count));
    std::visit(ShapeValidator{}, shape);

    TargetBoundary tb;
    tb.shape = shape;
    tb.points.resize(count);
    tb.normals.resize(count);
    for (int q = 0; q < count; ++q) {
        const double t = 2.0 * kPi * q / count;
        const CurveSample s = std::visit(CurveEvaluator{t}, shape);
        const double speed = norm(s.tangent);
        if (!(speed > 0.0))
            throw DomainError("degenerate target parameterization");
        tb.points[q] = s.point;
        tb.normals[q] = Vec2{s.tangent.z, -s.tangent.x} * (1.0 / speed);
    }

    const double area = signed_area(tb.points);
    if (std::abs(area) < 1e-12)
        throw DomainError("target boundary encloses zero area");
    // (z', -x') is outward for counter-clockwise traversal.
    if (area < 0.0)
        for (auto& n : tb.normals)
            n = -n;
    tb.centroid = polygon_centroid(tb.points);
    return tb;
}

double TargetBoundary::polygon_area() const { return std::abs(signed_area(points)); }

bool TargetBoundary::contains(const Vec2& p) const
{
    bool inside = false;
    const std::size_t n = points.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = points[i];
        const Vec2& b = points[j];
        if ((a.z > p.z) != (b.z > p.z)) {
            const double x_cross = a.x + (p.z - a.z) * (b.x - a.x) / (b.z - a.z);
            if (p.x < x_cross)
                inside = !inside;
        }
    }
    return inside;
}

Vec2 TargetBoundary::top_point() const
{
    return *std::max_element(points.begin(), points.end(),
                             [](const Vec2& a, const Vec2& b) { return a.z < b.z; });
}

double TargetBoundary::distance_to(const Vec2& p) const
{
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = points[i];
        const Vec2& b = points[(i + 1) % n];
        const Vec2 ab = b - a;
        const double len2 = dot(ab, ab);
        const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, norm(p - (a + t * ab)));
    }
    return best;
}

} // namespace gpsar
