#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gpsar/vec2.hpp"

namespace gpsar {

/// Sampled periodic air-soil interface z = h(x) on x_p = -L/2 + p L/P, p = 0..P-1.
struct RoughSurface {
    double length = 0.0;           ///< period L (cm)
    std::vector<Vec2> points;      ///< (x_p, h(x_p))
    std::vector<Vec2> normals;     ///< unit normals pointing into the air
    double h_rms = 0.0;            ///< requested RMS height (cm)
    double corr_len = 0.0;         ///< requested correlation length (cm)
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
    double spacing() const { return length / static_cast<double>(points.size()); }

    /// Height at arbitrary x by periodic linear interpolation between nodes.
    double height_at(double x) const;
    double max_height() const;
    double min_height() const;
};

/// Source-point offsets from the interface and the target boundary (cm).
struct MfsOffsets {
    double interface = 2.0;
    double target = 0.2;

    void validate() const;
};

/// Grid abscissae x_p = -L/2 + p L/P.
std::vector<double> surface_grid(double length, int count);

/// Spectral-synthesis realization of a Gaussian-correlated random surface with
/// spectrum W(k) = h_rms^2 corr_len / (2 sqrt(pi)) exp(-k^2 corr_len^2 / 4).
RoughSurface generate_gaussian_surface(double length, int count, double h_rms, double corr_len,
                                       std::uint64_t seed);

/// The flat interface z = 0 sampled on the same grid.
RoughSurface flat_surface(double length, int count);

/// Unit normals (-h', 1)/sqrt(1 + h'^2) with h' from periodic spectral differentiation.
std::vector<Vec2> surface_normals(std::span<const double> heights, double length);

/// Builds a surface (points + normals) from sampled heights.
RoughSurface surface_from_heights(double length, std::span<const double> heights);

/// Band-limited (zero-padded FFT) resampling onto `count` points; count >= P.
RoughSurface refine_surface(const RoughSurface& surface, int count);

/// Sample RMS height and the lag where the circular autocorrelation first drops below 1/e.
struct SurfaceStats {
    double rms = 0.0;
    double corr_len = 0.0;
};
SurfaceStats surface_statistics(const RoughSurface& surface);

/// Power-of-two test used for the sample count.
bool is_power_of_two(int n);

void save_surface_csv(const RoughSurface& surface, const std::filesystem::path& path);
RoughSurface load_surface_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Target boundaries

struct KiteShape {
    Vec2 center{3.0, -14.0};
    double a = 3.0, b = 1.8, c = 0.65, d = 3.4;  ///< (a cos t + b cos 2t - c, d sin t)
};

struct CircleShape {
    Vec2 center{3.0, -14.0};
    double radius = 3.5;
};

struct EllipseShape {
    Vec2 center{3.0, -14.0};
    double semi_x = 3.5;  ///< semi-axis along x
    double semi_z = 2.5;  ///< semi-axis along z
};

/// Polar star (base + amplitude cos(lobes t)) (cos t, -sin t) about the center.
struct StarShape {
    Vec2 center{3.0, -14.0};
    double base_radius = 2.5;
    double amplitude = 0.6;
    int lobes = 5;
};

/// Rounded rectangle |2x/w|^(2s) + |2z/h|^(2s) = 1, sampled uniformly in polar angle.
struct RectangleShape {
    Vec2 center{3.0, -15.0};
    double width = 7.0;
    double height = 5.0;
    int exponent = 5;
};

using TargetShape = std::variant<KiteShape, CircleShape, EllipseShape, StarShape, RectangleShape>;

std::string shape_name(const TargetShape& shape);

/// Parses "kite", "circle", "ellipse", "star" or "rectangle" into the default
/// parameters for that shape. Throws DomainError for anything else.
TargetShape default_shape(const std::string& name);

/// Closed target curve sampled at t_q = 2 pi q / Q with outward unit normals.
struct TargetBoundary {
    TargetShape shape;
    std::vector<Vec2> points;
    std::vector<Vec2> normals;  ///< point out of the target, into the soil
    Vec2 centroid;

    std::size_t size() const { return points.size(); }
    /// Shoelace area of the sampled polygon (always positive).
    double polygon_area() const;
    /// Even-odd point-in-polygon test against the sampled curve.
    bool contains(const Vec2& p) const;
    /// Sample with the largest z (the point facing an aperture overhead).
    Vec2 top_point() const;
    /// Distance from p to the sampled polygon.
    double distance_to(const Vec2& p) const;
};

TargetBoundary make_target(const TargetShape& shape, int count);

} // namespace gpsar
