#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpsar/geometry.hpp"
#include "gpsar/special_functions.hpp"

namespace gpsar {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Frequency and dielectric description of the three regions.
struct MediumParams {
    double frequency_ghz = 5.1;
    double eps_r1 = 9.0;       ///< soil
    double eps_r2 = 2.3;       ///< target
    double wavespeed = 30.0;   ///< cm GHz

    double omega() const;
    double k0() const;
    double k1() const;
    double k2() const;
    MediumParams at_frequency(double f_ghz) const;
    void validate() const;
};

/// Point scatterer of reflectivity rho at `position` (below the interface).
struct PointTarget {
    Vec2 position{0.0, -10.36};
    Complex reflectivity{8.0, 0.0};
};

/// Everything the direct solvers need except the frequency and the source.
struct Scene {
    RoughSurface surface;
    std::optional<TargetBoundary> target;
    std::optional<PointTarget> point;
    MediumParams media;
    MfsOffsets offsets;

    void validate() const;
};

enum class Variant { full, first_order, first_order_flat, point_target, no_target };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Expansion coefficients for one source position.
///
/// `a`, `b` expand about the scene interface (a = a0 + a1 for first_order).
/// For first_order_flat and point_target the target-induced correction lives in
/// `a_flat`, `b_flat`, expanded about the flat interface z = 0, and `a`, `b` hold
/// only the ground-bounce solve. `a_ground`, `b_ground` always hold that solve
/// for the staged variants.
struct MfsSolution {
    Variant variant = Variant::full;
    CVector a, b;
    CVector c_ext, c_int;
    CVector a_ground, b_ground;
    CVector a_flat, b_flat;
    Complex point_amplitude{0.0, 0.0};  ///< rho u^E for the point-target variant
    Vec2 point_position{};
    double residual = 0.0;   ///< worst relative backward residual over the stage solves
    double condition = 0.0;  ///< worst 1-norm condition estimate over the stage solves
};

/// Dense blocks of the collocation system. Shapes: A P x P, B P x Q, C Q x P, S Q x Q.
struct MfsBlocks {
    CMatrix A1, A2, A3, A4;
    CMatrix B1, B2;
    CMatrix C1, C2;
    CMatrix S1, S2, S3, S4;
};

/// MFS source locations implied by the geometry and offsets.
std::vector<Vec2> interface_air_sources(const RoughSurface& s, const MfsOffsets& o);   ///< r_p - d z
std::vector<Vec2> interface_soil_sources(const RoughSurface& s, const MfsOffsets& o);  ///< r_p + d z
std::vector<Vec2> target_exterior_sources(const TargetBoundary& t, const MfsOffsets& o);  ///< r_q - d nu
std::vector<Vec2> target_interior_sources(const TargetBoundary& t, const MfsOffsets& o);  ///< r_q + d nu

/// Interface-only blocks A1..A4.
MfsBlocks assemble_interface_blocks(const RoughSurface& surface, const MediumParams& media,
                                    const MfsOffsets& offsets);
/// All twelve blocks.
MfsBlocks assemble_blocks(const RoughSurface& surface, const TargetBoundary& target,
                          const MediumParams& media, const MfsOffsets& offsets);
/// Target-only blocks S1..S4.
MfsBlocks assemble_target_blocks(const TargetBoundary& target, const MediumParams& media,
                                 const MfsOffsets& offsets);

/// LU factorization of one dense system with refinement and an SVD fallback.
class DenseSystem {
public:
    static constexpr double kSvdThreshold = 1e12;
    static constexpr double kSingularThreshold = 1e15;

    DenseSystem() = default;
    DenseSystem(CMatrix matrix, std::string label);

    /// Solves for every column of rhs; throws SolverError when the system is singular.
    CMatrix solve(const CMatrix& rhs, double* residual = nullptr) const;

    double condition() const { return condition_; }
    bool uses_svd() const { return svd_ != nullptr; }
    Eigen::Index size() const { return matrix_.rows(); }
    const CMatrix& matrix() const { return matrix_; }

private:
    CMatrix matrix_;
    std::string label_;
    Eigen::PartialPivLU<CMatrix> lu_;
    std::shared_ptr<Eigen::BDCSVD<CMatrix>> svd_;
    double condition_ = 0.0;
};

/// All factorizations for one frequency and variant. The system matrices do not
/// depend on the source, so one instance serves every aperture position; it is
/// immutable after construction and safe to share across threads.
class FrequencySolver {
public:
    FrequencySolver(const Scene& scene, double frequency_ghz, Variant variant);

    MfsSolution solve(const Vec2& source) const;
    std::vector<MfsSolution> solve(std::span<const Vec2> sources) const;

    /// Solve the isolated-target problem (S-blocks only) for an arbitrary
    /// incident field given by its values and normal derivatives on the target.
    void solve_target(const CMatrix& incident, const CMatrix& incident_dn, CMatrix& c_ext,
                      CMatrix& c_int, double* residual = nullptr) const;

    const MediumParams& media() const { return media_; }
    Variant variant() const { return variant_; }
    double condition() const;
    std::uint64_t fingerprint() const { return fingerprint_; }
    const Scene& scene() const { return *scene_; }

private:
    std::vector<MfsSolution> solve_full(std::span<const Vec2> sources) const;
    std::vector<MfsSolution> solve_staged(std::span<const Vec2> sources) const;

    const Scene* scene_;
    MediumParams media_;
    Variant variant_;
    std::uint64_t fingerprint_ = 0;
    RoughSurface flat_;

    DenseSystem full_;
    DenseSystem interface_;
    DenseSystem flat_interface_;
    DenseSystem target_;
    CMatrix B1_, B2_;  // target sources -> scene interface collocation
    CMatrix C1_, C2_;  // interface soil sources -> target collocation
    Eigen::RowVectorXcd excitation_;  // b0 -> u^E at the point target
    CVector point_response_;          // flat-interface response to [f1; f2]
};

/// Isolated penetrable target in an unbounded k1 background.
struct TargetSolution {
    CVector c_ext, c_int;
    double residual = 0.0;
    double condition = 0.0;
};

/// Solves the S-block system for the incident line source G1(r - source).
TargetSolution solve_isolated_target(const TargetBoundary& target, const MediumParams& media,
                                     const MfsOffsets& offsets, const Vec2& source);

/// Scattered field of an isolated-target solution outside (exterior = true) or inside the target.
CVector evaluate_isolated_target(const TargetSolution& solution, const TargetBoundary& target,
                                 const MediumParams& media, const MfsOffsets& offsets,
                                 std::span<const Vec2> points, bool exterior = true);

/// Geometry + frequency fingerprint used to key cached factorizations.
std::uint64_t scene_fingerprint(const Scene& scene, double frequency_ghz);

/// Incident line-source data y1 = G0(r_p - src), y2 = dn G0(r_p - src).
void incident_on_interface(const RoughSurface& surface, double k0, std::span<const Vec2> sources,
                           CMatrix& values, CMatrix& normal_derivs);

MfsSolution solve_full(const Scene& scene, double frequency_ghz, const Vec2& source);
MfsSolution solve_no_target(const Scene& scene, double frequency_ghz, const Vec2& source);
MfsSolution solve_first_order(const Scene& scene, double frequency_ghz, const Vec2& source);
MfsSolution solve_first_order_flat(const Scene& scene, double frequency_ghz, const Vec2& source);
MfsSolution solve_point_target(const Scene& scene, double frequency_ghz, const Vec2& source);

enum class Region { air = 0, soil = 1, target = 2 };

/// Scattered field u_j of the region's MFS expansion at each point. When
/// `check_region` is set, points outside the named region raise DomainError.
CVector evaluate_field(const MfsSolution& solution, const Scene& scene, double frequency_ghz, Region region,
                       std::span<const Vec2> points, bool check_region = true);

/// n . grad u_j at each point with the matching unit normal.
CVector evaluate_normal_derivative(const MfsSolution& solution, const Scene& scene, double frequency_ghz,
                                   Region region, std::span<const Vec2> points, std::span<const Vec2> normals);

/// Region containing p (interface by linear interpolation, target by polygon test).
Region locate(const Scene& scene, const Vec2& p);

} // namespace gpsar
