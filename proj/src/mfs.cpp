#include "gpsar/mfs.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "gpsar/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#else
inline int omp_in_parallel() { return 1; }
#endif

namespace gpsar {

namespace {

constexpr double kPi = std::numbers::pi;

// Fills value(i, j) = G_k(targets_i - sources_j) and, when requested,
// deriv(i, j) = scale * n_i . grad G_k(targets_i - sources_j).
void fill_green(CMatrix& value, CMatrix* deriv, std::span<const Vec2> targets, std::span<const Vec2> normals,
                std::span<const Vec2> sources, double k, double scale)
{
    const auto rows = static_cast<Eigen::Index>(targets.size());
    const auto cols = static_cast<Eigen::Index>(sources.size());
    value.resize(rows, cols);
    if (deriv)
        deriv->resize(rows, cols);

    bool singular = false;
#pragma omp parallel for schedule(static) if (!omp_in_parallel() && rows * cols > 4096)
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const Vec2 r = targets[i] - sources[j];
            const double dist = norm(r);
            if (dist == 0.0) {
                singular = true;
                continue;
            }
            const HankelPair h = hankel01(k * dist);
            value(i, j) = Complex(0.0, 0.25) * h.h0;
            if (deriv) {
                const double cos_angle = dot(normals[i], r) / dist;
                (*deriv)(i, j) = Complex(0.0, -0.25 * k * cos_angle * scale) * h.h1;
            }
        }
    }
    if (singular)
        throw DomainError("MFS assembly hit a source coinciding with a collocation point");
}

std::vector<Vec2> shifted(std::span<const Vec2> pts, std::span<const Vec2> dirs, double step)
{
    std::vector<Vec2> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        out[i] = pts[i] + step * dirs[i];
    return out;
}

std::vector<Vec2> shifted_z(std::span<const Vec2> pts, double step)
{
    std::vector<Vec2> out(pts.begin(), pts.end());
    for (auto& p : out)
        p.z += step;
    return out;
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes)
{
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
}

void fnv_mix(std::uint64_t& h, double v) { fnv_mix(h, &v, sizeof v); }

void fnv_mix(std::uint64_t& h, std::span<const Vec2> pts)
{
    for (const auto& p : pts) {
        fnv_mix(h, p.x);
        fnv_mix(h, p.z);
    }
}

bool needs_target(Variant v) { return v == Variant::full || v == Variant::first_order || v == Variant::first_order_flat; }

// Stacks [top; bottom] for two blocks with equal column counts.
CMatrix vstack(const CMatrix& top, const CMatrix& bottom)
{
    CMatrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

CMatrix interface_matrix(const MfsBlocks& blk)
{
    const Eigen::Index p = blk.A1.rows();
    CMatrix m(2 * p, 2 * p);
    m << -blk.A1, blk.A2, -blk.A3, blk.A4;
    return m;
}

CMatrix target_matrix(const MfsBlocks& blk)
{
    const Eigen::Index q = blk.S1.rows();
    CMatrix m(2 * q, 2 * q);
    m << blk.S1, -blk.S2, blk.S3, -blk.S4;
    return m;
}

} // namespace

// ---------------------------------------------------------------------------

double MediumParams::omega() const { return 2.0 * kPi * frequency_ghz; }
double MediumParams::k0() const { return omega() / wavespeed; }
double MediumParams::k1() const { return k0() * std::sqrt(eps_r1); }
double MediumParams::k2() const { return k0() * std::sqrt(eps_r2); }

MediumParams MediumParams::at_frequency(double f_ghz) const
{
    MediumParams out = *this;
    out.frequency_ghz = f_ghz;
    return out;
}

void MediumParams::validate() const
{
    if (!(frequency_ghz > 0.0))
        throw DomainError("frequency must be positive");
    if (!(wavespeed > 0.0))
        throw DomainError("wavespeed must be positive");
    if (!(eps_r1 >= 1.0) || !(eps_r2 >= 1.0))
        throw DomainError("relative dielectric constants must be >= 1");
}

void Scene::validate() const
{
    media.validate();
    offsets.validate();
    if (surface.size() < 2)
        throw DomainError("scene has no interface samples");
    const double h_min = surface.min_height();
    if (target) {
        for (const auto& p : target->points)
            if (!(p.z < h_min))
                throw DomainError("target must lie strictly below the interface");
    }
    if (point && !(point->position.z < std::min(h_min, 0.0)))
        throw DomainError("point target must lie strictly below the interface and z = 0");
}

std::string to_string(Variant v)
{
    switch (v) {
    case Variant::full: return "full";
    case Variant::first_order: return "first_order";
    case Variant::first_order_flat: return "first_order_flat";
    case Variant::point_target: return "point_target";
    case Variant::no_target: return "no_target";
    }
    return "unknown";
}

Variant variant_from_string(const std::string& name)
{
    for (Variant v : {Variant::full, Variant::first_order, Variant::first_order_flat, Variant::point_target,
                      Variant::no_target})
        if (to_string(v) == name)
            return v;
    throw DomainError("unknown solver variant '" + name + "'");
}

std::vector<Vec2> interface_air_sources(const RoughSurface& s, const MfsOffsets& o)
{
    return shifted_z(s.points, -o.interface);
}

std::vector<Vec2> interface_soil_sources(const RoughSurface& s, const MfsOffsets& o)
{
    return shifted_z(s.points, o.interface);
}

std::vector<Vec2> target_exterior_sources(const TargetBoundary& t, const MfsOffsets& o)
{
    return shifted(t.points, t.normals, -o.target);
}

std::vector<Vec2> target_interior_sources(const TargetBoundary& t, const MfsOffsets& o)
{
    return shifted(t.points, t.normals, o.target);
}

MfsBlocks assemble_interface_blocks(const RoughSurface& surface, const MediumParams& media,
                                    const MfsOffsets& offsets)
{
    offsets.validate();
    MfsBlocks blk;
    const auto air = interface_air_sources(surface, offsets);
    const auto soil = interface_soil_sources(surface, offsets);
    fill_green(blk.A1, &blk.A3, surface.points, surface.normals, air, media.k0(), 1.0);
    fill_green(blk.A2, &blk.A4, surface.points, surface.normals, soil, media.k1(), 1.0 / media.eps_r1);
    return blk;
}

MfsBlocks assemble_target_blocks(const TargetBoundary& target, const MediumParams& media,
                                 const MfsOffsets& offsets)
{
    offsets.validate();
    MfsBlocks blk;
    const auto ext = target_exterior_sources(target, offsets);
    const auto in = target_interior_sources(target, offsets);
    fill_green(blk.S1, &blk.S3, target.points, target.normals, ext, media.k1(), 1.0 / media.eps_r1);
    fill_green(blk.S2, &blk.S4, target.points, target.normals, in, media.k2(), 1.0 / media.eps_r2);
    return blk;
}

MfsBlocks assemble_blocks(const RoughSurface& surface, const TargetBoundary& target, const MediumParams& media,
                          const MfsOffsets& offsets)
{
    MfsBlocks blk = assemble_interface_blocks(surface, media, offsets);
    MfsBlocks tb = assemble_target_blocks(target, media, offsets);
    blk.S1 = std::move(tb.S1);
    blk.S2 = std::move(tb.S2);
    blk.S3 = std::move(tb.S3);
    blk.S4 = std::move(tb.S4);
    const auto ext = target_exterior_sources(target, offsets);
    const auto soil = interface_soil_sources(surface, offsets);
    fill_green(blk.B1, &blk.B2, surface.points, surface.normals, ext, media.k1(), 1.0 / media.eps_r1);
    fill_green(blk.C1, &blk.C2, target.points, target.normals, soil, media.k1(), 1.0 / media.eps_r1);
    return blk;
}

// ---------------------------------------------------------------------------

DenseSystem::DenseSystem(CMatrix matrix, std::string label) : matrix_(std::move(matrix)), label_(std::move(label))
{
    if (!matrix_.allFinite())
        throw SolverError(label_ + ": system matrix has non-finite entries");
    lu_.compute(matrix_);
    const double rcond = lu_.rcond();
    condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(condition_ <= kSingularThreshold))
        throw SolverError(fmt::format("{}: numerically singular system ({}x{}, condition estimate {:.3e})", label_,
                                      matrix_.rows(), matrix_.cols(), condition_));
    if (condition_ > kSvdThreshold)
        svd_ = std::make_shared<Eigen::BDCSVD<CMatrix>>(matrix_, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

CMatrix DenseSystem::solve(const CMatrix& rhs, double* residual) const
{
    CMatrix x;
    if (svd_) {
        x = svd_->solve(rhs);
    } else {
        x = lu_.solve(rhs);
        const CMatrix r = rhs - matrix_ * x;
        x += lu_.solve(r);
    }
    if (residual) {
        const double scale = rhs.norm();
        *residual = scale > 0.0 ? (matrix_ * x - rhs).norm() / scale : (matrix_ * x).norm();
    }
    if (!x.allFinite())
        throw SolverError(label_ + ": solve produced non-finite coefficients");
    return x;
}

// ---------------------------------------------------------------------------

std::uint64_t scene_fingerprint(const Scene& scene, double frequency_ghz)
{
    std::uint64_t h = 1469598103934665603ULL;
    fnv_mix(h, frequency_ghz);
    fnv_mix(h, scene.media.eps_r1);
    fnv_mix(h, scene.media.eps_r2);
    fnv_mix(h, scene.media.wavespeed);
    fnv_mix(h, scene.offsets.interface);
    fnv_mix(h, scene.offsets.target);
    fnv_mix(h, scene.surface.points);
    if (scene.target)
        fnv_mix(h, scene.target->points);
    if (scene.point) {
        fnv_mix(h, scene.point->position.x);
        fnv_mix(h, scene.point->position.z);
    }
    return h;
}

void incident_on_interface(const RoughSurface& surface, double k0, std::span<const Vec2> sources,
                           CMatrix& values, CMatrix& normal_derivs)
{
    const auto p = static_cast<Eigen::Index>(surface.size());
    const auto n = static_cast<Eigen::Index>(sources.size());
    values.resize(p, n);
    normal_derivs.resize(p, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < p; ++i) {
            const GreenPair g = greens2d_with_deriv(k0, surface.points[i] - sources[j], surface.normals[i]);
            values(i, j) = g.value;
            normal_derivs(i, j) = g.normal_deriv;
        }
}

FrequencySolver::FrequencySolver(const Scene& scene, double frequency_ghz, Variant variant)
    : scene_(&scene), media_(scene.media.at_frequency(frequency_ghz)), variant_(variant)
{
    scene.validate();
    media_.validate();
    if (needs_target(variant) && !scene.target)
        throw DomainError("variant " + to_string(variant) + " requires a target boundary");
    if (variant == Variant::point_target && !scene.point)
        throw DomainError("variant point_target requires a point target");
    fingerprint_ = scene_fingerprint(scene, frequency_ghz);

    const RoughSurface& surface = scene.surface;
    const MfsOffsets& off = scene.offsets;
    const std::string tag = fmt::format("f={:.4g} GHz", frequency_ghz);

    if (variant == Variant::full) {
        const MfsBlocks blk = assemble_blocks(surface, *scene.target, media_, off);
        const Eigen::Index p = blk.A1.rows(), q = blk.S1.rows();
        CMatrix m = CMatrix::Zero(2 * p + 2 * q, 2 * p + 2 * q);
        m.block(0, 0, p, p) = -blk.A1;
        m.block(0, p, p, p) = blk.A2;
        m.block(0, 2 * p, p, q) = blk.B1;
        m.block(p, 0, p, p) = -blk.A3;
        m.block(p, p, p, p) = blk.A4;
        m.block(p, 2 * p, p, q) = blk.B2;
        m.block(2 * p, p, q, p) = blk.C1;
        m.block(2 * p, 2 * p, q, q) = blk.S1;
        m.block(2 * p, 2 * p + q, q, q) = -blk.S2;
        m.block(2 * p + q, p, q, p) = blk.C2;
        m.block(2 * p + q, 2 * p, q, q) = blk.S3;
        m.block(2 * p + q, 2 * p + q, q, q) = -blk.S4;
        full_ = DenseSystem(std::move(m), "full system " + tag);
        return;
    }

    interface_ = DenseSystem(interface_matrix(assemble_interface_blocks(surface, media_, off)),
                             "interface system " + tag);
    if (variant == Variant::no_target)
        return;

    const bool flat_step = variant == Variant::first_order_flat || variant == Variant::point_target;
    if (flat_step) {
        flat_ = flat_surface(surface.length, static_cast<int>(surface.size()));
        flat_interface_ = DenseSystem(interface_matrix(assemble_interface_blocks(flat_, media_, off)),
                                      "flat interface system " + tag);
    }

    const auto soil = interface_soil_sources(surface, off);
    if (variant == Variant::point_target) {
        const Vec2 r0 = scene.point->position;
        excitation_.resize(static_cast<Eigen::Index>(soil.size()));
        for (std::size_t p = 0; p < soil.size(); ++p)
            excitation_(static_cast<Eigen::Index>(p)) = greens2d(media_.k1(), r0 - soil[p]);
        const std::vector<Vec2> origin{r0};
        CMatrix f1, f2;
        fill_green(f1, &f2, surface.points, surface.normals, origin, media_.k1(), 1.0);
        point_response_ = flat_interface_.solve(vstack(f1, f2)).col(0);
        return;
    }

    const TargetBoundary& target = *scene.target;
    target_ = DenseSystem(target_matrix(assemble_target_blocks(target, media_, off)), "target system " + tag);
    fill_green(C1_, &C2_, target.points, target.normals, soil, media_.k1(), 1.0 / media_.eps_r1);
    fill_green(B1_, &B2_, surface.points, surface.normals, target_exterior_sources(target, off),
               media_.k1(), 1.0 / media_.eps_r1);
}

double FrequencySolver::condition() const
{
    double c = 0.0;
    for (const DenseSystem* s : {&full_, &interface_, &flat_interface_, &target_})
        if (s->size() > 0)
            c = std::max(c, s->condition());
    return c;
}

MfsSolution FrequencySolver::solve(const Vec2& source) const
{
    return solve(std::span<const Vec2>(&source, 1)).front();
}

std::vector<MfsSolution> FrequencySolver::solve(std::span<const Vec2> sources) const
{
    for (const auto& s : sources)
        if (!(s.z > scene_->surface.height_at(s.x)))
            throw DomainError(fmt::format("source ({}, {}) is not above the interface", s.x, s.z));
    if (variant_ == Variant::full)
        return solve_full(sources);
    return solve_staged(sources);
}

std::vector<MfsSolution> FrequencySolver::solve_full(std::span<const Vec2> sources) const
{
    const Eigen::Index p = static_cast<Eigen::Index>(scene_->surface.size());
    const Eigen::Index q = static_cast<Eigen::Index>(scene_->target->size());
    const auto n = static_cast<Eigen::Index>(sources.size());
    CMatrix y1, y2;
    incident_on_interface(scene_->surface, media_.k0(), sources, y1, y2);
    CMatrix rhs = CMatrix::Zero(2 * p + 2 * q, n);
    rhs.topRows(p) = y1;
    rhs.middleRows(p, p) = y2;
    double residual = 0.0;
    const CMatrix x = full_.solve(rhs, &residual);

    std::vector<MfsSolution> out(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        MfsSolution& s = out[static_cast<std::size_t>(j)];
        s.variant = Variant::full;
        s.a = x.col(j).segment(0, p);
        s.b = x.col(j).segment(p, p);
        s.c_ext = x.col(j).segment(2 * p, q);
        s.c_int = x.col(j).segment(2 * p + q, q);
        s.residual = residual;
        s.condition = full_.condition();
    }
    return out;
}

void FrequencySolver::solve_target(const CMatrix& incident, const CMatrix& incident_dn, CMatrix& c_ext,
                                   CMatrix& c_int, double* residual) const
{
    if (target_.size() == 0)
        throw DomainError("solve_target: this solver has no target factorization");
    const Eigen::Index q = incident.rows();
    const CMatrix x = target_.solve(-vstack(incident, incident_dn), residual);
    c_ext = x.topRows(q);
    c_int = x.bottomRows(q);
}

std::vector<MfsSolution> FrequencySolver::solve_staged(std::span<const Vec2> sources) const
{
    const Eigen::Index p = static_cast<Eigen::Index>(scene_->surface.size());
    const auto n = static_cast<Eigen::Index>(sources.size());
    CMatrix y1, y2;
    incident_on_interface(scene_->surface, media_.k0(), sources, y1, y2);

    double res_ground = 0.0, res_target = 0.0, res_return = 0.0;
    const CMatrix ground = interface_.solve(vstack(y1, y2), &res_ground);
    const CMatrix a0 = ground.topRows(p);
    const CMatrix b0 = ground.bottomRows(p);

    std::vector<MfsSolution> out(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        MfsSolution& s = out[static_cast<std::size_t>(j)];
        s.variant = variant_;
        s.a_ground = a0.col(j);
        s.b_ground = b0.col(j);
        s.a = s.a_ground;
        s.b = s.b_ground;
    }
    double cond = interface_.condition();

    if (variant_ == Variant::no_target) {
        for (auto& s : out) {
            s.residual = res_ground;
            s.condition = cond;
        }
        return out;
    }

    if (variant_ == Variant::point_target) {
        const Complex rho = scene_->point->reflectivity;
        const Eigen::RowVectorXcd u_e = excitation_ * b0;
        cond = std::max(cond, flat_interface_.condition());
        for (Eigen::Index j = 0; j < n; ++j) {
            MfsSolution& s = out[static_cast<std::size_t>(j)];
            s.point_amplitude = rho * u_e(j);
            s.point_position = scene_->point->position;
            const CVector corr = -s.point_amplitude * point_response_;
            s.a_flat = corr.head(p);
            s.b_flat = corr.tail(p);
            s.residual = res_ground;
            s.condition = cond;
        }
        return out;
    }

    CMatrix c_ext, c_int;
    solve_target(C1_ * b0, C2_ * b0, c_ext, c_int, &res_target);

    const bool flat_step = variant_ == Variant::first_order_flat;
    const DenseSystem& back = flat_step ? flat_interface_ : interface_;
    const CMatrix corr = back.solve(-vstack(B1_ * c_ext, B2_ * c_ext), &res_return);
    cond = std::max({cond, target_.condition(), back.condition()});
    const double residual = std::max({res_ground, res_target, res_return});

    for (Eigen::Index j = 0; j < n; ++j) {
        MfsSolution& s = out[static_cast<std::size_t>(j)];
        s.c_ext = c_ext.col(j);
        s.c_int = c_int.col(j);
        if (flat_step) {
            s.a_flat = corr.col(j).head(p);
            s.b_flat = corr.col(j).tail(p);
        } else {
            s.a += corr.col(j).head(p);
            s.b += corr.col(j).tail(p);
        }
        s.residual = residual;
        s.condition = cond;
    }
    return out;
}

// ---------------------------------------------------------------------------

MfsSolution solve_full(const Scene& scene, double f, const Vec2& src)
{
    return FrequencySolver(scene, f, Variant::full).solve(src);
}
MfsSolution solve_no_target(const Scene& scene, double f, const Vec2& src)
{
    return FrequencySolver(scene, f, Variant::no_target).solve(src);
}
MfsSolution solve_first_order(const Scene& scene, double f, const Vec2& src)
{
    return FrequencySolver(scene, f, Variant::first_order).solve(src);
}
MfsSolution solve_first_order_flat(const Scene& scene, double f, const Vec2& src)
{
    return FrequencySolver(scene, f, Variant::first_order_flat).solve(src);
}
MfsSolution solve_point_target(const Scene& scene, double f, const Vec2& src)
{
    return FrequencySolver(scene, f, Variant::point_target).solve(src);
}

// ---------------------------------------------------------------------------

Region locate(const Scene& scene, const Vec2& p)
{
    if (scene.target && scene.target->contains(p))
        return Region::target;
    return p.z > scene.surface.height_at(p.x) ? Region::air : Region::soil;
}

namespace {

// One contribution sum_j coeff_j G_k(r - src_j) (or its normal derivative).
struct Expansion {
    std::vector<Vec2> sources;
    const CVector* coeff;
    double k;
};

std::vector<Expansion> expansions_for(const MfsSolution& sol, const Scene& scene, const MediumParams& media,
                                      Region region)
{
    std::vector<Expansion> out;
    const auto& off = scene.offsets;
    const bool has_flat = sol.a_flat.size() > 0;
    const RoughSurface flat = has_flat ? flat_surface(scene.surface.length, static_cast<int>(scene.surface.size()))
                                       : RoughSurface{};
    switch (region) {
    case Region::air:
        out.push_back({interface_air_sources(scene.surface, off), &sol.a, media.k0()});
        if (has_flat)
            out.push_back({interface_air_sources(flat, off), &sol.a_flat, media.k0()});
        break;
    case Region::soil:
        out.push_back({interface_soil_sources(scene.surface, off), &sol.b, media.k1()});
        if (sol.c_ext.size() > 0)
            out.push_back({target_exterior_sources(*scene.target, off), &sol.c_ext, media.k1()});
        if (has_flat)
            out.push_back({interface_soil_sources(flat, off), &sol.b_flat, media.k1()});
        break;
    case Region::target:
        if (sol.c_int.size() > 0)
            out.push_back({target_interior_sources(*scene.target, off), &sol.c_int, media.k2()});
        break;
    }
    return out;
}

} // namespace

CVector evaluate_field(const MfsSolution& sol, const Scene& scene, double f, Region region,
                       std::span<const Vec2> points, bool check_region)
{
    const MediumParams media = scene.media.at_frequency(f);
    if (check_region)
        for (const auto& p : points)
            if (locate(scene, p) != region)
                throw DomainError(fmt::format("point ({}, {}) is not in region {}", p.x, p.z, int(region)));

    const auto expansions = expansions_for(sol, scene, media, region);
    CVector out = CVector::Zero(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        Complex sum{0.0, 0.0};
        for (const auto& e : expansions)
            for (std::size_t j = 0; j < e.sources.size(); ++j)
                sum += greens2d(e.k, points[i] - e.sources[j]) * (*e.coeff)(static_cast<Eigen::Index>(j));
        if (region == Region::soil && sol.point_amplitude != Complex{})
            sum += sol.point_amplitude * greens2d(media.k1(), points[i] - sol.point_position);
        out(static_cast<Eigen::Index>(i)) = sum;
    }
    return out;
}

CVector evaluate_normal_derivative(const MfsSolution& sol, const Scene& scene, double f, Region region,
                                   std::span<const Vec2> points, std::span<const Vec2> normals)
{
    if (points.size() != normals.size())
        throw DomainError("evaluate_normal_derivative: points and normals differ in length");
    const MediumParams media = scene.media.at_frequency(f);
    const auto expansions = expansions_for(sol, scene, media, region);
    CVector out = CVector::Zero(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        Complex sum{0.0, 0.0};
        for (const auto& e : expansions)
            for (std::size_t j = 0; j < e.sources.size(); ++j)
                sum += greens2d_normal_deriv(e.k, points[i] - e.sources[j], normals[i]) *
                       (*e.coeff)(static_cast<Eigen::Index>(j));
        if (region == Region::soil && sol.point_amplitude != Complex{})
            sum += sol.point_amplitude * greens2d_normal_deriv(media.k1(), points[i] - sol.point_position, normals[i]);
        out(static_cast<Eigen::Index>(i)) = sum;
    }
    return out;
}

} // namespace gpsar

namespace gpsar {

TargetSolution solve_isolated_target(const TargetBoundary& target, const MediumParams& media,
                                     const MfsOffsets& offsets, const Vec2& source)
{
    media.validate();
    if (target.contains(source))
        throw DomainError("isolated target: source lies inside the target");
    const DenseSystem system(target_matrix(assemble_target_blocks(target, media, offsets)), "isolated target");
    const std::vector<Vec2> origin{source};
    CMatrix inc, inc_dn;
    fill_green(inc, &inc_dn, target.points, target.normals, origin, media.k1(), 1.0 / media.eps_r1);
    TargetSolution out;
    const CMatrix x = system.solve(-vstack(inc, inc_dn), &out.residual);
    const auto q = static_cast<Eigen::Index>(target.size());
    out.c_ext = x.col(0).head(q);
    out.c_int = x.col(0).tail(q);
    out.condition = system.condition();
    return out;
}

CVector evaluate_isolated_target(const TargetSolution& solution, const TargetBoundary& target,
                                 const MediumParams& media, const MfsOffsets& offsets,
                                 std::span<const Vec2> points, bool exterior)
{
    const auto sources = exterior ? target_exterior_sources(target, offsets) : target_interior_sources(target, offsets);
    const CVector& coeff = exterior ? solution.c_ext : solution.c_int;
    const double k = exterior ? media.k1() : media.k2();
    CMatrix g;
    fill_green(g, nullptr, points, {}, sources, k, 1.0);
    return g * coeff;
}

} // namespace gpsar
