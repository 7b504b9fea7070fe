#include "gpsar/reflectivity.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "gpsar/error.hpp"

namespace gpsar {

CMatrix point_target_flat_response(const Scene& scene, const SweepSpec& spec, const Vec2& r0, int threads)
{
    if (!(r0.z < 0.0))
        throw DomainError("model point r0 must lie below z = 0");
    Scene flat;
    flat.surface = flat_surface(scene.surface.length, static_cast<int>(scene.surface.size()));
    flat.media = scene.media;
    flat.offsets = scene.offsets;
    flat.point = PointTarget{r0, Complex{1.0, 0.0}};
    SweepSpec s = spec;
    s.variant = Variant::point_target;
    SweepOptions opt;
    opt.threads = threads;
    opt.component = Component::target_only;
    return simulate_sweep(flat, s, opt).values;
}

ModelComponents build_model_components(const Scene& scene, const SweepSpec& spec, const Vec2& r0, int threads)
{
    ModelComponents out;
    out.r0 = r0;
    out.spec = spec;
    Scene ground = scene;
    ground.target.reset();
    ground.point.reset();
    SweepSpec s = spec;
    s.variant = Variant::no_target;
    SweepOptions opt;
    opt.threads = threads;
    out.r_rough = simulate_sweep(ground, s, opt).values;
    out.s_flat = point_target_flat_response(scene, spec, r0, threads);
    return out;
}

ReflectivityMatrix divide_by_model(const CMatrix& numerator, const CMatrix& s_flat, Provenance provenance,
                                   HazardPolicy policy)
{
    if (numerator.rows() != s_flat.rows() || numerator.cols() != s_flat.cols())
        throw DomainError(fmt::format("reflectivity: shape {}x{} does not match S_flat {}x{}", numerator.rows(),
                                      numerator.cols(), s_flat.rows(), s_flat.cols()));
    const double floor = kHazardThreshold * s_flat.norm() / std::sqrt(static_cast<double>(s_flat.size()));
    ReflectivityMatrix f;
    f.provenance = provenance;
    f.values.resize(numerator.rows(), numerator.cols());
    f.valid.resize(numerator.rows(), numerator.cols());
    for (Eigen::Index m = 0; m < numerator.rows(); ++m)
        for (Eigen::Index n = 0; n < numerator.cols(); ++n) {
            const Complex s = s_flat(m, n);
            if (!(std::abs(s) >= floor) || std::abs(s) == 0.0) {
                if (policy == HazardPolicy::fail)
                    throw DomainError(fmt::format("reflectivity: division hazard at m={} n={}", m, n));
                const double nan = std::numeric_limits<double>::quiet_NaN();
                f.values(m, n) = Complex(nan, nan);
                f.valid(m, n) = false;
                ++f.invalid_count;
                continue;
            }
            f.values(m, n) = numerator(m, n) / s;
            f.valid(m, n) = true;
        }
    return f;
}

ReflectivityMatrix extract_reflectivity(const CMatrix& data, const ModelComponents& comps, HazardPolicy policy)
{
    if (data.rows() != comps.r_rough.rows() || data.cols() != comps.r_rough.cols())
        throw DomainError("reflectivity: data shape does not match R_rough");
    return divide_by_model(data - comps.r_rough, comps.s_flat, Provenance::oracle, policy);
}

ReflectivityMatrix extract_reflectivity_pca(const CMatrix& processed, const CMatrix& s_flat, HazardPolicy policy)
{
    return divide_by_model(processed, s_flat, Provenance::pca, policy);
}

Spectrum spectrum(const ReflectivityMatrix& f, const std::vector<double>& frequencies)
{
    const auto rows = f.values.rows();
    if (rows < 1 || f.values.cols() < 1)
        throw DomainError("spectrum: empty reflectivity matrix");
    if (static_cast<Eigen::Index>(frequencies.size()) != rows)
        throw DomainError("spectrum: frequency count does not match the matrix");
    Spectrum s;
    s.frequencies = frequencies;
    s.raw.assign(static_cast<std::size_t>(rows), 0.0);
    for (Eigen::Index m = 0; m < rows; ++m) {
        double sum = 0.0;
        int count = 0;
        for (Eigen::Index n = 0; n < f.values.cols(); ++n)
            if (f.valid(m, n)) {
                sum += std::abs(f.values(m, n));
                ++count;
            }
        if (count == 0)
            throw DomainError(fmt::format("spectrum: no valid entries at m={}", m));
        s.raw[static_cast<std::size_t>(m)] = sum / count;
    }
    double norm2 = 0.0;
    for (double v : s.raw)
        norm2 += v * v;
    norm2 = std::sqrt(norm2);
    if (!(norm2 > 0.0))
        throw DomainError("spectrum: reflectivity is identically zero");
    for (double v : s.raw)
        s.normalized.push_back(v / norm2);
    return s;
}

double band_cosine_similarity(const Spectrum& a, const Spectrum& b, double f_lo, double f_hi)
{
    if (a.frequencies != b.frequencies)
        throw DomainError("band_cosine_similarity: frequency grids differ");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t m = 0; m < a.frequencies.size(); ++m) {
        const double f = a.frequencies[m];
        if (f < f_lo - 1e-9 || f > f_hi + 1e-9)
            continue;
        ab += a.normalized[m] * b.normalized[m];
        aa += a.normalized[m] * a.normalized[m];
        bb += b.normalized[m] * b.normalized[m];
    }
    if (!(aa > 0.0) || !(bb > 0.0))
        throw DomainError("band_cosine_similarity: empty band");
    return ab / std::sqrt(aa * bb);
}

void save_spectrum(const Spectrum& s, const std::filesystem::path& path, const std::string& config_hash)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << fmt::format("# config_hash={}\n", config_hash);
    out << "f_ghz,raw,normalized\n";
    for (std::size_t m = 0; m < s.raw.size(); ++m)
        out << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.frequencies[m], s.raw[m], s.normalized[m]);
    if (!out)
        throw IoError("failed writing " + path.string());
}

void save_reflectivity(const ReflectivityMatrix& f, const SweepSpec& spec, const std::filesystem::path& path,
                       const std::string& config_hash)
{
    DataMatrix d;
    d.values = f.values;
    d.spec = spec;
    d.kind = "reflectivity";
    d.config_hash = config_hash;
    save_matrix(d, path);
}

} // namespace gpsar
