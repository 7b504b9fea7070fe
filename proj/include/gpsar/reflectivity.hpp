#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gpsar/measurement.hpp"

namespace gpsar {

/// D ~ R_rough + rho S_flat(r0).
struct ModelComponents {
    CMatrix r_rough;  ///< ground bounce of the rough interface, no target
    CMatrix s_flat;   ///< point target (rho = 1) under a flat interface, target part only
    Vec2 r0{};
    SweepSpec spec;
};

/// R_rough from the no_target sweep of `scene`; S_flat from the point-target sweep
/// on the flat interface of the same period and sampling.
ModelComponents build_model_components(const Scene& scene, const SweepSpec& spec, const Vec2& r0, int threads = 1);

/// S_flat alone (independent of the surface realization).
CMatrix point_target_flat_response(const Scene& scene, const SweepSpec& spec, const Vec2& r0, int threads = 1);

enum class Provenance { oracle, pca };

/// What to do with entries of S_flat that are too small to divide by.
enum class HazardPolicy {
    mask,  ///< mark invalid, exclude from averages
    fail,  ///< throw DomainError
};

struct ReflectivityMatrix {
    CMatrix values;                      ///< rho_mn (NaN where invalid)
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> valid;
    Provenance provenance = Provenance::oracle;
    Eigen::Index invalid_count = 0;
};

/// Entries with |S| < threshold * |S|_F / sqrt(MN) are division hazards.
constexpr double kHazardThreshold = 1e-14;

/// F = (D - R_rough) ./ S_flat.
ReflectivityMatrix extract_reflectivity(const CMatrix& data, const ModelComponents& comps,
                                        HazardPolicy policy = HazardPolicy::mask);

/// F_est = D_J ./ S_flat.
ReflectivityMatrix extract_reflectivity_pca(const CMatrix& processed, const CMatrix& s_flat,
                                            HazardPolicy policy = HazardPolicy::mask);

/// Elementwise quotient with the hazard policy applied.
ReflectivityMatrix divide_by_model(const CMatrix& numerator, const CMatrix& s_flat, Provenance provenance,
                                   HazardPolicy policy);

struct Spectrum {
    std::vector<double> frequencies;  ///< GHz
    std::vector<double> raw;          ///< mean over valid n of |rho_mn|
    std::vector<double> normalized;   ///< raw / |raw|_2
};

Spectrum spectrum(const ReflectivityMatrix& f, const std::vector<double>& frequencies);

/// Cosine similarity of two spectra restricted to f in [f_lo, f_hi].
double band_cosine_similarity(const Spectrum& a, const Spectrum& b, double f_lo, double f_hi);

void save_spectrum(const Spectrum& s, const std::filesystem::path& path, const std::string& config_hash = {});

/// Writes F in the DataMatrix format with kind=reflectivity.
void save_reflectivity(const ReflectivityMatrix& f, const SweepSpec& spec, const std::filesystem::path& path,
                       const std::string& config_hash = {});

} // namespace gpsar
