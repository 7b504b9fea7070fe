#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gpsar/measurement.hpp"

namespace gpsar {

struct PcaResult {
    int truncation = 0;
    std::vector<double> singular_values;  ///< descending
    CMatrix processed;                    ///< D minus its leading `truncation` rank-one terms
};

/// Removes the J leading singular triplets of D.
PcaResult pca_truncate(const CMatrix& data, int truncation);

/// Rectangular imaging region; z_max may touch 0.
struct ImagingGrid {
    double x_min = -12.0, x_max = 18.0;
    double z_min = -22.0, z_max = -2.0;
    double dx = 0.2, dz = 0.2;

    std::vector<double> xs() const;
    std::vector<double> zs() const;
    void validate() const;
};

/// Eq.-17 illumination a_mn(y) for one grid point y = (xi, zeta): M x N phases.
CMatrix km_illuminations(const Vec2& y, const SweepSpec& spec, double eps_r1, double wavespeed = 30.0);

/// |I| on the grid. values(iz, ix) with z ascending along rows.
struct ImageRaster {
    ImagingGrid grid;
    std::vector<double> x, z;
    Eigen::MatrixXd values;
    Vec2 peak{};
    double peak_value = 0.0;

    /// Copy scaled so that the maximum is exactly 1 (all-zero images stay zero).
    Eigen::MatrixXd normalized() const;
};

/// Complex Kirchhoff-migration image (before taking the modulus), same layout as ImageRaster::values.
CMatrix km_image_complex(const CMatrix& processed, const ImagingGrid& grid, const SweepSpec& spec, double eps_r1,
                         double wavespeed = 30.0, int threads = 1);

ImageRaster km_image(const CMatrix& processed, const ImagingGrid& grid, const SweepSpec& spec, double eps_r1,
                     double wavespeed = 30.0, int threads = 1);

struct Peak {
    Vec2 location;
    double value = 0.0;
};

/// Global maximum; ties go to the smallest z, then the smallest x.
Peak peak_location(const ImageRaster& raster);

void save_raster_csv(const ImageRaster& raster, const std::filesystem::path& path,
                     const std::string& config_hash = {});
/// 16-bit binary PGM of the normalized image, first row at z_max.
void save_raster_pgm(const ImageRaster& raster, const std::filesystem::path& path);
void save_peak(const Peak& peak, const std::filesystem::path& path, const std::string& config_hash = {});
void save_singular_values(const std::vector<double>& values, const std::filesystem::path& path,
                          const std::string& config_hash = {});

} // namespace gpsar
