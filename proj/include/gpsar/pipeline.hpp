#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "gpsar/reflectivity.hpp"
#include "gpsar/scenario.hpp"

namespace gpsar {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    int threads = 1;
    std::optional<std::filesystem::path> data;  ///< reuse a saved D instead of simulating
    bool write_ground = false;                  ///< simulate: also write the no-target matrix
    std::ostream* log = nullptr;                ///< progress and timing; nullptr for silence
};

struct ImageProducts {
    DataMatrix data;
    PcaResult pca;
    ImageRaster raster;
};

struct SpectraProducts {
    ImageProducts image;
    ModelComponents model;
    ReflectivityMatrix f_oracle, f_pca;
    Spectrum spectrum_oracle, spectrum_pca;
};

RoughSurface run_surface(const Scenario& scenario, const RunOptions& options);
DataMatrix run_simulate(const Scenario& scenario, const RunOptions& options);
ImageProducts run_image(const Scenario& scenario, const RunOptions& options);
SpectraProducts run_spectra(const Scenario& scenario, const RunOptions& options);
SpectraProducts run_pipeline(const Scenario& scenario, const RunOptions& options);

} // namespace gpsar
