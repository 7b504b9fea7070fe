#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gpsar/imaging.hpp"
#include "gpsar/measurement.hpp"

namespace gpsar {

struct SurfaceConfig {
    std::string kind = "gaussian";  ///< gaussian | flat | file
    double length = 400.0;
    int samples = 512;
    double h_rms = 0.4;
    double corr_len = 8.0;
    std::uint64_t seed = 1;
    std::string file;  ///< for kind = file, relative to the config location
};

struct TargetConfig {
    std::string kind = "shape";  ///< shape | point | none
    TargetShape shape = KiteShape{};
    int samples = 128;
    PointTarget point;
};

struct SweepConfig {
    double f_min = 3.5, f_max = 5.5;
    int frequencies = 41;
    double x_min = -51.0, x_max = 51.0;
    int positions = 35;
    double elevation = 75.0;
    Variant variant = Variant::full;
};

struct NoiseConfig {
    std::optional<double> snr_db;  ///< empty: clean data
    std::uint64_t seed = 7;
};

struct ImagingConfig {
    ImagingGrid grid;
    int truncation = 2;
};

/// Everything one run needs. Defaults reproduce the kite example of the reference scenario.
struct Scenario {
    SurfaceConfig surface;
    TargetConfig target;
    MediumParams media;
    MfsOffsets offsets;
    SweepConfig sweep;
    NoiseConfig noise;
    ImagingConfig imaging;
    std::filesystem::path base_dir;  ///< directory for relative file references

    void validate() const;
    /// Canonical YAML text: every key, fixed order, shortest round-trip numbers.
    std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    std::string hash() const;

    RoughSurface build_surface() const;
    Scene build_scene() const;
    SweepSpec sweep_spec() const;
};

/// Parses YAML text; throws ConfigError naming the offending field.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

} // namespace gpsar
