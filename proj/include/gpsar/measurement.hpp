#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gpsar/mfs.hpp"

namespace gpsar {

/// Frequencies x aperture positions of a monostatic sweep at fixed elevation.
struct SweepSpec {
    std::vector<double> frequencies;  ///< GHz
    std::vector<double> positions;    ///< x_n (cm)
    double elevation = 75.0;          ///< L (cm)
    Variant variant = Variant::full;

    /// Uniform grids: `count_f` frequencies on [f_min, f_max], `count_x` positions on [x_min, x_max].
    static SweepSpec uniform(double f_min, double f_max, int count_f, double x_min, double x_max, int count_x,
                             double elevation, Variant variant);
    /// 41 frequencies on [3.5, 5.5] GHz, 35 positions at 3 cm spacing, L = 75 cm.
    static SweepSpec paper(Variant variant = Variant::full);

    std::size_t rows() const { return frequencies.size(); }
    std::size_t cols() const { return positions.size(); }
    std::vector<Vec2> sources() const;
    void validate() const;
};

/// Complex M x N measurement matrix and its metadata.
struct DataMatrix {
    CMatrix values;
    SweepSpec spec;
    std::optional<double> snr_db;  ///< empty for clean data
    std::uint64_t noise_seed = 0;
    std::string kind = "data";
    std::string config_hash;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

/// Which part of u0 is recorded.
enum class Component {
    total,        ///< everything scattered into Region 0
    target_only,  ///< the part induced by the target (a1, or the flat-interface correction)
};

struct SweepOptions {
    int threads = 1;
    Component component = Component::total;
    /// Called once per finished frequency with (m, f, seconds). Serialized.
    std::function<void(std::size_t, double, double)> progress;
};

DataMatrix simulate_sweep(const Scene& scene, const SweepSpec& spec, const SweepOptions& options = {});

/// Adds circular complex Gaussian noise with variance |D|_F^2 / (M N 10^(snr/10)).
DataMatrix add_noise(const DataMatrix& data, double snr_db, std::uint64_t seed);

/// 10 log10(|clean|^2 / |noisy - clean|^2).
double realized_snr_db(const CMatrix& clean, const CMatrix& noisy);

void save_matrix(const DataMatrix& data, const std::filesystem::path& path);
DataMatrix load_matrix(const std::filesystem::path& path);

} // namespace gpsar
