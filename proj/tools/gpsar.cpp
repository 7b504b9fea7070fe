#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gpsar/error.hpp"
#include "gpsar/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kSolver = 3, kIo = 4 };

struct Overrides {
    std::string config;
    std::optional<double> snr;
    std::optional<int> truncation;
    std::optional<std::string> variant;
    int threads = 1;
    std::string out_dir = ".";
    std::optional<std::string> data;
    bool ground = false;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_data)
{
    cmd->add_option("--config", o.config, "scenario YAML file")->required();
    cmd->add_option("--snr", o.snr, "override noise.snr_db (dB); inf for clean data");
    cmd->add_option("--truncation", o.truncation, "override imaging.truncation (J)");
    cmd->add_option("--variant", o.variant, "override sweep.variant");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out-dir", o.out_dir, "output directory");
    cmd->add_flag("--quiet", o.quiet, "no progress output");
    if (with_data)
        cmd->add_option("--data", o.data, "use a saved data matrix instead of simulating");
}

gpsar::Scenario resolve(const Overrides& o)
{
    gpsar::Scenario sc = gpsar::load_scenario(o.config);
    if (o.snr) {
        if (std::isinf(*o.snr) && *o.snr > 0.0)
            sc.noise.snr_db.reset();
        else
            sc.noise.snr_db = *o.snr;
    }
    if (o.truncation)
        sc.imaging.truncation = *o.truncation;
    if (o.variant) {
        try {
            sc.sweep.variant = gpsar::variant_from_string(*o.variant);
        } catch (const gpsar::DomainError& e) {
            throw gpsar::ConfigError(std::string("--variant: ") + e.what());
        }
    }
    sc.validate();
    return sc;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gpsar: rough-surface ground-penetrating SAR workbench"};
    app.require_subcommand(1);
    Overrides o;

    auto* surface = app.add_subcommand("surface", "generate the rough interface and write surface.csv");
    add_common(surface, o, false);
    auto* simulate = app.add_subcommand("simulate", "run the measurement sweep and write D.csv");
    add_common(simulate, o, false);
    simulate->add_flag("--ground", o.ground, "also write the no-target matrix R_rough.csv");
    auto* image = app.add_subcommand("image", "PCA + Kirchhoff migration image and peak");
    add_common(image, o, true);
    auto* spectra = app.add_subcommand("spectra", "reflectivity matrices and spectra");
    add_common(spectra, o, true);
    auto* pipeline = app.add_subcommand("pipeline", "simulate, image, model and spectra in one run");
    add_common(pipeline, o, false);

    CLI11_PARSE(app, argc, argv);

    try {
        const gpsar::Scenario sc = resolve(o);
#ifdef _OPENMP
        omp_set_num_threads(o.threads);
#endif
        gpsar::RunOptions run;
        run.out_dir = o.out_dir;
        run.threads = o.threads;
        run.write_ground = o.ground;
        if (o.data)
            run.data = *o.data;
        run.log = o.quiet ? nullptr : &std::cerr;

        if (surface->parsed()) {
            const auto s = gpsar::run_surface(sc, run);
            std::cout << (run.out_dir / "surface.csv").string() << '\n';
            (void)s;
        } else if (simulate->parsed()) {
            gpsar::run_simulate(sc, run);
            std::cout << (run.out_dir / "D.csv").string() << '\n';
        } else if (image->parsed()) {
            const auto r = gpsar::run_image(sc, run);
            std::cout << fmt::format("peak_x={:.17g} peak_z={:.17g} value={:.17g}\n", r.raster.peak.x,
                                     r.raster.peak.z, r.raster.peak_value);
        } else if (spectra->parsed()) {
            const auto r = gpsar::run_spectra(sc, run);
            std::cout << (run.out_dir / "spectrum.csv").string() << '\n';
            (void)r;
        } else if (pipeline->parsed()) {
            const auto r = gpsar::run_pipeline(sc, run);
            std::cout << fmt::format("peak_x={:.17g} peak_z={:.17g} value={:.17g}\n", r.image.raster.peak.x,
                                     r.image.raster.peak.z, r.image.raster.peak_value);
        }
    } catch (const gpsar::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const gpsar::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const gpsar::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const gpsar::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}
