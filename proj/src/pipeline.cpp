#include "gpsar/pipeline.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "gpsar/error.hpp"

namespace gpsar {

namespace {

void note(const RunOptions& o, const std::string& msg)
{
    if (o.log)
        *o.log << msg << '\n' << std::flush;
}

std::filesystem::path prepare(const RunOptions& o)
{
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + o.out_dir.string() + ": " + ec.message());
    return o.out_dir;
}

DataMatrix sweep(const Scene& scene, const SweepSpec& spec, const RunOptions& o, Component component,
                 const char* label)
{
    SweepOptions opt;
    opt.threads = o.threads;
    opt.component = component;
    if (o.log)
        opt.progress = [&o, label](std::size_t m, double f, double secs) {
            note(o, fmt::format("[{}] m={} f={:.3f} GHz solved in {:.2f} s", label, m, f, secs));
        };
    return simulate_sweep(scene, spec, opt);
}

DataMatrix obtain_data(const Scenario& sc, const RunOptions& o)
{
    if (o.data) {
        note(o, "loading " + o.data->string());
        return load_matrix(*o.data);
    }
    return run_simulate(sc, o);
}

ImageProducts image_from(const Scenario& sc, const RunOptions& o, DataMatrix data)
{
    const auto dir = prepare(o);
    const std::string hash = sc.hash();
    ImageProducts out;
    out.data = std::move(data);
    out.pca = pca_truncate(out.data.values, sc.imaging.truncation);
    save_singular_values(out.pca.singular_values, dir / "sv.csv", hash);
    out.raster = km_image(out.pca.processed, sc.imaging.grid, out.data.spec, sc.media.eps_r1, sc.media.wavespeed,
                          o.threads);
    const std::string stem = fmt::format("image_J{}", sc.imaging.truncation);
    save_raster_csv(out.raster, dir / (stem + ".csv"), hash);
    save_raster_pgm(out.raster, dir / (stem + ".pgm"));
    save_peak({out.raster.peak, out.raster.peak_value}, dir / fmt::format("peak_J{}.txt", sc.imaging.truncation),
              hash);
    note(o, fmt::format("KM peak (J={}) at x={:.2f} z={:.2f}", sc.imaging.truncation, out.raster.peak.x,
                        out.raster.peak.z));
    return out;
}

SpectraProducts spectra_from(const Scenario& sc, const RunOptions& o, ImageProducts image)
{
    const auto dir = prepare(o);
    const std::string hash = sc.hash();
    SpectraProducts out;
    out.image = std::move(image);
    const SweepSpec& spec = out.image.data.spec;
    const Scene scene = sc.build_scene();

    const Vec2 r0 = out.image.raster.peak;
    note(o, fmt::format("building model components at r0=({:.2f}, {:.2f})", r0.x, r0.z));
    out.model.r0 = r0;
    out.model.spec = spec;
    Scene ground = scene;
    ground.target.reset();
    ground.point.reset();
    SweepSpec gspec = spec;
    gspec.variant = Variant::no_target;
    out.model.r_rough = sweep(ground, gspec, o, Component::total, "R_rough").values;

    Scene flat;
    flat.surface = flat_surface(scene.surface.length, static_cast<int>(scene.surface.size()));
    flat.media = scene.media;
    flat.offsets = scene.offsets;
    flat.point = PointTarget{r0, Complex{1.0, 0.0}};
    SweepSpec fspec = spec;
    fspec.variant = Variant::point_target;
    out.model.s_flat = sweep(flat, fspec, o, Component::target_only, "S_flat").values;

    DataMatrix r{out.model.r_rough, gspec, std::nullopt, 0, "data", hash};
    save_matrix(r, dir / "R_rough.csv");
    DataMatrix s{out.model.s_flat, fspec, std::nullopt, 0, "data", hash};
    save_matrix(s, dir / "S_flat.csv");

    out.f_oracle = extract_reflectivity(out.image.data.values, out.model);
    out.f_pca = extract_reflectivity_pca(out.image.pca.processed, out.model.s_flat);
    if (out.f_oracle.invalid_count || out.f_pca.invalid_count)
        note(o, fmt::format("masked {} / {} division-hazard entries", out.f_oracle.invalid_count,
                            out.f_pca.invalid_count));
    save_reflectivity(out.f_oracle, spec, dir / "F.csv", hash);
    save_reflectivity(out.f_pca, spec, dir / "F_pca.csv", hash);
    out.spectrum_oracle = spectrum(out.f_oracle, spec.frequencies);
    out.spectrum_pca = spectrum(out.f_pca, spec.frequencies);
    save_spectrum(out.spectrum_oracle, dir / "spectrum.csv", hash);
    save_spectrum(out.spectrum_pca, dir / "spectrum_pca.csv", hash);
    return out;
}

} // namespace

RoughSurface run_surface(const Scenario& sc, const RunOptions& o)
{
    const auto dir = prepare(o);
    RoughSurface s = sc.build_surface();
    save_surface_csv(s, dir / "surface.csv");
    const SurfaceStats st = surface_statistics(s);
    note(o, fmt::format("surface: P={} L={} sample rms={:.4f} cm, 1/e correlation length={:.3f} cm", s.size(),
                        s.length, st.rms, st.corr_len));
    return s;
}

DataMatrix run_simulate(const Scenario& sc, const RunOptions& o)
{
    const auto dir = prepare(o);
    const std::string hash = sc.hash();
    const Scene scene = sc.build_scene();
    const SweepSpec spec = sc.sweep_spec();
    note(o, fmt::format("simulating {} sweep: M={} N={} (P={}, Q={})", to_string(spec.variant), spec.rows(),
                        spec.cols(), scene.surface.size(), scene.target ? scene.target->size() : 0));
    DataMatrix d = sweep(scene, spec, o, Component::total, "D");
    d.config_hash = hash;
    if (sc.noise.snr_db) {
        d = add_noise(d, *sc.noise.snr_db, sc.noise.seed);
        d.config_hash = hash;
    }
    save_matrix(d, dir / "D.csv");
    if (o.write_ground) {
        Scene ground = scene;
        ground.target.reset();
        ground.point.reset();
        SweepSpec gspec = spec;
        gspec.variant = Variant::no_target;
        DataMatrix g = sweep(ground, gspec, o, Component::total, "R_rough");
        g.config_hash = hash;
        save_matrix(g, dir / "R_rough.csv");
    }
    return d;
}

ImageProducts run_image(const Scenario& sc, const RunOptions& o)
{
    return image_from(sc, o, obtain_data(sc, o));
}

SpectraProducts run_spectra(const Scenario& sc, const RunOptions& o)
{
    return spectra_from(sc, o, run_image(sc, o));
}

SpectraProducts run_pipeline(const Scenario& sc, const RunOptions& o)
{
    const auto dir = prepare(o);
    {
        std::ofstream out(dir / "scenario.yaml", std::ios::binary);
        if (!out)
            throw IoError("cannot write " + (dir / "scenario.yaml").string());
        out << "# config_hash=" << sc.hash() << '\n' << sc.canonical();
    }
    RunOptions inner = o;
    inner.data.reset();
    return spectra_from(sc, inner, image_from(sc, inner, run_simulate(sc, inner)));
}

} // namespace gpsar
