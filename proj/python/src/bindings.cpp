#include <array>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gpsar/cylinder_oracle.hpp"
#include "gpsar/error.hpp"
#include "gpsar/pipeline.hpp"

namespace py = pybind11;
using namespace gpsar;

namespace {

using Pt = std::array<double, 2>;
using Points = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

Vec2 vec(const Pt& p) { return {p[0], p[1]}; }

Points to_rows(const std::vector<Vec2>& v)
{
    Points out(static_cast<Eigen::Index>(v.size()), 2);
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i), 0) = v[i].x;
        out(static_cast<Eigen::Index>(i), 1) = v[i].z;
    }
    return out;
}

std::vector<Vec2> from_rows(const Points& m)
{
    std::vector<Vec2> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        out[static_cast<std::size_t>(i)] = {m(i, 0), m(i, 1)};
    return out;
}

Component component_from(const std::string& name)
{
    if (name == "total")
        return Component::total;
    if (name == "target_only")
        return Component::target_only;
    throw DomainError("component must be 'total' or 'target_only', got '" + name + "'");
}

py::dict data_dict(const DataMatrix& d)
{
    py::dict out;
    out["values"] = d.values;
    out["frequencies"] = d.spec.frequencies;
    out["positions"] = d.spec.positions;
    out["elevation"] = d.spec.elevation;
    out["variant"] = to_string(d.spec.variant);
    return out;
}

} // namespace

PYBIND11_MODULE(_gpsar, m)
{
    m.doc() = "Rough-surface ground-penetrating SAR workbench";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def("hankel1", &hankel1, py::arg("order"), py::arg("x"));
    m.def("greens2d", [](double k, const Pt& r) { return greens2d(k, vec(r)); }, py::arg("k"), py::arg("r"));
    m.def(
        "greens2d_normal_deriv",
        [](double k, const Pt& r, const Pt& n) { return greens2d_normal_deriv(k, vec(r), vec(n)); },
        py::arg("k"), py::arg("r"), py::arg("n"));

    py::class_<RoughSurface>(m, "RoughSurface")
        .def_readonly("length", &RoughSurface::length)
        .def_readonly("h_rms", &RoughSurface::h_rms)
        .def_readonly("corr_len", &RoughSurface::corr_len)
        .def_readonly("seed", &RoughSurface::seed)
        .def_property_readonly("points", [](const RoughSurface& s) { return to_rows(s.points); })
        .def_property_readonly("normals", [](const RoughSurface& s) { return to_rows(s.normals); })
        .def("__len__", &RoughSurface::size)
        .def("statistics", [](const RoughSurface& s) {
            const SurfaceStats st = surface_statistics(s);
            return py::make_tuple(st.rms, st.corr_len);
        });
    m.def("generate_gaussian_surface", &generate_gaussian_surface, py::arg("length"), py::arg("count"),
          py::arg("h_rms"), py::arg("corr_len"), py::arg("seed"));
    m.def("flat_surface", &flat_surface, py::arg("length"), py::arg("count"));

    py::class_<TargetBoundary>(m, "TargetBoundary")
        .def_property_readonly("shape", [](const TargetBoundary& t) { return shape_name(t.shape); })
        .def_property_readonly("points", [](const TargetBoundary& t) { return to_rows(t.points); })
        .def_property_readonly("normals", [](const TargetBoundary& t) { return to_rows(t.normals); })
        .def_property_readonly("top_point", [](const TargetBoundary& t) {
            const Vec2 p = t.top_point();
            return Pt{p.x, p.z};
        })
        .def("area", &TargetBoundary::polygon_area)
        .def("__len__", &TargetBoundary::size);
    m.def(
        "make_target", [](const std::string& shape, int count) { return make_target(default_shape(shape), count); },
        py::arg("shape"), py::arg("count") = 128);

    m.def(
        "cylinder_series_oracle",
        [](double k1, double k2, double eps_r1, double eps_r2, double radius, const Pt& source, const Points& pts) {
            const auto p = from_rows(pts);
            const auto v = cylinder_series_oracle(k1, k2, eps_r1, eps_r2, radius, vec(source), p);
            return Eigen::VectorXcd(Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size())));
        },
        py::arg("k1"), py::arg("k2"), py::arg("eps_r1"), py::arg("eps_r2"), py::arg("radius"), py::arg("source"),
        py::arg("points"));

    py::class_<Scenario>(m, "Scenario")
        .def("canonical", &Scenario::canonical)
        .def("hash", &Scenario::hash)
        .def("build_surface", &Scenario::build_surface)
        .def_property(
            "snr_db", [](const Scenario& s) { return s.noise.snr_db; },
            [](Scenario& s, std::optional<double> v) { s.noise.snr_db = v; })
        .def_property(
            "truncation", [](const Scenario& s) { return s.imaging.truncation; },
            [](Scenario& s, int j) { s.imaging.truncation = j; })
        .def_property(
            "variant", [](const Scenario& s) { return to_string(s.sweep.variant); },
            [](Scenario& s, const std::string& v) { s.sweep.variant = variant_from_string(v); })
        .def_property_readonly("target", [](const Scenario& s) -> std::optional<TargetBoundary> {
            return s.build_scene().target;
        });
    m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("base_dir") = std::filesystem::path{});
    m.def("load_scenario", &load_scenario, py::arg("path"));

    m.def(
        "simulate",
        [](const Scenario& sc, int threads, const std::string& component, bool noisy) {
            sc.validate();
            const Scene scene = sc.build_scene();
            SweepOptions opt;
            opt.threads = threads;
            opt.component = component_from(component);
            DataMatrix d;
            {
                py::gil_scoped_release release;
                d = simulate_sweep(scene, sc.sweep_spec(), opt);
            }
            if (noisy && sc.noise.snr_db)
                d = add_noise(d, *sc.noise.snr_db, sc.noise.seed);
            return data_dict(d);
        },
        py::arg("scenario"), py::arg("threads") = 1, py::arg("component") = "total", py::arg("noisy") = true);
    m.def(
        "add_noise",
        [](const Eigen::MatrixXcd& values, double snr_db, std::uint64_t seed) {
            DataMatrix d;
            d.values = values;
            return add_noise(d, snr_db, seed).values;
        },
        py::arg("values"), py::arg("snr_db"), py::arg("seed"));

    m.def(
        "pca_truncate",
        [](const Eigen::MatrixXcd& data, int truncation) {
            const PcaResult r = pca_truncate(data, truncation);
            return py::make_tuple(r.singular_values, r.processed);
        },
        py::arg("data"), py::arg("truncation"));
    m.def(
        "km_image",
        [](const Eigen::MatrixXcd& data, const Scenario& sc, int threads) {
            ImageRaster r;
            {
                py::gil_scoped_release release;
                r = km_image(data, sc.imaging.grid, sc.sweep_spec(), sc.media.eps_r1, sc.media.wavespeed, threads);
            }
            py::dict out;
            out["x"] = r.x;
            out["z"] = r.z;
            out["values"] = r.values;
            out["peak"] = Pt{r.peak.x, r.peak.z};
            out["peak_value"] = r.peak_value;
            return out;
        },
        py::arg("data"), py::arg("scenario"), py::arg("threads") = 1);

    m.def(
        "run_pipeline",
        [](const Scenario& sc, const std::filesystem::path& out_dir, int threads) {
            RunOptions o;
            o.out_dir = out_dir;
            o.threads = threads;
            SpectraProducts r;
            {
                py::gil_scoped_release release;
                r = run_pipeline(sc, o);
            }
            py::dict out;
            out["peak"] = Pt{r.image.raster.peak.x, r.image.raster.peak.z};
            out["singular_values"] = r.image.pca.singular_values;
            out["frequencies"] = r.spectrum_oracle.frequencies;
            out["spectrum"] = r.spectrum_oracle.normalized;
            out["spectrum_pca"] = r.spectrum_pca.normalized;
            return out;
        },
        py::arg("scenario"), py::arg("out_dir"), py::arg("threads") = 1);
}
