#include "gpsar/imaging.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "gpsar/error.hpp"

namespace gpsar {

namespace {

std::vector<double> axis(double lo, double hi, double step)
{
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = lo + i * step;
    return out;
}

double wavenumber(double f_ghz, double wavespeed) { return 2.0 * std::numbers::pi * f_ghz / wavespeed; }

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

} // namespace

PcaResult pca_truncate(const CMatrix& data, int truncation)
{
    const auto rank = static_cast<int>(std::min(data.rows(), data.cols()));
    if (truncation < 0 || truncation > rank)
        throw DomainError(fmt::format("truncation J={} outside [0, {}]", truncation, rank));
    Eigen::JacobiSVD<CMatrix> svd(data, Eigen::ComputeThinU | Eigen::ComputeThinV);
    PcaResult out;
    out.truncation = truncation;
    const auto& s = svd.singularValues();
    out.singular_values.assign(s.data(), s.data() + s.size());
    out.processed = data;
    for (int j = 0; j < truncation; ++j)
        out.processed -= s(j) * svd.matrixU().col(j) * svd.matrixV().col(j).adjoint();
    return out;
}

std::vector<double> ImagingGrid::xs() const { return axis(x_min, x_max, dx); }
std::vector<double> ImagingGrid::zs() const { return axis(z_min, z_max, dz); }

void ImagingGrid::validate() const
{
    if (!(dx > 0.0) || !(dz > 0.0))
        throw DomainError("imaging grid spacings must be positive");
    if (!(x_max >= x_min) || !(z_max >= z_min))
        throw DomainError("imaging grid ranges must be non-empty");
    if (z_max > 0.0)
        throw DomainError("imaging grid must lie at or below z = 0");
}

CMatrix km_illuminations(const Vec2& y, const SweepSpec& spec, double eps_r1, double wavespeed)
{
    const double L = spec.elevation;
    CMatrix a(static_cast<Eigen::Index>(spec.rows()), static_cast<Eigen::Index>(spec.cols()));
    for (std::size_t m = 0; m < spec.rows(); ++m) {
        const double k = wavenumber(spec.frequencies[m], wavespeed);
        for (std::size_t n = 0; n < spec.cols(); ++n) {
            const double dx = spec.positions[n] - y.x;
            const double phase = 2.0 * k * L * (1.0 + dx * dx / (2.0 * L * L)) - 2.0 * k * std::sqrt(eps_r1) * y.z;
            a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = std::polar(1.0, phase);
        }
    }
    return a;
}

CMatrix km_image_complex(const CMatrix& processed, const ImagingGrid& grid, const SweepSpec& spec, double eps_r1,
                         double wavespeed, int threads)
{
    grid.validate();
    if (processed.rows() != static_cast<Eigen::Index>(spec.rows()) ||
        processed.cols() != static_cast<Eigen::Index>(spec.cols()))
        throw DomainError("km_image: data shape does not match the sweep");
    const auto xs = grid.xs();
    const auto zs = grid.zs();
    const auto M = processed.rows(), N = processed.cols();
    const auto nx = static_cast<Eigen::Index>(xs.size()), nz = static_cast<Eigen::Index>(zs.size());
    const double L = spec.elevation;
    const double root = std::sqrt(eps_r1);

    // T(m, ix) = exp(-2ikL) sum_n d_mn exp(-ik (x_n - xi)^2 / L)
    CMatrix t(M, nx);
    for (Eigen::Index m = 0; m < M; ++m) {
        const double k = wavenumber(spec.frequencies[static_cast<std::size_t>(m)], wavespeed);
        const Complex carrier = std::polar(1.0, -2.0 * k * L);
        for (Eigen::Index ix = 0; ix < nx; ++ix) {
            Complex sum{0.0, 0.0};
            for (Eigen::Index n = 0; n < N; ++n) {
                const double dx = spec.positions[static_cast<std::size_t>(n)] - xs[static_cast<std::size_t>(ix)];
                sum += processed(m, n) * std::polar(1.0, -k * dx * dx / L);
            }
            t(m, ix) = carrier * sum;
        }
    }
    // Z(iz, m) = exp(2ik sqrt(eps) zeta)
    CMatrix zphase(nz, M);
    for (Eigen::Index iz = 0; iz < nz; ++iz)
        for (Eigen::Index m = 0; m < M; ++m) {
            const double k = wavenumber(spec.frequencies[static_cast<std::size_t>(m)], wavespeed);
            zphase(iz, m) = std::polar(1.0, 2.0 * k * root * zs[static_cast<std::size_t>(iz)]);
        }

    CMatrix image(nz, nx);
    const int nthreads = std::max(1, threads);
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (Eigen::Index iz = 0; iz < nz; ++iz)
        for (Eigen::Index ix = 0; ix < nx; ++ix) {
            Complex sum{0.0, 0.0};
            for (Eigen::Index m = 0; m < M; ++m)
                sum += zphase(iz, m) * t(m, ix);
            image(iz, ix) = sum;
        }
    return image;
}

ImageRaster km_image(const CMatrix& processed, const ImagingGrid& grid, const SweepSpec& spec, double eps_r1,
                     double wavespeed, int threads)
{
    ImageRaster r;
    r.grid = grid;
    r.x = grid.xs();
    r.z = grid.zs();
    r.values = km_image_complex(processed, grid, spec, eps_r1, wavespeed, threads).cwiseAbs();
    const Peak p = peak_location(r);
    r.peak = p.location;
    r.peak_value = p.value;
    return r;
}

Eigen::MatrixXd ImageRaster::normalized() const
{
    const double top = values.size() ? values.maxCoeff() : 0.0;
    return top > 0.0 ? Eigen::MatrixXd(values / top) : values;
}

Peak peak_location(const ImageRaster& raster)
{
    if (raster.values.size() == 0)
        throw DomainError("peak_location: empty raster");
    Peak best{{raster.x.at(0), raster.z.at(0)}, raster.values(0, 0)};
    for (Eigen::Index iz = 0; iz < raster.values.rows(); ++iz)
        for (Eigen::Index ix = 0; ix < raster.values.cols(); ++ix)
            if (raster.values(iz, ix) > best.value)
                best = {{raster.x[static_cast<std::size_t>(ix)], raster.z[static_cast<std::size_t>(iz)]},
                        raster.values(iz, ix)};
    return best;
}

void save_raster_csv(const ImageRaster& raster, const std::filesystem::path& path, const std::string& config_hash)
{
    auto out = open_out(path);
    out << fmt::format("# config_hash={}\n", config_hash);
    out << fmt::format("# nx={} nz={}\n", raster.x.size(), raster.z.size());
    out << "# rows run from z_max down to z_min; columns follow x\n";
    std::string line = "# x";
    for (double x : raster.x)
        line += fmt::format(",{:.17g}", x);
    out << line << '\n';
    for (Eigen::Index iz = raster.values.rows() - 1; iz >= 0; --iz) {
        line = fmt::format("{:.17g}", raster.z[static_cast<std::size_t>(iz)]);
        for (Eigen::Index ix = 0; ix < raster.values.cols(); ++ix)
            line += fmt::format(",{:.17g}", raster.values(iz, ix));
        out << line << '\n';
    }
    if (!out)
        throw IoError("failed writing " + path.string());
}

void save_raster_pgm(const ImageRaster& raster, const std::filesystem::path& path)
{
    auto out = open_out(path);
    const Eigen::MatrixXd img = raster.normalized();
    out << "P5\n" << img.cols() << ' ' << img.rows() << "\n65535\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(2 * img.cols()));
    for (Eigen::Index iz = img.rows() - 1; iz >= 0; --iz) {
        for (Eigen::Index ix = 0; ix < img.cols(); ++ix) {
            const double v = std::clamp(img(iz, ix), 0.0, 1.0);
            const auto level = static_cast<unsigned>(std::lround(v * 65535.0));
            row[static_cast<std::size_t>(2 * ix)] = static_cast<unsigned char>(level >> 8);
            row[static_cast<std::size_t>(2 * ix + 1)] = static_cast<unsigned char>(level & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw IoError("failed writing " + path.string());
}

void save_peak(const Peak& peak, const std::filesystem::path& path, const std::string& config_hash)
{
    auto out = open_out(path);
    out << fmt::format("peak_x={:.17g} peak_z={:.17g} value={:.17g}\n", peak.location.x, peak.location.z, peak.value);
    if (!config_hash.empty())
        out << fmt::format("# config_hash={}\n", config_hash);
    if (!out)
        throw IoError("failed writing " + path.string());
}

void save_singular_values(const std::vector<double>& values, const std::filesystem::path& path,
                          const std::string& config_hash)
{
    auto out = open_out(path);
    out << fmt::format("# config_hash={}\n", config_hash);
    out << "index,sigma\n";
    for (std::size_t j = 0; j < values.size(); ++j)
        out << fmt::format("{},{:.17g}\n", j + 1, values[j]);
    if (!out)
        throw IoError("failed writing " + path.string());
}

} // namespace gpsar
