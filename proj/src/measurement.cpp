#include "gpsar/measurement.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "gpsar/error.hpp"

namespace gpsar {

namespace {

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ';';
        out += fmt::format("{:.17g}", v[i]);
    }
    return out;
}

double parse_double(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        // stod rejects "inf"/"nan" spellings on some inputs; handle them explicitly.
        if (text == "inf")
            return std::numeric_limits<double>::infinity();
        if (text == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        throw IoError("cannot parse " + what + " value '" + text + "'");
    }
    return v;
}

std::vector<double> split_doubles(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';'))
        out.push_back(parse_double(item, what));
    return out;
}

// Receiver-row matrix E(n, p) = G_k(r_n - s_p).
CMatrix receiver_matrix(std::span<const Vec2> receivers, std::span<const Vec2> sources, double k)
{
    CMatrix e(static_cast<Eigen::Index>(receivers.size()), static_cast<Eigen::Index>(sources.size()));
    for (Eigen::Index n = 0; n < e.rows(); ++n)
        for (Eigen::Index p = 0; p < e.cols(); ++p)
            e(n, p) = greens2d(k, receivers[n] - sources[p]);
    return e;
}

void rethrow_annotated(std::exception_ptr err, std::size_t m, double f)
{
    const std::string where = fmt::format("sweep failed at m={} (f={} GHz): ", m, f);
    try {
        std::rethrow_exception(err);
    } catch (const SolverError& e) {
        throw SolverError(where + e.what());
    } catch (const DomainError& e) {
        throw DomainError(where + e.what());
    } catch (const std::exception& e) {
        throw Error(where + e.what());
    }
}

} // namespace

SweepSpec SweepSpec::uniform(double f_min, double f_max, int count_f, double x_min, double x_max, int count_x,
                             double elevation, Variant variant)
{
    if (count_f < 1 || count_x < 1)
        throw DomainError("sweep needs at least one frequency and one position");
    SweepSpec s;
    s.elevation = elevation;
    s.variant = variant;
    for (int m = 0; m < count_f; ++m)
        s.frequencies.push_back(count_f == 1 ? f_min : f_min + (f_max - f_min) * m / (count_f - 1));
    for (int n = 0; n < count_x; ++n)
        s.positions.push_back(count_x == 1 ? x_min : x_min + (x_max - x_min) * n / (count_x - 1));
    return s;
}

SweepSpec SweepSpec::paper(Variant variant)
{
    return uniform(3.5, 5.5, 41, -51.0, 51.0, 35, 75.0, variant);
}

std::vector<Vec2> SweepSpec::sources() const
{
    std::vector<Vec2> out;
    out.reserve(positions.size());
    for (double x : positions)
        out.push_back({x, elevation});
    return out;
}

void SweepSpec::validate() const
{
    if (frequencies.empty() || positions.empty())
        throw DomainError("sweep needs at least one frequency and one position");
    for (double f : frequencies)
        if (!(f > 0.0) || !std::isfinite(f))
            throw DomainError("sweep frequencies must be positive and finite");
    for (double x : positions)
        if (!std::isfinite(x))
            throw DomainError("sweep positions must be finite");
    if (!(elevation > 0.0) || !std::isfinite(elevation))
        throw DomainError("sweep elevation must be positive");
}

DataMatrix simulate_sweep(const Scene& scene, const SweepSpec& spec, const SweepOptions& options)
{
    spec.validate();
    scene.validate();
    if (!(spec.elevation > scene.surface.max_height()))
        throw DomainError("sweep elevation must lie above the interface");
    if (options.component == Component::target_only && spec.variant == Variant::no_target)
        throw DomainError("target_only component is empty for the no_target variant");

    const auto sources = spec.sources();
    const auto rows = static_cast<Eigen::Index>(spec.rows());
    const auto cols = static_cast<Eigen::Index>(spec.cols());
    DataMatrix out;
    out.spec = spec;
    out.values = CMatrix::Zero(rows, cols);

    const bool uses_flat = spec.variant == Variant::first_order_flat || spec.variant == Variant::point_target;
    const RoughSurface flat =
        uses_flat ? flat_surface(scene.surface.length, static_cast<int>(scene.surface.size())) : RoughSurface{};
    const auto air_rough = interface_air_sources(scene.surface, scene.offsets);
    const auto air_flat = uses_flat ? interface_air_sources(flat, scene.offsets) : std::vector<Vec2>{};

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(rows));
    const int threads = std::max(1, options.threads);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (Eigen::Index m = 0; m < rows; ++m) {
        try {
            const auto start = std::chrono::steady_clock::now();
            const double f = spec.frequencies[static_cast<std::size_t>(m)];
            const double k0 = scene.media.at_frequency(f).k0();
            const FrequencySolver solver(scene, f, spec.variant);
            const auto sols = solver.solve(sources);

            std::vector<MfsSolution> ground;
            if (options.component == Component::target_only && spec.variant == Variant::full)
                ground = FrequencySolver(scene, f, Variant::no_target).solve(sources);

            const CMatrix e_rough = receiver_matrix(sources, air_rough, k0);
            const CMatrix e_flat = uses_flat ? receiver_matrix(sources, air_flat, k0) : CMatrix{};
            for (Eigen::Index n = 0; n < cols; ++n) {
                const MfsSolution& s = sols[static_cast<std::size_t>(n)];
                Complex d{0.0, 0.0};
                if (options.component == Component::total) {
                    d = (e_rough.row(n) * s.a).value();
                    if (uses_flat)
                        d += (e_flat.row(n) * s.a_flat).value();
                } else if (uses_flat) {
                    d = (e_flat.row(n) * s.a_flat).value();
                } else {
                    const CVector& base = ground.empty() ? s.a_ground : ground[static_cast<std::size_t>(n)].a;
                    d = (e_rough.row(n) * (s.a - base)).value();
                }
                if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
                    throw SolverError(fmt::format("non-finite measurement at n={}", n));
                out.values(m, n) = d;
            }
            if (options.progress) {
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
#pragma omp critical(gpsar_progress)
                options.progress(static_cast<std::size_t>(m), f, secs);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(m)] = std::current_exception();
        }
    }

    for (std::size_t m = 0; m < errors.size(); ++m)
        if (errors[m])
            rethrow_annotated(errors[m], m, spec.frequencies[m]);
    return out;
}

DataMatrix add_noise(const DataMatrix& data, double snr_db, std::uint64_t seed)
{
    if (data.values.size() == 0)
        throw DomainError("add_noise: empty matrix");
    if (!std::isfinite(snr_db))
        throw DomainError("add_noise: snr_db must be finite");
    const double mn = static_cast<double>(data.values.size());
    const double variance = data.values.squaredNorm() / (mn * std::pow(10.0, snr_db / 10.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));

    DataMatrix out = data;
    for (Eigen::Index m = 0; m < out.rows(); ++m)
        for (Eigen::Index n = 0; n < out.cols(); ++n) {
            const double re = normal(rng);
            const double im = normal(rng);
            out.values(m, n) += Complex(re, im);
        }
    out.snr_db = snr_db;
    out.noise_seed = seed;
    return out;
}

double realized_snr_db(const CMatrix& clean, const CMatrix& noisy)
{
    return 10.0 * std::log10(clean.squaredNorm() / (noisy - clean).squaredNorm());
}

void save_matrix(const DataMatrix& data, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    const auto snr = data.snr_db ? fmt::format("{:.17g}", *data.snr_db) : std::string("inf");
    out << fmt::format("# kind={}\n", data.kind);
    out << fmt::format("# M={}\n# N={}\n", data.rows(), data.cols());
    out << fmt::format("# variant={}\n", to_string(data.spec.variant));
    out << fmt::format("# elevation={:.17g}\n", data.spec.elevation);
    out << fmt::format("# snr_db={}\n# noise_seed={}\n", snr, data.noise_seed);
    out << fmt::format("# config_hash={}\n", data.config_hash);
    out << "# frequencies_ghz=" << join(data.spec.frequencies) << '\n';
    out << "# positions_cm=" << join(data.spec.positions) << '\n';
    std::string line;
    for (Eigen::Index m = 0; m < data.rows(); ++m) {
        line.clear();
        for (Eigen::Index n = 0; n < data.cols(); ++n) {
            if (n)
                line += ',';
            line += fmt::format("{:.17g},{:.17g}", data.values(m, n).real(), data.values(m, n).imag());
        }
        out << line << '\n';
    }
    if (!out)
        throw IoError("failed writing " + path.string());
}

DataMatrix load_matrix(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::map<std::string, std::string> header;
    std::vector<std::string> rows;
    std::string line;
    std::size_t line_no = 0, first_data_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (!rows.empty())
                throw IoError(fmt::format("{}:{}: header line after data", path.string(), line_no));
            const auto body = line.substr(line.find_first_not_of("# "));
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw IoError(fmt::format("{}:{}: malformed header line", path.string(), line_no));
            header[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        if (rows.empty())
            first_data_line = line_no;
        rows.push_back(line);
    }

    auto require = [&](const char* key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end())
            throw IoError(fmt::format("{}: header is missing '{}'", path.string(), key));
        return it->second;
    };

    DataMatrix data;
    long m_count = 0, n_count = 0;
    try {
        m_count = std::stol(require("M"));
        n_count = std::stol(require("N"));
        data.noise_seed = std::stoull(require("noise_seed"));
    } catch (const std::invalid_argument&) {
        throw IoError(path.string() + ": malformed integer in header");
    }
    if (m_count < 1 || n_count < 1)
        throw IoError(path.string() + ": M and N must be positive");
    data.kind = require("kind");
    data.spec.variant = variant_from_string(require("variant"));
    data.spec.elevation = parse_double(require("elevation"), "elevation");
    const double snr = parse_double(require("snr_db"), "snr_db");
    if (std::isfinite(snr))
        data.snr_db = snr;
    data.config_hash = require("config_hash");
    data.spec.frequencies = split_doubles(require("frequencies_ghz"), "frequency");
    data.spec.positions = split_doubles(require("positions_cm"), "position");
    if (static_cast<long>(data.spec.frequencies.size()) != m_count)
        throw IoError(path.string() + ": frequency list length does not match M");
    if (static_cast<long>(data.spec.positions.size()) != n_count)
        throw IoError(path.string() + ": position list length does not match N");

    data.values.resize(m_count, n_count);
    for (long m = 0; m < m_count; ++m) {
        const std::size_t at = first_data_line + static_cast<std::size_t>(m);
        if (m >= static_cast<long>(rows.size()))
            throw IoError(fmt::format("{}:{}: expected row {} of {}, found end of file", path.string(), at, m + 1,
                                      m_count));
        std::stringstream ss(rows[static_cast<std::size_t>(m)]);
        std::string item;
        std::vector<double> vals;
        while (std::getline(ss, item, ','))
            vals.push_back(parse_double(item, fmt::format("line {}", at)));
        if (static_cast<long>(vals.size()) != 2 * n_count)
            throw IoError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), at, 2 * n_count,
                                      vals.size()));
        for (long n = 0; n < n_count; ++n)
            data.values(m, n) = Complex(vals[2 * n], vals[2 * n + 1]);
    }
    if (static_cast<long>(rows.size()) > m_count)
        throw IoError(fmt::format("{}:{}: more rows than M={}", path.string(), first_data_line + m_count, m_count));
    return data;
}

} // namespace gpsar
