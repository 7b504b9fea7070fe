#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gpsar/error.hpp"
#include "gpsar/imaging.hpp"

using namespace gpsar;

namespace {

std::filesystem::path tmp_dir()
{
    std::filesystem::path p = std::filesystem::path(GPSAR_TEST_TMP) / "imaging";
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CMatrix random_matrix(Eigen::Index m, Eigen::Index n, unsigned seed)
{
    std::srand(seed);
    return CMatrix::Random(m, n);
}

ImagingGrid small_grid()
{
    ImagingGrid g;
    g.x_min = -4.0;
    g.x_max = 6.0;
    g.z_min = -16.0;
    g.z_max = -6.0;
    return g;
}

ImageRaster raster_from(const Eigen::MatrixXd& v)
{
    ImageRaster r;
    r.values = v;
    for (Eigen::Index i = 0; i < v.cols(); ++i)
        r.x.push_back(0.5 * i);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        r.z.push_back(-5.0 + 0.5 * i);
    return r;
}

} // namespace

TEST_CASE("PCA truncation")
{
    const CMatrix d = random_matrix(12, 9, 4);
    const PcaResult p0 = pca_truncate(d, 0);
    CHECK(p0.processed == d);
    REQUIRE(p0.singular_values.size() == 9);
    for (std::size_t j = 1; j < p0.singular_values.size(); ++j)
        CHECK(p0.singular_values[j] <= p0.singular_values[j - 1]);

    for (int J : {1, 3, 5}) {
        const PcaResult p = pca_truncate(d, J);
        double tail = 0.0;
        for (std::size_t j = static_cast<std::size_t>(J); j < p.singular_values.size(); ++j)
            tail += p.singular_values[j] * p.singular_values[j];
        CHECK(std::abs(p.processed.squaredNorm() - tail) <= 1e-10 * tail);
        CHECK(p.processed.norm() <= d.norm());
    }

    const CVector u = random_matrix(12, 1, 1).col(0).normalized();
    const CVector v = random_matrix(9, 1, 2).col(0).normalized();
    const CMatrix rank1 = 7.5 * u * v.adjoint();
    CHECK(pca_truncate(rank1, 1).processed.norm() <= 1e-12 * 7.5);

    CHECK_THROWS_AS(pca_truncate(d, -1), DomainError);
    CHECK_THROWS_AS(pca_truncate(d, 10), DomainError);
}

TEST_CASE("illumination phases")
{
    const SweepSpec spec = SweepSpec::uniform(3.5, 5.5, 5, -6.0, 6.0, 5, 75.0, Variant::full);
    const CMatrix on_axis = km_illuminations({spec.positions[2], 0.0}, spec, 9.0);
    for (std::size_t m = 0; m < spec.rows(); ++m) {
        const double k = 2.0 * std::numbers::pi * spec.frequencies[m] / 30.0;
        CHECK(std::abs(on_axis(static_cast<Eigen::Index>(m), 2) - std::polar(1.0, 2.0 * k * 75.0)) < 1e-12);
    }
    const CMatrix deep = km_illuminations({1.3, -4.0}, spec, 9.0);
    const CMatrix shallow = km_illuminations({1.3, 0.0}, spec, 9.0);
    for (Eigen::Index m = 0; m < deep.rows(); ++m)
        for (Eigen::Index n = 0; n < deep.cols(); ++n) {
            CHECK(std::abs(std::abs(deep(m, n)) - 1.0) < 1e-15);
            const double k = 2.0 * std::numbers::pi * spec.frequencies[static_cast<std::size_t>(m)] / 30.0;
            const Complex ratio = deep(m, n) / shallow(m, n);
            CHECK(std::abs(ratio - std::polar(1.0, 2.0 * k * 3.0 * 4.0)) < 1e-11);
        }
}

TEST_CASE("phase-matched data focuses on its point")
{
    const SweepSpec spec = SweepSpec::uniform(3.5, 5.5, 11, -30.0, 30.0, 21, 75.0, Variant::full);
    const ImagingGrid grid = small_grid();
    const Vec2 y0{grid.xs()[17], grid.zs()[23]};
    const CMatrix d = km_illuminations(y0, spec, 9.0);
    const ImageRaster r = km_image(d, grid, spec, 9.0);
    CHECK(r.peak == y0);
    CHECK(r.peak_value == doctest::Approx(11.0 * 21.0).epsilon(1e-12));
    const ImageRaster threaded = km_image(d, grid, spec, 9.0, 30.0, 3);
    CHECK(threaded.values == r.values);
    CHECK(r.values.minCoeff() >= 0.0);
    CHECK(r.normalized().maxCoeff() == 1.0);
}

TEST_CASE("KM image is linear and scale-invariant in its argmax")
{
    const SweepSpec spec = SweepSpec::uniform(3.5, 5.5, 6, -20.0, 20.0, 9, 75.0, Variant::full);
    const ImagingGrid grid = small_grid();
    const CMatrix d1 = random_matrix(6, 9, 3), d2 = random_matrix(6, 9, 8);
    const Complex alpha{0.3, -1.2}, beta{-2.0, 0.5};
    const CMatrix i1 = km_image_complex(d1, grid, spec, 9.0);
    const CMatrix i2 = km_image_complex(d2, grid, spec, 9.0);
    const CMatrix i12 = km_image_complex(alpha * d1 + beta * d2, grid, spec, 9.0);
    CHECK((i12 - alpha * i1 - beta * i2).norm() <= 1e-12 * i12.norm());

    const ImageRaster a = km_image(d1, grid, spec, 9.0);
    const ImageRaster b = km_image(Complex{-0.2, 3.0} * d1, grid, spec, 9.0);
    CHECK(a.peak == b.peak);

    const Vec2 y{1.0, -9.0};
    const CMatrix ill = km_illuminations(y, spec, 9.0);
    const Complex direct = (d1.array() * ill.conjugate().array()).sum();
    const std::vector<double> xs = grid.xs(), zs = grid.zs();
    const auto ix = std::distance(xs.begin(), std::min_element(xs.begin(), xs.end(), [](double p, double q) {
                                      return std::abs(p - 1.0) < std::abs(q - 1.0);
                                  }));
    const auto iz = std::distance(zs.begin(), std::min_element(zs.begin(), zs.end(), [](double p, double q) {
                                      return std::abs(p + 9.0) < std::abs(q + 9.0);
                                  }));
    CHECK(std::abs(i1(iz, ix) - direct) <= 1e-11 * std::abs(direct));
    CHECK_THROWS_AS(km_image(random_matrix(5, 9, 1), grid, spec, 9.0), DomainError);
}

TEST_CASE("peak location rules")
{
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 5);
    v(2, 3) = 0.7;
    CHECK(peak_location(raster_from(v)).location == Vec2{1.5, -4.0});
    CHECK(peak_location(raster_from(v * 9.0)).location == Vec2{1.5, -4.0});

    const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(4, 5, 2.0);
    const Peak p = peak_location(raster_from(flat));
    CHECK(p.location == Vec2{0.0, -5.0});
    CHECK(p.value == 2.0);

    Eigen::MatrixXd tie = Eigen::MatrixXd::Zero(4, 5);
    tie(3, 0) = tie(1, 4) = tie(1, 2) = 1.0;
    CHECK(peak_location(raster_from(tie)).location == Vec2{1.0, -4.5});
    CHECK_THROWS_AS(peak_location(ImageRaster{}), DomainError);
}

TEST_CASE("imaging grid")
{
    ImagingGrid g;
    CHECK(g.xs().size() == 151);
    CHECK(g.zs().size() == 101);
    CHECK(g.zs().back() == doctest::Approx(-2.0));
    g.z_max = 0.0;
    CHECK_NOTHROW(g.validate());
    g.z_max = 0.5;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g = ImagingGrid{};
    g.dx = 0.0;
    CHECK_THROWS_AS(g.validate(), DomainError);
}

TEST_CASE("raster outputs")
{
    Eigen::MatrixXd v(2, 3);
    v << 0.0, 1.0, 2.0, 4.0, 3.0, 0.5;
    ImageRaster r = raster_from(v);
    const auto dir = tmp_dir();
    save_raster_pgm(r, dir / "r.pgm");
    const std::string pgm = slurp(dir / "r.pgm");
    const std::string header = "P5\n3 2\n65535\n";
    REQUIRE(pgm.size() == header.size() + 12);
    CHECK(pgm.substr(0, header.size()) == header);
    auto level = [&](int i) {
        return (static_cast<unsigned char>(pgm[header.size() + 2 * i]) << 8) |
               static_cast<unsigned char>(pgm[header.size() + 2 * i + 1]);
    };
    CHECK(level(0) == 65535);  // first row is z_max (values row 1)
    CHECK(level(1) == 49151);
    CHECK(level(3) == 0);

    save_raster_csv(r, dir / "r.csv", "abc");
    const std::string csv = slurp(dir / "r.csv");
    CHECK(csv.find("# config_hash=abc") == 0);
    CHECK(csv.find("\n-4.5,4,3,0.5\n-5,0,1,2\n") != std::string::npos);

    save_peak({{1.5, -4.0}, 0.25}, dir / "peak.txt");
    CHECK(slurp(dir / "peak.txt") == "peak_x=1.5 peak_z=-4 value=0.25\n");
    save_singular_values({3.0, 1.0}, dir / "sv.csv", "h");
    CHECK(slurp(dir / "sv.csv") == "# config_hash=h\nindex,sigma\n1,3\n2,1\n");
    CHECK_THROWS_AS(save_peak({}, dir / "missing" / "p.txt"), IoError);
}
