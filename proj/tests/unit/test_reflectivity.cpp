#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpsar/error.hpp"
#include "gpsar/imaging.hpp"
#include "gpsar/reflectivity.hpp"

using namespace gpsar;

namespace {

std::filesystem::path tmp_dir()
{
    std::filesystem::path p = std::filesystem::path(GPSAR_TEST_TMP) / "reflectivity";
    std::filesystem::create_directories(p);
    return p;
}

CMatrix random_matrix(Eigen::Index m, Eigen::Index n, unsigned seed)
{
    std::srand(seed);
    return CMatrix::Random(m, n);
}

CMatrix orthonormal(Eigen::Index n, unsigned seed)
{
    Eigen::HouseholderQR<CMatrix> qr(random_matrix(n, n, seed));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

ReflectivityMatrix wrap(const CMatrix& v)
{
    ReflectivityMatrix f;
    f.values = v;
    f.valid.setConstant(v.rows(), v.cols(), true);
    return f;
}

std::vector<double> freqs(int m)
{
    std::vector<double> f;
    for (int i = 0; i < m; ++i)
        f.push_back(3.5 + 0.05 * i);
    return f;
}

} // namespace

TEST_CASE("synthetic model data recovers its reflectivity")
{
    ModelComponents c;
    c.r_rough = random_matrix(8, 6, 1) * 10.0;
    c.s_flat = random_matrix(8, 6, 2) + CMatrix::Constant(8, 6, Complex{2.0, 0.0});
    for (Complex rho : {Complex{8.0, 0.0}, Complex{5.0, 0.0}, Complex{-0.3, 2.5}}) {
        const ReflectivityMatrix f = extract_reflectivity(c.r_rough + rho * c.s_flat, c);
        CHECK(f.provenance == Provenance::oracle);
        CHECK(f.invalid_count == 0);
        CHECK((f.values.array() - rho).abs().maxCoeff() <= 1e-10 * std::abs(rho));
    }
    CHECK_THROWS_AS(extract_reflectivity(random_matrix(7, 6, 1), c), DomainError);
}

TEST_CASE("PCA estimate equals the oracle when the ground bounce is removed exactly")
{
    const Eigen::Index m = 10, n = 8;
    const CMatrix u = orthonormal(m, 3), v = orthonormal(n, 4);
    Eigen::VectorXd sr(n), ss(n);
    sr << 50.0, 30.0, 0, 0, 0, 0, 0, 0;
    ss << 0, 0, 2.0, 1.5, 1.0, 0.7, 0.4, 0.2;
    const CMatrix r = u.leftCols(n) * sr.cast<Complex>().asDiagonal() * v.adjoint();
    const Complex rho{8.0, 0.0};
    const CMatrix s_flat = u.leftCols(n) * ss.cast<Complex>().asDiagonal() * v.adjoint() / rho;
    const CMatrix d = r + rho * s_flat;

    ModelComponents c;
    c.r_rough = r;
    c.s_flat = s_flat;
    const ReflectivityMatrix oracle = extract_reflectivity(d, c);
    const ReflectivityMatrix est = extract_reflectivity_pca(pca_truncate(d, 2).processed, s_flat);
    CHECK(est.provenance == Provenance::pca);
    CHECK((est.values - oracle.values).norm() <= 1e-8 * oracle.values.norm());
    const ReflectivityMatrix raw = extract_reflectivity_pca(d, s_flat);
    CHECK((raw.values - oracle.values).norm() > oracle.values.norm());
}

TEST_CASE("spectrum properties")
{
    const int m = 7;
    const Spectrum flat = spectrum(wrap(CMatrix::Constant(m, 4, Complex{3.0, -1.0})), freqs(m));
    for (double v : flat.normalized)
        CHECK(v == doctest::Approx(1.0 / std::sqrt(double(m))).epsilon(1e-14));

    const CMatrix f = random_matrix(m, 5, 6);
    const Spectrum a = spectrum(wrap(f), freqs(m));
    const Spectrum b = spectrum(wrap(Complex{0.0, -4.0} * f), freqs(m));
    for (int i = 0; i < m; ++i)
        CHECK(a.normalized[i] == doctest::Approx(b.normalized[i]).epsilon(1e-14));
    double norm2 = 0.0;
    for (double v : a.normalized)
        norm2 += v * v;
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(spectrum(wrap(CMatrix::Zero(m, 3)), freqs(m)), DomainError);
    CHECK_THROWS_AS(spectrum(wrap(f), freqs(m - 1)), DomainError);
}

TEST_CASE("dispersive reflectivity is recovered by the spectrum")
{
    const int m = 9, n = 6;
    Eigen::VectorXcd rho(m);
    for (int i = 0; i < m; ++i)
        rho(i) = std::polar(1.0 + 0.3 * i, 0.4 * i);
    ModelComponents c;
    c.r_rough = random_matrix(m, n, 11);
    c.s_flat = random_matrix(m, n, 12) + CMatrix::Constant(m, n, Complex{2.0, 1.0});
    const CMatrix d = c.r_rough + rho.asDiagonal() * c.s_flat;
    const Spectrum s = spectrum(extract_reflectivity(d, c), freqs(m));
    const double total = rho.cwiseAbs().norm();
    for (int i = 0; i < m; ++i)
        CHECK(s.normalized[i] == doctest::Approx(std::abs(rho(i)) / total).epsilon(1e-12));
}

TEST_CASE("division hazards")
{
    CMatrix s = CMatrix::Constant(3, 4, Complex{1.0, 0.0});
    s(1, 2) = 1e-20;
    s(2, 0) = 0.0;
    const CMatrix num = CMatrix::Constant(3, 4, Complex{2.0, 0.0});
    const ReflectivityMatrix f = divide_by_model(num, s, Provenance::pca, HazardPolicy::mask);
    CHECK(f.invalid_count == 2);
    CHECK(!f.valid(1, 2));
    CHECK(std::isnan(f.values(1, 2).real()));
    CHECK(f.values(0, 0) == Complex{2.0, 0.0});
    const Spectrum sp = spectrum(f, freqs(3));
    CHECK(sp.raw[1] == 2.0);
    CHECK_THROWS_WITH_AS(divide_by_model(num, s, Provenance::pca, HazardPolicy::fail), doctest::Contains("m=1 n=2"),
                         DomainError);
}

TEST_CASE("band cosine similarity")
{
    Spectrum a, b;
    a.frequencies = b.frequencies = {3.5, 4.0, 4.5, 5.0, 5.5};
    a.normalized = {1, 1, 0, 1, 9};
    b.normalized = {0, 2, 0, 2, -4};
    CHECK(band_cosine_similarity(a, b, 4.0, 5.0) == doctest::Approx(1.0));
    CHECK(band_cosine_similarity(a, b, 3.5, 5.5) < 0.0);
    CHECK_THROWS_AS(band_cosine_similarity(a, b, 6.0, 7.0), DomainError);
}

TEST_CASE("model components on a small scene")
{
    Scene sc;
    sc.surface = generate_gaussian_surface(100.0, 128, 0.3, 8.0, 2);
    sc.target = make_target(CircleShape{{3.0, -14.0}, 3.5}, 64);
    const SweepSpec spec = SweepSpec::uniform(3.5, 5.5, 3, -12.0, 12.0, 5, 75.0, Variant::full);
    const Vec2 r0{1.0, -10.0};
    const ModelComponents c = build_model_components(sc, spec, r0);
    CHECK(c.r_rough.rows() == 3);
    CHECK(c.s_flat.cols() == 5);
    CHECK(c.r_rough.norm() > c.s_flat.norm());
    CHECK(c.s_flat.cwiseAbs().minCoeff() > 0.0);

    for (std::uint64_t seed : {5u, 6u, 7u}) {
        Scene other = sc;
        other.surface = generate_gaussian_surface(100.0, 128, 0.3, 8.0, seed);
        CHECK(point_target_flat_response(other, spec, r0) == c.s_flat);
    }
    CHECK_THROWS_AS(point_target_flat_response(sc, spec, {0.0, 1.0}), DomainError);
}

TEST_CASE("no soil contrast gives no ground bounce" * doctest::may_fail())
{
    Scene sc;
    sc.surface = flat_surface(400.0, 512);
    sc.media.eps_r1 = 1.0;
    const SweepSpec spec = SweepSpec::uniform(4.0, 5.0, 2, -10.0, 10.0, 3, 75.0, Variant::no_target);
    const ModelComponents c = build_model_components(sc, spec, {0.0, -10.0});
    MESSAGE("max |R_rough| with eps_r1 = 1: " << c.r_rough.cwiseAbs().maxCoeff());
    CHECK(c.r_rough.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("spectrum and reflectivity files")
{
    Spectrum s;
    s.frequencies = {3.5, 4.0};
    s.raw = {3.0, 4.0};
    s.normalized = {0.6, 0.8};
    const auto dir = tmp_dir();
    save_spectrum(s, dir / "s.csv", "h1");
    std::ifstream in(dir / "s.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "# config_hash=h1\nf_ghz,raw,normalized\n3.5,3,0.59999999999999998\n4,4,0.80000000000000004\n");

    const ReflectivityMatrix f = wrap(random_matrix(2, 3, 1));
    save_reflectivity(f, SweepSpec::uniform(3.5, 4.0, 2, -1.0, 1.0, 3, 75.0, Variant::full), dir / "F.csv", "h2");
    const DataMatrix back = load_matrix(dir / "F.csv");
    CHECK(back.kind == "reflectivity");
    CHECK(back.values == f.values);
}
