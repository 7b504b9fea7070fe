#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpsar/error.hpp"
#include "gpsar/measurement.hpp"

using namespace gpsar;

namespace {

std::filesystem::path tmp_dir()
{
    std::filesystem::path p = std::filesystem::path(GPSAR_TEST_TMP) / "measurement";
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

Scene small_scene()
{
    Scene sc;
    sc.surface = generate_gaussian_surface(100.0, 128, 0.3, 8.0, 2);
    sc.target = make_target(CircleShape{{3.0, -14.0}, 3.5}, 64);
    sc.offsets.target = 0.5;
    return sc;
}

SweepSpec small_spec(Variant v = Variant::full)
{
    return SweepSpec::uniform(3.5, 5.5, 5, -12.0, 12.0, 7, 75.0, v);
}

CMatrix random_matrix(Eigen::Index m, Eigen::Index n, unsigned seed)
{
    std::srand(seed);
    return CMatrix::Random(m, n);
}

} // namespace

TEST_CASE("published sweep geometry")
{
    const SweepSpec s = SweepSpec::paper();
    REQUIRE(s.rows() == 41);
    REQUIRE(s.cols() == 35);
    CHECK(s.frequencies.front() == 3.5);
    CHECK(s.frequencies.back() == 5.5);
    CHECK(s.frequencies[1] - s.frequencies[0] == doctest::Approx(0.05));
    CHECK(s.positions.front() == -51.0);
    CHECK(s.positions.back() == 51.0);
    CHECK(s.positions[1] - s.positions[0] == doctest::Approx(3.0));
    CHECK(s.elevation == 75.0);
    for (const auto& src : s.sources())
        CHECK(src.z == 75.0);
}

TEST_CASE("sweep is deterministic across thread counts")
{
    const Scene sc = small_scene();
    SweepOptions one, four;
    four.threads = 4;
    int calls = 0;
    one.progress = [&](std::size_t, double, double) { ++calls; };
    const DataMatrix a = simulate_sweep(sc, small_spec(), one);
    const DataMatrix b = simulate_sweep(sc, small_spec(), four);
    CHECK(calls == 5);
    CHECK(a.values == b.values);
    CHECK(a.values.allFinite());
    CHECK(a.rows() == 5);
    CHECK(a.cols() == 7);
}

TEST_CASE("sweep entries are the co-located receiver field")
{
    const Scene sc = small_scene();
    const SweepSpec spec = small_spec();
    const DataMatrix d = simulate_sweep(sc, spec);
    const std::size_t m = 2, n = 4;
    const Vec2 r = spec.sources()[n];
    const MfsSolution s = solve_full(sc, spec.frequencies[m], r);
    const CVector u = evaluate_field(s, sc, spec.frequencies[m], Region::air, std::vector<Vec2>{r});
    CHECK(std::abs(d.values(2, 4) - u(0)) <= 1e-12 * std::abs(u(0)));
}

TEST_CASE("target-only component")
{
    const Scene sc = small_scene();
    const DataMatrix total = simulate_sweep(sc, small_spec());
    const DataMatrix ground = simulate_sweep(sc, small_spec(Variant::no_target));
    SweepOptions opt;
    opt.component = Component::target_only;
    const DataMatrix target = simulate_sweep(sc, small_spec(), opt);
    CHECK((total.values - ground.values - target.values).norm() <= 1e-12 * total.values.norm());
    CHECK_THROWS_AS(simulate_sweep(sc, small_spec(Variant::no_target), opt), DomainError);
}

TEST_CASE("point-target sweep is linear in the reflectivity")
{
    Scene sc;
    sc.surface = generate_gaussian_surface(100.0, 128, 0.3, 8.0, 2);
    sc.point = PointTarget{{0.0, -10.36}, {8.0, 0.0}};
    const SweepSpec spec = small_spec(Variant::point_target);
    const DataMatrix ground = simulate_sweep(sc, small_spec(Variant::no_target));
    const DataMatrix d1 = simulate_sweep(sc, spec);
    SweepOptions opt;
    opt.component = Component::target_only;
    const DataMatrix t1 = simulate_sweep(sc, spec, opt);
    sc.point->reflectivity = {-4.0, 12.0};
    const Complex ratio = Complex{-4.0, 12.0} / 8.0;
    const DataMatrix d2 = simulate_sweep(sc, spec);
    const DataMatrix t2 = simulate_sweep(sc, spec, opt);
    CHECK((t2.values - ratio * t1.values).norm() <= 1e-12 * t2.values.norm());
    sc.point->reflectivity = {16.0, 0.0};
    const DataMatrix t3 = simulate_sweep(sc, spec, opt);
    CHECK(t3.values == 2.0 * t1.values);
    const CMatrix lhs = d2.values - ground.values;
    CHECK((lhs - ratio * (d1.values - ground.values)).norm() <= 1e-12 * lhs.norm());
}

TEST_CASE("ground bounce dominates the target signal on the reference scene")
{
    Scene sc;
    sc.surface = generate_gaussian_surface(400.0, 512, 0.4, 8.0, 1);
    sc.target = make_target(KiteShape{}, 128);
    const SweepSpec spec = SweepSpec::uniform(3.5, 5.5, 3, -51.0, 51.0, 35, 75.0, Variant::full);
    SweepSpec bare = spec;
    bare.variant = Variant::no_target;
    const DataMatrix full = simulate_sweep(sc, spec);
    const DataMatrix ground = simulate_sweep(sc, bare);
    CHECK((full.values - ground.values).norm() < ground.values.norm());
}

TEST_CASE("no soil contrast gives an empty data matrix" * doctest::may_fail())
{
    Scene sc;
    sc.surface = flat_surface(400.0, 512);
    sc.media.eps_r1 = 1.0;
    const DataMatrix d = simulate_sweep(sc, SweepSpec::uniform(4.0, 5.0, 2, -10.0, 10.0, 3, 75.0, Variant::no_target));
    MESSAGE("max |d_mn| with eps_r1 = 1: " << d.values.cwiseAbs().maxCoeff());
    CHECK(d.values.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("noise calibration")
{
    DataMatrix d;
    d.values = random_matrix(41, 35, 5);
    d.spec = SweepSpec::paper();

    const DataMatrix quiet = add_noise(d, 300.0, 1);
    CHECK((quiet.values - d.values).norm() / d.values.norm() <= 1e-14);

    const DataMatrix noisy = add_noise(d, 25.0, 7);
    const double snr = realized_snr_db(d.values, noisy.values);
    CHECK(snr >= 24.5);
    CHECK(snr <= 25.5);
    CHECK(noisy.snr_db.value() == 25.0);
    CHECK(noisy.noise_seed == 7);
    CHECK(add_noise(d, 25.0, 7).values == noisy.values);
    CHECK(add_noise(d, 25.0, 8).values != noisy.values);

    double mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
        mean += realized_snr_db(d.values, add_noise(d, 25.0, seed).values) / 100.0;
    CHECK(std::abs(mean - 25.0) <= 0.1);

    DataMatrix empty;
    CHECK_THROWS_AS(add_noise(empty, 25.0, 1), DomainError);
    CHECK_THROWS_AS(add_noise(d, std::numeric_limits<double>::infinity(), 1), DomainError);
}

TEST_CASE("matrix file round trip")
{
    DataMatrix d;
    d.values = random_matrix(4, 3, 9) * 1e-3;
    d.values(0, 0) = {1.0 / 3.0, -2.0 / 7.0};
    d.spec = SweepSpec::uniform(3.5, 5.5, 4, -3.0, 3.0, 3, 75.0, Variant::first_order_flat);
    d = add_noise(d, 25.0, 3);
    d.config_hash = "0123456789abcdef";
    const auto dir = tmp_dir();
    save_matrix(d, dir / "a.csv");
    const DataMatrix e = load_matrix(dir / "a.csv");
    CHECK(e.values == d.values);
    CHECK(e.spec.frequencies == d.spec.frequencies);
    CHECK(e.spec.positions == d.spec.positions);
    CHECK(e.spec.variant == Variant::first_order_flat);
    CHECK(e.snr_db.value() == 25.0);
    CHECK(e.noise_seed == 3);
    CHECK(e.config_hash == d.config_hash);
    save_matrix(e, dir / "b.csv");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

    const std::string text = slurp(dir / "a.csv");
    for (const char* key : {"# M=4", "# N=3", "# variant=first_order_flat", "# snr_db=25", "# noise_seed=3",
                            "# frequencies_ghz=3.5;", "# positions_cm=-3;0;3"})
        CHECK(text.find(key) != std::string::npos);

    DataMatrix clean = d;
    clean.snr_db.reset();
    save_matrix(clean, dir / "clean.csv");
    CHECK(slurp(dir / "clean.csv").find("# snr_db=inf") != std::string::npos);
    CHECK(!load_matrix(dir / "clean.csv").snr_db.has_value());
}

TEST_CASE("malformed matrix files")
{
    DataMatrix d;
    d.values = random_matrix(4, 2, 1);
    d.spec = SweepSpec::uniform(4.0, 5.0, 4, -1.0, 1.0, 2, 75.0, Variant::full);
    const auto dir = tmp_dir();
    save_matrix(d, dir / "good.csv");
    std::string text = slurp(dir / "good.csv");
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    std::ofstream(dir / "short.csv") << text;
    CHECK_THROWS_WITH_AS(load_matrix(dir / "short.csv"), doctest::Contains("expected row 4 of 4"), IoError);
    CHECK_THROWS_WITH_AS(load_matrix(dir / "short.csv"), doctest::Contains("short.csv:14:"), IoError);
    std::ofstream(dir / "nohdr.csv") << "1,2,3,4\n";
    CHECK_THROWS_AS(load_matrix(dir / "nohdr.csv"), IoError);
    CHECK_THROWS_AS(load_matrix(dir / "absent.csv"), IoError);
}
