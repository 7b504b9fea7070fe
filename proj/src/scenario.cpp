#include "gpsar/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "gpsar/error.hpp"

namespace gpsar {

namespace {

// Typed access to one mapping with unknown-key detection.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path))
    {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ConfigError(path_ + ": expected a mapping");
    }

    bool present() const { return node_ && node_.IsMap(); }
    bool has(const std::string& key) const { return present() && node_[key] && !node_[key].IsNull(); }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    YAML::Node raw(const std::string& key)
    {
        seen_.insert(key);
        return present() ? node_[key] : YAML::Node();
    }

    template <typename T>
    void get(const std::string& key, T& out, const char* what)
    {
        const YAML::Node n = raw(key);
        if (!n || n.IsNull())
            return;
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(fmt::format("{}: expected {}", field(key), what));
        }
    }

    void number(const std::string& key, double& out) { get(key, out, "a number"); }
    void integer(const std::string& key, int& out) { get(key, out, "an integer"); }
    void seed(const std::string& key, std::uint64_t& out) { get(key, out, "a non-negative integer"); }
    void text(const std::string& key, std::string& out) { get(key, out, "a string"); }

    void point(const std::string& key, Vec2& out)
    {
        const YAML::Node n = raw(key);
        if (!n || n.IsNull())
            return;
        if (!n.IsSequence() || n.size() != 2)
            throw ConfigError(field(key) + ": expected [x, z]");
        try {
            out = {n[0].as<double>(), n[1].as<double>()};
        } catch (const YAML::Exception&) {
            throw ConfigError(field(key) + ": expected [x, z]");
        }
    }

    void require(const std::string& key)
    {
        if (present() && !has(key))
            throw ConfigError(field(key) + ": required field is missing");
    }

    void finish() const
    {
        if (!present())
            return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key))
                throw ConfigError(field(key) + ": unknown key");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string num(double v) { return fmt::format("{}", v); }
std::string pt(const Vec2& p) { return fmt::format("[{}, {}]", p.x, p.z); }

void parse_shape(Section& s, TargetShape& shape)
{
    std::string name = shape_name(shape);
    s.text("shape", name);
    try {
        shape = default_shape(name);
    } catch (const DomainError&) {
        throw ConfigError(s.field("shape") + ": unknown shape '" + name + "'");
    }
    std::visit(
        [&](auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            s.point("center", sh.center);
            if constexpr (std::is_same_v<T, KiteShape>) {
                s.number("a", sh.a);
                s.number("b", sh.b);
                s.number("c", sh.c);
                s.number("d", sh.d);
            } else if constexpr (std::is_same_v<T, CircleShape>) {
                s.number("radius", sh.radius);
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                s.number("semi_x", sh.semi_x);
                s.number("semi_z", sh.semi_z);
            } else if constexpr (std::is_same_v<T, StarShape>) {
                s.number("base_radius", sh.base_radius);
                s.number("amplitude", sh.amplitude);
                s.integer("lobes", sh.lobes);
            } else {
                s.number("width", sh.width);
                s.number("height", sh.height);
                s.integer("exponent", sh.exponent);
            }
        },
        shape);
}

std::string emit_shape(const TargetShape& shape)
{
    return std::visit(
        [](const auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            std::string out = fmt::format("  center: {}\n", pt(sh.center));
            if constexpr (std::is_same_v<T, KiteShape>)
                out += fmt::format("  a: {}\n  b: {}\n  c: {}\n  d: {}\n", num(sh.a), num(sh.b), num(sh.c), num(sh.d));
            else if constexpr (std::is_same_v<T, CircleShape>)
                out += fmt::format("  radius: {}\n", num(sh.radius));
            else if constexpr (std::is_same_v<T, EllipseShape>)
                out += fmt::format("  semi_x: {}\n  semi_z: {}\n", num(sh.semi_x), num(sh.semi_z));
            else if constexpr (std::is_same_v<T, StarShape>)
                out += fmt::format("  base_radius: {}\n  amplitude: {}\n  lobes: {}\n", num(sh.base_radius),
                                   num(sh.amplitude), sh.lobes);
            else
                out += fmt::format("  width: {}\n  height: {}\n  exponent: {}\n", num(sh.width), num(sh.height),
                                   sh.exponent);
            return out;
        },
        shape);
}

} // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    Scenario sc;
    sc.base_dir = base_dir;
    Section top(root, "");

    {
        Section s(top.raw("surface"), "surface");
        auto& c = sc.surface;
        s.text("kind", c.kind);
        if (c.kind != "gaussian" && c.kind != "flat" && c.kind != "file")
            throw ConfigError("surface.kind: expected gaussian, flat or file");
        if (c.kind == "gaussian") {
            s.require("h_rms");
            s.require("corr_len");
            s.require("seed");
        }
        if (c.kind == "file")
            s.require("file");
        s.number("length", c.length);
        s.integer("samples", c.samples);
        s.number("h_rms", c.h_rms);
        s.number("corr_len", c.corr_len);
        s.seed("seed", c.seed);
        s.text("file", c.file);
        s.finish();
    }
    {
        Section s(top.raw("target"), "target");
        auto& c = sc.target;
        s.text("kind", c.kind);
        if (c.kind == "shape") {
            parse_shape(s, c.shape);
            s.integer("samples", c.samples);
        } else if (c.kind == "point") {
            s.point("position", c.point.position);
            const YAML::Node r = s.raw("reflectivity");
            if (r && !r.IsNull()) {
                try {
                    if (r.IsSequence() && r.size() == 2)
                        c.point.reflectivity = {r[0].as<double>(), r[1].as<double>()};
                    else
                        c.point.reflectivity = {r.as<double>(), 0.0};
                } catch (const YAML::Exception&) {
                    throw ConfigError("target.reflectivity: expected a number or [re, im]");
                }
            }
        } else if (c.kind != "none") {
            throw ConfigError("target.kind: expected shape, point or none");
        }
        s.finish();
    }
    {
        Section s(top.raw("media"), "media");
        s.number("eps_r1", sc.media.eps_r1);
        s.number("eps_r2", sc.media.eps_r2);
        s.number("wavespeed", sc.media.wavespeed);
        s.finish();
    }
    {
        Section s(top.raw("offsets"), "offsets");
        s.number("interface", sc.offsets.interface);
        s.number("target", sc.offsets.target);
        s.finish();
    }
    {
        Section s(top.raw("sweep"), "sweep");
        auto& c = sc.sweep;
        s.number("f_min", c.f_min);
        s.number("f_max", c.f_max);
        s.integer("frequencies", c.frequencies);
        s.number("x_min", c.x_min);
        s.number("x_max", c.x_max);
        s.integer("positions", c.positions);
        s.number("elevation", c.elevation);
        std::string variant = to_string(c.variant);
        s.text("variant", variant);
        try {
            c.variant = variant_from_string(variant);
        } catch (const DomainError&) {
            throw ConfigError("sweep.variant: unknown variant '" + variant + "'");
        }
        s.finish();
    }
    {
        Section s(top.raw("noise"), "noise");
        const YAML::Node snr = s.raw("snr_db");
        if (snr && !snr.IsNull()) {
            if (!snr.IsScalar())
                throw ConfigError("noise.snr_db: expected a number, inf or none");
            const auto word = snr.as<std::string>();
            if (word == "inf" || word == "none" || word == "clean") {
                sc.noise.snr_db.reset();
            } else {
                try {
                    sc.noise.snr_db = snr.as<double>();
                } catch (const YAML::Exception&) {
                    throw ConfigError("noise.snr_db: expected a number, inf or none");
                }
            }
        }
        s.seed("seed", sc.noise.seed);
        s.finish();
    }
    {
        Section s(top.raw("imaging"), "imaging");
        auto& g = sc.imaging.grid;
        s.number("x_min", g.x_min);
        s.number("x_max", g.x_max);
        s.number("z_min", g.z_min);
        s.number("z_max", g.z_max);
        s.number("dx", g.dx);
        s.number("dz", g.dz);
        s.integer("truncation", sc.imaging.truncation);
        s.finish();
    }
    top.finish();
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path());
}

std::string Scenario::canonical() const
{
    std::string out;
    out += "surface:\n";
    out += fmt::format("  kind: {}\n", surface.kind);
    if (surface.kind == "file")
        out += fmt::format("  file: {}\n", surface.file);
    else
        out += fmt::format("  length: {}\n  samples: {}\n", num(surface.length), surface.samples);
    if (surface.kind == "gaussian")
        out += fmt::format("  h_rms: {}\n  corr_len: {}\n  seed: {}\n", num(surface.h_rms), num(surface.corr_len),
                           surface.seed);

    out += "target:\n";
    out += fmt::format("  kind: {}\n", target.kind);
    if (target.kind == "shape") {
        out += fmt::format("  shape: {}\n", shape_name(target.shape));
        out += emit_shape(target.shape);
        out += fmt::format("  samples: {}\n", target.samples);
    } else if (target.kind == "point") {
        out += fmt::format("  position: {}\n", pt(target.point.position));
        out += fmt::format("  reflectivity: [{}, {}]\n", num(target.point.reflectivity.real()),
                           num(target.point.reflectivity.imag()));
    }

    out += "media:\n";
    out += fmt::format("  eps_r1: {}\n  eps_r2: {}\n  wavespeed: {}\n", num(media.eps_r1), num(media.eps_r2),
                       num(media.wavespeed));
    out += "offsets:\n";
    out += fmt::format("  interface: {}\n  target: {}\n", num(offsets.interface), num(offsets.target));
    out += "sweep:\n";
    out += fmt::format("  f_min: {}\n  f_max: {}\n  frequencies: {}\n", num(sweep.f_min), num(sweep.f_max),
                       sweep.frequencies);
    out += fmt::format("  x_min: {}\n  x_max: {}\n  positions: {}\n", num(sweep.x_min), num(sweep.x_max),
                       sweep.positions);
    out += fmt::format("  elevation: {}\n  variant: {}\n", num(sweep.elevation), to_string(sweep.variant));
    out += "noise:\n";
    out += fmt::format("  snr_db: {}\n  seed: {}\n", noise.snr_db ? num(*noise.snr_db) : std::string("none"),
                       noise.seed);
    const auto& g = imaging.grid;
    out += "imaging:\n";
    out += fmt::format("  x_min: {}\n  x_max: {}\n  z_min: {}\n  z_max: {}\n", num(g.x_min), num(g.x_max),
                       num(g.z_min), num(g.z_max));
    out += fmt::format("  dx: {}\n  dz: {}\n  truncation: {}\n", num(g.dx), num(g.dz), imaging.truncation);
    return out;
}

std::string Scenario::hash() const
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

RoughSurface Scenario::build_surface() const
{
    if (surface.kind == "flat")
        return flat_surface(surface.length, surface.samples);
    if (surface.kind == "file") {
        const std::filesystem::path p = std::filesystem::path(surface.file).is_absolute()
                                            ? std::filesystem::path(surface.file)
                                            : base_dir / surface.file;
        return load_surface_csv(p);
    }
    return generate_gaussian_surface(surface.length, surface.samples, surface.h_rms, surface.corr_len, surface.seed);
}

Scene Scenario::build_scene() const
{
    Scene scene;
    scene.surface = build_surface();
    scene.media = media;
    scene.offsets = offsets;
    if (target.kind == "shape")
        scene.target = make_target(target.shape, target.samples);
    else if (target.kind == "point")
        scene.point = target.point;
    return scene;
}

SweepSpec Scenario::sweep_spec() const
{
    return SweepSpec::uniform(sweep.f_min, sweep.f_max, sweep.frequencies, sweep.x_min, sweep.x_max, sweep.positions,
                              sweep.elevation, sweep.variant);
}

void Scenario::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (surface.kind != "file") {
        if (!is_power_of_two(surface.samples) || surface.samples < 64)
            fail("surface.samples: must be a power of two >= 64");
        if (!(surface.length > 0.0))
            fail("surface.length: must be positive");
        if (surface.kind == "gaussian" && !(surface.h_rms >= 0.0))
            fail("surface.h_rms: must be >= 0");
        if (surface.kind == "gaussian" && !(surface.corr_len > 0.0))
            fail("surface.corr_len: must be positive");
    }
    if (!(media.eps_r1 >= 1.0))
        fail("media.eps_r1: must be >= 1");
    if (!(media.eps_r2 >= 1.0))
        fail("media.eps_r2: must be >= 1");
    if (!(media.wavespeed > 0.0))
        fail("media.wavespeed: must be positive");
    if (!(offsets.interface > 0.0))
        fail("offsets.interface: must be positive");
    if (!(offsets.target > 0.0))
        fail("offsets.target: must be positive");
    if (sweep.frequencies < 1)
        fail("sweep.frequencies: must be >= 1");
    if (sweep.positions < 1)
        fail("sweep.positions: must be >= 1");
    if (!(sweep.f_min > 0.0) || !(sweep.f_max >= sweep.f_min))
        fail("sweep.f_min/f_max: need 0 < f_min <= f_max");
    if (!(sweep.x_max >= sweep.x_min))
        fail("sweep.x_min/x_max: need x_min <= x_max");
    if (target.kind == "shape" && target.samples < 16)
        fail("target.samples: must be >= 16");
    const bool needs_target = sweep.variant == Variant::full || sweep.variant == Variant::first_order ||
                              sweep.variant == Variant::first_order_flat;
    if (needs_target && target.kind != "shape")
        fail("sweep.variant: " + to_string(sweep.variant) + " needs target.kind = shape");
    if (sweep.variant == Variant::point_target && target.kind != "point")
        fail("sweep.variant: point_target needs target.kind = point");
    try {
        imaging.grid.validate();
    } catch (const DomainError& e) {
        fail(std::string("imaging: ") + e.what());
    }
    const int rank = std::min(sweep.frequencies, sweep.positions);
    if (imaging.truncation < 0 || imaging.truncation > rank)
        fail(fmt::format("imaging.truncation: must lie in [0, {}]", rank));

    // Cross-field checks need the realized geometry.
    Scene scene;
    try {
        scene = build_scene();
    } catch (const DomainError& e) {
        fail(std::string("geometry: ") + e.what());
    }
    if (!(sweep.elevation > scene.surface.max_height()))
        fail("sweep.elevation: must lie above the interface");
    try {
        scene.validate();
    } catch (const DomainError& e) {
        fail(std::string("scenario: ") + e.what());
    }
}

} // namespace gpsar
