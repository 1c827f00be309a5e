#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadic.hpp"
#include "grid.hpp"

namespace lpsmooth::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
    return out;
}

inline void write_doubles(std::ofstream& os, const double* data, std::size_t count) {
    std::vector<std::uint64_t> buf(count);
    for (std::size_t i = 0; i < count; ++i) buf[i] = to_little(std::bit_cast<std::uint64_t>(data[i]));
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(std::uint64_t)));
}

inline std::vector<double> read_doubles(const fs::path& path, std::size_t expected) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    is.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(is.tellg());
    if (bytes != expected * sizeof(double))
        throw IoError(path.string() + ": expected " + std::to_string(expected * sizeof(double)) + " bytes, found " + std::to_string(bytes));
    is.seekg(0);
    std::vector<std::uint64_t> buf(expected);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
    std::vector<double> out(expected);
    for (std::size_t i = 0; i < expected; ++i) out[i] = std::bit_cast<double>(to_little(buf[i]));
    return out;
}

inline json grid_json(const Grid& g) {
    return {{"dim", g.dim()}, {"half_width", g.half_width()}, {"points", g.points()}, {"spacing", g.spacing()}};
}

inline Grid grid_from_json(const json& j) {
    return Grid(j.at("dim").get<int>(), j.at("half_width").get<double>(), j.at("points").get<int>());
}

inline json format_json(const char* layout) {
    return {{"dtype", "float64"}, {"endianness", "little"}, {"layout", layout}};
}

inline void write_sidecar(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

inline json read_sidecar(const fs::path& path, const std::string& kind) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    if (j.value("kind", "") != kind) throw IoError(path.string() + ": expected kind '" + kind + "'");
    if (j.value("dtype", "") != "float64" || j.value("endianness", "") != "little")
        throw IoError(path.string() + ": only little-endian float64 payloads are supported");
    return j;
}

inline std::ofstream open_binary(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + path.string());
    return os;
}

} // namespace detail

/// Payload and sidecar paths for a stem: stem.bin and stem.json.
inline fs::path payload_path(const fs::path& stem) { return fs::path(stem.string() + ".bin"); }
inline fs::path sidecar_path(const fs::path& stem) { return fs::path(stem.string() + ".json"); }

/// Shells k_min..k_max one after another, each the row-major grid of mask values.
inline void write_masks(const MaskFamily& fam, const fs::path& stem) {
    auto os = detail::open_binary(payload_path(stem));
    for (int k = fam.k_min(); k <= fam.k_max(); ++k) detail::write_doubles(os, fam[k].data(), fam[k].size());
    if (!os) throw IoError("write failed for " + payload_path(stem).string());
    json j = detail::format_json("row-major per shell");
    j["kind"] = "mask_family";
    j["domain"] = to_string(fam.domain);
    j["grid"] = detail::grid_json(fam.grid);
    j["k_min"] = fam.k_min();
    j["k_max"] = fam.k_max();
    j["profile"] = {{"inner_cutoff", fam.decomp.profile.inner_cutoff}, {"outer_cutoff", fam.decomp.profile.outer_cutoff}};
    detail::write_sidecar(sidecar_path(stem), j);
}

inline MaskFamily read_masks(const fs::path& stem) {
    const json j = detail::read_sidecar(sidecar_path(stem), "mask_family");
    const Grid g = detail::grid_from_json(j.at("grid"));
    const int kmin = j.at("k_min").get<int>(), kmax = j.at("k_max").get<int>();
    const std::string domain = j.at("domain").get<std::string>();
    if (domain != "spatial" && domain != "frequency") throw IoError("unknown mask domain '" + domain + "'");
    const json& prof = j.at("profile");
    const DyadicDecomposition d(kmin, kmax, BumpProfile{prof.at("inner_cutoff").get<double>(), prof.at("outer_cutoff").get<double>()});
    MaskFamily fam{domain == "spatial" ? MaskDomain::spatial : MaskDomain::frequency, g, d, {}};
    const auto values = detail::read_doubles(payload_path(stem), g.size() * static_cast<std::size_t>(kmax - kmin + 1));
    for (int k = kmin; k <= kmax; ++k) {
        const auto first = values.begin() + static_cast<std::ptrdiff_t>(g.size() * static_cast<std::size_t>(k - kmin));
        fam.masks.emplace_back(first, first + static_cast<std::ptrdiff_t>(g.size()));
    }
    return fam;
}

/// Complex samples as interleaved (re, im) pairs in row-major order.
inline void write_field(const Field& f, const fs::path& stem) {
    auto os = detail::open_binary(payload_path(stem));
    detail::write_doubles(os, reinterpret_cast<const double*>(f.samples.data()), 2 * f.size());
    json j = detail::format_json("row-major, interleaved re/im");
    j["kind"] = "field";
    j["grid"] = detail::grid_json(f.grid);
    detail::write_sidecar(sidecar_path(stem), j);
}

inline Field read_field(const fs::path& stem) {
    const json j = detail::read_sidecar(sidecar_path(stem), "field");
    const Grid g = detail::grid_from_json(j.at("grid"));
    const auto v = detail::read_doubles(payload_path(stem), 2 * g.size());
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f.samples[i] = cplx(v[2 * i], v[2 * i + 1]);
    return f;
}

/// A sequence of (t, field) slices: the payload holds the slices back to back, the sidecar the times.
inline void write_checkpoint(const SpaceTimeField& u, const fs::path& stem) {
    u.validate();
    if (u.size() == 0) throw IoError("empty checkpoint");
    auto os = detail::open_binary(payload_path(stem));
    for (const auto& s : u.slices) detail::write_doubles(os, reinterpret_cast<const double*>(s.samples.data()), 2 * s.size());
    json j = detail::format_json("slices back to back, each row-major interleaved re/im");
    j["kind"] = "checkpoint";
    j["grid"] = detail::grid_json(u.grid());
    j["times"] = u.times;
    detail::write_sidecar(sidecar_path(stem), j);
}

inline SpaceTimeField read_checkpoint(const fs::path& stem) {
    const json j = detail::read_sidecar(sidecar_path(stem), "checkpoint");
    const Grid g = detail::grid_from_json(j.at("grid"));
    auto times = j.at("times").get<std::vector<double>>();
    const auto v = detail::read_doubles(payload_path(stem), 2 * g.size() * times.size());
    std::vector<Field> slices;
    for (std::size_t s = 0; s < times.size(); ++s) {
        Field f(g);
        const std::size_t base = 2 * g.size() * s;
        for (std::size_t i = 0; i < f.size(); ++i) f.samples[i] = cplx(v[base + 2 * i], v[base + 2 * i + 1]);
        slices.push_back(std::move(f));
    }
    return SpaceTimeField(std::move(times), std::move(slices));
}

} // namespace lpsmooth::io
