#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>

#include "expmapkit/errors.hpp"
#include "expmapkit/probe.hpp"
#include "expmapkit/ray.hpp"

namespace expmapkit {

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    b[0] = static_cast<char>(v & 0xFF);
    b[1] = static_cast<char>((v >> 8) & 0xFF);
    b[2] = static_cast<char>((v >> 16) & 0xFF);
    b[3] = static_cast<char>((v >> 24) & 0xFF);
    os.write(b, 4);
}

inline void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
    os.write(b, 8);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

inline double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace detail

/// Binary raster: magic "XGRID1", LE u32 w, h, n_max, f64 box bounds and T,
/// then row-major u32 first-passage values (0xFFFFFFFF = not escaped).
inline void write_xgrid(std::ostream& os, const EscapeGrid& g) {
    os.write("XGRID1", 6);
    detail::put_u32(os, static_cast<std::uint32_t>(g.width));
    detail::put_u32(os, static_cast<std::uint32_t>(g.height));
    detail::put_u32(os, static_cast<std::uint32_t>(g.n_max));
    detail::put_f64(os, g.box.re_lo);
    detail::put_f64(os, g.box.re_hi);
    detail::put_f64(os, g.box.im_lo);
    detail::put_f64(os, g.box.im_hi);
    detail::put_f64(os, g.T);
    for (std::uint32_t v : g.cells) detail::put_u32(os, v);
}

inline EscapeGrid read_xgrid(std::istream& is, const Parameter& p) {
    char magic[6];
    is.read(magic, 6);
    if (!is || std::memcmp(magic, "XGRID1", 6) != 0)
        throw InvalidInput("read_xgrid: bad magic");
    std::uint32_t w = detail::get_u32(is);
    std::uint32_t h = detail::get_u32(is);
    std::uint32_t n_max = detail::get_u32(is);
    Box box{};
    box.re_lo = detail::get_f64(is);
    box.re_hi = detail::get_f64(is);
    box.im_lo = detail::get_f64(is);
    box.im_hi = detail::get_f64(is);
    double T = detail::get_f64(is);
    EscapeGrid g{p, box, static_cast<int>(w), static_cast<int>(h),
                 static_cast<int>(n_max), T, {}};
    g.cells.resize(static_cast<std::size_t>(w) * h);
    for (auto& v : g.cells) v = detail::get_u32(is);
    if (!is) throw InvalidInput("read_xgrid: truncated file");
    return g;
}

/// Fixed colormap (not configurable, keeps images byte-stable):
/// non-escaped cells are black, escaped cells cycle through
/// channel = 255 * (0.5 + 0.5 sin(0.16 n + phase)), phases 0, 2.09, 4.18.
struct Rgb {
    unsigned char r, g, b;
};

inline Rgb colormap(std::uint32_t first_passage) {
    if (first_passage == kNotEscaped) return {0, 0, 0};
    double n = static_cast<double>(first_passage);
    auto chan = [n](double phase) {
        return static_cast<unsigned char>(
            std::lround(255.0 * (0.5 + 0.5 * std::sin(0.16 * n + phase))));
    };
    return {chan(0.0), chan(2.09), chan(4.18)};
}

/// PPM P6, maxval 255.
inline void write_ppm(std::ostream& os, const EscapeGrid& g) {
    os << "P6\n" << g.width << " " << g.height << "\n255\n";
    for (std::uint32_t v : g.cells) {
        Rgb c = colormap(v);
        os.put(static_cast<char>(c.r));
        os.put(static_cast<char>(c.g));
        os.put(static_cast<char>(c.b));
    }
}

/// Polyline CSV: header row, one sample per line.
inline void write_polyline_csv(std::ostream& os, const RayPolyline& line) {
    os << "t,re,im,depth,residual\n";
    os.precision(17);
    for (const auto& s : line.samples)
        os << s.t << ',' << s.z.real() << ',' << s.z.imag() << ',' << s.depth
           << ',' << s.residual << '\n';
}

inline void write_file(const std::string& path,
                       const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw Error("write failed: " + path);
}

}  // namespace expmapkit
