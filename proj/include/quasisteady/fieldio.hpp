#ifndef QUASISTEADY_FIELDIO_HPP
#define QUASISTEADY_FIELDIO_HPP

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "quasisteady/halfspace.hpp"

// Field containers serialize two ways:
//  - columnar CSV with header "t,k,y,component,re,im" (k is the flat
//    tangential mode index; y is empty semantics via y = 0 rows for boundary
//    fields);
//  - a compact binary dump: magic "QSFD", one version byte (1), one kind byte
//    (0 = boundary, 1 = interior), then little-endian int32 fields
//    (tangential_dims, K, Nt, Ny, components) and float64 fields (L, T, Y),
//    followed by the complex values (re, im float64 pairs) in canonical
//    (time, mode, height, component) order.

namespace qs {

namespace detail {

inline void write_all(std::ostream& out, const void* p, size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
T read_one(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error("truncated field dump");
    return v;
}

inline void write_grid_header(std::ostream& out, const FieldGrids& g, int components,
                              uint8_t kind) {
    detail::write_all(out, "QSFD", 4);
    const uint8_t version = 1;
    detail::write_all(out, &version, 1);
    detail::write_all(out, &kind, 1);
    const int32_t ints[5] = {g.tangential_dims, g.K, g.Nt, g.Ny, components};
    detail::write_all(out, ints, sizeof ints);
    const double reals[3] = {g.L, g.T, g.Y};
    detail::write_all(out, reals, sizeof reals);
}

inline std::pair<FieldGrids, int> read_grid_header(std::istream& in, uint8_t expected_kind) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "QSFD", 4) != 0) throw Error("not a field dump (bad magic)");
    const auto version = read_one<uint8_t>(in);
    if (version != 1) throw Error("unsupported field dump version " + std::to_string(version));
    const auto kind = read_one<uint8_t>(in);
    if (kind != expected_kind) throw Error("field dump holds the other field kind");
    FieldGrids g;
    g.tangential_dims = read_one<int32_t>(in);
    g.K = read_one<int32_t>(in);
    g.Nt = read_one<int32_t>(in);
    g.Ny = read_one<int32_t>(in);
    const int components = read_one<int32_t>(in);
    g.L = read_one<double>(in);
    g.T = read_one<double>(in);
    g.Y = read_one<double>(in);
    return {g, components};
}

}  // namespace detail

inline void write_binary(std::ostream& out, const BoundaryField& f) {
    detail::write_grid_header(out, f.g, f.components, 0);
    for (int it = 0; it <= f.g.Nt; ++it)
        for (int col = 0; col < f.values.cols(); ++col) {
            const double re = f.values(it, col).real(), im = f.values(it, col).imag();
            detail::write_all(out, &re, 8);
            detail::write_all(out, &im, 8);
        }
}

inline void write_binary(std::ostream& out, const DiscreteField& f) {
    detail::write_grid_header(out, f.g, f.components, 1);
    for (int it = 0; it <= f.g.Nt; ++it)
        for (int mode = 0; mode < f.values[it].rows(); ++mode)
            for (int col = 0; col < f.values[it].cols(); ++col) {
                const double re = f.values[it](mode, col).real();
                const double im = f.values[it](mode, col).imag();
                detail::write_all(out, &re, 8);
                detail::write_all(out, &im, 8);
            }
}

inline BoundaryField read_binary_boundary(std::istream& in) {
    auto [g, comp] = detail::read_grid_header(in, 0);
    BoundaryField f(g, comp);
    for (int it = 0; it <= g.Nt; ++it)
        for (int col = 0; col < f.values.cols(); ++col) {
            const double re = detail::read_one<double>(in);
            const double im = detail::read_one<double>(in);
            f.values(it, col) = Complex(re, im);
        }
    return f;
}

inline DiscreteField read_binary_interior(std::istream& in) {
    auto [g, comp] = detail::read_grid_header(in, 1);
    DiscreteField f(g, comp);
    for (int it = 0; it <= g.Nt; ++it)
        for (int mode = 0; mode < f.values[it].rows(); ++mode)
            for (int col = 0; col < f.values[it].cols(); ++col) {
                const double re = detail::read_one<double>(in);
                const double im = detail::read_one<double>(in);
                f.values[it](mode, col) = Complex(re, im);
            }
    return f;
}

inline void write_csv(std::ostream& out, const BoundaryField& f) {
    out << "t,k,y,component,re,im\n";
    char buf[128];
    for (int it = 0; it <= f.g.Nt; ++it)
        for (int mode = 0; mode < f.g.n_modes(); ++mode)
            for (int c = 0; c < f.components; ++c) {
                const Complex v = f.at(it, mode, c);
                std::snprintf(buf, sizeof buf, "%.17g,%d,0,%d,%.17g,%.17g\n", f.g.t_node(it),
                              mode, c, v.real(), v.imag());
                out << buf;
            }
}

inline void write_csv(std::ostream& out, const DiscreteField& f) {
    out << "t,k,y,component,re,im\n";
    char buf[128];
    for (int it = 0; it <= f.g.Nt; ++it)
        for (int mode = 0; mode < f.g.n_modes(); ++mode)
            for (int iy = 0; iy < f.g.Ny; ++iy)
                for (int c = 0; c < f.components; ++c) {
                    const Complex v = f.at(it, mode, iy, c);
                    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%d,%.17g,%.17g\n",
                                  f.g.t_node(it), mode, f.g.y_node(iy), c, v.real(), v.imag());
                    out << buf;
                }
}

template <typename Field>
void save_binary(const std::string& path, const Field& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_binary(out, f);
}

template <typename Field>
void save_csv(const std::string& path, const Field& f) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_csv(out, f);
}

}  // namespace qs

#endif
