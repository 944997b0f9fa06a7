#include "koiter/io.hpp"

#include "koiter/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace koiter {

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v)
{
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f64(std::vector<unsigned char>& out, double d)
{
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint32_t get_u32(const unsigned char* p)
{
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
    return v;
}

double get_f64(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return std::bit_cast<double>(v);
}

} // namespace

std::vector<unsigned char> encode_grid_dump(const ScalarField& field, const GridDumpMeta& meta)
{
    std::vector<unsigned char> out;
    out.reserve(kGridDumpHeaderBytes + 8 * field.size());
    for (char c : {'K', 'S', 'H', '1'}) out.push_back(static_cast<unsigned char>(c));
    put_u32(out, kGridDumpVersion);
    put_u32(out, static_cast<std::uint32_t>(field.n1()));
    put_u32(out, static_cast<std::uint32_t>(field.n2()));
    put_f64(out, meta.ly1);
    put_f64(out, meta.ly2);
    put_f64(out, meta.t);
    for (double v : field.values()) put_f64(out, v);
    return out;
}

GridDump decode_grid_dump(const std::vector<unsigned char>& bytes)
{
    if (bytes.size() < kGridDumpHeaderBytes) throw FormatError("grid dump truncated: header incomplete");
    if (std::memcmp(bytes.data(), "KSH1", 4) != 0) throw FormatError("grid dump has bad magic");
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kGridDumpVersion) throw FormatError("unsupported grid dump version " + std::to_string(version));
    const std::size_t n1 = get_u32(bytes.data() + 8);
    const std::size_t n2 = get_u32(bytes.data() + 12);
    if (n1 == 0 || n2 == 0) throw FormatError("grid dump has empty dimensions");
    const std::size_t expect = kGridDumpHeaderBytes + 8 * n1 * n2;
    if (bytes.size() < expect) throw FormatError("grid dump truncated: payload incomplete");
    if (bytes.size() > expect) throw FormatError("grid dump has trailing bytes");

    GridDump d;
    d.meta.ly1 = get_f64(bytes.data() + 16);
    d.meta.ly2 = get_f64(bytes.data() + 24);
    d.meta.t = get_f64(bytes.data() + 32);
    d.field = ScalarField(n1, n2);
    const unsigned char* p = bytes.data() + kGridDumpHeaderBytes;
    for (std::size_t k = 0; k < n1 * n2; ++k) d.field[k] = get_f64(p + 8 * k);
    return d;
}

void write_grid_dump(const ScalarField& field, const GridDumpMeta& meta, const std::filesystem::path& path)
{
    if (!all_finite(field)) throw FormatError("refusing to dump non-finite payload to " + path.string());
    write_file_bytes(path, encode_grid_dump(field, meta));
}

GridDump read_grid_dump(const std::filesystem::path& path) { return decode_grid_dump(read_file_bytes(path)); }

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& text) noexcept
{
    return fnv1a64(reinterpret_cast<const unsigned char*>(text.data()), text.size());
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace koiter
