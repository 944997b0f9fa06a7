#pragma once

// Binary grid dumps and small file helpers.
//
// GridDump layout, all little-endian regardless of host:
//   offset  size  field
//        0     4  magic "KSH1"
//        4     4  version (u32, currently 1)
//        8     4  n1 (u32)
//       12     4  n2 (u32)
//       16     8  ly1 (f64)
//       24     8  ly2 (f64)
//       32     8  t (f64)
//       40  8*n1*n2 payload (f64), row-major, y2 index fastest

#include "koiter/field.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace koiter {

inline constexpr std::uint32_t kGridDumpVersion = 1;
inline constexpr std::size_t kGridDumpHeaderBytes = 40;

struct GridDumpMeta {
    double ly1 = 0.0;
    double ly2 = 0.0;
    double t = 0.0;
};

struct GridDump {
    GridDumpMeta meta;
    ScalarField field;
};

std::vector<unsigned char> encode_grid_dump(const ScalarField& field, const GridDumpMeta& meta);
/// Throws FormatError on bad magic, version, or size.
GridDump decode_grid_dump(const std::vector<unsigned char>& bytes);

/// Throws IoError if the file cannot be written, FormatError for non-finite payload.
void write_grid_dump(const ScalarField& field, const GridDumpMeta& meta, const std::filesystem::path& path);
/// Throws IoError if unreadable, FormatError if malformed or truncated.
GridDump read_grid_dump(const std::filesystem::path& path);

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);

/// 64-bit FNV-1a content hash.
std::uint64_t fnv1a64(const unsigned char* data, std::size_t size) noexcept;
std::uint64_t fnv1a64(const std::string& text) noexcept;
std::string hex64(std::uint64_t v);

} // namespace koiter
