#pragma once

// Binary snapshot of a Field.
//
// Layout (little endian, 32-byte header):
//   0  char[4]  magic "ABSQ"
//   4  u32      version (1)
//   8  u32      n1
//   12 u32      n2
//   16 f64      half_width L
//   24 u32      payload kind
//   28 u32      reserved, 0
//   32 f64[n1*n2] samples, row-major with x2 outer

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "absq/grid.hpp"

namespace absq {

enum class PayloadKind : std::uint32_t {
  generic = 0,
  omega = 1,
  theta = 2,
  /// Full temperature Theta = theta + x2 of the unperturbed system.
  full_temperature = 3,
};

inline constexpr std::uint32_t snapshot_version = 1;
inline constexpr std::size_t snapshot_header_bytes = 32;

struct Snapshot {
  Field field;
  PayloadKind kind = PayloadKind::generic;
};

void write_snapshot(std::ostream& os, const Field& f, PayloadKind kind);
void write_snapshot(const std::filesystem::path& path, const Field& f, PayloadKind kind);

/// Reads a snapshot. When `grid` is given its n1/n2/L must match the header;
/// otherwise a grid is built from the header with the default dealias fraction.
/// Throws std::runtime_error on a bad magic, version, size or truncated payload.
Snapshot read_snapshot(std::istream& is, GridPtr grid = nullptr);
Snapshot read_snapshot(const std::filesystem::path& path, GridPtr grid = nullptr);

/// Theta = theta + x2, the affine map back to the unperturbed temperature.
Field full_temperature(const Field& theta);

}  // namespace absq
