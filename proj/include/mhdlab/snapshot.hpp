#pragma once

#include "mhdlab/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mhd {

/// Binary field snapshot:
///   "MHDP" | u32 version | u32 n | f64 L | u32 field count |
///   per field: 16-byte NUL-padded ASCII name, n*n f64 row-major.
/// All integers and floats little-endian.
struct Snapshot {
  static constexpr std::uint32_t kVersion = 1;

  Grid grid;
  std::vector<std::pair<std::string, ScalarField>> fields;

  explicit Snapshot(const Grid& g) : grid(g) {}

  void add(const std::string& name, const ScalarField& f);
  const ScalarField& at(const std::string& name) const;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace mhd
