#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "facetflow/stepper.hpp"

namespace facetflow::app {

/// Binary snapshot of one time level. Layout, little-endian:
///   char[4] "FCTF", u32 version (1), u32 dim, u32 cells[dim],
///   f64 lengths[dim], f64 tau, u64 k, f64 wall_time, f64 residual,
///   u64 node_count, f64 u[node_count], f64 psi[node_count], f64 rho[node_count]
/// with nodes in grid index order (x fastest).
struct Snapshot {
  std::uint32_t version = 1;
  std::uint32_t dim = 1;
  std::vector<std::uint32_t> cells;
  std::vector<double> lengths;
  double tau = 0.0;
  std::uint64_t k = 0;
  double wall_time = 0.0;
  double residual = 0.0;
  std::vector<double> u;
  std::vector<double> psi;
  std::vector<double> rho;

  bool operator==(const Snapshot&) const = default;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

Snapshot make_snapshot(const Grid& grid, double tau, const StepState& state);

std::vector<unsigned char> encode_snapshot(const Snapshot& s);
/// Throws ValidationError on a bad magic, unknown version or truncated data.
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);

void write_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace facetflow::app
