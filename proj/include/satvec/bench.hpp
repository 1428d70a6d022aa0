#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "satvec/image.hpp"

namespace satvec {

inline constexpr const char* bench_csv_header = "n_images,image_size,workers,repetition,wall_seconds";

/// Dark noisy background with bright irregular islands; a pure function of
/// (size, seed).
RgbImage synthetic_island_image(std::uint32_t size, std::uint64_t seed);

struct BenchOptions {
  std::vector<std::size_t> counts;
  std::uint32_t image_size = 1024;
  std::vector<std::size_t> worker_counts;
  std::size_t repetitions = 1;
  std::uint64_t seed = 42;
};

struct BenchRow {
  std::size_t n_images = 0;
  std::uint32_t image_size = 0;
  std::size_t workers = 0;
  std::size_t repetition = 0;
  double wall_seconds = 0.0;
};

/// Generates and bundles the imagery for each count, then times run_job
/// (local workers, auto-scaled areas) for every worker count and
/// repetition. Bundle creation time goes to `log`, not into the rows.
std::vector<BenchRow> run_bench(const BenchOptions& opts, std::ostream* log = nullptr);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace satvec
