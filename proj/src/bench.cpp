#include "satvec/bench.hpp"

#include <stdlib.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "satvec/bundle.hpp"
#include "satvec/codec.hpp"
#include "satvec/engine.hpp"
#include "satvec/error.hpp"

namespace satvec {

namespace {

// std:: distributions are implementation-defined; raw engine output keeps
// the imagery identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct Disc {
  std::int64_t cx, cy, r;
  bool bright;
};

void paint_disc(GrayImage& img, const Disc& d, Rng& rng) {
  const std::int64_t w = img.width();
  const std::int64_t h = img.height();
  for (std::int64_t y = std::max<std::int64_t>(0, d.cy - d.r); y <= std::min(h - 1, d.cy + d.r); ++y) {
    for (std::int64_t x = std::max<std::int64_t>(0, d.cx - d.r); x <= std::min(w - 1, d.cx + d.r); ++x) {
      const std::int64_t dx = x - d.cx;
      const std::int64_t dy = y - d.cy;
      if (dx * dx + dy * dy > d.r * d.r) continue;
      auto& px = img.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
      px = static_cast<std::uint8_t>(d.bright ? rng.uniform(170, 240) : rng.uniform(5, 45));
    }
  }
}

}  // namespace

RgbImage synthetic_island_image(std::uint32_t size, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage gray(size, size);
  for (auto& v : gray.data()) v = static_cast<std::uint8_t>(rng.uniform(5, 55));

  const std::int64_t s = size;
  const std::int64_t min_r = std::max<std::int64_t>(2, s / 24);
  const std::int64_t max_r = std::max<std::int64_t>(min_r, s / 9);

  // Islands: clusters of overlapping bright discs, some with a dark lake.
  const auto islands = rng.uniform(3, 8);
  for (std::int64_t i = 0; i < islands; ++i) {
    const std::int64_t cx = rng.uniform(0, s - 1);
    const std::int64_t cy = rng.uniform(0, s - 1);
    const std::int64_t r = rng.uniform(min_r, max_r);
    const auto lobes = rng.uniform(1, 4);
    for (std::int64_t k = 0; k < lobes; ++k) {
      const std::int64_t off = r / 2 + 1;
      paint_disc(gray, {cx + rng.uniform(-off, off), cy + rng.uniform(-off, off), r * rng.uniform(6, 10) / 10, true},
                 rng);
    }
    if (rng.uniform(0, 2) == 0) paint_disc(gray, {cx, cy, std::max<std::int64_t>(1, r / 4), false}, rng);
  }
  // Specks well below any area threshold.
  const auto specks = rng.uniform(10, 40);
  for (std::int64_t i = 0; i < specks; ++i) {
    paint_disc(gray, {rng.uniform(0, s - 1), rng.uniform(0, s - 1), rng.uniform(0, 2), true}, rng);
  }

  // Slight per-channel tint so the luma conversion is exercised.
  RgbImage rgb(size, size);
  auto src = gray.data();
  auto dst = rgb.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[3 * i] = static_cast<std::uint8_t>(src[i] * 9 / 10);
    dst[3 * i + 1] = src[i];
    dst[3 * i + 2] = static_cast<std::uint8_t>(std::min(255, src[i] + 10));
  }
  return rgb;
}

namespace {

class TempDir {
public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "satvec-bench-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) throw Error(Errc::io, "mkdtemp failed");
    path_ = pattern;
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& opts, std::ostream* log) {
  std::vector<BenchRow> rows;
  TempDir scratch;
  for (const std::size_t n : opts.counts) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<BundleInput> inputs;
    inputs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto img = synthetic_island_image(opts.image_size, mix_seed(opts.seed, i));
      inputs.push_back({"synthetic_" + std::to_string(i) + ".png", encode_png(img)});
    }
    const auto bundle_bytes = bundle_create(inputs);
    const auto bundle_path = scratch.path() / ("bench_" + std::to_string(n) + ".svb");
    {
      std::ofstream out(bundle_path, std::ios::binary);
      out.write(reinterpret_cast<const char*>(bundle_bytes.data()), static_cast<std::streamsize>(bundle_bytes.size()));
      if (!out) throw Error(Errc::io, bundle_path.string() + ": write failed");
    }
    if (log) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      *log << "bundle n=" << n << " size=" << opts.image_size << " created in " << secs << " s\n";
    }

    for (const std::size_t workers : opts.worker_counts) {
      for (std::size_t rep = 0; rep < opts.repetitions; ++rep) {
        JobSpec spec;
        spec.bundle_path = bundle_path;
        spec.output_dir = scratch.path() / "out";
        spec.workers = workers;
        spec.auto_scale_areas = true;
        std::filesystem::remove_all(spec.output_dir);
        const JobReport report = run_job(spec);
        rows.push_back({n, opts.image_size, workers, rep, report.total_wall_seconds});
        if (log) {
          *log << "n=" << n << " workers=" << workers << " rep=" << rep << " wall=" << report.total_wall_seconds
               << " s\n";
        }
      }
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = std::string(bench_csv_header) + "\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%u,%zu,%zu,%.6f\n", r.n_images, r.image_size, r.workers, r.repetition,
                  r.wall_seconds);
    out += buf;
  }
  return out;
}

}  // namespace satvec
