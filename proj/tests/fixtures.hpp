#pragma once

// Filesystem and input helpers shared by the I/O-facing tests.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "satvec/bundle.hpp"
#include "satvec/codec.hpp"
#include "satvec/image.hpp"

namespace satvec::testing {

namespace fs = std::filesystem;

class TempDir {
public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "satvec-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

private:
  fs::path path_;
};

inline std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

/// Relative path -> contents for every regular file under `root`.
inline std::map<std::string, std::vector<std::uint8_t>> read_tree(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_bytes(e.path());
  return out;
}

inline RgbImage random_rgb(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h) {
  RgbImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() % 256);
  return img;
}

/// `n` inputs alternating PNG and JPEG with varied sizes.
inline std::vector<BundleInput> mixed_inputs(std::mt19937_64& rng, std::size_t n) {
  std::vector<BundleInput> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = 1 + static_cast<std::uint32_t>(rng() % 48);
    const auto h = 1 + static_cast<std::uint32_t>(rng() % 48);
    const auto img = random_rgb(rng, w, h);
    const bool png = i % 2 == 0;
    out.push_back({"img_" + std::to_string(i) + (png ? ".png" : ".jpg"), png ? encode_png(img) : encode_jpeg(img)});
  }
  return out;
}

inline CullPredicate random_predicate(std::mt19937_64& rng) {
  CullPredicate p;
  if (rng() % 2) p.min_width = static_cast<std::uint32_t>(rng() % 50);
  if (rng() % 2) p.min_height = static_cast<std::uint32_t>(rng() % 50);
  if (rng() % 2) p.min_pixel_count = rng() % 2500;
  if (rng() % 2) p.max_pixel_count = rng() % 2500;
  if (rng() % 2) {
    std::set<ImageFormat> formats;
    for (auto f : {ImageFormat::png, ImageFormat::jpeg, ImageFormat::ppm, ImageFormat::pgm})
      if (rng() % 2) formats.insert(f);
    p.allowed_formats = formats;
  }
  return p;
}

}  // namespace satvec::testing
