#include "satvec/morph.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "satvec/error.hpp"

namespace satvec {

Connectivity connectivity_from_int(int n) {
  if (n == 4) return Connectivity::four;
  if (n == 8) return Connectivity::eight;
  throw Error(Errc::schema_violation, "connectivity must be 4 or 8, got " + std::to_string(n));
}

BinaryImage::BinaryImage(std::uint32_t width, std::uint32_t height, bool fill)
    : width_(width), height_(height), mask_(std::size_t{width} * height, fill ? 1 : 0) {}

BinaryImage::BinaryImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> mask)
    : width_(width), height_(height), mask_(std::move(mask)) {
  if (mask_.size() != pixel_count()) {
    throw Error(Errc::corrupt_stream, "mask holds " + std::to_string(mask_.size()) + " cells, expected " +
                                          std::to_string(pixel_count()));
  }
  for (auto& v : mask_) v = v ? 1 : 0;
}

std::size_t BinaryImage::count() const noexcept {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

bool BinaryImage::is_subset_of(const BinaryImage& other) const {
  if (width_ != other.width_ || height_ != other.height_) return false;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i] && !other.mask_[i]) return false;
  }
  return true;
}

BinaryImage BinaryImage::complement() const {
  BinaryImage out = *this;
  for (auto& v : out.mask_) v ^= 1;
  return out;
}

// ---------------------------------------------------------------------------

StructuringElement::StructuringElement(std::uint32_t size, std::vector<std::uint8_t> mask)
    : size_(size), mask_(std::move(mask)) {
  if (size_ == 0 || size_ % 2 == 0) {
    throw Error(Errc::schema_violation, "structuring element size must be odd, got " + std::to_string(size_));
  }
  if (mask_.size() != std::size_t{size_} * size_) {
    throw Error(Errc::schema_violation, "structuring element mask has wrong size");
  }
  if (std::none_of(mask_.begin(), mask_.end(), [](std::uint8_t v) { return v != 0; })) {
    throw Error(Errc::schema_violation, "structuring element mask is empty");
  }
}

StructuringElement StructuringElement::square(std::uint32_t size) {
  return StructuringElement(size, std::vector<std::uint8_t>(std::size_t{size} * size, 1));
}

StructuringElement StructuringElement::cross(std::uint32_t size) {
  std::vector<std::uint8_t> mask(std::size_t{size} * size, 0);
  const std::uint32_t c = size / 2;
  for (std::uint32_t i = 0; i < size; ++i) {
    mask[std::size_t{c} * size + i] = 1;
    mask[std::size_t{i} * size + c] = 1;
  }
  return StructuringElement(size, std::move(mask));
}

// ---------------------------------------------------------------------------

ThresholdLevel otsu_threshold(const GrayImage& img) {
  using boost::multiprecision::int256_t;

  std::array<std::uint64_t, 256> hist{};
  for (auto v : img.data()) ++hist[v];

  const auto occupied = std::count_if(hist.begin(), hist.end(), [](std::uint64_t h) { return h != 0; });
  if (occupied <= 1) {
    const auto it = std::find_if(hist.begin(), hist.end(), [](std::uint64_t h) { return h != 0; });
    return {static_cast<std::uint8_t>(it == hist.end() ? 0 : it - hist.begin())};
  }

  std::uint64_t total = 0;
  std::uint64_t total_sum = 0;
  for (std::size_t i = 0; i < 256; ++i) {
    total += hist[i];
    total_sum += i * hist[i];
  }

  // Between-class variance for split {<=t} / {>t} is
  //   (S0*N - S*w0)^2 / (w0 * w1 * N^2).
  // N^2 is common to every t, so scores compare as exact fractions.
  int256_t best_num = 0;
  int256_t best_den = 1;
  std::uint8_t best_t = 0;
  std::uint64_t w0 = 0;
  std::uint64_t s0 = 0;
  for (std::size_t t = 0; t < 256; ++t) {
    w0 += hist[t];
    s0 += t * hist[t];
    const std::uint64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const int256_t diff = int256_t(s0) * total - int256_t(total_sum) * w0;
    const int256_t num = diff * diff;
    const int256_t den = int256_t(w0) * w1;
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_t = static_cast<std::uint8_t>(t);
    }
  }
  return {best_t};
}

BinaryImage binarize(const GrayImage& img, ThresholdLevel t) {
  std::vector<std::uint8_t> mask(img.pixel_count());
  auto src = img.data();
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = src[i] > t.level ? 1 : 0;
  return BinaryImage(img.width(), img.height(), std::move(mask));
}

// ---------------------------------------------------------------------------

namespace {

class DisjointSets {
public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }

  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

LabelMap label_components(const BinaryImage& bw, Connectivity conn) {
  const std::uint32_t w = bw.width();
  const std::uint32_t h = bw.height();
  LabelMap out{w, h, std::vector<std::uint32_t>(bw.pixel_count(), 0), {}};
  if (bw.pixel_count() == 0) return out;

  constexpr std::uint32_t none = 0xFFFFFFFFu;
  std::vector<std::uint32_t> provisional(bw.pixel_count(), none);
  DisjointSets sets;
  auto mask = bw.data();
  const bool eight = conn == Connectivity::eight;

  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t i = std::size_t{y} * w + x;
      if (!mask[i]) continue;
      std::uint32_t current = none;
      auto join = [&](std::size_t j) {
        if (provisional[j] == none) return;
        if (current == none) current = provisional[j];
        else sets.unite(current, provisional[j]);
      };
      if (x > 0) join(i - 1);
      if (y > 0) {
        join(i - w);
        if (eight && x > 0) join(i - w - 1);
        if (eight && x + 1 < w) join(i - w + 1);
      }
      provisional[i] = current == none ? sets.make() : current;
    }
  }

  std::vector<std::uint32_t> dense;
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i] == none) continue;
    const std::uint32_t root = sets.find(provisional[i]);
    if (root >= dense.size()) dense.resize(root + 1, 0);
    if (dense[root] == 0) {
      out.component_sizes.push_back(0);
      dense[root] = static_cast<std::uint32_t>(out.component_sizes.size());
    }
    out.labels[i] = dense[root];
    ++out.component_sizes[dense[root] - 1];
  }
  return out;
}

BinaryImage area_open(const BinaryImage& bw, std::size_t min_area, Connectivity conn) {
  if (min_area == 0) return bw;
  const LabelMap labels = label_components(bw, conn);
  std::vector<std::uint8_t> mask(bw.pixel_count(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto id = labels.labels[i];
    mask[i] = (id != 0 && labels.component_sizes[id - 1] >= min_area) ? 1 : 0;
  }
  return BinaryImage(bw.width(), bw.height(), std::move(mask));
}

// ---------------------------------------------------------------------------

namespace {

struct Offset {
  std::int64_t dx;
  std::int64_t dy;
};

std::vector<Offset> offsets_of(const StructuringElement& se) {
  std::vector<Offset> out;
  const std::int64_t r = se.radius();
  for (std::uint32_t row = 0; row < se.size(); ++row) {
    for (std::uint32_t col = 0; col < se.size(); ++col) {
      if (se.at(col, row)) out.push_back({std::int64_t{col} - r, std::int64_t{row} - r});
    }
  }
  return out;
}

// Combines `acc[p]` with `src[p + d]` for every pixel, reading out-of-bounds
// source pixels as background.
template <typename Combine>
void apply_shifted(std::vector<std::uint8_t>& acc, std::span<const std::uint8_t> src, std::int64_t w,
                   std::int64_t h, Offset d, Combine combine) {
  for (std::int64_t y = 0; y < h; ++y) {
    const std::int64_t sy = y + d.dy;
    std::uint8_t* row = acc.data() + y * w;
    if (sy < 0 || sy >= h) {
      for (std::int64_t x = 0; x < w; ++x) row[x] = combine(row[x], 0);
      continue;
    }
    const std::uint8_t* srow = src.data() + sy * w;
    const std::int64_t x_lo = std::max<std::int64_t>(0, -d.dx);
    const std::int64_t x_hi = std::min<std::int64_t>(w, w - d.dx);
    for (std::int64_t x = 0; x < std::min(x_lo, w); ++x) row[x] = combine(row[x], 0);
    for (std::int64_t x = x_lo; x < x_hi; ++x) row[x] = combine(row[x], srow[x + d.dx]);
    for (std::int64_t x = std::max<std::int64_t>(x_hi, 0); x < w; ++x) row[x] = combine(row[x], 0);
  }
}

}  // namespace

BinaryImage dilate(const BinaryImage& bw, const StructuringElement& se) {
  std::vector<std::uint8_t> acc(bw.pixel_count(), 0);
  for (const auto& d : offsets_of(se)) {
    apply_shifted(acc, bw.data(), bw.width(), bw.height(), d,
                  [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a | b; });
  }
  return BinaryImage(bw.width(), bw.height(), std::move(acc));
}

BinaryImage erode(const BinaryImage& bw, const StructuringElement& se) {
  std::vector<std::uint8_t> acc(bw.pixel_count(), 1);
  for (const auto& d : offsets_of(se)) {
    apply_shifted(acc, bw.data(), bw.width(), bw.height(), d,
                  [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a & b; });
  }
  return BinaryImage(bw.width(), bw.height(), std::move(acc));
}

BinaryImage morph_close(const BinaryImage& bw, const StructuringElement& se) {
  return erode(dilate(bw, se), se);
}

BinaryImage morph_open(const BinaryImage& bw, const StructuringElement& se) {
  return dilate(erode(bw, se), se);
}

// ---------------------------------------------------------------------------

BinaryImage fill_holes(const BinaryImage& bw) {
  if (bw.pixel_count() == 0) return bw;
  const std::size_t w = bw.width();
  const std::size_t h = bw.height();
  auto mask = bw.data();
  std::vector<std::uint8_t> reached(bw.pixel_count(), 0);
  std::vector<std::size_t> stack;

  auto seed = [&](std::size_t i) {
    if (!mask[i] && !reached[i]) {
      reached[i] = 1;
      stack.push_back(i);
    }
  };
  for (std::size_t x = 0; x < w; ++x) {
    seed(x);
    seed((h - 1) * w + x);
  }
  for (std::size_t y = 0; y < h; ++y) {
    seed(y * w);
    seed(y * w + w - 1);
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const std::size_t x = i % w;
    const std::size_t y = i / w;
    if (x > 0) seed(i - 1);
    if (x + 1 < w) seed(i + 1);
    if (y > 0) seed(i - w);
    if (y + 1 < h) seed(i + w);
  }

  std::vector<std::uint8_t> out(bw.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = reached[i] ? 0 : 1;
  return BinaryImage(bw.width(), bw.height(), std::move(out));
}

}  // namespace satvec
