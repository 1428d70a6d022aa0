#pragma once

// Test-only oracles and generators. Nothing here calls into the library's
// algorithms; the oracles recompute every property from definitions.

#include <cstdint>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "satvec/image.hpp"
#include "satvec/morph.hpp"

namespace satvec::testing {

// --- generators -------------------------------------------------------------

inline GrayImage random_gray(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h) {
  GrayImage img(w, h);
  // Mix of full-range noise and a few narrow bands so some histograms have
  // gaps and plateaus.
  const int mode = static_cast<int>(rng() % 3);
  const int lo = static_cast<int>(rng() % 200);
  const int span = 1 + static_cast<int>(rng() % 56);
  for (auto& v : img.data()) {
    if (mode == 0) v = static_cast<std::uint8_t>(rng() % 256);
    else if (mode == 1) v = static_cast<std::uint8_t>(lo + rng() % span);
    else v = static_cast<std::uint8_t>((rng() % 2) ? 20 + rng() % 30 : 180 + rng() % 60);
  }
  return img;
}

inline BinaryImage random_mask(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BinaryImage m(w, h);
  for (std::uint32_t y = 0; y < h; ++y)
    for (std::uint32_t x = 0; x < w; ++x) m.set(x, y, u(rng) < density);
  return m;
}

/// Union of random rectangles and discs; more map-like than white noise.
inline BinaryImage random_blobs(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h, int shapes) {
  BinaryImage m(w, h);
  for (int s = 0; s < shapes; ++s) {
    const int cx = static_cast<int>(rng() % w);
    const int cy = static_cast<int>(rng() % h);
    const int r = 1 + static_cast<int>(rng() % (std::max<std::uint32_t>(2, w / 6)));
    const bool disc = rng() % 2;
    for (int y = cy - r; y <= cy + r; ++y)
      for (int x = cx - r; x <= cx + r; ++x) {
        if (x < 0 || y < 0 || x >= static_cast<int>(w) || y >= static_cast<int>(h)) continue;
        if (disc && (x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
        m.set(x, y, true);
      }
  }
  return m;
}

inline BinaryImage clear_frame(BinaryImage m, std::uint32_t width = 1) {
  for (std::uint32_t y = 0; y < m.height(); ++y)
    for (std::uint32_t x = 0; x < m.width(); ++x)
      if (x < width || y < width || x + width >= m.width() || y + width >= m.height()) m.set(x, y, false);
  return m;
}

// --- oracles ----------------------------------------------------------------

/// Exhaustive between-class variance scan computed from the pixel list
/// (not a histogram). Score for split t is (n1*S0 - n0*S1)^2 / (n0*n1),
/// compared as exact fractions.
inline std::uint8_t brute_force_otsu(const GrayImage& img) {
  auto px = img.data();
  bool constant = true;
  for (auto v : px) constant = constant && v == px[0];
  if (constant) return px[0];

  unsigned __int128 best_num = 0;
  unsigned __int128 best_den = 1;
  int best_t = 0;
  for (int t = 0; t < 256; ++t) {
    __int128 n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (auto v : px) {
      if (v <= t) {
        ++n0;
        s0 += v;
      } else {
        ++n1;
        s1 += v;
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    __int128 d = n1 * s0 - n0 * s1;
    const auto num = static_cast<unsigned __int128>(d * d);
    const auto den = static_cast<unsigned __int128>(n0 * n1);
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_t = t;
    }
  }
  return static_cast<std::uint8_t>(best_t);
}

struct Pixel {
  int x, y;
  auto operator<=>(const Pixel&) const = default;
};

/// BFS flood fill; components in row-major order of their first pixel.
inline std::vector<std::vector<Pixel>> bfs_components(const BinaryImage& m, int connectivity) {
  const int w = static_cast<int>(m.width());
  const int h = static_cast<int>(m.height());
  std::vector<std::vector<bool>> seen(h, std::vector<bool>(w, false));
  std::vector<std::vector<Pixel>> comps;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!m.get(x, y) || seen[y][x]) continue;
      std::vector<Pixel> comp;
      std::queue<Pixel> q;
      q.push({x, y});
      seen[y][x] = true;
      while (!q.empty()) {
        const Pixel p = q.front();
        q.pop();
        comp.push_back(p);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            const int nx = p.x + dx, ny = p.y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (!m.get(nx, ny) || seen[ny][nx]) continue;
            seen[ny][nx] = true;
            q.push({nx, ny});
          }
      }
      comps.push_back(std::move(comp));
    }
  return comps;
}

inline BinaryImage oracle_area_open(const BinaryImage& m, std::size_t min_area, int connectivity) {
  BinaryImage out(m.width(), m.height());
  for (const auto& comp : bfs_components(m, connectivity)) {
    if (comp.size() < min_area) continue;
    for (auto p : comp) out.set(p.x, p.y, true);
  }
  return out;
}

/// Dilation as a union of translates: each foreground pixel q stamps the
/// positions p whose structuring element placement covers q.
inline BinaryImage oracle_dilate(const BinaryImage& m, const StructuringElement& se) {
  BinaryImage out(m.width(), m.height());
  const int r = se.radius();
  for (int qy = 0; qy < static_cast<int>(m.height()); ++qy)
    for (int qx = 0; qx < static_cast<int>(m.width()); ++qx) {
      if (!m.get(qx, qy)) continue;
      for (int row = 0; row < static_cast<int>(se.size()); ++row)
        for (int col = 0; col < static_cast<int>(se.size()); ++col) {
          if (!se.at(col, row)) continue;
          const int px = qx - (col - r), py = qy - (row - r);
          if (px < 0 || py < 0 || px >= static_cast<int>(m.width()) || py >= static_cast<int>(m.height())) continue;
          out.set(px, py, true);
        }
    }
  return out;
}

inline BinaryImage oracle_erode(const BinaryImage& m, const StructuringElement& se) {
  BinaryImage out(m.width(), m.height());
  const int r = se.radius();
  for (int py = 0; py < static_cast<int>(m.height()); ++py)
    for (int px = 0; px < static_cast<int>(m.width()); ++px) {
      bool all = true;
      for (int row = 0; row < static_cast<int>(se.size()) && all; ++row)
        for (int col = 0; col < static_cast<int>(se.size()) && all; ++col) {
          if (!se.at(col, row)) continue;
          all = m.get_or_background(px + col - r, py + row - r);
        }
      out.set(px, py, all);
    }
  return out;
}

/// Floods background from the border (4-connected); whatever it cannot
/// reach becomes foreground.
inline BinaryImage oracle_fill_holes(const BinaryImage& m) {
  const int w = static_cast<int>(m.width());
  const int h = static_cast<int>(m.height());
  std::vector<std::vector<bool>> outside(h, std::vector<bool>(w, false));
  std::queue<Pixel> q;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if ((x == 0 || y == 0 || x == w - 1 || y == h - 1) && !m.get(x, y)) {
        outside[y][x] = true;
        q.push({x, y});
      }
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  while (!q.empty()) {
    const Pixel p = q.front();
    q.pop();
    for (int k = 0; k < 4; ++k) {
      const int nx = p.x + dx[k], ny = p.y + dy[k];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h || outside[ny][nx] || m.get(nx, ny)) continue;
      outside[ny][nx] = true;
      q.push({nx, ny});
    }
  }
  BinaryImage out(m.width(), m.height());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, !outside[y][x]);
  return out;
}

/// Pixels of `comp` having a 4-neighbour that is background or outside.
inline std::set<Pixel> boundary_pixels(const BinaryImage& m, const std::vector<Pixel>& comp) {
  std::set<Pixel> out;
  for (auto p : comp) {
    if (!m.get_or_background(p.x + 1, p.y) || !m.get_or_background(p.x - 1, p.y) ||
        !m.get_or_background(p.x, p.y + 1) || !m.get_or_background(p.x, p.y - 1)) {
      out.insert(p);
    }
  }
  return out;
}

/// Every background pixel reachable from the border through background.
inline bool background_border_connected(const BinaryImage& m) {
  return oracle_fill_holes(m) == m;
}

inline BinaryImage mask_from_rows(std::initializer_list<const char*> rows) {
  const auto h = static_cast<std::uint32_t>(rows.size());
  const auto w = static_cast<std::uint32_t>(std::char_traits<char>::length(*rows.begin()));
  BinaryImage m(w, h);
  std::uint32_t y = 0;
  for (const char* row : rows) {
    for (std::uint32_t x = 0; x < w; ++x) m.set(x, y, row[x] == '#');
    ++y;
  }
  return m;
}

}  // namespace satvec::testing
