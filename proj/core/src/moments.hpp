#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace ibprof::detail {

struct PairSample {
  double x;
  double y;
  double w;
};

struct PairMoments {
  double weight = 0.0;
  std::size_t count = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov = 0.0;
  double spread_x = 0.0;  // max - min of x over the samples
  double spread_y = 0.0;
};

// Two-pass weighted moments. The first pass shifts by the first sample, so a
// constant coordinate yields an exact zero variance.
inline PairMoments pair_moments(std::span<const PairSample> s) {
  PairMoments m;
  m.count = s.size();
  if (s.empty()) return m;
  const double rx = s.front().x, ry = s.front().y;
  double sw = 0.0, sx = 0.0, sy = 0.0;
  double lox = rx, hix = rx, loy = ry, hiy = ry;
  for (const auto& p : s) {
    sw += p.w;
    sx += p.w * (p.x - rx);
    sy += p.w * (p.y - ry);
    lox = std::min(lox, p.x);
    hix = std::max(hix, p.x);
    loy = std::min(loy, p.y);
    hiy = std::max(hiy, p.y);
  }
  m.weight = sw;
  m.spread_x = hix - lox;
  m.spread_y = hiy - loy;
  if (sw <= 0.0) return m;
  m.mean_x = rx + sx / sw;
  m.mean_y = ry + sy / sw;
  if (m.spread_x == 0.0) m.mean_x = rx;
  if (m.spread_y == 0.0) m.mean_y = ry;
  double vx = 0.0, vy = 0.0, cxy = 0.0;
  for (const auto& p : s) {
    const double dx = p.x - m.mean_x, dy = p.y - m.mean_y;
    vx += p.w * dx * dx;
    vy += p.w * dy * dy;
    cxy += p.w * dx * dy;
  }
  m.var_x = vx / sw;
  m.var_y = vy / sw;
  m.cov = cxy / sw;
  return m;
}

// Weighted mean with the same shift convention.
inline double shifted_mean(std::span<const double> v, std::span<const double> w = {}) {
  if (v.empty()) return 0.0;
  const double r = v.front();
  double sw = 0.0, s = 0.0;
  bool constant = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    s += wi * (v[i] - r);
    constant &= v[i] == r;
  }
  if (constant || sw <= 0.0) return r;
  return r + s / sw;
}

}  // namespace ibprof::detail
