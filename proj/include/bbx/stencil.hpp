#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bbx/errors.hpp"
#include "bbx/matrix.hpp"
#include "bbx/signal.hpp"

namespace bbx {
namespace detail {

// Fornberg recursion: weights of derivative order m evaluated at z for the
// given nodes. Exact (up to rounding) for any node layout, which covers the
// one-sided windows at signal boundaries.
inline std::vector<double> fd_weights(double z, std::span<const double> nodes, int m) {
  const int n = static_cast<int>(nodes.size()) - 1;
  if (n < m) throw invalid_argument("fd_weights: need more nodes than derivative order");
  std::vector<std::vector<double>> c(nodes.size(), std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    double c5 = c4;
    c4 = nodes[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][m];
  return w;
}

// Stencil layout for one derivative pass. Interior frames get a symmetric
// central window of 2*central_halfwidth+1 nodes; frames too close to an edge
// fall back to a one-sided window of boundary_width nodes.
struct DiffProfile {
  int central_halfwidth;
  int boundary_width;
};

inline Matrix differentiate(const Matrix& in, double fps, int order,
                            const DiffProfile& p) {
  const std::size_t frames = in.rows();
  const std::size_t chans = in.cols();
  const double dt = 1.0 / fps;
  Matrix out(frames, chans);

  const int n = static_cast<int>(frames);
  const int half = p.central_halfwidth;
  const int bw = std::min(p.boundary_width, n);

  std::vector<double> nodes;
  for (int f = 0; f < n; ++f) {
    int lo, w;
    if (f - half >= 0 && f + half < n) {
      lo = f - half;
      w = 2 * half + 1;
    } else {
      w = bw;
      lo = (f < half) ? 0 : n - w;
    }
    nodes.resize(w);
    for (int i = 0; i < w; ++i) nodes[i] = (lo + i - f) * dt;
    const auto wts = fd_weights(0.0, nodes, order);
    for (std::size_t c = 0; c < chans; ++c) {
      double acc = 0.0;
      for (int i = 0; i < w; ++i) acc += wts[i] * in(lo + i, c);
      out(f, c) = acc;
    }
  }
  return out;
}

inline DiffProfile second_order_profile(int order) {
  // First derivative keeps the classic 2-point edges; higher orders need
  // wider one-sided windows just to be consistent with the interior.
  return {(order + 1) / 2, order == 1 ? 2 : order + 2};
}

inline DiffProfile fourth_order_profile(int order) {
  return {(order + 1) / 2 + 1, order + 4};
}

}  // namespace detail

// order-th time derivative, units-per-second^order. Central differences on
// interior frames, one-sided stencils at the boundaries; fps preserved.
inline Signal finite_difference(const Signal& s, int order) {
  s.validate();
  if (order < 1) throw invalid_argument("finite_difference: order must be >= 1");
  const std::size_t min_frames = static_cast<std::size_t>(order) + 2;
  if (s.frames() < min_frames)
    throw invalid_argument("finite_difference: order " + std::to_string(order) +
                           " requires at least " + std::to_string(min_frames) +
                           " frames, got " + std::to_string(s.frames()));
  Signal out = s;
  out.data = detail::differentiate(s.data, s.fps, order,
                                   detail::second_order_profile(order));
  out.modality = Modality::generic;
  if (!s.units.empty())
    out.units = s.units + (order == 1 ? "/s" : "/s^" + std::to_string(order));
  return out;
}

}  // namespace bbx
