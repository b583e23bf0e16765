// Copyright 2026 The Kandinsky Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "kandinsky/errors.hpp"
#include "kandinsky/model.hpp"

namespace kandinsky::gestalt {

// All thresholds are relative to the configuration's own scale (fitted
// radius, spatial extent, or mean object size), never absolute.
struct GestaltConfig {
  double circular_residual_tol = 0.08;  // RMS radial residual / radius
  double symmetry_match_tol = 0.05;     // center mismatch / extent
  int symmetry_axis_steps = 36;
  double cluster_eps_factor = 1.5;      // linkage eps = factor * mean size
};

inline void CheckConfig(const GestaltConfig& cfg) {
  if (!(cfg.circular_residual_tol > 0) || !(cfg.symmetry_match_tol > 0) ||
      !(cfg.cluster_eps_factor > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "gestalt tolerances must be > 0");
  }
  if (cfg.symmetry_axis_steps < 4) {
    throw Error(ErrorCode::kInvalidArgument, "gestalt symmetry_axis_steps must be >= 4");
  }
}

namespace internal {

// Detectors work on a canonically sorted copy so that the floating-point
// summation order, and hence every boolean, is independent of input order.
inline std::vector<ObjectSpec> Canonical(std::span<const ObjectSpec> objs) {
  std::vector<ObjectSpec> sorted(objs.begin(), objs.end());
  std::sort(sorted.begin(), sorted.end(), [](const ObjectSpec& a, const ObjectSpec& b) {
    return std::tie(a.x, a.y, a.size, a.shape, a.color) <
           std::tie(b.x, b.y, b.size, b.shape, b.color);
  });
  return sorted;
}

inline double MeanSize(std::span<const ObjectSpec> objs) {
  if (objs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& o : objs) total += o.size;
  return total / static_cast<double>(objs.size());
}

inline bool SameLook(const ObjectSpec& a, const ObjectSpec& b) {
  return a.shape == b.shape && a.color == b.color;
}

}  // namespace internal

struct CircleFit {
  bool degenerate = false;
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  double rms_residual = 0.0;
  std::string diagnostic;
};

// Algebraic (Kasa) least-squares circle through the object centers, solved in
// centroid-shifted coordinates. Degenerate when the RMS distance of the
// centers from their best-fit line is at most 1e-9.
inline CircleFit FitCircle(std::span<const ObjectSpec> input) {
  CircleFit fit;
  const auto objs = internal::Canonical(input);
  const double n = static_cast<double>(objs.size());
  if (objs.size() < 3) {
    fit.degenerate = true;
    fit.diagnostic = "fewer than 3 centers";
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (const auto& o : objs) {
    mx += o.x;
    my += o.y;
  }
  mx /= n;
  my /= n;
  double suu = 0, svv = 0, suv = 0, suuu = 0, svvv = 0, suvv = 0, svuu = 0;
  for (const auto& o : objs) {
    const double u = o.x - mx, v = o.y - my;
    suu += u * u;
    svv += v * v;
    suv += u * v;
    suuu += u * u * u;
    svvv += v * v * v;
    suvv += u * v * v;
    svuu += v * u * u;
  }
  // Smallest eigenvalue of the 2x2 covariance = mean squared distance from
  // the principal line.
  const double a = suu / n, b = suv / n, c = svv / n;
  const double lambda_min = (a + c) / 2.0 - std::sqrt(((a - c) / 2.0) * ((a - c) / 2.0) + b * b);
  if (std::sqrt(std::max(lambda_min, 0.0)) <= 1e-9) {
    fit.degenerate = true;
    fit.diagnostic = "centers are collinear; circle fit is singular";
    return fit;
  }
  const double det = suu * svv - suv * suv;
  const double rhs_u = 0.5 * (suuu + suvv);
  const double rhs_v = 0.5 * (svvv + svuu);
  const double uc = (rhs_u * svv - rhs_v * suv) / det;
  const double vc = (suu * rhs_v - suv * rhs_u) / det;
  fit.cx = uc + mx;
  fit.cy = vc + my;
  fit.radius = std::sqrt(uc * uc + vc * vc + (suu + svv) / n);
  double sq = 0.0;
  for (const auto& o : objs) {
    const double d = std::hypot(o.x - fit.cx, o.y - fit.cy) - fit.radius;
    sq += d * d;
  }
  fit.rms_residual = std::sqrt(sq / n);
  return fit;
}

struct CircularResult {
  bool circular = false;
  CircleFit fit;
};

inline CircularResult IsCircularArrangement(std::span<const ObjectSpec> objs,
                                            const GestaltConfig& cfg = {}) {
  CircularResult result;
  result.fit = FitCircle(objs);
  if (result.fit.degenerate) return result;
  result.circular = result.fit.rms_residual <= cfg.circular_residual_tol * result.fit.radius &&
                    result.fit.radius > internal::MeanSize(objs);
  return result;
}

struct SymmetryResult {
  bool symmetric = false;
  // Direction of the mirror line through the centroid, radians in [0, pi).
  // 0 is a horizontal line, pi/2 a vertical one.
  double axis_angle = 0.0;
  double max_error = 0.0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
};

namespace internal {

// Kuhn's augmenting-path bipartite matching over an adjacency matrix.
inline bool PerfectMatching(const std::vector<std::vector<char>>& adj,
                            std::vector<int>& match_of_right) {
  const std::size_t n = adj.size();
  match_of_right.assign(n, -1);
  std::vector<char> seen;
  std::function<bool(std::size_t)> augment = [&](std::size_t left) {
    for (std::size_t right = 0; right < n; ++right) {
      if (!adj[left][right] || seen[right]) continue;
      seen[right] = 1;
      if (match_of_right[right] < 0 ||
          augment(static_cast<std::size_t>(match_of_right[right]))) {
        match_of_right[right] = static_cast<int>(left);
        return true;
      }
    }
    return false;
  };
  for (std::size_t left = 0; left < n; ++left) {
    seen.assign(n, 0);
    if (!augment(left)) return false;
  }
  return true;
}

}  // namespace internal

// Reflection symmetry about some line through the centroid of the centers.
// Candidate axes are the regular sweep of `symmetry_axis_steps` directions,
// plus every axis implied exactly by a same-looking pair (perpendicular
// bisector direction) or by a single off-centroid object. Axes that fix
// every object do not count.
inline SymmetryResult IsSymmetric(std::span<const ObjectSpec> input,
                                  const GestaltConfig& cfg = {}) {
  SymmetryResult result;
  const auto objs = internal::Canonical(input);
  const std::size_t n = objs.size();
  if (n < 2) return result;
  double cx = 0.0, cy = 0.0;
  for (const auto& o : objs) {
    cx += o.x;
    cy += o.y;
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  result.centroid_x = cx;
  result.centroid_y = cy;
  double extent = 0.0;
  for (const auto& o : objs) extent = std::max(extent, std::hypot(o.x - cx, o.y - cy));
  const double tol = cfg.symmetry_match_tol * std::max(extent, 1e-12);

  auto normalize = [](double angle) {
    angle = std::fmod(angle, std::numbers::pi);
    if (angle < 0) angle += std::numbers::pi;
    return angle;
  };
  std::vector<double> axes;
  for (int k = 0; k < cfg.symmetry_axis_steps; ++k) {
    axes.push_back(std::numbers::pi * k / cfg.symmetry_axis_steps);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = objs[i].x - cx, dy = objs[i].y - cy;
    if (std::hypot(dx, dy) > tol) axes.push_back(normalize(std::atan2(dy, dx)));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!internal::SameLook(objs[i], objs[j])) continue;
      const double ex = objs[j].x - objs[i].x, ey = objs[j].y - objs[i].y;
      axes.push_back(normalize(std::atan2(ey, ex) + std::numbers::pi / 2));
    }
  }

  bool found = false;
  double best_error = 0.0;
  std::size_t best_fixed = 0;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  std::vector<int> match;
  for (double theta : axes) {
    const double c2 = std::cos(2 * theta), s2 = std::sin(2 * theta);
    std::vector<std::pair<double, double>> mirrored(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = objs[i].x - cx, dy = objs[i].y - cy;
      mirrored[i] = {cx + c2 * dx + s2 * dy, cy + s2 * dx - c2 * dy};
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        adj[i][j] = internal::SameLook(objs[i], objs[j]) &&
                    std::hypot(mirrored[i].first - objs[j].x,
                               mirrored[i].second - objs[j].y) <= tol;
      }
    }
    if (!internal::PerfectMatching(adj, match)) continue;
    double error = 0.0;
    std::size_t fixed = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto i = static_cast<std::size_t>(match[j]);
      error = std::max(error, std::hypot(mirrored[i].first - objs[j].x,
                                         mirrored[i].second - objs[j].y));
      if (i == j) ++fixed;
    }
    // An axis fixing every object (all centers on the line) is trivial.
    if (fixed == n) continue;
    // Prefer the axis mapping fewer objects onto themselves, then the
    // smaller residual.
    if (!found || fixed < best_fixed || (fixed == best_fixed && error < best_error)) {
      found = true;
      best_fixed = fixed;
      best_error = error;
      result.axis_angle = theta;
    }
  }
  result.symmetric = found;
  result.max_error = found ? best_error : 0.0;
  return result;
}

// Single-linkage clustering: two objects are linked when their centers are at
// most eps = cluster_eps_factor * mean size apart. Clusters are listed by
// their smallest member index, members ascending.
inline std::vector<std::vector<std::size_t>> ClusterByProximity(
    std::span<const ObjectSpec> objs, const GestaltConfig& cfg = {}) {
  const std::size_t n = objs.size();
  const double eps = cfg.cluster_eps_factor * internal::MeanSize(objs);
  // Flood fill over the eps graph.
  std::vector<char> visited(n, 0);
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    std::vector<std::size_t> members;
    std::vector<std::size_t> frontier = {start};
    visited[start] = 1;
    while (!frontier.empty()) {
      const std::size_t i = frontier.back();
      frontier.pop_back();
      members.push_back(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (!visited[j] && ObjectDistance(objs[i], objs[j]) <= eps) {
          visited[j] = 1;
          frontier.push_back(j);
        }
      }
    }
    std::sort(members.begin(), members.end());
    clusters.push_back(std::move(members));
  }
  return clusters;
}

// A "flower": one core object surrounded by at least three petals that all
// share shape and color and lie on a circle centered on the core.
inline bool IsFlower(std::span<const ObjectSpec> input, const GestaltConfig& cfg = {}) {
  const auto objs = internal::Canonical(input);
  if (objs.size() < 4) return false;
  for (std::size_t core = 0; core < objs.size(); ++core) {
    std::vector<ObjectSpec> petals;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (i != core) petals.push_back(objs[i]);
    }
    const bool uniform = std::all_of(petals.begin(), petals.end(), [&](const ObjectSpec& p) {
      return internal::SameLook(p, petals.front());
    });
    if (!uniform) continue;
    const auto ring = IsCircularArrangement(petals, cfg);
    if (!ring.circular) continue;
    const double offset = std::hypot(ring.fit.cx - objs[core].x, ring.fit.cy - objs[core].y);
    if (offset <= cfg.circular_residual_tol * ring.fit.radius) return true;
  }
  return false;
}

}  // namespace kandinsky::gestalt
