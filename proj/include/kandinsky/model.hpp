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
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "kandinsky/errors.hpp"

namespace kandinsky {

enum class Shape { kCircle, kSquare, kTriangle };
enum class Color { kRed, kBlue, kYellow };

inline constexpr std::array<Shape, 3> kAllShapes = {Shape::kCircle, Shape::kSquare,
                                                    Shape::kTriangle};
inline constexpr std::array<Color, 3> kAllColors = {Color::kRed, Color::kBlue,
                                                    Color::kYellow};

inline std::string_view ShapeName(Shape shape) {
  switch (shape) {
    case Shape::kCircle: return "circle";
    case Shape::kSquare: return "square";
    case Shape::kTriangle: return "triangle";
  }
  return "?";
}

inline std::string_view ColorName(Color color) {
  switch (color) {
    case Color::kRed: return "red";
    case Color::kBlue: return "blue";
    case Color::kYellow: return "yellow";
  }
  return "?";
}

// Case-insensitive lookup; nullopt for anything outside the closed set.
inline std::optional<Shape> ParseShape(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Shape shape : kAllShapes) {
    if (ShapeName(shape) == lower) return shape;
  }
  return std::nullopt;
}

inline std::optional<Color> ParseColor(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Color color : kAllColors) {
    if (ColorName(color) == lower) return color;
  }
  return std::nullopt;
}

// Rounds to the 12-significant-digit value that the manifest writer emits.
// Generators pass every coordinate through this so that a figure read back
// from disk is bit-identical to the one that was labelled.
inline double CanonicalReal(double value) {
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(),
                                 value, std::chars_format::general, 12);
  if (ec != std::errc{}) return value;
  double parsed = value;
  std::from_chars(buffer.data(), end, parsed);
  return parsed;
}

inline std::string FormatReal(double value) {
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(),
                                 value, std::chars_format::general, 12);
  return std::string(buffer.data(), end);
}

// One geometric object on the unit canvas. `size` is the diameter of the
// object's bounding disc; (x, y) is its center, y growing downwards.
struct ObjectSpec {
  Shape shape = Shape::kCircle;
  Color color = Color::kRed;
  double size = 0.1;
  double x = 0.5;
  double y = 0.5;

  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

// Object order is presentation-only; no evaluation result depends on it.
struct Figure {
  std::vector<ObjectSpec> objects;

  friend bool operator==(const Figure&, const Figure&) = default;
};

struct UniverseConfig {
  int n_min = 1;
  int n_max = 25;
  std::vector<Shape> allowed_shapes = {kAllShapes.begin(), kAllShapes.end()};
  std::vector<Color> allowed_colors = {kAllColors.begin(), kAllColors.end()};
  double size_min = 0.04;
  double size_max = 0.12;
  double small_big_threshold = 0.08;
  double min_gap = 0.0;
  std::uint64_t seed = 0;

  bool AllowsShape(Shape shape) const {
    return std::find(allowed_shapes.begin(), allowed_shapes.end(), shape) !=
           allowed_shapes.end();
  }
  bool AllowsColor(Color color) const {
    return std::find(allowed_colors.begin(), allowed_colors.end(), color) !=
           allowed_colors.end();
  }
};

// Throws kInvalidArgument when the configuration itself is malformed.
inline void CheckUniverse(const UniverseConfig& u) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "universe: " + what);
  };
  if (u.n_min < 1) fail("n_min must be >= 1");
  if (u.n_max < u.n_min) fail("n_max must be >= n_min");
  if (!(u.size_min > 0.0)) fail("size_min must be > 0");
  if (u.size_max < u.size_min) fail("size_max must be >= size_min");
  if (u.size_max > 1.0) fail("size_max must be <= 1");
  if (u.allowed_shapes.empty()) fail("allowed_shapes is empty");
  if (u.allowed_colors.empty()) fail("allowed_colors is empty");
  if (u.min_gap < 0.0) fail("min_gap must be >= 0");
}

inline double ObjectDistance(const ObjectSpec& a, const ObjectSpec& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Bounding-disc rule with optional extra clearance.
inline bool Overlaps(const ObjectSpec& a, const ObjectSpec& b, double min_gap) {
  return ObjectDistance(a, b) < (a.size + b.size) / 2.0 + min_gap;
}

inline bool InsideCanvas(const ObjectSpec& o) {
  const double r = o.size / 2.0;
  return o.x >= r && o.x <= 1.0 - r && o.y >= r && o.y <= 1.0 - r;
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Outline of a shape inscribed in a disc of diameter `size`: squares are
// axis-aligned, triangles equilateral with the apex up (y grows downwards).
// Circles have no vertices.
inline std::vector<Point> ShapeVertices(Shape shape, double cx, double cy, double size) {
  const double r = size / 2.0;
  if (shape == Shape::kSquare) {
    const double h = r / std::numbers::sqrt2;
    return {{cx - h, cy - h}, {cx + h, cy - h}, {cx + h, cy + h}, {cx - h, cy + h}};
  }
  if (shape == Shape::kTriangle) {
    const double c = r * std::numbers::sqrt3 / 2.0;
    return {{cx, cy - r}, {cx + c, cy + r / 2.0}, {cx - c, cy + r / 2.0}};
  }
  return {};
}

enum class Rule {
  kCount,
  kSize,
  kCropped,
  kOverlap,
  kShapeNotAllowed,
  kColorNotAllowed,
  kNotFinite,
};

inline std::string_view RuleName(Rule rule) {
  switch (rule) {
    case Rule::kCount: return "count";
    case Rule::kSize: return "size";
    case Rule::kCropped: return "cropped at border";
    case Rule::kOverlap: return "overlap";
    case Rule::kShapeNotAllowed: return "shape not allowed";
    case Rule::kColorNotAllowed: return "color not allowed";
    case Rule::kNotFinite: return "not finite";
  }
  return "?";
}

struct Violation {
  Rule rule;
  std::optional<std::size_t> first;
  std::optional<std::size_t> second;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool Has(Rule rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [rule](const Violation& v) { return v.rule == rule; });
  }
};

inline ValidationReport ValidateFigure(const Figure& f, const UniverseConfig& u) {
  ValidationReport report;
  auto add = [&report](Rule rule, std::optional<std::size_t> a,
                       std::optional<std::size_t> b, std::string message) {
    report.violations.push_back({rule, a, b, std::move(message)});
  };
  const auto n = static_cast<int>(f.objects.size());
  if (n < std::max(1, u.n_min) || n > u.n_max) {
    add(Rule::kCount, std::nullopt, std::nullopt,
        "figure has " + std::to_string(n) + " objects, allowed [" +
            std::to_string(std::max(1, u.n_min)) + ", " + std::to_string(u.n_max) + "]");
  }
  for (std::size_t i = 0; i < f.objects.size(); ++i) {
    const ObjectSpec& o = f.objects[i];
    const std::string tag = "object " + std::to_string(i);
    if (!std::isfinite(o.size) || !std::isfinite(o.x) || !std::isfinite(o.y)) {
      add(Rule::kNotFinite, i, std::nullopt, tag + " has a non-finite field");
      continue;
    }
    if (!u.AllowsShape(o.shape)) {
      add(Rule::kShapeNotAllowed, i, std::nullopt,
          tag + " shape " + std::string(ShapeName(o.shape)) + " not in universe");
    }
    if (!u.AllowsColor(o.color)) {
      add(Rule::kColorNotAllowed, i, std::nullopt,
          tag + " color " + std::string(ColorName(o.color)) + " not in universe");
    }
    if (!(o.size > 0.0) || o.size > 1.0 || o.size < u.size_min || o.size > u.size_max) {
      add(Rule::kSize, i, std::nullopt,
          tag + " size " + FormatReal(o.size) + " outside [" + FormatReal(u.size_min) +
              ", " + FormatReal(u.size_max) + "]");
    }
    if (!InsideCanvas(o)) {
      add(Rule::kCropped, i, std::nullopt, tag + " cropped at border");
    }
  }
  for (std::size_t i = 0; i < f.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < f.objects.size(); ++j) {
      if (Overlaps(f.objects[i], f.objects[j], u.min_gap)) {
        add(Rule::kOverlap, i, j,
            "objects " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
  return report;
}

}  // namespace kandinsky
