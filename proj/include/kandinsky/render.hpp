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

// SVG rendering of figures. Output is byte-stable: fixed attribute order and
// fixed decimal precision.

#include <charconv>
#include <cmath>
#include <string>

#include "kandinsky/errors.hpp"
#include "kandinsky/model.hpp"

namespace kandinsky {

struct RenderStyle {
  int canvas_px = 600;
  std::string background = "#c8c8c8";
  std::string red = "#e01e1e";
  std::string blue = "#1e50dc";
  std::string yellow = "#f5d214";
  std::string stroke = "none";
  double stroke_width = 0.0;

  const std::string& Fill(Color c) const {
    switch (c) {
      case Color::kRed: return red;
      case Color::kBlue: return blue;
      case Color::kYellow: return yellow;
    }
    return red;
  }
};

inline void CheckStyle(const RenderStyle& style) {
  if (style.canvas_px < 64) {
    throw Error(ErrorCode::kInvalidArgument,
                "canvas must be at least 64 px, got " + std::to_string(style.canvas_px));
  }
  if (!(style.stroke_width >= 0.0) || !std::isfinite(style.stroke_width)) {
    throw Error(ErrorCode::kInvalidArgument, "stroke width must be a finite value >= 0");
  }
}

namespace internal {

// Three decimals, trailing zeros and a bare "-0" removed.
inline std::string Px(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  std::string s(buf, end);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

}  // namespace internal

inline std::string RenderSvg(const Figure& f, const RenderStyle& style = {}) {
  using internal::Px;
  CheckStyle(style);
  const double scale = style.canvas_px;
  const std::string px = std::to_string(style.canvas_px);
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px + "\" height=\"" + px +
         "\" viewBox=\"0 0 " + px + " " + px + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + px + "\" height=\"" + px + "\" fill=\"" +
         style.background + "\"/>\n";
  std::string paint;
  for (const ObjectSpec& o : f.objects) {
    paint = "fill=\"" + style.Fill(o.color) + "\"";
    if (style.stroke_width > 0.0) {
      paint += " stroke=\"" + style.stroke + "\" stroke-width=\"" + Px(style.stroke_width) + "\"";
    }
    if (o.shape == Shape::kCircle) {
      out += "<circle cx=\"" + Px(o.x * scale) + "\" cy=\"" + Px(o.y * scale) + "\" r=\"" +
             Px(o.size / 2.0 * scale) + "\" " + paint + "/>\n";
    } else if (o.shape == Shape::kSquare) {
      const double side = o.size / std::numbers::sqrt2 * scale;
      out += "<rect x=\"" + Px(o.x * scale - side / 2.0) + "\" y=\"" +
             Px(o.y * scale - side / 2.0) + "\" width=\"" + Px(side) + "\" height=\"" +
             Px(side) + "\" " + paint + "/>\n";
    } else {
      std::string points;
      for (const Point& p : ShapeVertices(o.shape, o.x, o.y, o.size)) {
        if (!points.empty()) points += " ";
        points += Px(p.x * scale) + "," + Px(p.y * scale);
      }
      out += "<polygon points=\"" + points + "\" " + paint + "/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace kandinsky
