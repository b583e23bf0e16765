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

#include <filesystem>
#include <string>
#include <vector>

#include "kandinsky/model.hpp"
#include "kandinsky/rng.hpp"
#include "kandinsky/sampler.hpp"

namespace kandinsky::testing {

inline ObjectSpec Obj(Shape shape, Color color, double size, double x, double y) {
  return ObjectSpec{shape, color, size, x, y};
}

// Valid random figures with up to `n_max` objects, one stream per index.
inline std::vector<Figure> RandomFigures(std::size_t count, std::uint64_t seed, int n_min,
                                         int n_max) {
  UniverseConfig u;
  u.n_min = n_min;
  u.n_max = n_max;
  std::vector<Figure> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = Rng::Stream(seed, StreamDomain::kFree, i);
    out.push_back(sampler::SampleFigure(u, rng));
  }
  return out;
}

// A fresh, empty directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kandinsky-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace kandinsky::testing
