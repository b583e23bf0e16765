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

// Umbrella header for the whole library.

#include "kandinsky/challenges.hpp"
#include "kandinsky/dataset.hpp"
#include "kandinsky/describe.hpp"
#include "kandinsky/errors.hpp"
#include "kandinsky/evaluate.hpp"
#include "kandinsky/gestalt.hpp"
#include "kandinsky/model.hpp"
#include "kandinsky/parallel.hpp"
#include "kandinsky/render.hpp"
#include "kandinsky/rng.hpp"
#include "kandinsky/sampler.hpp"
#include "kandinsky/splits.hpp"
#include "kandinsky/statement.hpp"
#include "kandinsky/statement_file.hpp"
