// Copyright 2026 The ttakit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "ttakit/augment.hpp"
#include "ttakit/eigen3.hpp"
#include "ttakit/error.hpp"
#include "ttakit/external_predictor.hpp"
#include "ttakit/greedy.hpp"
#include "ttakit/highres.hpp"
#include "ttakit/image.hpp"
#include "ttakit/manifest.hpp"
#include "ttakit/metrics.hpp"
#include "ttakit/pipeline.hpp"
#include "ttakit/ppm.hpp"
#include "ttakit/predictor.hpp"
#include "ttakit/rng.hpp"
#include "ttakit/store.hpp"
#include "ttakit/synth.hpp"
#include "ttakit/views.hpp"
