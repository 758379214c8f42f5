// Copyright 2026 The dgten Authors
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

#include <string>
#include <vector>

#include "dgten/config.hpp"
#include "dgten/graph.hpp"
#include "dgten/numerics.hpp"

namespace dgten {

/// A named slice of the model whose gradients are checked on the small
/// fixture model. "full" covers every parameter.
struct GradFixture {
    std::string name;
    std::string description;
    std::vector<std::string> prefixes;
};

const std::vector<GradFixture>& gradcheck_fixtures();

/// Six nodes, three slots, mixed signs, every node active in every slot.
SnapshotSequence fixture_sequence();
/// Small widths with a feature projection, two layers and two heads. Dropout is off.
TrainConfig fixture_config();

/// Finite-difference check of the full training loss on the fixture,
/// restricted to the parameters named by `fixture`. Throws ConfigError for
/// an unknown name.
GradCheckResult run_gradcheck_fixture(const std::string& fixture, GradCheckOptions options = {});

}  // namespace dgten
