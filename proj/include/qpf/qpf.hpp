// Copyright 2026 The qpfsim Authors
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

#include "qpf/builder.hpp"
#include "qpf/circuit.hpp"
#include "qpf/gate.hpp"
#include "qpf/harness.hpp"
#include "qpf/io.hpp"
#include "qpf/lnn_router.hpp"
#include "qpf/noise.hpp"
#include "qpf/numtheory.hpp"
#include "qpf/rng.hpp"
#include "qpf/spectrum.hpp"
#include "qpf/state_vector.hpp"
#include "qpf/trajectory.hpp"
