// Copyright 2026 The gaussprep Authors
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

#include "gaussprep/analysis.hpp"
#include "gaussprep/dynamics.hpp"
#include "gaussprep/errors.hpp"
#include "gaussprep/graph_state.hpp"
#include "gaussprep/linalg.hpp"
#include "gaussprep/presets.hpp"
#include "gaussprep/state_family.hpp"
#include "gaussprep/synthesis.hpp"
