// Copyright 2026 The ddtomo Authors
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

#include "ddtomo/analytic.hpp"
#include "ddtomo/errors.hpp"
#include "ddtomo/estimator.hpp"
#include "ddtomo/evolve.hpp"
#include "ddtomo/experiment.hpp"
#include "ddtomo/measurement.hpp"
#include "ddtomo/pauli.hpp"
#include "ddtomo/propagator.hpp"
#include "ddtomo/rng.hpp"
#include "ddtomo/schedule.hpp"
#include "ddtomo/spin_system.hpp"
#include "ddtomo/spin_system_io.hpp"
#include "ddtomo/state.hpp"
