// Copyright 2026 The smg Authors
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

#include "smg/discounting.hpp"
#include "smg/io.hpp"
#include "smg/linalg.hpp"
#include "smg/matrix_game.hpp"
#include "smg/model.hpp"
#include "smg/shapley.hpp"
#include "smg/simplex.hpp"
#include "smg/simulate.hpp"
#include "smg/solver.hpp"
#include "smg/verify.hpp"
