// Copyright 2026 The qsrlc Authors
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

// Umbrella header.

#pragma once

#include "qsrlc/coherence.hpp"
#include "qsrlc/collapsing.hpp"
#include "qsrlc/convex_split.hpp"
#include "qsrlc/entropy.hpp"
#include "qsrlc/errors.hpp"
#include "qsrlc/io.hpp"
#include "qsrlc/protocols.hpp"
#include "qsrlc/qmat.hpp"
#include "qsrlc/random.hpp"
#include "qsrlc/rates.hpp"
#include "qsrlc/transcript.hpp"
