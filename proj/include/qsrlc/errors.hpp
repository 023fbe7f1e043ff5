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

#pragma once

#include <stdexcept>
#include <string>

namespace qsrlc {

// Malformed or inconsistent input: bad labels, dimension mismatch, invalid
// state, parameter out of range. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string &what) : std::invalid_argument(what) {}
};

// A simulation would exceed the configured dimension budget (exit code 3).
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string &what) : std::runtime_error(what) {}
};

// A checked inequality or guarantee failed numerically (exit code 4).
class BoundViolation : public std::runtime_error {
 public:
  explicit BoundViolation(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace qsrlc
