// Copyright 2026 The mstraj Authors
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

#include <stdexcept>
#include <string>

namespace mstraj {

// Precondition broken by the caller (wrong dimensions, bad ids, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Singular innovation covariance and similar linear-algebra breakdowns.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested association is impossible (e.g. detecting a dead trajectory).
class InvalidAssociation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Birth model kind does not match the filter family.
class ModelMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// No feasible assignment / global hypothesis exists.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input exceeds what the chosen exact algorithm supports.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MSTRAJ_EXPECT(cond, msg)                                   \
  do {                                                             \
    if (!(cond)) throw ::mstraj::ContractViolation(std::string(msg)); \
  } while (false)

}  // namespace mstraj
