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

#include <compare>
#include <cstdint>

namespace mstraj {

using TrackId = std::uint64_t;
using HypId = std::uint64_t;

/// Measurement index (tau, j): measurement j (0-based) of scan tau (1-based).
struct AssocEntry {
  int scan = 0;
  int meas = 0;

  friend auto operator<=>(const AssocEntry&, const AssocEntry&) = default;
};

}  // namespace mstraj
