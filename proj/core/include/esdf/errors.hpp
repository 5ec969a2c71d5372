// Copyright 2026 The esdf authors
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

#include <stdexcept>
#include <string>

namespace esdf {

// Bad user-supplied configuration (flags, parameter ranges). CLI exit code 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad input data (unreadable file, non-watertight mesh, shape mismatch). Exit code 3.
struct data_error : std::runtime_error {
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failure (divergent loss, degenerate spectrum). Exit code 4.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace esdf
