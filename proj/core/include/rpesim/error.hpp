// Copyright 2026 The rpesim Authors
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

namespace rpesim {

// Bad arguments or configuration: unknown subsystem names, duplicate labels,
// out-of-range parameters. The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// The physics forbids the request: zero-probability post-selection, photon
// number beyond the truncation, reuniting an atom that absorbed a photon.
// The CLI maps these to exit code 3.
class PhysicsError : public std::domain_error {
 public:
  explicit PhysicsError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace rpesim
