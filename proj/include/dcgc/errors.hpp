// Copyright 2026 The DCGC Authors.
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

#ifndef DCGC_ERRORS_HPP_
#define DCGC_ERRORS_HPP_

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dcgc {

// Malformed or inconsistent input data (files, shapes, labels).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid hyperparameters or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values or failed numerical checks during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace log {

using Sink = std::function<void(std::string_view)>;

// Replaces the warning sink (default: stderr). Passing an empty function
// silences warnings; they are still counted.
void set_sink(Sink sink);
void warn(std::string_view message);
std::size_t warning_count();

}  // namespace log
}  // namespace dcgc

#endif  // DCGC_ERRORS_HPP_
