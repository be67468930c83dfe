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

#ifndef DCGC_CLI_HPP_
#define DCGC_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace dcgc::cli {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericFailure = 4,
};

// Subcommands: gen, run, eval, sweep, gradcheck. `args` excludes the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Environment variable consulted for relative data paths that do not exist
// relative to the working directory.
inline constexpr const char* kDataDirEnv = "DCGC_DATA_DIR";

}  // namespace dcgc::cli

#endif  // DCGC_CLI_HPP_
