// Copyright 2026 The contingency-games Authors
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

#include <iosfwd>
#include <string>
#include <vector>

namespace cgames::cli {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitInternalError = 1,
  kExitConfigError = 2,
  kExitSolverFailure = 3,
  kExitVerificationFailure = 4,
};

/// Runs the command line `args` (without the program name) and returns the
/// process exit status. Diagnostics go to `err`, short results to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "0,5,10" into integers; throws std::invalid_argument.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace cgames::cli
