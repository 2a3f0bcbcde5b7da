// Copyright 2026 The bayesloc Authors.
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

#ifndef BAYESLOC_TOOLS_COMMANDS_HPP_
#define BAYESLOC_TOOLS_COMMANDS_HPP_

#include <iosfwd>

namespace bayesloc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitRuntime = 3,
};

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "BAYESLOC_OUT_DIR";

// Entry point shared by the bayesloc binary and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace bayesloc::cli

#endif  // BAYESLOC_TOOLS_COMMANDS_HPP_
