// Copyright 2026 The rdpdp Authors.
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

#ifndef RDPDP_CLI_H_
#define RDPDP_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace rdpdp::cli {

inline constexpr char kToolVersion[] = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  // The library rejected the query: bad domain, infeasible target, or a
  // failed precondition.
  kExitInfeasible = 3,
  kExitIo = 4,
  // oracle-check ran but a check fell outside its tolerance.
  kExitValidation = 5,
};

// Runs one invocation of the `rdpdp` tool. `args[0]` is the program name.
// JSON records and CSV tables go to `out` (or to --out for curves);
// diagnostics go to `err`. Returns the process exit code.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace rdpdp::cli

#endif  // RDPDP_CLI_H_
