/*
 * Copyright 2026 The ShaTS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHATS_TOOLS_COMMANDS_H_
#define SHATS_TOOLS_COMMANDS_H_

#include <ostream>

#include "shats/config.h"
#include "shats/error.h"

namespace shats::cli {

enum ExitCode {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitPredictor = 4,
  kExitInternal = 5,
};

int ExitCodeFor(const Error& error);

// Each command writes its artifacts only after all computation succeeded.
void RunPreprocess(const RunConfig& config, std::ostream& out);
void RunExplain(const RunConfig& config, std::ostream& out);
void RunRank(const RunConfig& config, std::ostream& out);
void RunHeatmap(const RunConfig& config, std::ostream& out);
// Axiom and cross-route checks; returns true when all pass.
bool RunSelftest(std::ostream& out);

// Full command line: parses flags, dispatches, maps errors to exit codes.
int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace shats::cli

#endif  // SHATS_TOOLS_COMMANDS_H_
