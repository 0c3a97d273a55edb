// Copyright 2026 The MIA Ensemble Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIA_CLI_H_
#define MIA_CLI_H_

#include <ostream>

namespace mia {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitRuntimeError = 3;

// Entry point of `mia_audit`:
//   mia_audit audit  --members m.jsonl --nonmembers n.jsonl [options]
//   mia_audit synth  [--null] [--members N] ...
//   mia_audit infer  --models ensemble.json --unknown u.jsonl
//   mia_audit --verify-report report.json
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace mia

#endif  // MIA_CLI_H_
