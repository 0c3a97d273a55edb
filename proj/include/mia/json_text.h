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

#ifndef MIA_JSON_TEXT_H_
#define MIA_JSON_TEXT_H_

#include <string>

#include "json.hpp"

namespace mia {

using Json = nlohmann::ordered_json;

// Serializes `value` with every floating-point number printed using 17
// significant digits ("%.17g"), so doubles round-trip exactly and output is
// byte-stable. Non-finite numbers become null. indent < 0 gives a single line.
std::string DumpJson(const Json& value, int indent = -1);

// 17-significant-digit rendering of one double.
std::string FormatReal(double value);

}  // namespace mia

#endif  // MIA_JSON_TEXT_H_
