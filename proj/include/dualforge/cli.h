// Copyright 2026 The DualForge Authors
// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <iosfwd>

namespace dualforge::cli {

// Exit codes: 0 success, 1 usage, 2 data validation, 3 transport or
// executor launch.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dualforge::cli
