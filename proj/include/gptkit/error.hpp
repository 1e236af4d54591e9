// Copyright 2026 The gptkit Authors
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

namespace gptkit {

/// Thrown on any precondition or invariant violation. The message names the
/// offending field so command-line front ends can print it verbatim.
class Error : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gptkit
