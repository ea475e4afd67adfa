// Copyright 2026 The Arbiter Authors
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

#include <string>

namespace arbiter {

// Decodes UTF-8. Malformed bytes decode to U+DC80..U+DCFF (one per byte) so
// that decoding is total and distinct inputs stay distinct.
std::u32string utf8_decode(const std::string& s);
// Inverse of utf8_decode, including the U+DC80..U+DCFF byte escapes.
std::string utf8_encode(const std::u32string& s);
void utf8_append(std::string& out, char32_t cp);
bool utf8_valid(const std::string& s);

}  // namespace arbiter
