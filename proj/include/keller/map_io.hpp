/*
 * Copyright 2026 The keller-lab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

#include "keller/poly_map.hpp"

namespace keller {

/// Raised for malformed map/domain files (maps to the CLI parse-failure exit
/// code).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Map-definition JSON: {"p": [[i, j, "re_num/re_den", "im_num/im_den"], ...],
/// "q": [...]}.  Coefficients are exact rational strings; writing is
/// canonical (terms sorted by exponent, fractions in lowest terms), so a
/// load/save round trip is byte-identical.
std::string map_to_json_string(const PolyMapQ& f, int indent = 2);
PolyMapQ map_from_json_string(const std::string& text);

PolyMapQ load_map(const std::string& path);
void save_map(const PolyMapQ& f, const std::string& path);

}  // namespace keller
