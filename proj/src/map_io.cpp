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

#include "keller/map_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace keller {

using nlohmann::json;

namespace {

json poly_to_json(const PolyQ& p) {
  json arr = json::array();
  // std::map iteration is already sorted by exponent pair.
  for (const auto& [e, c] : p.terms())
    arr.push_back(json::array({e.first, e.second, c.re_str(), c.im_str()}));
  return arr;
}

PolyQ poly_from_json(const json& arr, const std::string& which) {
  if (!arr.is_array()) throw ParseError("component '" + which + "' must be an array of terms");
  PolyQ p;
  for (const auto& t : arr) {
    if (!t.is_array() || t.size() != 4 || !t[0].is_number_integer() ||
        !t[1].is_number_integer() || !t[2].is_string() || !t[3].is_string())
      throw ParseError("term in '" + which + "' must be [i, j, \"re\", \"im\"]");
    const int i = t[0].get<int>();
    const int j = t[1].get<int>();
    if (i < 0 || j < 0) throw ParseError("negative exponent in '" + which + "'");
    GaussianRational c;
    try {
      c = GaussianRational::parse(t[2].get<std::string>(), t[3].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("bad coefficient in '") + which + "': " + e.what());
    }
    p.add_term(i, j, c);
  }
  return p;
}

}  // namespace

std::string map_to_json_string(const PolyMapQ& f, int indent) {
  json j;
  j["p"] = poly_to_json(f.p());
  j["q"] = poly_to_json(f.q());
  return j.dump(indent) + "\n";
}

PolyMapQ map_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("p") || !j.contains("q"))
    throw ParseError("map file must be an object with 'p' and 'q' arrays");
  return PolyMapQ(poly_from_json(j["p"], "p"), poly_from_json(j["q"], "q"));
}

PolyMapQ load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open map file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return map_from_json_string(ss.str());
}

void save_map(const PolyMapQ& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write map file: " + path);
  out << map_to_json_string(f);
}

}  // namespace keller
