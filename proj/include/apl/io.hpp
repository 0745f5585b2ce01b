/*
 * Copyright 2026 The APL Authors.
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

#ifndef APL_IO_HPP_
#define APL_IO_HPP_

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "apl/analysis.hpp"

namespace apl::io {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// "# config_hash=<hex>" line that opens every emitted file.
inline void write_hash_comment(std::ostream& os, const std::string& hash) {
  os << "# config_hash=" << hash << '\n';
}

/// Header `p,value,series_id`, one row per sample, tables in order.
inline void write_curves_csv(std::ostream& os, const std::vector<analysis::CurveTable>& tables) {
  os << "p,value,series_id\n";
  for (const auto& t : tables) {
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
      os << sig9(t.grid[i]) << ',' << sig9(t.values[i]) << ',' << t.series_id << '\n';
    }
  }
}

}  // namespace apl::io

#endif  // APL_IO_HPP_
