// Copyright 2026 The measchain Authors
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

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

namespace oracle {

/// Structural equality with numbers compared to `rel` relative tolerance.
/// Keys listed in `ignore` are skipped at every level. On mismatch `where`
/// receives the JSON pointer of the first difference.
inline bool reports_close(const nlohmann::json& a, const nlohmann::json& b, double rel,
                          std::string* where = nullptr, const std::string& path = "",
                          const std::initializer_list<const char*>& ignore = {"timing"}) {
    auto fail = [&] {
        if (where) *where = path.empty() ? "/" : path;
        return false;
    };
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        if (x == y) return true;
        return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y)) ? true : fail();
    }
    if (a.type() != b.type()) return fail();
    if (a.is_object()) {
        auto skipped = [&](const std::string& k) {
            return std::any_of(ignore.begin(), ignore.end(), [&](const char* s) { return k == s; });
        };
        for (const auto& [k, v] : a.items()) {
            if (skipped(k)) continue;
            if (!b.contains(k)) {
                if (where) *where = path + "/" + k;
                return false;
            }
            if (!reports_close(v, b[k], rel, where, path + "/" + k, ignore)) return false;
        }
        for (const auto& [k, v] : b.items()) {
            if (!skipped(k) && !a.contains(k)) {
                if (where) *where = path + "/" + k;
                return false;
            }
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return fail();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!reports_close(a[i], b[i], rel, where, path + "/" + std::to_string(i), ignore)) {
                return false;
            }
        }
        return true;
    }
    return a == b ? true : fail();
}

}  // namespace oracle
