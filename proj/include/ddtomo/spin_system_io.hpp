// Copyright 2026 The ddtomo Authors
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

#include <fstream>
#include <string>

#include <json.hpp>

#include "ddtomo/spin_system.hpp"

namespace ddtomo {

// Hamiltonian document schema:
//   { "n_spins": int,
//     "couplings": [ {"m": int, "n": int, "a": "x|y|z", "b": "x|y|z", "value": real}, ... ],
//     "fields":    [ {"m": int, "a": "x|y|z", "value": real}, ... ] }
// m < n is enforced on load; values must lie in [-1, 1].

inline nlohmann::json to_json(const SpinSystem &sys) {
    nlohmann::json doc;
    doc["n_spins"] = sys.n_spins();
    auto couplings = nlohmann::json::array();
    auto fields = nlohmann::json::array();
    for (int m = 0; m < sys.n_spins(); ++m) {
        for (int n = m + 1; n < sys.n_spins(); ++n) {
            for (Axis a : kAxes) {
                for (Axis b : kAxes) {
                    double v = sys.coupling(m, n, a, b);
                    if (v != 0.0) {
                        couplings.push_back({{"m", m},
                                             {"n", n},
                                             {"a", std::string(1, axis_char(a))},
                                             {"b", std::string(1, axis_char(b))},
                                             {"value", v}});
                    }
                }
            }
        }
    }
    for (int m = 0; m < sys.n_spins(); ++m) {
        for (Axis a : kAxes) {
            double v = sys.field(m, a);
            if (v != 0.0) {
                fields.push_back(
                    {{"m", m}, {"a", std::string(1, axis_char(a))}, {"value", v}});
            }
        }
    }
    doc["couplings"] = couplings;
    doc["fields"] = fields;
    return doc;
}

namespace detail {

inline double checked_value(const nlohmann::json &entry, const std::string &context) {
    if (!entry.contains("value") || !entry["value"].is_number()) {
        throw ParseError("missing or non-numeric key 'value' in " + context);
    }
    double v = entry["value"].get<double>();
    if (v < -1.0 || v > 1.0) {
        throw ValidationError("coefficient out of range [-1, 1] in " + context + ": " +
                              std::to_string(v));
    }
    return v;
}

inline int checked_int(const nlohmann::json &entry, const char *key, const std::string &context) {
    if (!entry.contains(key) || !entry[key].is_number_integer()) {
        throw ParseError("missing or non-integer key '" + std::string(key) + "' in " + context);
    }
    return entry[key].get<int>();
}

inline Axis checked_axis(const nlohmann::json &entry, const char *key, const std::string &context) {
    if (!entry.contains(key) || !entry[key].is_string()) {
        throw ParseError("missing or non-string key '" + std::string(key) + "' in " + context);
    }
    try {
        return parse_axis(entry[key].get<std::string>());
    } catch (const std::invalid_argument &e) {
        throw ParseError(std::string(e.what()) + " for key '" + key + "' in " + context);
    }
}

}  // namespace detail

inline SpinSystem spin_system_from_json(const nlohmann::json &doc) {
    if (!doc.contains("n_spins") || !doc["n_spins"].is_number_integer()) {
        throw ParseError("missing or non-integer key 'n_spins'");
    }
    int n = doc["n_spins"].get<int>();
    if (n < 1) {
        throw ValidationError("n_spins must be positive");
    }
    SpinSystem sys(n);
    if (doc.contains("couplings")) {
        if (!doc["couplings"].is_array()) {
            throw ParseError("key 'couplings' must be an array");
        }
        for (const auto &entry : doc["couplings"]) {
            const std::string ctx = "couplings entry " + entry.dump();
            int m = detail::checked_int(entry, "m", ctx);
            int nn = detail::checked_int(entry, "n", ctx);
            if (m >= nn) {
                throw ValidationError("couplings require m < n, got m=" + std::to_string(m) +
                                      ", n=" + std::to_string(nn));
            }
            if (nn >= n || m < 0) {
                throw ValidationError("spin index out of range in " + ctx);
            }
            Axis a = detail::checked_axis(entry, "a", ctx);
            Axis b = detail::checked_axis(entry, "b", ctx);
            sys.set_coupling(m, nn, a, b, detail::checked_value(entry, ctx));
        }
    }
    if (doc.contains("fields")) {
        if (!doc["fields"].is_array()) {
            throw ParseError("key 'fields' must be an array");
        }
        for (const auto &entry : doc["fields"]) {
            const std::string ctx = "fields entry " + entry.dump();
            int m = detail::checked_int(entry, "m", ctx);
            if (m < 0 || m >= n) {
                throw ValidationError("spin index out of range in " + ctx);
            }
            Axis a = detail::checked_axis(entry, "a", ctx);
            sys.set_field(m, a, detail::checked_value(entry, ctx));
        }
    }
    return sys;
}

inline void save_spin_system(const SpinSystem &sys, const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << to_json(sys).dump(2) << "\n";
}

inline SpinSystem load_spin_system(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return spin_system_from_json(doc);
}

}  // namespace ddtomo
