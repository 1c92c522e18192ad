/*
 * Copyright 2026 The AdHash Authors.
 *     All rights reserved.
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing,
 *  software distributed under the License is distributed on an "AS
 *  IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
 *  express or implied.  See the License for the specific language
 *  governing permissions and limitations under the License.
 *
 */

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adhash {

// Dense numeric id of an IRI or literal. Ids are assigned in first-seen
// order starting from 0 and shared by the whole cluster.
using TermId = std::uint32_t;

struct EncodedTriple {
    TermId s = 0;
    TermId p = 0;
    TermId o = 0;

    friend bool operator==(const EncodedTriple &, const EncodedTriple &) = default;
    friend auto operator<=>(const EncodedTriple &, const EncodedTriple &) = default;
};

struct EncodedTripleHash {
    std::size_t operator()(const EncodedTriple &t) const noexcept {
        std::uint64_t h = t.s;
        h = h * 0x9E3779B97F4A7C15ULL ^ t.p;
        h = h * 0x9E3779B97F4A7C15ULL ^ t.o;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

class MalformedLine : public std::runtime_error {
public:
    MalformedLine(std::size_t line, const std::string &why);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnknownId : public std::out_of_range {
public:
    explicit UnknownId(TermId id);
};

/// Bi-directional string dictionary. Single writer while loading, read-only
/// afterwards.
class Dictionary {
public:
    TermId encode(std::string_view term);
    const std::string &decode(TermId id) const;
    std::optional<TermId> find(std::string_view term) const;

    std::size_t size() const noexcept { return reverse_.size(); }

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::unordered_map<std::string, TermId, StringHash, std::equal_to<>> forward_;
    std::vector<std::string> reverse_;
};

/// Splits one N-Triples statement into its three term tokens. Returns
/// std::nullopt for blank and comment lines. Throws std::invalid_argument with
/// a short reason for anything else that is not `term term term .`.
std::optional<std::array<std::string, 3>> tokenize_ntriples_line(std::string_view line);

/// Parses an N-Triples stream, encoding every term into `dict`. Triples come
/// back in stream order (duplicates included).
std::vector<EncodedTriple> parse_ntriples(std::istream &in, Dictionary &dict);

} // namespace adhash
