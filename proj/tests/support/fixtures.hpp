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

#include <fstream>
#include <stdexcept>
#include <string>

#include "adhash/engine.hpp"

namespace fixture {

inline std::string path(const std::string &name) { return std::string(ADHASH_FIXTURES) + "/" + name; }

struct Loaded {
    adhash::Dictionary dict;
    std::vector<adhash::EncodedTriple> triples;
};

inline Loaded load(const std::string &name) {
    std::ifstream in(path(name));
    if (!in)
        throw std::runtime_error("missing fixture " + name);
    Loaded l;
    l.triples = adhash::parse_ntriples(in, l.dict);
    return l;
}

/// The small university graph split over two workers by id parity.
inline adhash::Engine campus(bool adaptive = false, std::uint64_t threshold = 10) {
    auto l = load("campus.nt");
    adhash::EngineOptions o;
    o.cluster.num_workers = 2;
    o.adaptive = adaptive;
    o.adaptivity.freq_threshold = threshold;
    o.adaptivity.budget_pct = std::nullopt;
    return adhash::Engine(std::move(l.dict), l.triples, o);
}

} // namespace fixture
