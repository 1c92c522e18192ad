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

#include <map>
#include <span>
#include <vector>

#include "adhash/bindings.hpp"
#include "adhash/planner.hpp"
#include "adhash/query.hpp"
#include "adhash/rdf.hpp"

namespace oracle {

using adhash::EncodedQuery;
using adhash::EncodedTriple;
using adhash::TermId;
using Row = std::vector<TermId>;

/// Centralized nested-loop evaluation of a basic graph pattern. Rows are
/// projected, sorted and distinct.
std::vector<Row> evaluate(const EncodedQuery &q, std::span<const EncodedTriple> triples);

std::vector<Row> rows_of(const adhash::BindingTable &t);

struct Stat {
    std::uint64_t count = 0;
    std::uint64_t distinct_subjects = 0;
    std::uint64_t distinct_objects = 0;
    double subject_score = 0;
    double object_score = 0;
};

/// Brute-force per-predicate statistics over the distinct triples.
std::map<TermId, Stat> predicate_stats(std::span<const EncodedTriple> triples);

/// Every left-deep ordering whose prefixes stay connected through shared
/// variables.
std::vector<std::vector<std::size_t>> connected_orderings(const EncodedQuery &q);

/// Minimum summed expansion cost over connected_orderings.
double exhaustive_min_cost(const EncodedQuery &q, const std::vector<adhash::PatternEstimate> &est,
                           std::uint32_t num_workers);

/// Exact estimate inputs computed from the full data.
std::vector<adhash::PatternEstimate> exact_estimates(const EncodedQuery &q, std::span<const EncodedTriple> triples);

} // namespace oracle
