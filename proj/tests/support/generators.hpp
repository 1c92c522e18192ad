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

#include <random>
#include <string>
#include <vector>

#include "adhash/query.hpp"
#include "adhash/rdf.hpp"

namespace gen {

using adhash::Dictionary;
using adhash::EncodedTriple;
using adhash::QueryGraph;
using adhash::TermId;

struct Dataset {
    Dictionary dict;
    std::vector<EncodedTriple> triples;
};

/// Uniform random graph over `entities` vertices and `predicates` labels.
Dataset random_graph(std::mt19937_64 &rng, std::size_t triples, std::size_t entities, std::size_t predicates);

/// Connected query grown by a random walk over the data, so most queries
/// have answers. Constants only replace leaf vertices; with
/// `allow_var_pred` some predicates become variables.
QueryGraph random_query(std::mt19937_64 &rng, const Dataset &d, std::size_t patterns, bool allow_var_pred = true);

/// Subject star: one subject, distinct predicates, no other shared variable.
QueryGraph random_star(std::mt19937_64 &rng, const Dataset &d, std::size_t patterns);

/// University-style data: departments, professors, students and courses.
Dataset university(std::mt19937_64 &rng, std::size_t target_triples);

/// Query instances over university(). Template ids 0..5; templates 0-3
/// and 5 are general, 4 is a subject star.
std::string university_query(std::mt19937_64 &rng, const Dataset &d, int template_id);

/// Uniform subjects, Zipf-distributed objects (exponent `s`).
std::vector<EncodedTriple> zipf_objects(std::mt19937_64 &rng, std::size_t triples, std::size_t subjects,
                                        std::size_t objects, double s);

/// Spelling helpers for generated terms.
std::string iri(const std::string &name);

} // namespace gen
