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

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "adhash/rdf.hpp"

namespace adhash {

class Dictionary;

struct SubjectObject {
    TermId s = 0;
    TermId o = 0;

    friend bool operator==(const SubjectObject &, const SubjectObject &) = default;
    friend auto operator<=>(const SubjectObject &, const SubjectObject &) = default;
};

/// A worker's storage module: triples hashed by predicate (P-index) and each
/// predicate bucket re-hashed by subject (PS-index) and by object (PO-index).
/// Set semantics: inserting an existing triple is a no-op.
class WorkerStore {
public:
    /// Returns false when the triple was already present.
    bool insert(const EncodedTriple &t);

    std::span<const SubjectObject> scan(TermId p) const;
    std::span<const TermId> lookup_ps(TermId s, TermId p) const;
    std::span<const TermId> lookup_po(TermId o, TermId p) const;
    bool contains(const EncodedTriple &t) const;

    /// Local predicates in ascending id order.
    const std::vector<TermId> &predicates() const;

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    template <typename F>
    void for_each(F &&f) const {
        for (TermId p : predicates())
            for (const auto &so : scan(p))
                f(EncodedTriple{so.s, p, so.o});
    }

private:
    struct Bucket {
        std::vector<SubjectObject> pairs;
        std::unordered_map<TermId, std::vector<TermId>> by_subject;
        std::unordered_map<TermId, std::vector<TermId>> by_object;
        std::unordered_set<std::uint64_t> present;
    };

    std::unordered_map<TermId, Bucket> by_predicate_;
    mutable std::vector<TermId> predicate_order_;
    mutable bool order_dirty_ = false;
    std::size_t size_ = 0;
};

/// Per-predicate statistics. Degree sums are kept instead of averages so that
/// partial statistics from several workers merge without loss on the subject
/// side.
struct PredicateStat {
    std::uint64_t count = 0;              // |p|
    std::uint64_t distinct_subjects = 0;  // |p.s|
    std::uint64_t distinct_objects = 0;   // |p.o|
    double subject_degree_sum = 0;        // sum of degree(s) over distinct subjects
    double object_degree_sum = 0;         // sum of degree(o) over distinct objects

    double subject_score() const {
        return distinct_subjects ? subject_degree_sum / static_cast<double>(distinct_subjects) : 0.0;
    }
    double object_score() const {
        return distinct_objects ? object_degree_sum / static_cast<double>(distinct_objects) : 0.0;
    }
    double per_subject() const {
        return distinct_subjects ? static_cast<double>(count) / static_cast<double>(distinct_subjects) : 0.0;
    }
    double per_object() const {
        return distinct_objects ? static_cast<double>(count) / static_cast<double>(distinct_objects) : 0.0;
    }
};

struct PredicateStats {
    std::map<TermId, PredicateStat> by_predicate;

    const PredicateStat *find(TermId p) const {
        auto it = by_predicate.find(p);
        return it == by_predicate.end() ? nullptr : &it->second;
    }
    std::uint64_t total_triples() const;
};

/// In-degree plus out-degree of every term, indexed by TermId.
using DegreeTable = std::vector<std::uint64_t>;

DegreeTable compute_degrees(std::span<const EncodedTriple> triples, std::size_t num_terms);

PredicateStats compute_local_stats(const WorkerStore &store, std::span<const std::uint64_t> degrees);

/// Merges per-worker statistics. Counts and subject-side values are exact
/// under subject partitioning; object-side values are summed per worker and
/// are therefore an upper bound when an object appears on several workers.
PredicateStats aggregate_stats(std::span<const PredicateStats> partials);

/// One line per predicate: name, |p|, |p.s|, |p.o|, subject score, object
/// score, P_ps, P_po.
void write_stats_tsv(std::ostream &out, const PredicateStats &stats, const Dictionary &dict);

} // namespace adhash
