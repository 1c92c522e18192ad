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

#include "adhash/storage.hpp"

#include <algorithm>
#include <iomanip>

namespace adhash {

namespace {

std::uint64_t pack(TermId a, TermId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

} // namespace

bool WorkerStore::insert(const EncodedTriple &t) {
    auto [it, fresh_predicate] = by_predicate_.try_emplace(t.p);
    Bucket &bucket = it->second;
    if (!bucket.present.insert(pack(t.s, t.o)).second)
        return false;
    bucket.pairs.push_back({t.s, t.o});
    bucket.by_subject[t.s].push_back(t.o);
    bucket.by_object[t.o].push_back(t.s);
    if (fresh_predicate) {
        predicate_order_.push_back(t.p);
        order_dirty_ = true;
    }
    ++size_;
    return true;
}

std::span<const SubjectObject> WorkerStore::scan(TermId p) const {
    auto it = by_predicate_.find(p);
    if (it == by_predicate_.end())
        return {};
    return it->second.pairs;
}

std::span<const TermId> WorkerStore::lookup_ps(TermId s, TermId p) const {
    auto it = by_predicate_.find(p);
    if (it == by_predicate_.end())
        return {};
    auto jt = it->second.by_subject.find(s);
    if (jt == it->second.by_subject.end())
        return {};
    return jt->second;
}

std::span<const TermId> WorkerStore::lookup_po(TermId o, TermId p) const {
    auto it = by_predicate_.find(p);
    if (it == by_predicate_.end())
        return {};
    auto jt = it->second.by_object.find(o);
    if (jt == it->second.by_object.end())
        return {};
    return jt->second;
}

bool WorkerStore::contains(const EncodedTriple &t) const {
    auto it = by_predicate_.find(t.p);
    return it != by_predicate_.end() && it->second.present.contains(pack(t.s, t.o));
}

const std::vector<TermId> &WorkerStore::predicates() const {
    if (order_dirty_) {
        std::sort(predicate_order_.begin(), predicate_order_.end());
        order_dirty_ = false;
    }
    return predicate_order_;
}

std::uint64_t PredicateStats::total_triples() const {
    std::uint64_t total = 0;
    for (const auto &[p, st] : by_predicate)
        total += st.count;
    return total;
}

DegreeTable compute_degrees(std::span<const EncodedTriple> triples, std::size_t num_terms) {
    DegreeTable degrees(num_terms, 0);
    for (const auto &t : triples) {
        ++degrees.at(t.s);
        ++degrees.at(t.o);
    }
    return degrees;
}

PredicateStats compute_local_stats(const WorkerStore &store, std::span<const std::uint64_t> degrees) {
    auto degree_of = [&](TermId v) -> double {
        return v < degrees.size() ? static_cast<double>(degrees[v]) : 0.0;
    };

    PredicateStats stats;
    for (TermId p : store.predicates()) {
        PredicateStat st;
        std::unordered_set<TermId> subjects, objects;
        for (const auto &so : store.scan(p)) {
            ++st.count;
            if (subjects.insert(so.s).second)
                st.subject_degree_sum += degree_of(so.s);
            if (objects.insert(so.o).second)
                st.object_degree_sum += degree_of(so.o);
        }
        st.distinct_subjects = subjects.size();
        st.distinct_objects = objects.size();
        stats.by_predicate.emplace(p, st);
    }
    return stats;
}

PredicateStats aggregate_stats(std::span<const PredicateStats> partials) {
    PredicateStats merged;
    for (const auto &partial : partials) {
        for (const auto &[p, st] : partial.by_predicate) {
            PredicateStat &m = merged.by_predicate[p];
            m.count += st.count;
            m.distinct_subjects += st.distinct_subjects;
            m.distinct_objects += st.distinct_objects;
            m.subject_degree_sum += st.subject_degree_sum;
            m.object_degree_sum += st.object_degree_sum;
        }
    }
    return merged;
}

void write_stats_tsv(std::ostream &out, const PredicateStats &stats, const Dictionary &dict) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::fixed << std::setprecision(4);
    for (const auto &[p, st] : stats.by_predicate) {
        out << dict.decode(p) << '\t' << st.count << '\t' << st.distinct_subjects << '\t'
            << st.distinct_objects << '\t' << st.subject_score() << '\t' << st.object_score() << '\t'
            << st.per_subject() << '\t' << st.per_object() << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

} // namespace adhash
