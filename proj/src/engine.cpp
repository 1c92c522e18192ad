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

#include "adhash/engine.hpp"

namespace adhash {

const char *to_string(ExecMode mode) {
    switch (mode) {
    case ExecMode::Empty: return "empty";
    case ExecMode::Parallel: return "parallel";
    case ExecMode::ParallelIndexed: return "parallel-indexed";
    case ExecMode::Distributed: return "distributed";
    }
    return "?";
}

void WorkloadSummary::write(std::ostream &out) const {
    out << "queries\t" << queries << '\n'
        << "failed\t" << failed << '\n'
        << "parallel_star\t" << parallel << '\n'
        << "parallel_indexed\t" << parallel_indexed << '\n'
        << "distributed\t" << distributed << '\n'
        << "empty\t" << empty << '\n'
        << "payload_rows\t" << payload_rows << '\n'
        << "redistribution_rows\t" << redistribution_rows << '\n'
        << "redistributions\t" << redistributions << '\n'
        << "evictions\t" << evictions << '\n'
        << "replication_ratio\t" << replication_ratio << '\n';
}

Engine::Engine(Dictionary dict, std::span<const EncodedTriple> triples, EngineOptions opts)
    : dict_(std::move(dict)), opts_(opts),
      cluster_(std::make_unique<Cluster>(opts.cluster, triples, dict_.size())) {
    if (opts_.adaptive)
        adaptivity_ = std::make_unique<AdaptivityController>(*cluster_, opts_.adaptivity);
}

Engine Engine::from_ntriples(std::istream &in, EngineOptions opts) {
    Dictionary dict;
    auto triples = parse_ntriples(in, dict);
    return Engine(std::move(dict), triples, opts);
}

QueryOutcome Engine::run(const QueryGraph &graph) {
    ++clock_;
    QueryOutcome out;
    out.query = encode_query(graph, dict_);
    const EncodedQuery &q = out.query;
    if (q.unsatisfiable) {
        out.rows = BindingTable(q.projection);
        out.mode = ExecMode::Empty;
        return out;
    }
    if (classify(q) == QueryShape::SubjectStar) {
        auto r = execute_parallel(*cluster_, q);
        out.rows = std::move(r.result);
        out.trace = std::move(r.trace);
        out.mode = ExecMode::Parallel;
    } else if (auto sources = adaptivity_ ? adaptivity_->match(q, clock_) : std::nullopt) {
        auto r = execute_parallel(*cluster_, q, *sources);
        out.rows = std::move(r.result);
        out.trace = std::move(r.trace);
        out.mode = ExecMode::ParallelIndexed;
    } else {
        const auto est = gather_estimates(*cluster_, q);
        out.plan = optimize(q, est, cluster_->size());
        auto r = execute_distributed(*cluster_, q, *out.plan);
        out.rows = std::move(r.result);
        out.trace = std::move(r.trace);
        out.mode = ExecMode::Distributed;
    }
    if (adaptivity_)
        out.redistribution = adaptivity_->observe(q, clock_);
    return out;
}

WorkloadSummary Engine::run_workload(const std::vector<std::string> &queries,
                                     const std::function<void(std::size_t, const std::string &)> &on_error) {
    WorkloadSummary s;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        ++s.queries;
        try {
            const auto r = run(queries[i]);
            s.payload_rows += r.trace.payload_rows();
            switch (r.mode) {
            case ExecMode::Empty: ++s.empty; break;
            case ExecMode::Parallel: ++s.parallel; break;
            case ExecMode::ParallelIndexed: ++s.parallel_indexed; break;
            case ExecMode::Distributed: ++s.distributed; break;
            }
            if (r.redistribution) {
                s.redistribution_rows += r.redistribution->rows_moved;
                if (r.redistribution->new_edges > 0)
                    ++s.redistributions;
            }
        } catch (const std::exception &e) {
            ++s.failed;
            if (on_error)
                on_error(i, e.what());
        }
    }
    if (adaptivity_) {
        s.evictions = adaptivity_->eviction_log().size();
        s.replication_ratio = adaptivity_->replication_ratio();
    }
    return s;
}

std::vector<std::vector<std::string>> Engine::decode(const BindingTable &rows) const {
    std::vector<std::vector<std::string>> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<std::string> row;
        for (TermId id : rows.row(r))
            row.push_back(dict_.decode(id));
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace adhash
