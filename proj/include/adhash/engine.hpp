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

#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "adhash/adaptivity.hpp"
#include "adhash/cluster.hpp"
#include "adhash/executor.hpp"
#include "adhash/planner.hpp"
#include "adhash/query.hpp"
#include "adhash/rdf.hpp"

namespace adhash {

enum class ExecMode : std::uint8_t {
    Empty,            // a constant is not in the data
    Parallel,         // subject star over the main indexes
    ParallelIndexed,  // answered from the replica index
    Distributed,
};

const char *to_string(ExecMode mode);

struct EngineOptions {
    ClusterConfig cluster;
    bool adaptive = false;
    AdaptivityConfig adaptivity;
};

struct QueryOutcome {
    EncodedQuery query;
    BindingTable rows;  // projected, deduplicated
    ExecMode mode = ExecMode::Empty;
    std::optional<ExecutionPlan> plan;
    ExecutionTrace trace;
    std::optional<RedistributionReport> redistribution;
};

struct WorkloadSummary {
    std::size_t queries = 0;
    std::size_t failed = 0;
    std::size_t parallel = 0;
    std::size_t parallel_indexed = 0;
    std::size_t distributed = 0;
    std::size_t empty = 0;
    std::uint64_t payload_rows = 0;
    std::uint64_t redistribution_rows = 0;
    std::size_t redistributions = 0;
    std::size_t evictions = 0;
    double replication_ratio = 0;

    /// Deterministic summary lines (no timings).
    void write(std::ostream &out) const;
};

class Engine {
public:
    Engine(Dictionary dict, std::span<const EncodedTriple> triples, EngineOptions opts);
    static Engine from_ntriples(std::istream &in, EngineOptions opts);

    Engine(Engine &&) noexcept = default;
    Engine &operator=(Engine &&) noexcept = default;

    QueryOutcome run(const QueryGraph &q);
    QueryOutcome run(std::string_view text) { return run(parse_query(text)); }

    /// Runs each query, continuing past failures, which are reported through
    /// `on_error` when given.
    WorkloadSummary run_workload(const std::vector<std::string> &queries,
                                 const std::function<void(std::size_t, const std::string &)> &on_error = {});

    std::vector<std::vector<std::string>> decode(const BindingTable &rows) const;

    const Dictionary &dictionary() const noexcept { return dict_; }
    Cluster &cluster() noexcept { return *cluster_; }
    const Cluster &cluster() const noexcept { return *cluster_; }
    AdaptivityController *adaptivity() noexcept { return adaptivity_.get(); }
    const AdaptivityController *adaptivity() const noexcept { return adaptivity_.get(); }
    const EngineOptions &options() const noexcept { return opts_; }
    std::uint64_t clock() const noexcept { return clock_; }

private:
    Dictionary dict_;
    EngineOptions opts_;
    std::unique_ptr<Cluster> cluster_;
    std::unique_ptr<AdaptivityController> adaptivity_;
    std::uint64_t clock_ = 0;
};

} // namespace adhash
