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
#include <optional>
#include <ostream>
#include <vector>

#include "adhash/bindings.hpp"
#include "adhash/cluster.hpp"
#include "adhash/planner.hpp"

namespace adhash {

struct StepTrace {
    std::size_t step = 0;
    std::size_t pattern = 0;
    JoinMode mode = JoinMode::NoComm;
    std::uint64_t rows_sent = 0;      // projected values shipped to other workers
    std::uint64_t rows_received = 0;  // candidate triples shipped back
    std::uint64_t rows_projected = 0; // distinct join values summed over senders
    std::uint64_t rows_routed = 0;    // projected values delivered, local copies included
    bool hash_routed = true;          // every hashed value reached its owner only
};

struct ExecutionTrace {
    std::vector<StepTrace> steps;

    std::uint64_t payload_rows() const;
    /// TSV: step, mode, rows_sent, rows_received.
    void write_tsv(std::ostream &out) const;
};

struct DistributedResult {
    std::vector<BindingTable> per_worker;  // before projection
    BindingTable result;                   // projected, deduplicated union
    ExecutionTrace trace;
};

/// Runs `plan` over the workers' main indexes. Rows never leave the worker
/// they were produced on; only join columns and candidate triples travel.
DistributedResult execute_distributed(Cluster &cluster, const EncodedQuery &q, const ExecutionPlan &plan);

/// One distributed semi-join step over per-worker tables.
void dsj_step(Cluster &cluster, std::vector<BindingTable> &tables, const EncodedPattern &next, const JoinColumns &jc,
              JoinMode mode, StepTrace &trace);

/// Joins `left` with the matches of `next` in `store`.
BindingTable local_join_step(const BindingTable &left, const EncodedPattern &next, const WorkerStore &store);

/// Matches of one pattern, one column per distinct variable.
BindingTable match_table(const EncodedPattern &tp, const WorkerStore &store);

/// Where a pattern's triples come from in parallel mode: the main index, or
/// a replica storage module.
using PatternSource = std::optional<std::uint32_t>;

struct ParallelResult {
    std::vector<BindingTable> per_worker;
    BindingTable result;
    ExecutionTrace trace;
};

/// Communication-free evaluation: each worker plans locally and answers from
/// its own data. `sources` is empty (all main) or has one entry per pattern.
ParallelResult execute_parallel(Cluster &cluster, const EncodedQuery &q, const std::vector<PatternSource> &sources = {});

/// Optimizer inputs. Constant-free patterns with a constant predicate use
/// the global statistics; the rest are counted by the workers.
std::vector<PatternEstimate> gather_estimates(Cluster &cluster, const EncodedQuery &q);

} // namespace adhash
