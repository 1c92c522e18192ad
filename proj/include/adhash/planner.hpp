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
#include <stdexcept>
#include <string>
#include <vector>

#include "adhash/query.hpp"
#include "adhash/storage.hpp"

namespace adhash {

enum class JoinMode : std::uint8_t { NoComm, HashDistribute, Broadcast };

const char *to_string(JoinMode mode);

class NoSharedVariable : public std::invalid_argument {
public:
    NoSharedVariable() : std::invalid_argument("pattern shares no variable with the joined subquery") {}
};

/// Size of one pattern's match set as seen by the optimizer: total matches and
/// the number of distinct values in each position.
struct PatternEstimate {
    double card = 0;
    double distinct_s = 0;
    double distinct_p = 0;
    double distinct_o = 0;

    double distinct_at(Position pos) const {
        return pos == Position::Subject ? distinct_s : pos == Position::Predicate ? distinct_p : distinct_o;
    }
    /// Average matches per distinct value at `pos` (P_ps, P_po, ...).
    double per_value(Position pos) const {
        const double d = distinct_at(pos);
        return d > 0 ? card / d : 0.0;
    }
};

/// Estimate of a constant-predicate, constant-free pattern straight from the
/// global predicate statistics. Missing predicates estimate to zero.
PatternEstimate estimate_from_stats(const EncodedPattern &tp, const PredicateStats &stats);

inline constexpr double kUnseen = -1.0;

struct DPState {
    std::uint64_t subgraph = 0;
    std::vector<std::size_t> ordering;
    double cost = 0;
    double cum_card = 0;
    std::vector<double> bindings;  // per query variable, kUnseen when not yet bound
    std::optional<std::uint32_t> pinned_subject;
};

struct JoinColumns {
    std::uint32_t var = 0;
    Position position = Position::Subject;
    std::vector<std::uint32_t> residual;
};

struct PlanStep {
    std::size_t pattern = 0;
    JoinMode mode = JoinMode::NoComm;
    std::optional<JoinColumns> join;  // empty for the first step
    double cost = 0;
    double cum_card = 0;
};

struct ExecutionPlan {
    std::vector<PlanStep> steps;
    std::optional<std::uint32_t> pinned_subject;
    double cost = 0;
    double cum_card = 0;

    std::vector<std::size_t> ordering() const;
};

DPState initial_state(const EncodedQuery &q, std::size_t pattern, const std::vector<PatternEstimate> &est);

/// Join column of `next` against the variables bound in `state`: the subject
/// when it is shared, else the object, else the predicate. Other shared
/// variables are returned as residual columns. Throws NoSharedVariable.
JoinColumns join_columns(const DPState &state, const EncodedPattern &next);

JoinMode join_mode(const DPState &state, const EncodedPattern &next);

double expansion_cost(const DPState &state, const EncodedPattern &next, const PatternEstimate &est,
                      std::uint32_t num_workers);

/// Binding and cardinality update after joining `next`. Only bindings and
/// cum_card of the returned state change.
DPState reestimate_bindings(const DPState &state, const EncodedPattern &next, const PatternEstimate &est);

/// Full transition: cost, bindings, cum_card, subgraph and ordering.
DPState expand(const DPState &state, const EncodedQuery &q, std::size_t next, const PatternEstimate &est,
               std::uint32_t num_workers);

/// Plan for a fixed ordering. Every prefix must be connected.
ExecutionPlan plan_for_ordering(const EncodedQuery &q, const std::vector<std::size_t> &ordering,
                                const std::vector<PatternEstimate> &est, std::uint32_t num_workers);

/// Cheapest left-deep plan. Ties break on cum_card, then on the
/// lexicographically smallest ordering.
ExecutionPlan optimize(const EncodedQuery &q, const std::vector<PatternEstimate> &est, std::uint32_t num_workers);

/// Connected ordering for communication-free evaluation on one worker:
/// smallest local match set first.
std::vector<std::size_t> local_plan(const EncodedQuery &q, const std::vector<double> &local_card);

std::string explain(const ExecutionPlan &plan, const EncodedQuery &q);

} // namespace adhash
