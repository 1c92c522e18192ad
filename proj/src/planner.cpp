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

#include "adhash/planner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace adhash {

const char *to_string(JoinMode mode) {
    switch (mode) {
    case JoinMode::NoComm: return "NoComm";
    case JoinMode::HashDistribute: return "HashDistribute";
    case JoinMode::Broadcast: return "Broadcast";
    }
    return "?";
}

std::vector<std::size_t> ExecutionPlan::ordering() const {
    std::vector<std::size_t> out;
    out.reserve(steps.size());
    for (const auto &s : steps)
        out.push_back(s.pattern);
    return out;
}

PatternEstimate estimate_from_stats(const EncodedPattern &tp, const PredicateStats &stats) {
    const PredicateStat *st = tp.p.variable ? nullptr : stats.find(tp.p.value);
    if (!st)
        return {};
    return {static_cast<double>(st->count), static_cast<double>(st->distinct_subjects), 1.0,
            static_cast<double>(st->distinct_objects)};
}

namespace {

constexpr Position kPositions[] = {Position::Subject, Position::Predicate, Position::Object};

bool bound(const DPState &state, std::uint32_t var) { return state.bindings.at(var) != kUnseen; }

// Binding estimate of a variable of `next` before the formulas apply:
// the current estimate when bound, else the pattern's own distinct count.
double prior_binding(const DPState &state, const EncodedPattern &next, const PatternEstimate &est,
                     std::uint32_t var) {
    if (bound(state, var))
        return state.bindings[var];
    double b = std::numeric_limits<double>::infinity();
    for (Position pos : kPositions) {
        const auto &t = next.at(pos);
        if (t.variable && t.value == var)
            b = std::min(b, est.distinct_at(pos));
    }
    return b;
}

Position first_position(const EncodedPattern &tp, std::uint32_t var) {
    for (Position pos : kPositions)
        if (tp.at(pos).variable && tp.at(pos).value == var)
            return pos;
    return Position::Subject;
}

bool shares_bound_variable(const DPState &state, const EncodedPattern &tp) {
    for (auto v : tp.variables())
        if (bound(state, v))
            return true;
    return false;
}

// a makes b redundant: no completion of b can beat the same completion of a.
bool dominates(const DPState &a, const DPState &b) {
    if (a.cost > b.cost || a.cum_card > b.cum_card)
        return false;
    for (std::size_t i = 0; i < a.bindings.size(); ++i)
        if (a.bindings[i] > b.bindings[i])
            return false;
    return a.cost < b.cost || a.cum_card < b.cum_card || a.ordering < b.ordering;
}

bool better_final(const DPState &a, const DPState &b) {
    if (a.cost != b.cost)
        return a.cost < b.cost;
    if (a.cum_card != b.cum_card)
        return a.cum_card < b.cum_card;
    return a.ordering < b.ordering;
}

void check_inputs(const EncodedQuery &q, const std::vector<PatternEstimate> &est) {
    if (q.patterns.empty())
        throw std::invalid_argument("empty query");
    if (q.patterns.size() > 63)
        throw std::invalid_argument("too many triple patterns");
    if (est.size() != q.patterns.size())
        throw std::invalid_argument("one estimate per pattern expected");
}

std::size_t greedy_seed(const EncodedQuery &q, const std::vector<PatternEstimate> &est) {
    std::vector<std::pair<QueryTerm, std::size_t>> out_degree;
    for (const auto &tp : q.patterns) {
        auto it = std::find_if(out_degree.begin(), out_degree.end(), [&](const auto &e) { return e.first == tp.s; });
        if (it == out_degree.end())
            out_degree.emplace_back(tp.s, 1);
        else
            ++it->second;
    }
    const QueryTerm *seed = &out_degree.front().first;
    std::size_t best = 0;
    for (const auto &[term, count] : out_degree)
        if (count > best) {
            best = count;
            seed = &term;
        }
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < q.patterns.size(); ++i)
        if (q.patterns[i].s == *seed && (!pick || est[i].card < est[*pick].card))
            pick = i;
    return *pick;
}

} // namespace

DPState initial_state(const EncodedQuery &q, std::size_t pattern, const std::vector<PatternEstimate> &est) {
    const auto &tp = q.patterns.at(pattern);
    DPState s;
    s.subgraph = std::uint64_t{1} << pattern;
    s.ordering = {pattern};
    s.cum_card = est.at(pattern).card;
    s.bindings.assign(q.variables.size(), kUnseen);
    for (Position pos : kPositions) {
        const auto &t = tp.at(pos);
        if (!t.variable)
            continue;
        const double d = est[pattern].distinct_at(pos);
        double &b = s.bindings[t.value];
        b = b == kUnseen ? d : std::min(b, d);
    }
    if (tp.s.variable)
        s.pinned_subject = tp.s.value;
    return s;
}

JoinColumns join_columns(const DPState &state, const EncodedPattern &next) {
    std::vector<std::uint32_t> shared;
    for (auto v : next.variables())
        if (bound(state, v))
            shared.push_back(v);
    if (shared.empty())
        throw NoSharedVariable();

    JoinColumns jc;
    for (Position pos : {Position::Subject, Position::Object, Position::Predicate}) {
        const auto &t = next.at(pos);
        if (t.variable && bound(state, t.value)) {
            jc.var = t.value;
            jc.position = pos;
            break;
        }
    }
    for (auto v : shared)
        if (v != jc.var)
            jc.residual.push_back(v);
    return jc;
}

JoinMode join_mode(const DPState &state, const EncodedPattern &next) {
    const auto jc = join_columns(state, next);
    if (jc.position != Position::Subject)
        return JoinMode::Broadcast;
    return state.pinned_subject && *state.pinned_subject == jc.var ? JoinMode::NoComm : JoinMode::HashDistribute;
}

double expansion_cost(const DPState &state, const EncodedPattern &next, const PatternEstimate &est,
                      std::uint32_t num_workers) {
    const auto jc = join_columns(state, next);
    const double b = state.bindings[jc.var];
    const double nu = next.variable_count();
    const double n = num_workers;
    switch (join_mode(state, next)) {
    case JoinMode::NoComm:
        return 0;
    case JoinMode::HashDistribute:
        return b + nu * b * est.per_value(Position::Subject);
    case JoinMode::Broadcast:
        return b * n + nu * n * b * est.per_value(jc.position);
    }
    return 0;
}

DPState reestimate_bindings(const DPState &state, const EncodedPattern &next, const PatternEstimate &est) {
    const auto jc = join_columns(state, next);
    DPState out = state;
    const int nu = next.variable_count();
    for (auto v : next.variables()) {
        const double b = prior_binding(state, next, est, v);
        const Position pos = v == jc.var ? jc.position : first_position(next, v);
        double nb;
        if (nu == 1)
            nb = std::min(b, est.card);
        else if (v == jc.var)
            nb = std::min(b, est.distinct_at(pos));
        else
            nb = std::min({b, b * est.per_value(pos), est.distinct_at(pos)});
        out.bindings[v] = nb;
    }
    const bool constant = !next.s.variable || !next.o.variable;
    const double p = constant ? 1.0 : est.per_value(jc.position);
    out.cum_card = state.cum_card * (1.0 + p);
    return out;
}

DPState expand(const DPState &state, const EncodedQuery &q, std::size_t next, const PatternEstimate &est,
               std::uint32_t num_workers) {
    const auto &tp = q.patterns.at(next);
    DPState out = reestimate_bindings(state, tp, est);
    out.cost = state.cost + expansion_cost(state, tp, est, num_workers);
    out.subgraph |= std::uint64_t{1} << next;
    out.ordering.push_back(next);
    return out;
}

ExecutionPlan plan_for_ordering(const EncodedQuery &q, const std::vector<std::size_t> &ordering,
                                const std::vector<PatternEstimate> &est, std::uint32_t num_workers) {
    check_inputs(q, est);
    if (ordering.empty())
        throw std::invalid_argument("empty ordering");
    ExecutionPlan plan;
    DPState state = initial_state(q, ordering.front(), est);
    plan.pinned_subject = state.pinned_subject;
    plan.steps.push_back({ordering.front(), JoinMode::NoComm, std::nullopt, 0, state.cum_card});
    for (std::size_t k = 1; k < ordering.size(); ++k) {
        const auto &tp = q.patterns.at(ordering[k]);
        PlanStep step;
        step.pattern = ordering[k];
        step.join = join_columns(state, tp);
        step.mode = join_mode(state, tp);
        step.cost = expansion_cost(state, tp, est[ordering[k]], num_workers);
        state = expand(state, q, ordering[k], est[ordering[k]], num_workers);
        step.cum_card = state.cum_card;
        plan.steps.push_back(std::move(step));
    }
    plan.cost = state.cost;
    plan.cum_card = state.cum_card;
    return plan;
}

ExecutionPlan optimize(const EncodedQuery &q, const std::vector<PatternEstimate> &est, std::uint32_t num_workers) {
    check_inputs(q, est);
    const std::size_t n = q.patterns.size();

    // Greedy completion from the seed gives the initial bound.
    DPState greedy = initial_state(q, greedy_seed(q, est), est);
    while (greedy.ordering.size() < n) {
        std::optional<DPState> best;
        for (std::size_t j = 0; j < n; ++j) {
            if (greedy.subgraph >> j & 1 || !shares_bound_variable(greedy, q.patterns[j]))
                continue;
            DPState cand = expand(greedy, q, j, est[j], num_workers);
            if (!best || better_final(cand, *best))
                best = std::move(cand);
        }
        if (!best)
            throw DisconnectedQuery();
        greedy = std::move(*best);
    }
    const double min_cost = greedy.cost;

    using Key = std::pair<std::uint64_t, std::uint32_t>;
    constexpr std::uint32_t kNoPin = std::numeric_limits<std::uint32_t>::max();
    auto key_of = [&](const DPState &s) { return Key{s.subgraph, s.pinned_subject.value_or(kNoPin)}; };
    auto insert = [](std::vector<DPState> &frontier, DPState s) {
        for (const auto &f : frontier)
            if (dominates(f, s))
                return;
        std::erase_if(frontier, [&](const DPState &f) { return dominates(s, f); });
        frontier.push_back(std::move(s));
    };

    std::map<Key, std::vector<DPState>> level;
    for (std::size_t i = 0; i < n; ++i) {
        DPState s = initial_state(q, i, est);
        insert(level[key_of(s)], std::move(s));
    }
    for (std::size_t size = 1; size < n; ++size) {
        std::map<Key, std::vector<DPState>> next_level;
        for (const auto &[key, frontier] : level)
            for (const auto &s : frontier)
                for (std::size_t j = 0; j < n; ++j) {
                    if (s.subgraph >> j & 1 || !shares_bound_variable(s, q.patterns[j]))
                        continue;
                    DPState e = expand(s, q, j, est[j], num_workers);
                    if (e.cost > min_cost)
                        continue;
                    insert(next_level[key_of(e)], std::move(e));
                }
        level = std::move(next_level);
    }

    const DPState *best = &greedy;
    for (const auto &[key, frontier] : level)
        for (const auto &s : frontier)
            if (better_final(s, *best))
                best = &s;
    return plan_for_ordering(q, best->ordering, est, num_workers);
}

std::vector<std::size_t> local_plan(const EncodedQuery &q, const std::vector<double> &local_card) {
    const std::size_t n = q.patterns.size();
    std::vector<std::size_t> order;
    std::vector<bool> used(n, false), var_bound(q.variables.size(), false);
    while (order.size() < n) {
        std::optional<std::size_t> pick;
        bool pick_connected = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i])
                continue;
            bool connected = order.empty();
            for (auto v : q.patterns[i].variables())
                connected = connected || var_bound[v];
            if (!pick || (connected && !pick_connected) ||
                (connected == pick_connected && local_card[i] < local_card[*pick])) {
                pick = i;
                pick_connected = connected;
            }
        }
        used[*pick] = true;
        order.push_back(*pick);
        for (auto v : q.patterns[*pick].variables())
            var_bound[v] = true;
    }
    return order;
}

std::string explain(const ExecutionPlan &plan, const EncodedQuery &q) {
    std::ostringstream out;
    out << "plan cost=" << plan.cost << " cum_card=" << plan.cum_card << " pinned="
        << (plan.pinned_subject ? "?" + q.variables[*plan.pinned_subject] : std::string("-")) << '\n';
    out << "step\tpattern\tmode\tjoin\tcost\tcum_card\n";
    for (std::size_t k = 0; k < plan.steps.size(); ++k) {
        const auto &s = plan.steps[k];
        out << k + 1 << "\tq" << s.pattern + 1 << '\t' << to_string(s.mode) << '\t'
            << (s.join ? "?" + q.variables[s.join->var] : std::string("-")) << '\t' << s.cost << '\t' << s.cum_card
            << '\n';
    }
    return out.str();
}

} // namespace adhash
