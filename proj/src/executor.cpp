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

#include "adhash/executor.hpp"

#include <algorithm>
#include <unordered_set>

#include "adhash/match.hpp"

namespace adhash {

std::uint64_t ExecutionTrace::payload_rows() const {
    std::uint64_t total = 0;
    for (const auto &s : steps)
        total += s.rows_sent + s.rows_received;
    return total;
}

void ExecutionTrace::write_tsv(std::ostream &out) const {
    out << "step\tmode\trows_sent\trows_received\n";
    for (const auto &s : steps)
        out << s.step << '\t' << to_string(s.mode) << '\t' << s.rows_sent << '\t' << s.rows_received << '\n';
}

namespace {

TermId value_at(const EncodedTriple &t, Position pos) {
    return pos == Position::Subject ? t.s : pos == Position::Predicate ? t.p : t.o;
}

Position first_position(const EncodedPattern &tp, std::uint32_t var) {
    for (Position pos : {Position::Subject, Position::Predicate, Position::Object})
        if (tp.at(pos).variable && tp.at(pos).value == var)
            return pos;
    return Position::Subject;
}

void set_probe(Probe &probe, Position pos, TermId v) {
    (pos == Position::Subject ? probe.s : pos == Position::Predicate ? probe.p : probe.o) = v;
}

const WorkerStore &empty_store() {
    static const WorkerStore store;
    return store;
}

BindingTable gather_results(Cluster &cluster, std::vector<BindingTable> &tables,
                            const std::vector<std::uint32_t> &projection) {
    Transport &net = cluster.transport();
    const WorkerId master = net.master();
    cluster.run_phase([&](Worker &w) {
        BindingTable mine = tables[w.id].project(projection);
        Message m;
        m.kind = MessageKind::LocalResults;
        m.from = w.id;
        m.to = master;
        m.tag = static_cast<std::uint32_t>(mine.size());
        m.values = mine.cells();
        net.send(std::move(m));
    });
    BindingTable out(projection);
    for (auto &m : net.take_inbox(master))
        out.append(BindingTable::from_cells(projection, std::move(m.values), m.tag));
    out.deduplicate();
    return out;
}

} // namespace

BindingTable match_table(const EncodedPattern &tp, const WorkerStore &store) {
    const auto vars = tp.variables();
    BindingTable out(vars);
    std::vector<Position> where;
    for (auto v : vars)
        where.push_back(first_position(tp, v));
    std::vector<TermId> row(vars.size());
    for_each_match(store, tp, Probe{}, [&](const EncodedTriple &t) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            row[i] = value_at(t, where[i]);
        out.add_row(row);
    });
    return out;
}

BindingTable local_join_step(const BindingTable &left, const EncodedPattern &next, const WorkerStore &store) {
    std::vector<std::uint32_t> columns = left.columns();
    std::vector<Position> fresh;
    for (auto v : next.variables())
        if (!left.column_of(v)) {
            columns.push_back(v);
            fresh.push_back(first_position(next, v));
        }
    std::vector<std::pair<Position, std::size_t>> bound;
    for (Position pos : {Position::Subject, Position::Predicate, Position::Object})
        if (next.at(pos).variable)
            if (auto c = left.column_of(next.at(pos).value))
                bound.emplace_back(pos, *c);

    BindingTable out(columns);
    std::vector<TermId> row(columns.size());
    const std::size_t a = left.arity();
    for (std::size_t r = 0; r < left.size(); ++r) {
        const auto lrow = left.row(r);
        Probe probe;
        for (const auto &[pos, col] : bound)
            set_probe(probe, pos, lrow[col]);
        std::copy(lrow.begin(), lrow.end(), row.begin());
        for_each_match(store, next, probe, [&](const EncodedTriple &t) {
            for (std::size_t i = 0; i < fresh.size(); ++i)
                row[a + i] = value_at(t, fresh[i]);
            out.add_row(row);
        });
    }
    return out;
}

void dsj_step(Cluster &cluster, std::vector<BindingTable> &tables, const EncodedPattern &next, const JoinColumns &jc,
              JoinMode mode, StepTrace &trace) {
    const std::uint32_t n = cluster.size();
    Transport &net = cluster.transport();
    std::vector<std::uint64_t> projected(n), sent(n), routed(n), replied(n);
    std::vector<char> misrouted(n, 0);

    // Project the join column and ship it.
    cluster.run_phase([&](Worker &w) {
        const auto col = tables[w.id].column_of(jc.var);
        if (!col)
            throw std::logic_error("join column is not bound");
        const auto values = tables[w.id].distinct(*col);
        projected[w.id] = values.size();
        if (values.empty())
            return;
        if (mode == JoinMode::HashDistribute) {
            std::vector<std::vector<TermId>> buckets(n);
            for (TermId v : values)
                buckets[cluster.owner(v)].push_back(v);
            for (WorkerId to = 0; to < n; ++to) {
                if (buckets[to].empty())
                    continue;
                if (to != w.id)
                    sent[w.id] += buckets[to].size();
                net.send({MessageKind::ProjectionHash, w.id, to, 0, std::move(buckets[to]), {}});
            }
        } else {
            for (WorkerId to = 0; to < n; ++to) {
                if (to != w.id)
                    sent[w.id] += values.size();
                net.send({MessageKind::ProjectionBroadcast, w.id, to, 0, values, {}});
            }
        }
    });

    // Semi-join against the local indexes and reply with candidates.
    cluster.run_phase([&](Worker &w) {
        for (auto &m : net.take_inbox(w.id)) {
            std::vector<EncodedTriple> candidates;
            for (TermId v : m.values) {
                if (m.kind == MessageKind::ProjectionHash && cluster.owner(v) != w.id)
                    misrouted[w.id] = 1;
                Probe probe;
                set_probe(probe, jc.position, v);
                for_each_match(w.main, next, probe, [&](const EncodedTriple &t) { candidates.push_back(t); });
            }
            routed[w.id] += m.values.size();
            if (candidates.empty())
                continue;
            if (m.from != w.id)
                replied[w.id] += candidates.size();
            net.send({MessageKind::CandidateTriples, w.id, m.from, 0, {}, std::move(candidates)});
        }
    });

    // Finalize with a local hash join on the received candidates.
    cluster.run_phase([&](Worker &w) {
        WorkerStore received;
        for (auto &m : net.take_inbox(w.id))
            for (const auto &t : m.triples)
                received.insert(t);
        tables[w.id] = local_join_step(tables[w.id], next, received);
    });

    trace.mode = mode;
    for (std::uint32_t w = 0; w < n; ++w) {
        trace.rows_projected += projected[w];
        trace.rows_sent += sent[w];
        trace.rows_routed += routed[w];
        trace.rows_received += replied[w];
        if (misrouted[w])
            trace.hash_routed = false;
    }
}

DistributedResult execute_distributed(Cluster &cluster, const EncodedQuery &q, const ExecutionPlan &plan) {
    if (plan.steps.empty())
        throw std::invalid_argument("empty plan");
    DistributedResult res;
    std::vector<BindingTable> tables(cluster.size());

    const auto &first = q.patterns.at(plan.steps.front().pattern);
    cluster.run_phase([&](Worker &w) { tables[w.id] = match_table(first, w.main); });
    res.trace.steps.push_back({0, plan.steps.front().pattern, JoinMode::NoComm});

    for (std::size_t k = 1; k < plan.steps.size(); ++k) {
        const auto &step = plan.steps[k];
        const auto &next = q.patterns.at(step.pattern);
        StepTrace st{k, step.pattern, step.mode};
        if (step.mode == JoinMode::NoComm) {
            cluster.run_phase([&](Worker &w) { tables[w.id] = local_join_step(tables[w.id], next, w.main); });
        } else {
            dsj_step(cluster, tables, next, *step.join, step.mode, st);
        }
        res.trace.steps.push_back(st);
    }
    res.per_worker = tables;
    res.result = gather_results(cluster, tables, q.projection);
    return res;
}

ParallelResult execute_parallel(Cluster &cluster, const EncodedQuery &q, const std::vector<PatternSource> &sources) {
    if (!sources.empty() && sources.size() != q.patterns.size())
        throw std::invalid_argument("one source per pattern expected");
    Transport &net = cluster.transport();
    const WorkerId master = net.master();
    for (WorkerId w = 0; w < cluster.size(); ++w)
        net.send({MessageKind::PlanBroadcast, master, w, static_cast<std::uint32_t>(q.patterns.size()), {}, {}});
    net.deliver();

    ParallelResult res;
    std::vector<BindingTable> tables(cluster.size());
    cluster.run_phase([&](Worker &w) {
        net.take_inbox(w.id);
        std::vector<const WorkerStore *> store(q.patterns.size(), &w.main);
        if (!sources.empty())
            for (std::size_t i = 0; i < sources.size(); ++i)
                if (sources[i]) {
                    auto it = w.modules.find(*sources[i]);
                    store[i] = it == w.modules.end() ? &empty_store() : &it->second;
                }
        std::vector<double> card(q.patterns.size());
        for (std::size_t i = 0; i < q.patterns.size(); ++i)
            card[i] = static_cast<double>(local_cardinality(*store[i], q.patterns[i]));
        const auto order = local_plan(q, card);
        BindingTable t = match_table(q.patterns[order.front()], *store[order.front()]);
        for (std::size_t k = 1; k < order.size() && !t.empty(); ++k)
            t = local_join_step(t, q.patterns[order[k]], *store[order[k]]);
        if (t.empty()) {
            std::vector<std::uint32_t> all(q.variables.size());
            for (std::uint32_t v = 0; v < all.size(); ++v)
                all[v] = v;
            t = BindingTable(all);
        }
        tables[w.id] = std::move(t);
    });
    res.trace.steps.push_back({0, 0, JoinMode::NoComm});
    res.per_worker = tables;
    res.result = gather_results(cluster, tables, q.projection);
    return res;
}

std::vector<PatternEstimate> gather_estimates(Cluster &cluster, const EncodedQuery &q) {
    std::vector<PatternEstimate> est(q.patterns.size());
    Transport &net = cluster.transport();
    const WorkerId master = net.master();
    bool probed = false;
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
        const auto &tp = q.patterns[i];
        if (!tp.p.variable && tp.s.variable && tp.o.variable) {
            est[i] = estimate_from_stats(tp, cluster.global_stats());
            continue;
        }
        probed = true;
        for (WorkerId w = 0; w < cluster.size(); ++w)
            net.send({MessageKind::CardinalityProbe, master, w, static_cast<std::uint32_t>(i),
                      {tp.s.variable, tp.s.value, tp.p.variable, tp.p.value, tp.o.variable, tp.o.value},
                      {}});
    }
    if (!probed)
        return est;
    net.deliver();
    cluster.run_phase([&](Worker &w) {
        for (auto &m : net.take_inbox(w.id)) {
            const auto &v = m.values;
            const EncodedPattern tp{{v[0] != 0, v[1]}, {v[2] != 0, v[3]}, {v[4] != 0, v[5]}};
            std::unordered_set<TermId> s, p, o;
            std::uint32_t count = 0;
            for_each_match(w.main, tp, Probe{}, [&](const EncodedTriple &t) {
                ++count;
                s.insert(t.s);
                p.insert(t.p);
                o.insert(t.o);
            });
            net.send({MessageKind::CardinalityReply, w.id, master, m.tag,
                      {count, static_cast<TermId>(s.size()), static_cast<TermId>(p.size()),
                       static_cast<TermId>(o.size())},
                      {}});
        }
    });
    for (const auto &m : net.take_inbox(master)) {
        auto &e = est[m.tag];
        e.card += m.values[0];
        e.distinct_s += m.values[1];
        e.distinct_p += m.values[2];
        e.distinct_o += m.values[3];
    }
    return est;
}

} // namespace adhash
