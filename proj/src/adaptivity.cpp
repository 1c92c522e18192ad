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

#include "adhash/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "adhash/match.hpp"

namespace adhash {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

// ---- vertex scores ---------------------------------------------------------

std::set<TermId> chauvenet_outliers(const std::vector<std::pair<TermId, double>> &samples) {
    std::set<TermId> out;
    const double n = static_cast<double>(samples.size());
    if (samples.size() < 2)
        return out;
    double mean = 0;
    for (const auto &[p, x] : samples)
        mean += x;
    mean /= n;
    double var = 0;
    for (const auto &[p, x] : samples)
        var += (x - mean) * (x - mean);
    const double sigma = std::sqrt(var / (n - 1));
    if (sigma == 0)
        return out;
    for (const auto &[p, x] : samples)
        if (x > mean && n * std::erfc((x - mean) / (sigma * std::sqrt(2.0))) < 0.5)
            out.insert(p);
    return out;
}

ScoreTable score_table(const PredicateStats &stats, bool filter) {
    ScoreTable table;
    std::vector<std::pair<TermId, double>> subj, obj;
    for (const auto &[p, st] : stats.by_predicate) {
        table[p] = {st.subject_score(), st.object_score()};
        subj.emplace_back(p, st.subject_score());
        obj.emplace_back(p, st.object_score());
    }
    if (filter) {
        auto flagged = chauvenet_outliers(subj);
        flagged.merge(chauvenet_outliers(obj));
        for (TermId p : flagged)
            table[p] = {kNegInf, kNegInf};
    }
    return table;
}

std::size_t VertexScores::index_of(const QueryTerm &t) const {
    auto it = std::find(vertices.begin(), vertices.end(), t);
    if (it == vertices.end())
        throw std::out_of_range("term is not a query vertex");
    return static_cast<std::size_t>(it - vertices.begin());
}

std::size_t VertexScores::core() const {
    if (scores.empty())
        throw std::logic_error("no vertices");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best])
            best = i;
    return best;
}

VertexScores score_vertices(const EncodedQuery &q, const ScoreTable &table) {
    VertexScores vs;
    auto slot = [&](const QueryTerm &t) {
        auto it = std::find(vs.vertices.begin(), vs.vertices.end(), t);
        if (it != vs.vertices.end())
            return static_cast<std::size_t>(it - vs.vertices.begin());
        vs.vertices.push_back(t);
        vs.scores.push_back(kNegInf);
        return vs.vertices.size() - 1;
    };
    for (const auto &tp : q.patterns) {
        const std::size_t s = slot(tp.s);
        const std::size_t o = slot(tp.o);
        if (tp.p.variable)
            continue;
        auto it = table.find(tp.p.value);
        if (it == table.end())
            continue;
        vs.scores[s] = std::max(vs.scores[s], it->second.subject);
        vs.scores[o] = std::max(vs.scores[o], it->second.object);
    }
    return vs;
}

// ---- redistribution trees --------------------------------------------------

const char *to_string(EdgeDir dir) { return dir == EdgeDir::Outgoing ? "out" : "in"; }

namespace {

template <typename Tree>
std::vector<std::size_t> children_of(const Tree &t, std::size_t node) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < t.edges.size(); ++i)
        if (t.edges[i].parent == node)
            out.push_back(i);
    return out;
}

} // namespace

std::vector<std::size_t> RedistributionTree::children(std::size_t node) const { return children_of(*this, node); }
std::vector<std::size_t> PatternTree::children(std::size_t node) const { return children_of(*this, node); }

RedistributionTree build_redistribution_tree(const EncodedQuery &q, const VertexScores &scores) {
    if (q.has_variable_predicate())
        throw std::invalid_argument("redistribution trees need constant predicates");
    const std::size_t nv = scores.vertices.size();
    std::vector<std::vector<std::size_t>> incident(nv);
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
        const auto s = scores.index_of(q.patterns[i].s);
        const auto o = scores.index_of(q.patterns[i].o);
        incident[s].push_back(i);
        if (o != s)
            incident[o].push_back(i);
    }

    struct Item {
        double score;
        TermId pred;
        std::size_t vertex;
        std::size_t seq;
        std::size_t node;
    };
    auto lower = [](const Item &a, const Item &b) {
        if (a.score != b.score)
            return a.score < b.score;
        if (a.pred != b.pred)
            return a.pred > b.pred;
        if (a.vertex != b.vertex)
            return a.vertex > b.vertex;
        return a.seq > b.seq;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(lower)> pending_edges(lower);

    RedistributionTree t;
    std::vector<bool> used(q.patterns.size(), false), visited(nv, false), pending(nv, false);
    std::size_t seq = 0;
    const std::size_t core = scores.core();
    t.nodes.push_back(scores.vertices[core]);
    t.duplicate.push_back(false);
    visited[core] = true;

    auto explore = [&](std::size_t node, std::size_t vertex) {
        for (std::size_t i : incident[vertex]) {
            if (used[i])
                continue;
            used[i] = true;
            const auto &tp = q.patterns[i];
            const bool out = scores.index_of(tp.s) == vertex;
            const std::size_t nbr = scores.index_of(out ? tp.o : tp.s);
            const bool dup = visited[nbr] || pending[nbr];
            t.nodes.push_back(scores.vertices[nbr]);
            t.duplicate.push_back(dup);
            const std::size_t child = t.nodes.size() - 1;
            t.edges.push_back({node, child, tp.p.value, out ? EdgeDir::Outgoing : EdgeDir::Incoming, i});
            if (!dup) {
                pending[nbr] = true;
                pending_edges.push({scores.scores[nbr], tp.p.value, nbr, seq++, child});
            }
        }
    };

    explore(0, core);
    while (!pending_edges.empty()) {
        const Item it = pending_edges.top();
        pending_edges.pop();
        pending[it.vertex] = false;
        visited[it.vertex] = true;
        explore(it.node, it.vertex);
    }
    return t;
}

PatternTree to_pattern_tree(const RedistributionTree &t) {
    PatternTree p;
    for (const auto &n : t.nodes)
        p.labels.push_back(n.variable ? std::nullopt : std::optional<TermId>(n.value));
    p.edges = t.edges;
    return p;
}

// ---- heat map --------------------------------------------------------------

void MajorityVote::add(std::optional<TermId> x) {
    if (count == 0) {
        candidate = x;
        count = 1;
    } else if (candidate == x) {
        ++count;
    } else {
        --count;
    }
}

std::optional<TermId> HeatVertex::dominant() const {
    if (!vote.candidate)
        return std::nullopt;
    auto it = constants.find(*vote.candidate);
    if (it != constants.end() && it->second * 2 > visits)
        return it->first;
    return std::nullopt;
}

HeatMap::HeatMap() : vertices_(1), out_(1) {}

std::optional<std::size_t> HeatMap::find_edge(std::size_t parent, TermId pred, EdgeDir dir) const {
    for (auto e : out_.at(parent))
        if (edges_[e].pred == pred && edges_[e].dir == dir)
            return e;
    return std::nullopt;
}

void HeatMap::record(const RedistributionTree &t) {
    auto visit = [&](std::size_t v, const QueryTerm &term) {
        auto &hv = vertices_[v];
        ++hv.visits;
        if (term.variable) {
            hv.vote.add(std::nullopt);
        } else {
            ++hv.constants[term.value];
            hv.vote.add(term.value);
        }
    };
    std::vector<std::size_t> where(t.nodes.size(), 0);
    std::set<std::size_t> counted;
    visit(0, t.nodes[0]);
    for (const auto &e : t.edges) {
        const std::size_t hp = where[e.parent];
        auto he = find_edge(hp, e.pred, e.dir);
        if (!he) {
            vertices_.emplace_back();
            out_.emplace_back();
            edges_.push_back({hp, vertices_.size() - 1, e.pred, e.dir, 0});
            he = edges_.size() - 1;
            out_[hp].push_back(*he);
        }
        if (counted.insert(*he).second)
            ++edges_[*he].count;
        where[e.child] = edges_[*he].child;
        visit(where[e.child], t.nodes[e.child]);
    }
}

PatternTree HeatMap::hot_region(std::uint64_t threshold) const {
    PatternTree p;
    p.labels.push_back(vertices_[0].dominant());
    std::vector<std::pair<std::size_t, std::size_t>> frontier = {{0, 0}};  // heat vertex, tree node
    for (std::size_t k = 0; k < frontier.size(); ++k) {
        const auto [hv, node] = frontier[k];
        for (auto e : out_[hv]) {
            const auto &he = edges_[e];
            if (he.count < threshold)
                continue;
            p.labels.push_back(vertices_[he.child].dominant());
            const std::size_t child = p.labels.size() - 1;
            p.edges.push_back({node, child, he.pred, he.dir, 0});
            frontier.emplace_back(he.child, child);
        }
    }
    return p;
}

// ---- pattern index ---------------------------------------------------------

namespace {

bool compatible(const std::optional<TermId> &label, const QueryTerm &term) {
    return !label || (!term.variable && term.value == *label);
}

} // namespace

std::optional<std::uint32_t> PatternIndex::find_root(std::optional<TermId> label) const {
    for (auto r : roots_)
        if (nodes_[r].alive && nodes_[r].label == label)
            return r;
    return std::nullopt;
}

std::uint32_t PatternIndex::add_root(std::optional<TermId> label) {
    nodes_.push_back({label, std::nullopt, {}, true});
    const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
    roots_.push_back(id);
    return id;
}

std::optional<std::uint32_t> PatternIndex::find_child(std::uint32_t node, TermId pred, EdgeDir dir,
                                                      std::optional<TermId> label) const {
    for (auto e : nodes_.at(node).child_edges) {
        const auto &pe = edges_[e];
        if (pe.alive && pe.pred == pred && pe.dir == dir && nodes_[pe.child].label == label)
            return e;
    }
    return std::nullopt;
}

std::uint32_t PatternIndex::add_edge(std::uint32_t parent, TermId pred, EdgeDir dir, std::optional<TermId> label,
                                     std::uint64_t now) {
    const auto eid = static_cast<std::uint32_t>(edges_.size());
    nodes_.push_back({label, eid, {}, true});
    const auto child = static_cast<std::uint32_t>(nodes_.size() - 1);
    PatternEdge e;
    e.id = eid;
    e.parent = parent;
    e.child = child;
    e.pred = pred;
    e.dir = dir;
    e.last_access = now;
    e.root_level = !nodes_.at(parent).parent_edge.has_value();
    edges_.push_back(e);
    nodes_[parent].child_edges.push_back(eid);
    return eid;
}

std::vector<std::uint32_t> PatternIndex::subtree(std::uint32_t edge) const {
    std::vector<std::uint32_t> out = {edge};
    for (std::size_t k = 0; k < out.size(); ++k)
        for (auto c : nodes_[edges_[out[k]].child].child_edges)
            if (edges_[c].alive)
                out.push_back(c);
    return out;
}

std::vector<std::uint32_t> PatternIndex::remove_subtree(std::uint32_t edge) {
    auto ids = subtree(edge);
    for (auto id : ids) {
        edges_[id].alive = false;
        nodes_[edges_[id].child].alive = false;
    }
    auto &siblings = nodes_[edges_[edge].parent].child_edges;
    std::erase(siblings, edge);
    return ids;
}

std::vector<std::uint32_t> PatternIndex::alive_edges() const {
    std::vector<std::uint32_t> out;
    for (const auto &e : edges_)
        if (e.alive)
            out.push_back(e.id);
    return out;
}

std::size_t PatternIndex::size() const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [](const PatternEdge &e) { return e.alive; }));
}

bool PatternIndex::match_node(const RedistributionTree &t, std::size_t qnode, std::uint32_t pnode,
                              std::vector<std::uint32_t> &mapping) const {
    for (auto ei : t.children(qnode)) {
        const auto &qe = t.edges[ei];
        bool ok = false;
        // Constant-labelled candidates first: their modules are smaller.
        for (int pass = 0; pass < 2 && !ok; ++pass)
            for (auto pe_id : nodes_[pnode].child_edges) {
                const auto &pe = edges_[pe_id];
                const auto &label = nodes_[pe.child].label;
                if (!pe.alive || pe.pred != qe.pred || pe.dir != qe.dir || label.has_value() != (pass == 0))
                    continue;
                if (!compatible(label, t.nodes[qe.child]))
                    continue;
                if (match_node(t, qe.child, pe.child, mapping)) {
                    mapping[ei] = pe_id;
                    ok = true;
                    break;
                }
            }
        if (!ok)
            return false;
    }
    return true;
}

std::optional<std::vector<std::uint32_t>> PatternIndex::match(const RedistributionTree &t,
                                                              std::optional<std::uint64_t> now) {
    if (t.edges.empty())
        return std::nullopt;
    for (int pass = 0; pass < 2; ++pass)
        for (auto r : roots_) {
            const auto &root = nodes_[r];
            if (!root.alive || root.label.has_value() != (pass == 0) || !compatible(root.label, t.nodes[0]))
                continue;
            std::vector<std::uint32_t> mapping(t.edges.size());
            if (!match_node(t, 0, r, mapping))
                continue;
            if (now)
                for (auto e : mapping)
                    edges_[e].last_access = *now;
            return mapping;
        }
    return std::nullopt;
}

bool PatternIndex::contains(const PatternTree &p) const {
    auto root = find_root(p.labels.at(0));
    if (!root)
        return p.edges.empty();
    std::vector<std::optional<std::uint32_t>> node(p.labels.size());
    node[0] = *root;
    for (const auto &e : p.edges) {
        if (!node[e.parent])
            return false;
        auto pe = find_child(*node[e.parent], e.pred, e.dir, p.labels[e.child]);
        if (!pe)
            return false;
        node[e.child] = edges_[*pe].child;
    }
    return true;
}

void PatternIndex::dump(std::ostream &out, const Dictionary &dict) const {
    auto label = [&](const std::optional<TermId> &l) { return l ? dict.decode(*l) : std::string("?"); };
    std::function<void(std::uint32_t, int)> walk = [&](std::uint32_t node, int depth) {
        for (auto e : nodes_[node].child_edges) {
            const auto &pe = edges_[e];
            if (!pe.alive)
                continue;
            out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << "#" << pe.id << ' ' << dict.decode(pe.pred)
                << " (" << to_string(pe.dir) << ") " << label(nodes_[pe.child].label) << " last=" << pe.last_access
                << '\n';
            walk(pe.child, depth + 1);
        }
    };
    for (auto r : roots_) {
        if (!nodes_[r].alive || nodes_[r].child_edges.empty())
            continue;
        out << "root " << label(nodes_[r].label) << '\n';
        walk(r, 1);
    }
}

// ---- controller ------------------------------------------------------------

namespace {

// Single-edge pattern with the parent as variable 0 and the child as 1.
EncodedPattern edge_pattern(TermId pred, EdgeDir dir, std::optional<TermId> parent, std::optional<TermId> child) {
    auto term = [](std::optional<TermId> label, std::uint32_t var) {
        return label ? QueryTerm::constant(*label) : QueryTerm::var(var);
    };
    const QueryTerm p = term(parent, 0), c = term(child, 1);
    return dir == EdgeDir::Outgoing ? EncodedPattern{p, QueryTerm::constant(pred), c}
                                    : EncodedPattern{c, QueryTerm::constant(pred), p};
}

std::string signature(const PatternTree &p) {
    std::ostringstream s;
    for (const auto &l : p.labels)
        s << (l ? std::to_string(*l) : "?") << ',';
    for (const auto &e : p.edges)
        s << e.parent << '-' << e.pred << (e.dir == EdgeDir::Outgoing ? '>' : '<') << e.child << ';';
    return s.str();
}

// Root-level branches of a pattern, each as its own tree.
std::vector<PatternTree> split_branches(const PatternTree &p) {
    std::vector<PatternTree> out;
    for (auto first : p.children(0)) {
        PatternTree b;
        b.labels.push_back(p.labels[0]);
        std::vector<std::pair<std::size_t, std::size_t>> stack = {{first, 0}};  // edge, new parent
        for (std::size_t k = 0; k < stack.size(); ++k) {
            const auto [ei, parent] = stack[k];
            const auto &e = p.edges[ei];
            b.labels.push_back(p.labels[e.child]);
            const std::size_t child = b.labels.size() - 1;
            b.edges.push_back({parent, child, e.pred, e.dir, e.pattern});
            for (auto c : p.children(e.child))
                stack.emplace_back(c, child);
        }
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace

AdaptivityController::AdaptivityController(Cluster &cluster, AdaptivityConfig cfg)
    : cluster_(cluster), cfg_(cfg), scores_(score_table(cluster.global_stats())) {}

RedistributionTree AdaptivityController::tree_for(const EncodedQuery &q) const {
    return build_redistribution_tree(q, score_vertices(q, scores_));
}

bool AdaptivityController::eligible(const EncodedQuery &q) {
    return !q.unsatisfiable && !q.patterns.empty() && !q.has_variable_predicate() &&
           classify(q) == QueryShape::General;
}

std::optional<std::vector<PatternSource>> AdaptivityController::match(const EncodedQuery &q, std::uint64_t now) {
    if (!eligible(q) || pi_.empty())
        return std::nullopt;
    const auto tree = tree_for(q);
    auto mapping = pi_.match(tree, now);
    if (!mapping)
        return std::nullopt;
    std::vector<PatternSource> sources(q.patterns.size());
    for (std::size_t i = 0; i < tree.edges.size(); ++i) {
        const auto &pe = pi_.edge((*mapping)[i]);
        if (pe.has_storage())
            sources[tree.edges[i].pattern] = pe.id;
    }
    return sources;
}

std::optional<RedistributionReport> AdaptivityController::observe(const EncodedQuery &q, std::uint64_t now) {
    if (!eligible(q))
        return std::nullopt;
    heat_.record(tree_for(q));
    const auto region = heat_.hot_region(cfg_.freq_threshold);
    std::optional<RedistributionReport> total;
    for (const auto &branch : split_branches(region)) {
        if (pi_.contains(branch) || rejected_.count(signature(branch)))
            continue;
        const auto r = redistribute(branch, now);
        if (r.too_large)
            rejected_.insert(signature(branch));
        if (!total)
            total = RedistributionReport{};
        total->epoch = r.epoch;
        total->new_edges += r.new_edges;
        total->reused_edges += r.reused_edges;
        total->rows_moved += r.rows_moved;
        total->too_large = total->too_large || r.too_large;
    }
    return total;
}

std::optional<std::size_t> AdaptivityController::budget(WorkerId w) const {
    if (!cfg_.budget_pct)
        return std::nullopt;
    return static_cast<std::size_t>(std::floor(*cfg_.budget_pct / 100.0 *
                                               static_cast<double>(cluster_.worker(w).main.size())));
}

std::size_t AdaptivityController::replicated(WorkerId w) const { return cluster_.worker(w).replicated; }

double AdaptivityController::replication_ratio() const {
    std::size_t total = 0;
    for (WorkerId w = 0; w < cluster_.size(); ++w)
        total += replicated(w);
    return cluster_.total_triples() ? static_cast<double>(total) / static_cast<double>(cluster_.total_triples())
                                    : 0.0;
}

void AdaptivityController::evict_edge(std::uint32_t edge) {
    const auto ids = pi_.remove_subtree(edge);
    Transport &net = cluster_.transport();
    std::uint64_t freed = 0;
    for (auto id : ids) {
        auto it = replica_counts_.find(id);
        if (it == replica_counts_.end())
            continue;
        for (auto c : it->second)
            freed += c;
        for (WorkerId w = 0; w < cluster_.size(); ++w)
            net.send({MessageKind::Eviction, net.master(), w, id, {}, {}});
    }
    net.deliver();
    cluster_.run_phase([&](Worker &w) {
        for (const auto &m : net.take_inbox(w.id)) {
            w.modules.erase(m.tag);
            w.replicated -= replica_counts_.at(m.tag)[w.id];
        }
    });
    for (auto id : ids)
        replica_counts_.erase(id);
    evictions_.push_back({epoch_, edge, freed});
}

RedistributionReport AdaptivityController::redistribute(const PatternTree &p, std::uint64_t now) {
    RedistributionReport report;
    report.epoch = ++epoch_;
    const std::uint32_t n = cluster_.size();
    Transport &net = cluster_.transport();
    const auto rows_before = net.inter_worker_rows();

    // Reuse what the index already holds.
    std::vector<std::optional<std::uint32_t>> pnode(p.labels.size());
    std::vector<std::optional<std::uint32_t>> pedge(p.edges.size());
    std::set<std::uint32_t> reused;
    pnode[0] = pi_.find_root(p.labels[0]);
    std::vector<std::size_t> fresh;
    for (std::size_t ei = 0; ei < p.edges.size(); ++ei) {
        const auto &e = p.edges[ei];
        std::optional<std::uint32_t> hit;
        if (pnode[e.parent])
            hit = pi_.find_child(*pnode[e.parent], e.pred, e.dir, p.labels[e.child]);
        if (hit) {
            pedge[ei] = *hit;
            pnode[e.child] = pi_.edge(*hit).child;
            pi_.edge(*hit).last_access = now;
            reused.insert(*hit);
        } else {
            fresh.push_back(ei);
        }
    }
    report.reused_edges = reused.size();
    if (fresh.empty())
        return report;

    // Stage candidate triples for every new edge, parents first.
    std::vector<std::vector<WorkerStore>> staged(p.edges.size());
    std::vector<std::optional<std::size_t>> parent_edge(p.labels.size());
    for (std::size_t ei = 0; ei < p.edges.size(); ++ei)
        parent_edge[p.edges[ei].child] = ei;
    auto root_outgoing = [&](std::size_t ei) { return p.edges[ei].parent == 0 && p.edges[ei].dir == EdgeDir::Outgoing; };
    auto pattern_of = [&](std::size_t ei) {
        const auto &e = p.edges[ei];
        return edge_pattern(e.pred, e.dir, p.labels[e.parent], p.labels[e.child]);
    };
    // Values of a tree node available on worker w.
    auto view = [&](std::size_t node, Worker &w) {
        std::vector<TermId> vals;
        const std::size_t ei = *parent_edge[node];
        const auto &e = p.edges[ei];
        auto take = [&](const EncodedTriple &t) { vals.push_back(e.dir == EdgeDir::Outgoing ? t.o : t.s); };
        if (root_outgoing(ei)) {
            for_each_match(w.main, pattern_of(ei), Probe{}, take);
        } else if (pedge[ei]) {
            auto it = w.modules.find(*pedge[ei]);
            if (it != w.modules.end())
                for_each_match(it->second, pattern_of(ei), Probe{}, take);
        } else {
            for_each_match(staged[ei][w.id], pattern_of(ei), Probe{}, take);
        }
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        return vals;
    };

    for (std::size_t ei : fresh) {
        staged[ei].resize(n);
        if (root_outgoing(ei))
            continue;
        const auto &e = p.edges[ei];
        const auto tp = pattern_of(ei);
        const auto tag = static_cast<std::uint32_t>(ei);
        if (e.parent == 0) {
            // Core-adjacent edge: send each triple to the owner of the core binding.
            cluster_.run_phase([&](Worker &w) {
                std::vector<std::vector<EncodedTriple>> out(n);
                for_each_match(w.main, tp, Probe{}, [&](const EncodedTriple &t) { out[cluster_.owner(t.o)].push_back(t); });
                for (WorkerId to = 0; to < n; ++to)
                    if (!out[to].empty())
                        net.send({MessageKind::CandidateTriples, w.id, to, tag, {}, std::move(out[to])});
            });
        } else {
            cluster_.run_phase([&](Worker &w) {
                const auto vals = view(e.parent, w);
                if (vals.empty())
                    return;
                if (e.dir == EdgeDir::Outgoing) {
                    std::vector<std::vector<TermId>> buckets(n);
                    for (TermId v : vals)
                        buckets[cluster_.owner(v)].push_back(v);
                    for (WorkerId to = 0; to < n; ++to)
                        if (!buckets[to].empty())
                            net.send({MessageKind::ProjectionHash, w.id, to, tag, std::move(buckets[to]), {}});
                } else {
                    for (WorkerId to = 0; to < n; ++to)
                        net.send({MessageKind::ProjectionBroadcast, w.id, to, tag, vals, {}});
                }
            });
            cluster_.run_phase([&](Worker &w) {
                for (auto &m : net.take_inbox(w.id)) {
                    std::vector<EncodedTriple> candidates;
                    for (TermId v : m.values) {
                        Probe probe;
                        (e.dir == EdgeDir::Outgoing ? probe.s : probe.o) = v;
                        for_each_match(w.main, tp, probe, [&](const EncodedTriple &t) { candidates.push_back(t); });
                    }
                    if (!candidates.empty())
                        net.send({MessageKind::CandidateTriples, w.id, m.from, tag, {}, std::move(candidates)});
                }
            });
        }
        cluster_.run_phase([&](Worker &w) {
            for (auto &m : net.take_inbox(w.id))
                for (const auto &t : m.triples)
                    staged[ei][w.id].insert(t);
        });
    }
    report.rows_moved = net.inter_worker_rows() - rows_before;

    // Budget: count staged triples that are not already home.
    std::vector<std::vector<std::size_t>> staged_repl(p.edges.size(), std::vector<std::size_t>(n, 0));
    std::vector<std::size_t> incoming(n, 0);
    for (std::size_t ei : fresh)
        for (WorkerId w = 0; w < n; ++w) {
            staged[ei][w].for_each([&](const EncodedTriple &t) {
                if (cluster_.owner(t.s) != w)
                    ++staged_repl[ei][w];
            });
            incoming[w] += staged_repl[ei][w];
        }

    auto over_budget = [&](WorkerId w, std::size_t extra) {
        const auto b = budget(w);
        return b && cluster_.worker(w).replicated + extra > *b;
    };
    // Edges touched in this epoch stay, so sibling branches cannot evict each other.
    auto evictable = [&](std::uint32_t edge) {
        for (auto id : pi_.subtree(edge))
            if (reused.count(id) || pi_.edge(id).last_access >= now)
                return false;
        return true;
    };
    if (cfg_.budget_pct) {
        // Replicas that cannot be evicted in favour of this pattern.
        std::vector<std::size_t> pinned(n, 0);
        for (auto id : pi_.alive_edges()) {
            if (evictable(id))
                continue;
            auto it = replica_counts_.find(id);
            if (it != replica_counts_.end())
                for (WorkerId w = 0; w < n; ++w)
                    pinned[w] += it->second[w];
        }
        for (WorkerId w = 0; w < n; ++w)
            if (pinned[w] + incoming[w] > *budget(w)) {
                report.too_large = true;
                std::ostringstream msg;
                msg << "epoch " << report.epoch << ": pattern needs " << incoming[w] << " replicas on worker " << w
                    << ", budget " << *budget(w) << " with " << pinned[w] << " pinned; skipped";
                log_.push_back(msg.str());
                return report;
            }
        auto needs_room = [&] {
            for (WorkerId w = 0; w < n; ++w)
                if (over_budget(w, incoming[w]))
                    return true;
            return false;
        };
        while (needs_room()) {
            std::optional<std::uint32_t> victim;
            for (auto id : pi_.alive_edges()) {
                if (!evictable(id))
                    continue;
                const auto &e = pi_.edge(id);
                if (!victim || e.last_access < pi_.edge(*victim).last_access)
                    victim = id;
            }
            if (!victim)
                break;
            evict_edge(*victim);
        }
    }

    // Commit.
    if (!pnode[0])
        pnode[0] = pi_.add_root(p.labels[0]);
    for (std::size_t ei : fresh) {
        const auto &e = p.edges[ei];
        const auto id = pi_.add_edge(*pnode[e.parent], e.pred, e.dir, p.labels[e.child], now);
        pnode[e.child] = pi_.edge(id).child;
        if (!pi_.edge(id).has_storage())
            continue;
        auto &counts = replica_counts_[id];
        counts.assign(n, 0);
        for (WorkerId w = 0; w < n; ++w) {
            counts[w] = staged_repl[ei][w];
            auto &worker = cluster_.worker(w);
            worker.replicated += counts[w];
            if (!staged[ei][w].empty())
                worker.modules[id] = std::move(staged[ei][w]);
        }
    }
    report.new_edges = fresh.size();
    return report;
}

} // namespace adhash
