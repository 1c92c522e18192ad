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
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "adhash/cluster.hpp"
#include "adhash/executor.hpp"
#include "adhash/query.hpp"
#include "adhash/storage.hpp"

namespace adhash {

// ---- vertex scores ---------------------------------------------------------

struct PredicateScore {
    double subject = 0;  // average degree of the predicate's subjects
    double object = 0;   // average degree of the predicate's objects
};

using ScoreTable = std::map<TermId, PredicateScore>;

/// Samples flagged by Chauvenet's criterion on the high side:
/// n * erfc(|x - mean| / (sigma * sqrt 2)) < 0.5 with x > mean.
std::set<TermId> chauvenet_outliers(const std::vector<std::pair<TermId, double>> &samples);

/// Per-predicate scores. With `filter`, a predicate that is an outlier among
/// subject scores or among object scores gets -inf on both sides.
ScoreTable score_table(const PredicateStats &stats, bool filter = true);

struct VertexScores {
    std::vector<QueryTerm> vertices;  // subject/object terms, first appearance
    std::vector<double> scores;

    std::size_t index_of(const QueryTerm &t) const;
    /// Highest score, earliest vertex on ties.
    std::size_t core() const;
};

VertexScores score_vertices(const EncodedQuery &q, const ScoreTable &table);

// ---- redistribution trees --------------------------------------------------

/// Outgoing: the parent is the triple's subject. Incoming: the parent is the
/// object.
enum class EdgeDir : std::uint8_t { Outgoing, Incoming };

const char *to_string(EdgeDir dir);

struct TreeEdge {
    std::size_t parent = 0;
    std::size_t child = 0;
    TermId pred = 0;
    EdgeDir dir = EdgeDir::Outgoing;
    std::size_t pattern = 0;  // query pattern the edge came from
};

/// Node 0 is the root. Edges are stored parent-before-child.
struct RedistributionTree {
    std::vector<QueryTerm> nodes;
    std::vector<bool> duplicate;
    std::vector<TreeEdge> edges;

    std::vector<std::size_t> children(std::size_t node) const;
};

RedistributionTree build_redistribution_tree(const EncodedQuery &q, const VertexScores &scores);

/// Tree whose vertices are either a constant or unconstrained.
struct PatternTree {
    std::vector<std::optional<TermId>> labels;
    std::vector<TreeEdge> edges;

    std::vector<std::size_t> children(std::size_t node) const;
};

PatternTree to_pattern_tree(const RedistributionTree &t);

// ---- heat map --------------------------------------------------------------

/// Streaming majority candidate. std::nullopt stands for "a variable".
struct MajorityVote {
    std::optional<TermId> candidate;
    std::uint64_t count = 0;

    void add(std::optional<TermId> x);
};

struct HeatVertex {
    std::map<TermId, std::uint64_t> constants;
    std::uint64_t visits = 0;
    MajorityVote vote;

    /// Constant holding a strict majority of the visits, if any.
    std::optional<TermId> dominant() const;
};

struct HeatEdge {
    std::size_t parent = 0;
    std::size_t child = 0;
    TermId pred = 0;
    EdgeDir dir = EdgeDir::Outgoing;
    std::uint64_t count = 0;
};

/// Prefix tree of query templates. Node 0 is the shared root; children are
/// keyed by (predicate, direction).
class HeatMap {
public:
    HeatMap();

    void record(const RedistributionTree &t);

    /// Edges reachable from the root through edges counted at least
    /// `threshold` times, with dominant constants substituted.
    PatternTree hot_region(std::uint64_t threshold) const;

    const std::vector<HeatVertex> &vertices() const noexcept { return vertices_; }
    const std::vector<HeatEdge> &edges() const noexcept { return edges_; }
    std::optional<std::size_t> find_edge(std::size_t parent, TermId pred, EdgeDir dir) const;

private:
    std::vector<HeatVertex> vertices_;
    std::vector<HeatEdge> edges_;
    std::vector<std::vector<std::size_t>> out_;
};

// ---- pattern index ---------------------------------------------------------

struct PatternNode {
    std::optional<TermId> label;
    std::optional<std::uint32_t> parent_edge;
    std::vector<std::uint32_t> child_edges;
    bool alive = true;
};

struct PatternEdge {
    std::uint32_t id = 0;
    std::uint32_t parent = 0;
    std::uint32_t child = 0;
    TermId pred = 0;
    EdgeDir dir = EdgeDir::Outgoing;
    std::uint64_t last_access = 0;
    bool root_level = false;
    bool alive = true;

    /// Core-subject edges are answered from the main index.
    bool has_storage() const { return !(root_level && dir == EdgeDir::Outgoing); }
};

class PatternIndex {
public:
    /// For each query tree edge, the pattern-index edge serving it. Touches
    /// the edges when `now` is set.
    std::optional<std::vector<std::uint32_t>> match(const RedistributionTree &t, std::optional<std::uint64_t> now);

    /// True when every edge of `p` exists with exactly these labels.
    bool contains(const PatternTree &p) const;

    std::optional<std::uint32_t> find_root(std::optional<TermId> label) const;
    std::uint32_t add_root(std::optional<TermId> label);
    std::optional<std::uint32_t> find_child(std::uint32_t node, TermId pred, EdgeDir dir,
                                            std::optional<TermId> label) const;
    std::uint32_t add_edge(std::uint32_t parent, TermId pred, EdgeDir dir, std::optional<TermId> label,
                           std::uint64_t now);

    /// Drops an edge and its descendants. Returns the removed edge ids.
    std::vector<std::uint32_t> remove_subtree(std::uint32_t edge);
    /// Edge ids in the subtree under `edge`, itself included.
    std::vector<std::uint32_t> subtree(std::uint32_t edge) const;

    const PatternEdge &edge(std::uint32_t id) const { return edges_.at(id); }
    PatternEdge &edge(std::uint32_t id) { return edges_.at(id); }
    const PatternNode &node(std::uint32_t id) const { return nodes_.at(id); }
    std::vector<std::uint32_t> alive_edges() const;
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    void dump(std::ostream &out, const Dictionary &dict) const;

private:
    bool match_node(const RedistributionTree &t, std::size_t qnode, std::uint32_t pnode,
                    std::vector<std::uint32_t> &mapping) const;

    std::vector<PatternNode> nodes_;
    std::vector<PatternEdge> edges_;
    std::vector<std::uint32_t> roots_;
};

// ---- controller ------------------------------------------------------------

struct AdaptivityConfig {
    std::uint64_t freq_threshold = 10;
    /// Replica budget as a percentage of each worker's own triple count;
    /// std::nullopt means unbounded.
    std::optional<double> budget_pct = 20.0;
};

struct EvictionRecord {
    std::uint64_t epoch = 0;
    std::uint32_t pattern_id = 0;
    std::uint64_t triples_freed = 0;
};

struct RedistributionReport {
    std::uint64_t epoch = 0;
    std::size_t new_edges = 0;
    std::size_t reused_edges = 0;
    std::uint64_t rows_moved = 0;  // inter-worker rows spent on redistribution
    bool too_large = false;
};

/// Master-side workload monitor and replica manager.
class AdaptivityController {
public:
    AdaptivityController(Cluster &cluster, AdaptivityConfig cfg);

    const ScoreTable &scores() const noexcept { return scores_; }
    RedistributionTree tree_for(const EncodedQuery &q) const;

    /// Pattern sources for parallel evaluation when the query's tree is
    /// contained in the pattern index.
    std::optional<std::vector<PatternSource>> match(const EncodedQuery &q, std::uint64_t now);

    /// Whether the query takes part in workload monitoring at all.
    static bool eligible(const EncodedQuery &q);

    /// Records the query and redistributes a newly hot region.
    std::optional<RedistributionReport> observe(const EncodedQuery &q, std::uint64_t now);

    /// Incremental redistribution of `pattern`, evicting LRU patterns when
    /// the budget requires it.
    RedistributionReport redistribute(const PatternTree &pattern, std::uint64_t now);

    std::optional<std::size_t> budget(WorkerId w) const;
    std::size_t replicated(WorkerId w) const;
    double replication_ratio() const;

    const HeatMap &heat_map() const noexcept { return heat_; }
    const PatternIndex &pattern_index() const noexcept { return pi_; }
    const std::vector<EvictionRecord> &eviction_log() const noexcept { return evictions_; }
    std::uint64_t epochs() const noexcept { return epoch_; }
    const std::vector<std::string> &log() const noexcept { return log_; }

private:
    void evict_edge(std::uint32_t edge);

    Cluster &cluster_;
    AdaptivityConfig cfg_;
    ScoreTable scores_;
    HeatMap heat_;
    PatternIndex pi_;
    std::vector<EvictionRecord> evictions_;
    std::vector<std::string> log_;
    std::map<std::uint32_t, std::vector<std::size_t>> replica_counts_;  // per edge, per worker
    std::set<std::string> rejected_;
    std::uint64_t epoch_ = 0;
};

} // namespace adhash
