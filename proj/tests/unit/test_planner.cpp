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

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "adhash/planner.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace adhash;

namespace {

const char *kQprof = "SELECT * WHERE { ?prof <worksFor> <CS> . ?stud <advisor> ?prof . ?stud <uGradFrom> ?univ }";

struct Prof {
    fixture::Loaded data = fixture::load("campus.nt");
    EncodedQuery q = encode_query(parse_query(kQprof), data.dict);
    std::vector<PatternEstimate> est = oracle::exact_estimates(q, data.triples);
};

EncodedPattern pat(QueryTerm s, QueryTerm p, QueryTerm o) { return {s, p, o}; }

DPState state_with(std::size_t vars, std::uint32_t var, double b, std::optional<std::uint32_t> pinned) {
    DPState s;
    s.subgraph = 1;
    s.ordering = {0};
    s.cum_card = 7;
    s.bindings.assign(vars, kUnseen);
    s.bindings[var] = b;
    s.pinned_subject = pinned;
    return s;
}

} // namespace

TEST_CASE("join modes follow subject locality") {
    Prof f;
    auto after = [&](std::vector<std::size_t> order) {
        DPState s = initial_state(f.q, order[0], f.est);
        for (std::size_t k = 1; k < order.size(); ++k)
            s = expand(s, f.q, order[k], f.est[order[k]], 2);
        return s;
    };
    CHECK(join_mode(after({0}), f.q.patterns[1]) == JoinMode::Broadcast);
    CHECK(join_mode(after({1}), f.q.patterns[0]) == JoinMode::HashDistribute);
    CHECK(join_mode(after({1, 0}), f.q.patterns[2]) == JoinMode::NoComm);
    CHECK(join_mode(after({0, 1}), f.q.patterns[2]) == JoinMode::HashDistribute);
    CHECK_THROWS_AS(join_mode(after({0}), f.q.patterns[2]), NoSharedVariable);
}

TEST_CASE("expansion cost formula") {
    const auto x = QueryTerm::var(0), y = QueryTerm::var(1), p = QueryTerm::constant(1),
               c = QueryTerm::constant(2);
    SUBCASE("hash distribute") {
        const DPState s = state_with(2, 0, 10, 1);
        const PatternEstimate e{15, 10, 1, 4};
        CHECK(join_mode(s, pat(x, p, y)) == JoinMode::HashDistribute);
        CHECK(expansion_cost(s, pat(x, p, y), e, 4) == doctest::Approx(40));
    }
    SUBCASE("broadcast") {
        const DPState s = state_with(2, 0, 10, 1);
        const PatternEstimate e{20, 1, 1, 10};
        CHECK(join_mode(s, pat(c, p, x)) == JoinMode::Broadcast);
        CHECK(expansion_cost(s, pat(c, p, x), e, 4) == doctest::Approx(120));
    }
    SUBCASE("no communication") {
        const DPState s = state_with(2, 0, 10, 0);
        CHECK(expansion_cost(s, pat(x, p, y), PatternEstimate{15, 10, 1, 4}, 4) == 0);
    }
}

TEST_CASE("binding re-estimation") {
    const auto x = QueryTerm::var(0), y = QueryTerm::var(1), p = QueryTerm::constant(1),
               c = QueryTerm::constant(2);
    SUBCASE("constant pattern doubles the cumulative cardinality") {
        const DPState s = state_with(2, 0, 10, 0);
        const auto out = reestimate_bindings(s, pat(x, p, c), PatternEstimate{3, 3, 1, 1});
        CHECK(out.cum_card == doctest::Approx(14));
    }
    SUBCASE("single variable clamps to the pattern size") {
        const DPState s = state_with(2, 0, 10, 0);
        const auto out = reestimate_bindings(s, pat(x, p, c), PatternEstimate{3, 3, 1, 1});
        CHECK(out.bindings[0] == doctest::Approx(3));
        CHECK(out.bindings[1] == kUnseen);
    }
    SUBCASE("join column and new variable") {
        const DPState s = state_with(2, 0, 10, 0);
        const auto out = reestimate_bindings(s, pat(x, p, y), PatternEstimate{12, 6, 1, 4});
        CHECK(out.bindings[0] == doctest::Approx(6));
        CHECK(out.bindings[1] == doctest::Approx(4));
        CHECK(out.cum_card == doctest::Approx(7 * (1 + 2.0)));
    }
}

TEST_CASE("the optimizer prefers the locality-friendly ordering") {
    Prof f;
    const auto plan = optimize(f.q, f.est, 2);
    CHECK(plan.ordering() == std::vector<std::size_t>{1, 0, 2});
    CHECK(plan.steps[0].mode == JoinMode::NoComm);
    CHECK(plan.steps[1].mode == JoinMode::HashDistribute);
    CHECK(plan.steps[2].mode == JoinMode::NoComm);
    CHECK(plan.pinned_subject == f.q.patterns[1].s.value);
    CHECK(plan.cost == doctest::Approx(oracle::exhaustive_min_cost(f.q, f.est, 2)));
    const auto text = explain(plan, f.q);
    CHECK(text.find("pinned=?stud") != std::string::npos);
    CHECK(text.find("2\tq1\tHashDistribute\t?prof") != std::string::npos);
}

TEST_CASE("single pattern plan") {
    Prof f;
    EncodedQuery one = f.q;
    one.patterns.resize(1);
    const auto plan = optimize(one, {f.est[0]}, 4);
    REQUIRE(plan.steps.size() == 1);
    CHECK(plan.cost == 0);
    CHECK(plan.steps[0].mode == JoinMode::NoComm);
}

TEST_CASE("cost never decreases along an expansion chain") {
    Prof f;
    for (const auto &order : oracle::connected_orderings(f.q)) {
        DPState s = initial_state(f.q, order[0], f.est);
        CHECK(s.cost == 0);
        for (std::size_t k = 1; k < order.size(); ++k) {
            const double before = s.cost;
            s = expand(s, f.q, order[k], f.est[order[k]], 3);
            CHECK(s.cost >= before);
        }
    }
}

TEST_CASE("DP cost equals the exhaustive minimum on random queries") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int g = 0; g < 15; ++g) {
        auto d = gen::random_graph(rng, 300, 60, 5);
        for (int i = 0; i < 10; ++i) {
            const auto q = encode_query(gen::random_query(rng, d, 2 + rng() % 4), d.dict);
            if (q.unsatisfiable)
                continue;
            const auto est = oracle::exact_estimates(q, d.triples);
            for (std::uint32_t n : {1u, 2u, 4u}) {
                const auto plan = optimize(q, est, n);
                CHECK(plan.cost == doctest::Approx(oracle::exhaustive_min_cost(q, est, n)));
                const auto order = plan.ordering();
                CHECK(std::set<std::size_t>(order.begin(), order.end()).size() == q.patterns.size());
                ++checked;
            }
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("binding estimates bound the true distinct counts") {
    std::mt19937_64 rng(5);
    for (int g = 0; g < 10; ++g) {
        auto d = gen::random_graph(rng, 200, 40, 4);
        for (int i = 0; i < 10; ++i) {
            const auto q = encode_query(gen::random_query(rng, d, 2 + rng() % 3), d.dict);
            if (q.unsatisfiable)
                continue;
            const auto est = oracle::exact_estimates(q, d.triples);
            const auto order = optimize(q, est, 1).ordering();
            DPState s = initial_state(q, order[0], est);
            EncodedQuery prefix = q;
            prefix.patterns = {q.patterns[order[0]]};
            for (std::size_t k = 0; k < order.size(); ++k) {
                if (k > 0) {
                    s = expand(s, q, order[k], est[order[k]], 1);
                    prefix.patterns.push_back(q.patterns[order[k]]);
                }
                for (std::uint32_t v = 0; v < q.variables.size(); ++v) {
                    if (s.bindings[v] == kUnseen)
                        continue;
                    prefix.projection = {v};
                    const auto truth = oracle::evaluate(prefix, d.triples).size();
                    CHECK(static_cast<double>(truth) <= s.bindings[v] + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("local plans order by local cardinality and stay connected") {
    auto q = encode_query(parse_query("SELECT * WHERE { ?s <a> ?x . ?s <b> ?y . ?s <c> ?z }"), [] {
        Dictionary d;
        for (const char *t : {"<a>", "<b>", "<c>", "<d>", "<e>"})
            d.encode(t);
        return d;
    }());
    CHECK(local_plan(q, {5, 1, 3}) == std::vector<std::size_t>{1, 2, 0});

    Dictionary d;
    for (const char *t : {"<a>", "<b>", "<c>"})
        d.encode(t);
    auto chain = encode_query(parse_query("SELECT * WHERE { ?a <a> ?b . ?b <b> ?c . ?c <c> ?d }"), d);
    CHECK(local_plan(chain, {5, 9, 1}) == std::vector<std::size_t>{2, 1, 0});
    chain.patterns.resize(1);
    CHECK(local_plan(chain, {4}) == std::vector<std::size_t>{0});
}
