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

#include <random>
#include <set>
#include <sstream>

#include "adhash/engine.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace adhash;

namespace {

using Decoded = std::set<std::vector<std::string>>;

Decoded decoded(const Engine &e, const QueryOutcome &r) {
    const auto rows = e.decode(r.rows);
    return {rows.begin(), rows.end()};
}

Engine university_engine(std::mt19937_64 &rng, std::size_t triples, std::uint32_t workers, bool adaptive,
                         std::optional<double> budget, gen::Dataset &data) {
    data = gen::university(rng, triples);
    EngineOptions o;
    o.cluster.num_workers = workers;
    o.adaptive = adaptive;
    o.adaptivity.budget_pct = budget;
    gen::Dataset copy;
    copy.dict = data.dict;
    return Engine(std::move(copy.dict), data.triples, o);
}

} // namespace

TEST_CASE("professors and their advisees on the fixture") {
    auto e = fixture::campus();
    const auto r = e.run("SELECT ?prof ?stud WHERE { ?prof <worksFor> <CS> . ?stud <advisor> ?prof }");
    CHECK(r.mode == ExecMode::Distributed);
    CHECK(decoded(e, r) ==
          Decoded{{"<James>", "<Lisa>"}, {"<Bill>", "<John>"}, {"<Bill>", "<Fred>"}, {"<Bill>", "<Lisa>"}});
    REQUIRE(r.plan);
    CHECK(r.plan->steps[1].mode == JoinMode::HashDistribute);
}

TEST_CASE("unknown constants give an empty answer") {
    auto e = fixture::campus();
    const auto r = e.run("SELECT ?s WHERE { ?s <advisor> <Nobody> }");
    CHECK(r.mode == ExecMode::Empty);
    CHECK(r.rows.empty());
}

TEST_CASE("subject stars run in parallel") {
    auto e = fixture::campus(true, 1);
    e.cluster().transport().reset_counters();
    const auto r = e.run("SELECT * WHERE { ?s <advisor> ?p . ?s <type> <Grad> }");
    CHECK(r.mode == ExecMode::Parallel);
    CHECK(r.trace.payload_rows() == 0);
    CHECK(e.cluster().transport().inter_worker_rows() == 0);
    CHECK(r.rows.size() == 3);
    CHECK_FALSE(r.redistribution);
}

TEST_CASE("a repeated template converges to parallel execution") {
    std::mt19937_64 rng(3);
    gen::Dataset d;
    auto e = university_engine(rng, 6000, 4, true, 20.0, d);
    for (int i = 1; i <= 11; ++i) {
        const auto text = gen::university_query(rng, d, 0);
        e.cluster().transport().reset_counters();
        const auto r = e.run(text);
        const auto q = encode_query(parse_query(text), d.dict);
        CHECK(oracle::rows_of(r.rows) == oracle::evaluate(q, d.triples));
        if (i <= 10) {
            CHECK(r.mode == ExecMode::Distributed);
        } else {
            CHECK(r.mode == ExecMode::ParallelIndexed);
            CHECK(r.trace.payload_rows() == 0);
            CHECK(e.cluster().transport().inter_worker_rows() == 0);
        }
        CHECK(r.redistribution.has_value() == (i == 10));
    }
}

TEST_CASE("non-adaptive runs never replicate") {
    std::mt19937_64 rng(5);
    gen::Dataset d;
    auto e = university_engine(rng, 4000, 3, false, 20.0, d);
    std::vector<std::string> w;
    for (int i = 0; i < 60; ++i)
        w.push_back(gen::university_query(rng, d, i % 6));
    const auto s = e.run_workload(w);
    CHECK(s.queries == 60);
    CHECK(s.failed == 0);
    CHECK(s.parallel_indexed == 0);
    CHECK(s.redistributions == 0);
    CHECK(s.replication_ratio == 0);
    CHECK(s.parallel == 10);
    CHECK(e.adaptivity() == nullptr);
}

TEST_CASE("adaptivity lowers cumulative communication") {
    std::vector<std::string> w;
    std::mt19937_64 qrng(9);
    gen::Dataset d;
    std::mt19937_64 rng_a(13), rng_b(13);
    auto adaptive = university_engine(rng_a, 4000, 4, true, 20.0, d);
    auto plain = university_engine(rng_b, 4000, 4, false, 20.0, d);
    for (int i = 0; i < 80; ++i)
        w.push_back(gen::university_query(qrng, d, i % 2 ? 0 : 5));
    const auto a = adaptive.run_workload(w);
    const auto b = plain.run_workload(w);
    CHECK(a.payload_rows <= b.payload_rows);
    CHECK(a.payload_rows + a.redistribution_rows <= b.payload_rows);
    CHECK(a.parallel_indexed > 0);
}

TEST_CASE("adaptive workloads under tight budgets match the oracle") {
    std::mt19937_64 rng(19);
    for (double budget : {0.0, 2.0, 5.0, 30.0}) {
        gen::Dataset d;
        auto e = university_engine(rng, 3000, 3, true, budget, d);
        EngineOptions o = e.options();
        o.adaptivity.freq_threshold = 2;
        gen::Dataset copy;
        copy.dict = d.dict;
        Engine eng(std::move(copy.dict), d.triples, o);
        for (int i = 0; i < 40; ++i) {
            const auto text = gen::university_query(rng, d, static_cast<int>(rng() % 6));
            const auto r = eng.run(text);
            CHECK(oracle::rows_of(r.rows) == oracle::evaluate(encode_query(parse_query(text), d.dict), d.triples));
            for (WorkerId w = 0; w < eng.cluster().size(); ++w)
                CHECK(eng.adaptivity()->replicated(w) <= *eng.adaptivity()->budget(w));
        }
    }
}

TEST_CASE("workload errors are reported and skipped") {
    auto e = fixture::campus();
    std::vector<std::size_t> bad;
    const auto s = e.run_workload({"SELECT ?x WHERE { ?x <advisor> }", "SELECT * WHERE { ?s <advisor> ?p }"},
                                  [&](std::size_t i, const std::string &) { bad.push_back(i); });
    CHECK(s.failed == 1);
    CHECK(bad == std::vector<std::size_t>{0});
    CHECK(s.parallel == 1);
    std::ostringstream out;
    s.write(out);
    CHECK(out.str().rfind("queries\t2\nfailed\t1\nparallel_star\t1\n", 0) == 0);
}
