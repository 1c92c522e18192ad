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

#include "adhash/query.hpp"

using namespace adhash;

TEST_CASE("parses prefixes, projection and patterns") {
    const auto q = parse_query(
        "PREFIX my: <http://my.org/>\n"
        "SELECT DISTINCT ?x, ?y WHERE { ?x my:knows ?y . ?y a ub:Student . ?x <http://p> \"lit\"@en }");
    REQUIRE(q.patterns.size() == 3);
    CHECK(q.patterns[0].p == Term::constant("<http://my.org/knows>"));
    CHECK(q.patterns[1].p == Term::constant("<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>"));
    CHECK(q.patterns[1].o == Term::constant("<http://www.lehigh.edu/~zhp2/2004/0401/univ-bench.owl#Student>"));
    CHECK(q.patterns[2].o == Term::constant("\"lit\"@en"));
    CHECK(q.projection == std::vector<std::string>{"x", "y"});
    CHECK(q.variables == std::vector<std::string>{"x", "y"});
}

TEST_CASE("select star projects every variable in order") {
    const auto q = parse_query("SELECT * WHERE { ?b <p> ?a . ?a <q> ?c . }");
    CHECK(q.projection == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("syntax errors report a position") {
    try {
        parse_query("SELECT ?x WHERE { ?x <p> }");
        FAIL("expected syntax error");
    } catch (const QuerySyntaxError &e) {
        CHECK(e.position() == 25);
    }
    CHECK_THROWS_AS(parse_query("SELECT WHERE { ?x <p> ?y }"), QuerySyntaxError);
    CHECK_THROWS_AS(parse_query("SELECT ?z WHERE { ?x <p> ?y }"), QuerySyntaxError);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x <p> ?y"), QuerySyntaxError);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { }"), QuerySyntaxError);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x foo:p ?y }"), UnknownPrefix);
}

TEST_CASE("patterns joined only through a constant are disconnected") {
    CHECK_THROWS_AS(parse_query("SELECT * WHERE { ?x <p> <c> . ?y <q> <c> }"), DisconnectedQuery);
    CHECK_NOTHROW(parse_query("SELECT * WHERE { ?x <p> ?y . ?y <q> ?z . ?z <r> ?x }"));
}

TEST_CASE("batches split on semicolons outside terms") {
    const auto parts = split_queries("SELECT * WHERE { ?x <a;b> \"x;y\" } ;\n# c;d\n ; SELECT * WHERE { ?x <p> ?y }\n");
    REQUIRE(parts.size() == 2);
    CHECK(parse_query(parts[0]).patterns[0].p == Term::constant("<a;b>"));
    CHECK(parse_query(parts[1]).patterns.size() == 1);
}

TEST_CASE("printing round-trips") {
    const auto q = parse_query("SELECT ?y WHERE { ?x ex:p ?y . ?y ex:q \"v\" }");
    CHECK(parse_query(to_string(q)).patterns == q.patterns);
}

TEST_CASE("subject stars are recognised") {
    CHECK(classify(parse_query("SELECT * WHERE { ?s <a> ?x . ?s <b> ?y }")) == QueryShape::SubjectStar);
    CHECK(classify(parse_query("SELECT * WHERE { ?s <a> ?x }")) == QueryShape::SubjectStar);
    CHECK(classify(parse_query("SELECT * WHERE { ?s <a> ?x . ?s <b> ?y . ?x <c> ?z }")) == QueryShape::General);
    CHECK(classify(parse_query("SELECT * WHERE { ?s <a> ?x . ?s <b> ?x }")) == QueryShape::General);
    CHECK(classify(parse_query("SELECT * WHERE { ?s ?p ?x . ?s <b> ?y }")) == QueryShape::SubjectStar);
    CHECK(classify(parse_query("SELECT * WHERE { ?s <a> ?x . ?x <b> ?y }")) == QueryShape::General);
}

TEST_CASE("encoding resolves constants and flags unknown ones") {
    Dictionary d;
    const TermId p = d.encode("<p>");
    const TermId c = d.encode("<c>");
    auto q = encode_query(parse_query("SELECT ?y WHERE { ?x <p> ?y . ?y <p> <c> }"), d);
    CHECK_FALSE(q.unsatisfiable);
    CHECK(q.patterns[0].p == QueryTerm::constant(p));
    CHECK(q.patterns[1].o == QueryTerm::constant(c));
    CHECK(q.patterns[0].s == QueryTerm::var(0));
    CHECK(q.projection == std::vector<std::uint32_t>{1});
    CHECK(q.patterns[0].variables() == std::vector<std::uint32_t>{0, 1});
    CHECK(q.patterns[1].variable_count() == 1);
    CHECK(classify(q) == QueryShape::General);

    auto u = encode_query(parse_query("SELECT ?x WHERE { ?x <p> <missing> }"), d);
    CHECK(u.unsatisfiable);
    auto v = encode_query(parse_query("SELECT ?x WHERE { ?x ?p <c> }"), d);
    CHECK(v.has_variable_predicate());
}
