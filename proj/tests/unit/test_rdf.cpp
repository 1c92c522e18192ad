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

#include <sstream>

#include "adhash/rdf.hpp"
#include "fixtures.hpp"

using namespace adhash;

TEST_CASE("tokenizer splits IRIs, literals and blank nodes") {
    auto t = tokenize_ntriples_line("<a> <b> \"x y\\\" z\"@en .");
    REQUIRE(t);
    CHECK((*t)[0] == "<a>");
    CHECK((*t)[1] == "<b>");
    CHECK((*t)[2] == "\"x y\\\" z\"@en");

    t = tokenize_ntriples_line("_:b1 <p> \"5\"^^<http://www.w3.org/2001/XMLSchema#int> .");
    REQUIRE(t);
    CHECK((*t)[0] == "_:b1");
    CHECK((*t)[2] == "\"5\"^^<http://www.w3.org/2001/XMLSchema#int>");

    CHECK_FALSE(tokenize_ntriples_line(""));
    CHECK_FALSE(tokenize_ntriples_line("   # a comment"));
    CHECK(tokenize_ntriples_line("<a> <b> <c> . # trailing"));
}

TEST_CASE("tokenizer rejects malformed statements") {
    CHECK_THROWS_AS(tokenize_ntriples_line("<a> <b> <c>"), std::invalid_argument);
    CHECK_THROWS_AS(tokenize_ntriples_line("<a> <b> ."), std::invalid_argument);
    CHECK_THROWS_AS(tokenize_ntriples_line("<a b> <b> <c> ."), std::invalid_argument);
    CHECK_THROWS_AS(tokenize_ntriples_line("<a> <b> \"open ."), std::invalid_argument);
    CHECK_THROWS_AS(tokenize_ntriples_line("<a> <b> <c> . <d>"), std::invalid_argument);
}

TEST_CASE("dictionary assigns dense ids in first-seen order") {
    Dictionary d;
    CHECK(d.encode("<x>") == 0);
    CHECK(d.encode("<y>") == 1);
    CHECK(d.encode("<x>") == 0);
    CHECK(d.decode(1) == "<y>");
    CHECK(d.find("<y>") == 1u);
    CHECK_FALSE(d.find("<z>"));
    CHECK_THROWS_AS(d.decode(7), UnknownId);
    CHECK(d.size() == 2);
}

TEST_CASE("fixture graph loads with its expected ids") {
    auto f = fixture::load("campus.nt");
    CHECK(f.triples.size() == 14);
    CHECK(f.dict.size() == 14);
    CHECK(f.dict.find("<Lisa>") == 0u);
    CHECK(f.dict.find("<Bill>") == 3u);
    CHECK(f.dict.find("<MIT>") == 8u);
    CHECK(f.dict.find("<CMU>") == 7u);
    CHECK(f.triples[0] == EncodedTriple{0, 1, 2});
}

TEST_CASE("parse errors carry the line number and duplicates are kept") {
    std::istringstream bad("<a> <b> <c> .\n\n<a> <b> .\n");
    Dictionary d;
    try {
        parse_ntriples(bad, d);
        FAIL("expected MalformedLine");
    } catch (const MalformedLine &e) {
        CHECK(e.line() == 3);
    }
    std::istringstream dup("<a> <b> <c> .\n<a> <b> <c> .\n");
    Dictionary d2;
    CHECK(parse_ntriples(dup, d2).size() == 2);

    std::istringstream empty("");
    Dictionary d3;
    CHECK(parse_ntriples(empty, d3).empty());
}
