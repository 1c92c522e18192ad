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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adhash/rdf.hpp"

namespace adhash {

class QuerySyntaxError : public std::runtime_error {
public:
    QuerySyntaxError(std::size_t position, const std::string &what);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class DisconnectedQuery : public std::runtime_error {
public:
    DisconnectedQuery();
};

class UnknownPrefix : public std::runtime_error {
public:
    UnknownPrefix(std::size_t position, const std::string &prefix);
};

/// A query term as written. Constants keep their dictionary spelling
/// (`<iri>` or `"literal"`); variables keep their name without the '?'.
struct Term {
    bool variable = false;
    std::string text;

    static Term var(std::string name) { return {true, std::move(name)}; }
    static Term constant(std::string spelling) { return {false, std::move(spelling)}; }

    friend bool operator==(const Term &, const Term &) = default;
    friend auto operator<=>(const Term &, const Term &) = default;
};

struct TriplePattern {
    Term s, p, o;

    friend bool operator==(const TriplePattern &, const TriplePattern &) = default;
    friend auto operator<=>(const TriplePattern &, const TriplePattern &) = default;
};

/// A parsed basic graph pattern. Patterns keep their textual order and are
/// connected through shared variables.
struct QueryGraph {
    std::vector<TriplePattern> patterns;
    std::vector<std::string> variables;   // first-appearance order
    std::vector<std::string> projection;
};

/// Parses `[PREFIX p: <iri>]* SELECT [DISTINCT] (?v ... | *) WHERE { s p o . ... }`.
/// Prefixed names resolve through a fixed table (rdf, rdfs, xsd, owl, ub, ex)
/// extended by PREFIX declarations; `a` abbreviates rdf:type.
QueryGraph parse_query(std::string_view text);

/// Splits a ';'-separated batch, ignoring separators inside IRIs, literals and
/// comments. Blank entries are dropped.
std::vector<std::string> split_queries(std::string_view batch);

/// Prints a query back in the accepted syntax (full IRIs, no prefixes).
std::string to_string(const QueryGraph &q);

enum class QueryShape { SubjectStar, General };

/// SubjectStar iff every pattern has the same subject and no other variable
/// is shared between patterns.
QueryShape classify(const QueryGraph &q);

enum class Position : std::uint8_t { Subject = 0, Predicate = 1, Object = 2 };

/// A query term after dictionary resolution: a variable index into
/// EncodedQuery::variables, or a TermId.
struct QueryTerm {
    bool variable = false;
    std::uint32_t value = 0;

    static QueryTerm var(std::uint32_t index) { return {true, index}; }
    static QueryTerm constant(TermId id) { return {false, id}; }

    friend bool operator==(const QueryTerm &, const QueryTerm &) = default;
    friend auto operator<=>(const QueryTerm &, const QueryTerm &) = default;
};

struct EncodedPattern {
    QueryTerm s, p, o;

    const QueryTerm &at(Position pos) const {
        return pos == Position::Subject ? s : pos == Position::Predicate ? p : o;
    }
    bool has_constant() const { return !s.variable || !p.variable || !o.variable; }
    /// Number of variable positions (constants are never communicated).
    int variable_count() const { return int(s.variable) + int(p.variable) + int(o.variable); }
    bool mentions(std::uint32_t var) const {
        return (s.variable && s.value == var) || (p.variable && p.value == var) || (o.variable && o.value == var);
    }
    /// Distinct variables in s, p, o order.
    std::vector<std::uint32_t> variables() const;

    friend bool operator==(const EncodedPattern &, const EncodedPattern &) = default;
};

struct EncodedQuery {
    std::vector<EncodedPattern> patterns;
    std::vector<std::string> variables;
    std::vector<std::uint32_t> projection;
    /// Set when a constant is missing from the dictionary: the answer is empty.
    bool unsatisfiable = false;

    bool has_variable_predicate() const;
};

EncodedQuery encode_query(const QueryGraph &q, const Dictionary &dict);
QueryShape classify(const EncodedQuery &q);

} // namespace adhash
