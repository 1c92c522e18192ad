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

#include "adhash/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>

namespace adhash {

QuerySyntaxError::QuerySyntaxError(std::size_t position, const std::string &what)
    : std::runtime_error("syntax error at " + std::to_string(position) + ": " + what), position_(position) {}

DisconnectedQuery::DisconnectedQuery()
    : std::runtime_error("query patterns are not connected through shared variables") {}

UnknownPrefix::UnknownPrefix(std::size_t position, const std::string &prefix)
    : std::runtime_error("unknown prefix '" + prefix + ":' at " + std::to_string(position)) {}

namespace {

const std::map<std::string, std::string> &builtin_prefixes() {
    static const std::map<std::string, std::string> table = {
        {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
        {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
        {"xsd", "http://www.w3.org/2001/XMLSchema#"},
        {"owl", "http://www.w3.org/2002/07/owl#"},
        {"ub", "http://www.lehigh.edu/~zhp2/2004/0401/univ-bench.owl#"},
        {"ex", "http://example.org/"},
    };
    return table;
}

enum class Tok { Word, Variable, Iri, Literal, Prefixed, LBrace, RBrace, Dot, Star, Comma, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip();
        Token t;
        t.pos = pos_;
        if (pos_ >= src_.size())
            return t;
        const char c = src_[pos_];
        switch (c) {
        case '{': ++pos_; t.kind = Tok::LBrace; return t;
        case '}': ++pos_; t.kind = Tok::RBrace; return t;
        case '.': ++pos_; t.kind = Tok::Dot; return t;
        case '*': ++pos_; t.kind = Tok::Star; return t;
        case ',': ++pos_; t.kind = Tok::Comma; return t;
        default: break;
        }
        if (c == '?' || c == '$') {
            ++pos_;
            const auto start = pos_;
            while (pos_ < src_.size() && (std::isalnum(uc(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            if (pos_ == start)
                throw QuerySyntaxError(t.pos, "empty variable name");
            t.kind = Tok::Variable;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (c == '<') {
            const auto close = src_.find('>', pos_);
            if (close == std::string_view::npos)
                throw QuerySyntaxError(t.pos, "unterminated IRI");
            t.kind = Tok::Iri;
            t.text = std::string(src_.substr(pos_, close + 1 - pos_));
            pos_ = close + 1;
            return t;
        }
        if (c == '"') {
            std::size_t i = pos_ + 1;
            for (; i < src_.size() && src_[i] != '"'; ++i)
                if (src_[i] == '\\')
                    ++i;
            if (i >= src_.size())
                throw QuerySyntaxError(t.pos, "unterminated literal");
            std::size_t end = i + 1;
            if (end < src_.size() && src_[end] == '@') {
                ++end;
                while (end < src_.size() && (std::isalnum(uc(src_[end])) || src_[end] == '-'))
                    ++end;
            } else if (src_.substr(end, 3) == "^^<") {
                const auto close = src_.find('>', end);
                if (close == std::string_view::npos)
                    throw QuerySyntaxError(end, "unterminated datatype IRI");
                end = close + 1;
            }
            t.kind = Tok::Literal;
            t.text = std::string(src_.substr(pos_, end - pos_));
            pos_ = end;
            return t;
        }
        if (std::isalpha(uc(c)) || c == '_') {
            const auto start = pos_;
            while (pos_ < src_.size() && is_name_char(src_[pos_]))
                ++pos_;
            // A trailing '.' ends the pattern rather than the name.
            while (pos_ > start && src_[pos_ - 1] == '.')
                --pos_;
            const auto word = src_.substr(start, pos_ - start);
            t.text = std::string(word);
            t.kind = word.find(':') == std::string_view::npos ? Tok::Word : Tok::Prefixed;
            return t;
        }
        throw QuerySyntaxError(t.pos, std::string("unexpected character '") + c + "'");
    }

private:
    static unsigned char uc(char c) { return static_cast<unsigned char>(c); }
    static bool is_name_char(char c) {
        return std::isalnum(uc(c)) || c == '_' || c == '-' || c == ':' || c == '.' || c == '#' || c == '/' ||
               c == '~' || c == '%';
    }

    void skip() {
        while (pos_ < src_.size()) {
            if (std::isspace(uc(src_[pos_]))) {
                ++pos_;
            } else if (src_[pos_] == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text), prefixes_(builtin_prefixes()) { advance(); }

    QueryGraph parse() {
        while (cur_.kind == Tok::Word && upper(cur_.text) == "PREFIX")
            parse_prefix();

        expect_word("SELECT");
        if (cur_.kind == Tok::Word && upper(cur_.text) == "DISTINCT")
            advance();

        QueryGraph q;
        bool star = false;
        std::vector<std::pair<std::string, std::size_t>> selected;
        if (cur_.kind == Tok::Star) {
            star = true;
            advance();
        } else {
            while (cur_.kind == Tok::Variable || cur_.kind == Tok::Comma) {
                if (cur_.kind == Tok::Variable)
                    selected.emplace_back(cur_.text, cur_.pos);
                advance();
            }
            if (selected.empty())
                throw QuerySyntaxError(cur_.pos, "expected projection variables or '*'");
        }

        expect_word("WHERE");
        if (cur_.kind != Tok::LBrace)
            throw QuerySyntaxError(cur_.pos, "expected '{'");
        advance();

        while (cur_.kind != Tok::RBrace) {
            if (cur_.kind == Tok::End)
                throw QuerySyntaxError(cur_.pos, "expected '}'");
            TriplePattern tp;
            tp.s = parse_term();
            tp.p = parse_term();
            tp.o = parse_term();
            q.patterns.push_back(std::move(tp));
            if (cur_.kind == Tok::Dot)
                advance();
            else if (cur_.kind != Tok::RBrace)
                throw QuerySyntaxError(cur_.pos, "expected '.' or '}' after triple pattern");
        }
        advance();
        if (cur_.kind != Tok::End)
            throw QuerySyntaxError(cur_.pos, "trailing input after '}'");
        if (q.patterns.empty())
            throw QuerySyntaxError(cur_.pos, "empty graph pattern");

        for (const auto &tp : q.patterns)
            for (const Term *t : {&tp.s, &tp.p, &tp.o})
                if (t->variable && std::find(q.variables.begin(), q.variables.end(), t->text) == q.variables.end())
                    q.variables.push_back(t->text);

        if (star) {
            q.projection = q.variables;
        } else {
            for (const auto &[name, pos] : selected) {
                if (std::find(q.variables.begin(), q.variables.end(), name) == q.variables.end())
                    throw QuerySyntaxError(pos, "projected variable ?" + name + " does not occur in the pattern");
                if (std::find(q.projection.begin(), q.projection.end(), name) == q.projection.end())
                    q.projection.push_back(name);
            }
        }
        check_connected(q);
        return q;
    }

private:
    void advance() { cur_ = lex_.next(); }

    void expect_word(const char *word) {
        if (cur_.kind != Tok::Word || upper(cur_.text) != word)
            throw QuerySyntaxError(cur_.pos, std::string("expected ") + word);
        advance();
    }

    void parse_prefix() {
        advance();
        if (cur_.kind != Tok::Prefixed || cur_.text.back() != ':')
            throw QuerySyntaxError(cur_.pos, "expected prefix name");
        std::string name = cur_.text.substr(0, cur_.text.size() - 1);
        advance();
        if (cur_.kind != Tok::Iri)
            throw QuerySyntaxError(cur_.pos, "expected prefix IRI");
        prefixes_[name] = cur_.text.substr(1, cur_.text.size() - 2);
        advance();
    }

    Term parse_term() {
        Token t = cur_;
        switch (t.kind) {
        case Tok::Variable:
            advance();
            return Term::var(t.text);
        case Tok::Iri:
        case Tok::Literal:
            advance();
            return Term::constant(t.text);
        case Tok::Prefixed: {
            const auto colon = t.text.find(':');
            const auto prefix = t.text.substr(0, colon);
            auto it = prefixes_.find(prefix);
            if (it == prefixes_.end())
                throw UnknownPrefix(t.pos, prefix);
            advance();
            return Term::constant("<" + it->second + t.text.substr(colon + 1) + ">");
        }
        case Tok::Word:
            if (t.text == "a") {
                advance();
                return Term::constant("<" + builtin_prefixes().at("rdf") + "type>");
            }
            [[fallthrough]];
        default:
            throw QuerySyntaxError(t.pos, "expected a term");
        }
    }

    static void check_connected(const QueryGraph &q) {
        const std::size_t n = q.patterns.size();
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x)
                x = parent[x] = parent[parent[x]];
            return x;
        };
        std::map<std::string, std::size_t> first_use;
        for (std::size_t i = 0; i < n; ++i) {
            const auto &tp = q.patterns[i];
            for (const Term *t : {&tp.s, &tp.p, &tp.o}) {
                if (!t->variable)
                    continue;
                auto [it, fresh] = first_use.emplace(t->text, i);
                if (!fresh)
                    parent[find(i)] = find(it->second);
            }
        }
        for (std::size_t i = 1; i < n; ++i)
            if (find(i) != find(0))
                throw DisconnectedQuery();
    }

    Lexer lex_;
    Token cur_;
    std::map<std::string, std::string> prefixes_;
};

std::string term_to_string(const Term &t) { return t.variable ? "?" + t.text : t.text; }

} // namespace

QueryGraph parse_query(std::string_view text) { return Parser(text).parse(); }

std::vector<std::string> split_queries(std::string_view batch) {
    std::vector<std::string> out;
    std::string current;
    bool in_iri = false, in_literal = false, in_comment = false;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const char c = batch[i];
        if (in_comment) {
            if (c == '\n')
                in_comment = false;
        } else if (in_literal) {
            if (c == '\\' && i + 1 < batch.size()) {
                current += c;
                current += batch[++i];
                continue;
            }
            if (c == '"')
                in_literal = false;
        } else if (in_iri) {
            if (c == '>')
                in_iri = false;
        } else if (c == '<') {
            in_iri = true;
        } else if (c == '"') {
            in_literal = true;
        } else if (c == '#') {
            in_comment = true;
        } else if (c == ';') {
            out.push_back(std::move(current));
            current.clear();
            continue;
        }
        current += c;
    }
    out.push_back(std::move(current));
    std::erase_if(out, [](const std::string &s) {
        Lexer lex(s);
        try {
            return lex.next().kind == Tok::End;
        } catch (const QuerySyntaxError &) {
            return false;
        }
    });
    return out;
}

std::string to_string(const QueryGraph &q) {
    std::string out = "SELECT";
    for (const auto &v : q.projection)
        out += " ?" + v;
    out += " WHERE {";
    for (const auto &tp : q.patterns)
        out += " " + term_to_string(tp.s) + " " + term_to_string(tp.p) + " " + term_to_string(tp.o) + " .";
    out += " }";
    return out;
}

QueryShape classify(const QueryGraph &q) {
    if (q.patterns.empty())
        return QueryShape::SubjectStar;
    const Term &subject = q.patterns.front().s;
    std::map<std::string, std::set<std::size_t>> uses;
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
        const auto &tp = q.patterns[i];
        if (tp.s != subject)
            return QueryShape::General;
        for (const Term *t : {&tp.p, &tp.o})
            if (t->variable && !(subject.variable && t->text == subject.text))
                uses[t->text].insert(i);
    }
    for (const auto &[name, where] : uses)
        if (where.size() > 1)
            return QueryShape::General;
    return QueryShape::SubjectStar;
}

std::vector<std::uint32_t> EncodedPattern::variables() const {
    std::vector<std::uint32_t> out;
    for (const QueryTerm *t : {&s, &p, &o})
        if (t->variable && std::find(out.begin(), out.end(), t->value) == out.end())
            out.push_back(t->value);
    return out;
}

bool EncodedQuery::has_variable_predicate() const {
    return std::any_of(patterns.begin(), patterns.end(), [](const EncodedPattern &tp) { return tp.p.variable; });
}

EncodedQuery encode_query(const QueryGraph &q, const Dictionary &dict) {
    EncodedQuery eq;
    eq.variables = q.variables;
    auto var_index = [&](const std::string &name) {
        auto it = std::find(eq.variables.begin(), eq.variables.end(), name);
        if (it == eq.variables.end()) {
            eq.variables.push_back(name);
            return static_cast<std::uint32_t>(eq.variables.size() - 1);
        }
        return static_cast<std::uint32_t>(it - eq.variables.begin());
    };
    auto encode_term = [&](const Term &t) {
        if (t.variable)
            return QueryTerm::var(var_index(t.text));
        if (auto id = dict.find(t.text))
            return QueryTerm::constant(*id);
        eq.unsatisfiable = true;
        return QueryTerm::constant(0);
    };
    for (const auto &tp : q.patterns)
        eq.patterns.push_back({encode_term(tp.s), encode_term(tp.p), encode_term(tp.o)});
    for (const auto &v : q.projection)
        eq.projection.push_back(var_index(v));
    return eq;
}

QueryShape classify(const EncodedQuery &q) {
    if (q.patterns.empty())
        return QueryShape::SubjectStar;
    const QueryTerm subject = q.patterns.front().s;
    std::map<std::uint32_t, std::set<std::size_t>> uses;
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
        const auto &tp = q.patterns[i];
        if (tp.s != subject)
            return QueryShape::General;
        for (const QueryTerm *t : {&tp.p, &tp.o})
            if (t->variable && !(subject.variable && t->value == subject.value))
                uses[t->value].insert(i);
    }
    for (const auto &[var, where] : uses)
        if (where.size() > 1)
            return QueryShape::General;
    return QueryShape::SubjectStar;
}

} // namespace adhash
