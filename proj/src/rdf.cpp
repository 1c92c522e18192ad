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

#include "adhash/rdf.hpp"

#include <cctype>

namespace adhash {

MalformedLine::MalformedLine(std::size_t line, const std::string &why)
    : std::runtime_error("malformed N-Triples line " + std::to_string(line) + ": " + why),
      line_(line) {}

UnknownId::UnknownId(TermId id)
    : std::out_of_range("unknown term id " + std::to_string(id)) {}

TermId Dictionary::encode(std::string_view term) {
    if (auto it = forward_.find(term); it != forward_.end())
        return it->second;
    const auto id = static_cast<TermId>(reverse_.size());
    reverse_.emplace_back(term);
    forward_.emplace(reverse_.back(), id);
    return id;
}

const std::string &Dictionary::decode(TermId id) const {
    if (id >= reverse_.size())
        throw UnknownId(id);
    return reverse_[id];
}

std::optional<TermId> Dictionary::find(std::string_view term) const {
    if (auto it = forward_.find(term); it != forward_.end())
        return it->second;
    return std::nullopt;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

void skip_spaces(std::string_view line, std::size_t &pos) {
    while (pos < line.size() && is_space(line[pos]))
        ++pos;
}

// Reads one term starting at `pos`; leaves `pos` just past it.
std::string read_term(std::string_view line, std::size_t &pos) {
    const std::size_t start = pos;
    if (pos >= line.size())
        throw std::invalid_argument("expected a term");

    const char c = line[pos];
    if (c == '<') {
        const auto close = line.find('>', pos + 1);
        if (close == std::string_view::npos)
            throw std::invalid_argument("unterminated IRI");
        for (std::size_t i = pos + 1; i < close; ++i)
            if (is_space(line[i]))
                throw std::invalid_argument("whitespace inside IRI");
        pos = close + 1;
    } else if (c == '"') {
        std::size_t i = pos + 1;
        for (; i < line.size(); ++i) {
            if (line[i] == '\\') {
                ++i;
                continue;
            }
            if (line[i] == '"')
                break;
        }
        if (i >= line.size())
            throw std::invalid_argument("unterminated literal");
        pos = i + 1;
        if (pos < line.size() && line[pos] == '@') {
            ++pos;
            while (pos < line.size() && (std::isalnum(static_cast<unsigned char>(line[pos])) || line[pos] == '-'))
                ++pos;
        } else if (line.substr(pos, 2) == "^^") {
            pos += 2;
            if (pos >= line.size() || line[pos] != '<')
                throw std::invalid_argument("expected datatype IRI");
            const auto close = line.find('>', pos + 1);
            if (close == std::string_view::npos)
                throw std::invalid_argument("unterminated datatype IRI");
            pos = close + 1;
        }
    } else if (line.substr(pos, 2) == "_:") {
        pos += 2;
        while (pos < line.size() && !is_space(line[pos]) && line[pos] != '.')
            ++pos;
        if (pos == start + 2)
            throw std::invalid_argument("empty blank node label");
    } else {
        throw std::invalid_argument("unexpected character '" + std::string(1, c) + "'");
    }
    return std::string(line.substr(start, pos - start));
}

} // namespace

std::optional<std::array<std::string, 3>> tokenize_ntriples_line(std::string_view line) {
    std::size_t pos = 0;
    skip_spaces(line, pos);
    if (pos == line.size() || line[pos] == '#')
        return std::nullopt;

    std::array<std::string, 3> terms;
    for (auto &term : terms) {
        skip_spaces(line, pos);
        term = read_term(line, pos);
    }
    skip_spaces(line, pos);
    if (pos >= line.size() || line[pos] != '.')
        throw std::invalid_argument("statement not terminated by '.'");
    ++pos;
    skip_spaces(line, pos);
    if (pos < line.size() && line[pos] != '#')
        throw std::invalid_argument("trailing characters after '.'");
    return terms;
}

std::vector<EncodedTriple> parse_ntriples(std::istream &in, Dictionary &dict) {
    std::vector<EncodedTriple> triples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::optional<std::array<std::string, 3>> terms;
        try {
            terms = tokenize_ntriples_line(line);
        } catch (const std::invalid_argument &e) {
            throw MalformedLine(line_no, e.what());
        }
        if (!terms)
            continue;
        const TermId s = dict.encode((*terms)[0]);
        const TermId p = dict.encode((*terms)[1]);
        const TermId o = dict.encode((*terms)[2]);
        triples.push_back({s, p, o});
    }
    return triples;
}

} // namespace adhash
