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

#include <optional>

#include "adhash/query.hpp"
#include "adhash/storage.hpp"

namespace adhash {

/// Values fixed for a pattern's positions, from constants or from bindings
/// already computed.
struct Probe {
    std::optional<TermId> s, p, o;
};

inline Probe constants_of(const EncodedPattern &tp) {
    Probe b;
    if (!tp.s.variable)
        b.s = tp.s.value;
    if (!tp.p.variable)
        b.p = tp.p.value;
    if (!tp.o.variable)
        b.o = tp.o.value;
    return b;
}

/// True when `t` agrees with the constants of `tp` and gives a repeated
/// variable the same value everywhere.
inline bool consistent(const EncodedPattern &tp, const EncodedTriple &t) {
    const QueryTerm *terms[] = {&tp.s, &tp.p, &tp.o};
    const TermId vals[] = {t.s, t.p, t.o};
    for (int i = 0; i < 3; ++i) {
        if (!terms[i]->variable) {
            if (terms[i]->value != vals[i])
                return false;
            continue;
        }
        for (int j = i + 1; j < 3; ++j)
            if (terms[j]->variable && terms[j]->value == terms[i]->value && vals[j] != vals[i])
                return false;
    }
    return true;
}

/// Calls f(EncodedTriple) for each triple of `store` matching `tp` under the
/// extra fixed values in `fixed`, using the cheapest index available.
template <typename F>
void for_each_match(const WorkerStore &store, const EncodedPattern &tp, Probe fixed, F &&f) {
    const Probe c = constants_of(tp);
    if (c.s) {
        if (fixed.s && *fixed.s != *c.s)
            return;
        fixed.s = c.s;
    }
    if (c.p) {
        if (fixed.p && *fixed.p != *c.p)
            return;
        fixed.p = c.p;
    }
    if (c.o) {
        if (fixed.o && *fixed.o != *c.o)
            return;
        fixed.o = c.o;
    }
    auto emit = [&](const EncodedTriple &t) {
        if ((!fixed.s || t.s == *fixed.s) && (!fixed.o || t.o == *fixed.o) && consistent(tp, t))
            f(t);
    };
    auto one_predicate = [&](TermId p) {
        if (fixed.s) {
            for (TermId o : store.lookup_ps(*fixed.s, p))
                emit({*fixed.s, p, o});
        } else if (fixed.o) {
            for (TermId s : store.lookup_po(*fixed.o, p))
                emit({s, p, *fixed.o});
        } else {
            for (const auto &so : store.scan(p))
                emit({so.s, p, so.o});
        }
    };
    if (fixed.p) {
        one_predicate(*fixed.p);
    } else {
        for (TermId p : store.predicates())
            one_predicate(p);
    }
}

/// Rough local match count used to order local joins.
inline std::size_t local_cardinality(const WorkerStore &store, const EncodedPattern &tp) {
    auto one = [&](TermId p) -> std::size_t {
        if (!tp.s.variable)
            return store.lookup_ps(tp.s.value, p).size();
        if (!tp.o.variable)
            return store.lookup_po(tp.o.value, p).size();
        return store.scan(p).size();
    };
    if (!tp.p.variable)
        return one(tp.p.value);
    std::size_t total = 0;
    for (TermId p : store.predicates())
        total += one(p);
    return total;
}

} // namespace adhash
