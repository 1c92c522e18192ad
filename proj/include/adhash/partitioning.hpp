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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adhash/rdf.hpp"

namespace adhash {

using WorkerId = std::uint32_t;

enum class HashKind {
    Modulo,          // id mod N
    Multiplicative,  // seeded multiplicative mix, then mod N
};

struct ClusterConfig {
    std::uint32_t num_workers = 1;
    HashKind hash = HashKind::Modulo;
    std::uint64_t seed = 0;

    /// Worker owning every triple whose subject is `id`.
    WorkerId worker_of(TermId id) const noexcept {
        if (hash == HashKind::Modulo)
            return static_cast<WorkerId>(id % num_workers);
        std::uint64_t h = (static_cast<std::uint64_t>(id) + seed) * 0x9E3779B97F4A7C15ULL;
        h ^= h >> 32;
        return static_cast<WorkerId>(h % num_workers);
    }
};

/// Subject-hash sharding: every triple goes to worker_of(t.s), nothing is
/// replicated. Shard order preserves input order.
std::vector<std::vector<EncodedTriple>> shard(std::span<const EncodedTriple> triples, const ClusterConfig &cfg);

struct BalanceReport {
    std::size_t max = 0;
    std::size_t min = 0;
    double stddev = 0;  // population standard deviation of shard sizes
};

BalanceReport balance_report(std::span<const std::size_t> shard_sizes);
BalanceReport balance_report(const std::vector<std::vector<EncodedTriple>> &shards);

} // namespace adhash
