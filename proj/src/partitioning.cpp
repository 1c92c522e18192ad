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

#include "adhash/partitioning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adhash {

std::vector<std::vector<EncodedTriple>> shard(std::span<const EncodedTriple> triples, const ClusterConfig &cfg) {
    if (cfg.num_workers == 0)
        throw std::invalid_argument("cluster needs at least one worker");
    std::vector<std::vector<EncodedTriple>> shards(cfg.num_workers);
    for (const auto &t : triples)
        shards[cfg.worker_of(t.s)].push_back(t);
    return shards;
}

BalanceReport balance_report(std::span<const std::size_t> shard_sizes) {
    BalanceReport r;
    if (shard_sizes.empty())
        return r;
    r.max = *std::max_element(shard_sizes.begin(), shard_sizes.end());
    r.min = *std::min_element(shard_sizes.begin(), shard_sizes.end());
    double mean = 0;
    for (auto n : shard_sizes)
        mean += static_cast<double>(n);
    mean /= static_cast<double>(shard_sizes.size());
    double var = 0;
    for (auto n : shard_sizes)
        var += (static_cast<double>(n) - mean) * (static_cast<double>(n) - mean);
    r.stddev = std::sqrt(var / static_cast<double>(shard_sizes.size()));
    return r;
}

BalanceReport balance_report(const std::vector<std::vector<EncodedTriple>> &shards) {
    std::vector<std::size_t> sizes;
    sizes.reserve(shards.size());
    for (const auto &s : shards)
        sizes.push_back(s.size());
    return balance_report(sizes);
}

} // namespace adhash
