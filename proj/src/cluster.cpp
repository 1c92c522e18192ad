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

#include "adhash/cluster.hpp"

#include <algorithm>

namespace adhash {

const char *to_string(MessageKind kind) {
    switch (kind) {
    case MessageKind::ProjectionHash: return "ProjectionHash";
    case MessageKind::ProjectionBroadcast: return "ProjectionBroadcast";
    case MessageKind::CandidateTriples: return "CandidateTriples";
    case MessageKind::LocalResults: return "LocalResults";
    case MessageKind::PlanBroadcast: return "PlanBroadcast";
    case MessageKind::CardinalityProbe: return "CardinalityProbe";
    case MessageKind::CardinalityReply: return "CardinalityReply";
    case MessageKind::Eviction: return "Eviction";
    }
    return "?";
}

Transport::Transport(std::uint32_t num_workers)
    : outbox_(num_workers + 1, std::vector<std::vector<Message>>(num_workers + 1)), inbox_(num_workers + 1) {}

void Transport::send(Message m) {
    if (m.from >= outbox_.size() || m.to >= outbox_.size())
        throw std::out_of_range("message endpoint out of range");
    auto &box = outbox_[m.from][m.to];
    box.push_back(std::move(m));
}

void Transport::deliver() {
    const auto n = inbox_.size();
    for (std::size_t to = 0; to < n; ++to)
        for (std::size_t from = 0; from < n; ++from) {
            auto &box = outbox_[from][to];
            for (auto &m : box) {
                if (from != to && from + 1 < n && to + 1 < n)
                    inter_worker_rows_ += m.payload_rows();
                ++delivered_;
                inbox_[to].push_back(std::move(m));
            }
            box.clear();
        }
}

std::vector<Message> Transport::take_inbox(WorkerId endpoint) {
    std::vector<Message> out;
    out.swap(inbox_.at(endpoint));
    return out;
}

WorkerPool::WorkerPool(std::size_t threads) {
    if (threads <= 1)
        return;
    threads_.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i)
        threads_.emplace_back([this] { loop(); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard lock(mu_);
        stop_ = true;
    }
    work_cv_.notify_all();
    for (auto &t : threads_)
        t.join();
}

void WorkerPool::loop() {
    std::uint64_t seen = 0;
    std::unique_lock lock(mu_);
    for (;;) {
        work_cv_.wait(lock, [&] { return stop_ || (generation_ != seen && next_ < total_); });
        if (stop_)
            return;
        while (next_ < total_) {
            const std::size_t i = next_++;
            const auto *task = task_;
            lock.unlock();
            std::exception_ptr err;
            try {
                (*task)(i);
            } catch (...) {
                err = std::current_exception();
            }
            lock.lock();
            if (err && !error_) {
                error_ = err;
                error_worker_ = i;
            }
            if (++finished_ == total_)
                done_cv_.notify_all();
        }
        seen = generation_;
    }
}

void WorkerPool::run(std::size_t n, const std::function<void(std::size_t)> &task) {
    std::exception_ptr err;
    std::size_t err_worker = 0;
    if (threads_.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                task(i);
            } catch (...) {
                if (!err) {
                    err = std::current_exception();
                    err_worker = i;
                }
            }
        }
    } else {
        std::unique_lock lock(mu_);
        task_ = &task;
        total_ = n;
        next_ = finished_ = 0;
        error_ = nullptr;
        ++generation_;
        work_cv_.notify_all();
        done_cv_.wait(lock, [&] { return finished_ == total_; });
        task_ = nullptr;
        err = error_;
        err_worker = error_worker_;
        total_ = 0;
    }
    if (err) {
        try {
            std::rethrow_exception(err);
        } catch (const std::exception &e) {
            throw WorkerFailure(static_cast<WorkerId>(err_worker), e.what());
        } catch (...) {
            throw WorkerFailure(static_cast<WorkerId>(err_worker), "unknown error");
        }
    }
}

namespace {

std::size_t pool_size(std::uint32_t workers) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    return std::min<std::size_t>(workers, hw);
}

} // namespace

Cluster::Cluster(const ClusterConfig &cfg, std::span<const EncodedTriple> triples, std::size_t num_terms)
    : cfg_(cfg), transport_(cfg.num_workers), pool_(pool_size(cfg.num_workers)) {
    auto shards = shard(triples, cfg_);
    workers_.resize(cfg_.num_workers);
    run_phase([&](Worker &w) {
        for (const auto &t : shards[w.id])
            w.main.insert(t);
    });
    // Degrees count each distinct triple once.
    std::vector<EncodedTriple> distinct;
    distinct.reserve(triples.size());
    for (const auto &w : workers_)
        w.main.for_each([&](const EncodedTriple &t) { distinct.push_back(t); });
    degrees_ = compute_degrees(distinct, num_terms);
    run_phase([&](Worker &w) { w.local_stats = compute_local_stats(w.main, degrees_); });
    std::vector<PredicateStats> partial;
    for (const auto &w : workers_) {
        partial.push_back(w.local_stats);
        total_ += w.main.size();
    }
    global_stats_ = aggregate_stats(partial);
}

void Cluster::run_phase(const std::function<void(Worker &)> &step) {
    for (std::size_t i = 0; i < workers_.size(); ++i)
        workers_[i].id = static_cast<WorkerId>(i);
    pool_.run(workers_.size(), [&](std::size_t i) { step(workers_[i]); });
    transport_.deliver();
}

} // namespace adhash
