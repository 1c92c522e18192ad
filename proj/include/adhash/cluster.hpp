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

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "adhash/partitioning.hpp"
#include "adhash/storage.hpp"

namespace adhash {

enum class MessageKind : std::uint8_t {
    ProjectionHash,
    ProjectionBroadcast,
    CandidateTriples,
    LocalResults,
    PlanBroadcast,
    CardinalityProbe,
    CardinalityReply,
    Eviction,
};

const char *to_string(MessageKind kind);

struct Message {
    MessageKind kind = MessageKind::LocalResults;
    WorkerId from = 0;
    WorkerId to = 0;
    std::uint32_t tag = 0;              // request-specific: pattern or edge id
    std::vector<TermId> values;         // projected column, result cells, counts
    std::vector<EncodedTriple> triples; // candidate triples

    std::size_t payload_rows() const { return values.size() + triples.size(); }
};

/// In-process message fabric. Endpoint N is the master. Each sender owns its
/// row of outboxes, so sends from different worker threads never contend;
/// deliver() is the phase barrier that makes sent messages visible.
class Transport {
public:
    explicit Transport(std::uint32_t num_workers);

    WorkerId master() const noexcept { return static_cast<WorkerId>(inbox_.size() - 1); }

    void send(Message m);
    void deliver();
    std::vector<Message> take_inbox(WorkerId endpoint);

    /// Rows carried between two distinct workers since the last reset.
    std::uint64_t inter_worker_rows() const noexcept { return inter_worker_rows_; }
    std::uint64_t messages_delivered() const noexcept { return delivered_; }
    void reset_counters() noexcept { inter_worker_rows_ = delivered_ = 0; }

private:
    std::vector<std::vector<std::vector<Message>>> outbox_;  // [from][to]
    std::vector<std::vector<Message>> inbox_;
    std::uint64_t inter_worker_rows_ = 0;
    std::uint64_t delivered_ = 0;
};

class WorkerFailure : public std::runtime_error {
public:
    WorkerFailure(WorkerId w, const std::string &what)
        : std::runtime_error("worker " + std::to_string(w) + " failed: " + what), worker_(w) {}
    WorkerId worker() const noexcept { return worker_; }

private:
    WorkerId worker_;
};

/// Persistent threads running one task per worker per phase. With a single
/// hardware thread the tasks run on the caller.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t threads);
    ~WorkerPool();
    WorkerPool(const WorkerPool &) = delete;
    WorkerPool &operator=(const WorkerPool &) = delete;

    /// Runs task(0..n-1) and waits. The first failure is rethrown as
    /// WorkerFailure after every task has finished.
    void run(std::size_t n, const std::function<void(std::size_t)> &task);

    std::size_t threads() const noexcept { return threads_.size(); }

private:
    void loop();

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable work_cv_, done_cv_;
    const std::function<void(std::size_t)> *task_ = nullptr;
    std::size_t total_ = 0, next_ = 0, finished_ = 0;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
    std::size_t error_worker_ = 0;
};

struct Worker {
    WorkerId id = 0;
    WorkerStore main;
    PredicateStats local_stats;
    /// Replica storage modules keyed by pattern-index edge id.
    std::map<std::uint32_t, WorkerStore> modules;
    /// Module triples whose subject is owned by another worker.
    std::size_t replicated = 0;
};

class Cluster {
public:
    Cluster(const ClusterConfig &cfg, std::span<const EncodedTriple> triples, std::size_t num_terms);

    const ClusterConfig &config() const noexcept { return cfg_; }
    std::uint32_t size() const noexcept { return cfg_.num_workers; }
    WorkerId owner(TermId id) const noexcept { return cfg_.worker_of(id); }

    Worker &worker(WorkerId w) { return workers_.at(w); }
    const Worker &worker(WorkerId w) const { return workers_.at(w); }

    const PredicateStats &global_stats() const noexcept { return global_stats_; }
    const DegreeTable &degrees() const noexcept { return degrees_; }
    std::size_t total_triples() const noexcept { return total_; }

    Transport &transport() noexcept { return transport_; }

    /// One barrier-synchronized phase: every worker runs `step`, then the
    /// messages it sent are delivered.
    void run_phase(const std::function<void(Worker &)> &step);

private:
    ClusterConfig cfg_;
    std::vector<Worker> workers_;
    PredicateStats global_stats_;
    DegreeTable degrees_;
    std::size_t total_ = 0;
    Transport transport_;
    WorkerPool pool_;
};

} // namespace adhash
