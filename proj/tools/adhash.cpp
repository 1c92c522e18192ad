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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "adhash/engine.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace adhash;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kRuntime = 3 };

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Session {
    fs::path path;
    std::string data;
    std::uint32_t workers = 1;
    HashKind hash = HashKind::Modulo;
    std::uint64_t seed = 0;
    std::uint64_t freq_threshold = 10;
    std::optional<double> budget_pct = 20.0;
    std::vector<std::string> history;  // queries run with adaptivity on

    static Session read(const fs::path &p) {
        std::ifstream in(p);
        if (!in)
            throw std::runtime_error("cannot open session " + p.string());
        json j = json::parse(in);
        Session s;
        s.path = p;
        s.data = j.at("data").get<std::string>();
        s.workers = j.at("workers").get<std::uint32_t>();
        s.hash = j.value("hash", "modulo") == "multiplicative" ? HashKind::Multiplicative : HashKind::Modulo;
        s.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("adaptivity")) {
            const auto &a = j["adaptivity"];
            s.freq_threshold = a.value("freq_threshold", std::uint64_t{10});
            if (a.contains("budget_pct") && !a["budget_pct"].is_null())
                s.budget_pct = a["budget_pct"].get<double>();
            else
                s.budget_pct = std::nullopt;
        }
        s.history = j.value("history", std::vector<std::string>{});
        return s;
    }

    void write() const {
        json j;
        j["data"] = data;
        j["workers"] = workers;
        j["hash"] = hash == HashKind::Multiplicative ? "multiplicative" : "modulo";
        j["seed"] = seed;
        j["adaptivity"] = {{"freq_threshold", freq_threshold},
                           {"budget_pct", budget_pct ? json(*budget_pct) : json(nullptr)}};
        j["history"] = history;
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write session " + path.string());
        out << j.dump(2) << '\n';
    }

    EngineOptions options(bool adaptive) const {
        EngineOptions o;
        o.cluster.num_workers = workers;
        o.cluster.hash = hash;
        o.cluster.seed = seed;
        o.adaptive = adaptive;
        o.adaptivity.freq_threshold = freq_threshold;
        o.adaptivity.budget_pct = budget_pct;
        return o;
    }

    /// Loads the data and replays the adaptive history when asked.
    Engine open(bool adaptive) const {
        std::ifstream in(data);
        if (!in)
            throw std::runtime_error("cannot open data file " + data);
        Engine e = Engine::from_ntriples(in, options(adaptive));
        if (adaptive)
            e.run_workload(history);
        return e;
    }
};

std::string read_file(const std::string &p) {
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot open " + p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_balance(std::ostream &out, const Cluster &c) {
    std::vector<std::size_t> sizes;
    out << "worker\ttriples\n";
    for (WorkerId w = 0; w < c.size(); ++w) {
        sizes.push_back(c.worker(w).main.size());
        out << w << '\t' << sizes.back() << '\n';
    }
    const auto r = balance_report(sizes);
    out << "max\t" << r.max << "\nmin\t" << r.min << "\nstddev\t" << r.stddev << '\n';
}

void print_adaptivity(std::ostream &out, const Engine &e) {
    const auto *a = e.adaptivity();
    out << "# pattern index\n";
    a->pattern_index().dump(out, e.dictionary());
    out << "# replicas\nworker\treplicated\tbudget\n";
    for (WorkerId w = 0; w < e.cluster().size(); ++w) {
        const auto b = a->budget(w);
        out << w << '\t' << a->replicated(w) << '\t' << (b ? std::to_string(*b) : std::string("inf")) << '\n';
    }
    out << "# evictions\nepoch\tpattern-id\ttriples-freed\n";
    for (const auto &r : a->eviction_log())
        out << r.epoch << '\t' << r.pattern_id << '\t' << r.triples_freed << '\n';
}

int cmd_load(const std::string &file, std::uint32_t workers, const std::string &hash, std::uint64_t seed,
             std::string session_path) {
    if (workers == 0)
        throw UsageError("--workers must be at least 1");
    Session s;
    s.data = fs::absolute(file).string();
    s.workers = workers;
    s.hash = hash == "multiplicative" ? HashKind::Multiplicative : HashKind::Modulo;
    s.seed = seed;
    s.path = session_path.empty() ? fs::path(file + ".session.json") : fs::path(session_path);
    const auto t0 = std::chrono::steady_clock::now();
    Engine e = s.open(false);
    std::cerr << "load_seconds\t" << seconds_since(t0) << '\n';
    std::cout << "triples\t" << e.cluster().total_triples() << "\nterms\t" << e.dictionary().size() << '\n';
    print_balance(std::cout, e.cluster());
    s.write();
    std::cout << "session\t" << s.path.string() << '\n';
    return kOk;
}

int cmd_query(const std::string &session, const std::string &file, bool explain_plan, bool trace) {
    const Session s = Session::read(session);
    Engine e = s.open(!s.history.empty());
    for (const auto &text : split_queries(read_file(file))) {
        const auto r = e.run(text);
        if (explain_plan) {
            std::cerr << "mode\t" << to_string(r.mode) << '\n';
            if (r.plan)
                std::cerr << explain(*r.plan, r.query);
        }
        if (trace)
            r.trace.write_tsv(std::cerr);
        for (const auto &row : e.decode(r.rows)) {
            for (std::size_t i = 0; i < row.size(); ++i)
                std::cout << (i ? "\t" : "") << row[i];
            std::cout << '\n';
        }
    }
    return kOk;
}

int cmd_workload(const std::string &session, const std::string &file, const std::string &adaptive,
                 std::uint64_t threshold, std::optional<double> budget) {
    Session s = Session::read(session);
    const bool on = adaptive == "on";
    if (on) {
        s.freq_threshold = threshold;
        s.budget_pct = budget;
    }
    Engine e = s.open(on);
    const auto queries = split_queries(read_file(file));
    const auto t0 = std::chrono::steady_clock::now();
    const auto summary = e.run_workload(queries, [](std::size_t i, const std::string &why) {
        std::cerr << "query " << i + 1 << ": " << why << '\n';
    });
    std::cerr << "workload_seconds\t" << seconds_since(t0) << '\n';
    summary.write(std::cout);
    if (on) {
        s.history.insert(s.history.end(), queries.begin(), queries.end());
        s.write();
    }
    return kOk;
}

int cmd_stats(const std::string &session, const std::string &what) {
    const Session s = Session::read(session);
    Engine e = s.open(what == "adaptivity" || (what.empty() && !s.history.empty()));
    if (what.empty() || what == "balance")
        print_balance(std::cout, e.cluster());
    if (what.empty() || what == "predicates")
        write_stats_tsv(std::cout, e.cluster().global_stats(), e.dictionary());
    if ((what.empty() && e.adaptivity()) || what == "adaptivity")
        print_adaptivity(std::cout, e);
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Adaptive hash-partitioned RDF engine"};
    app.require_subcommand(1);

    std::string file, session, session_out, hash = "modulo", adaptive = "off", what;
    std::uint32_t workers = 1;
    std::uint64_t seed = 0, threshold = 10;
    double budget = 20.0;
    bool explain_plan = false, trace = false;

    auto *load = app.add_subcommand("load", "Load an N-Triples file and create a session");
    load->add_option("file", file, "N-Triples file")->required();
    load->add_option("--workers", workers, "Number of workers")->check(CLI::PositiveNumber);
    load->add_option("--hash", hash, "Partitioning hash")->check(CLI::IsMember({"modulo", "multiplicative"}));
    load->add_option("--seed", seed, "Seed for the multiplicative hash");
    load->add_option("--session", session_out, "Session file to write");

    auto *query = app.add_subcommand("query", "Run the queries in a file");
    query->add_option("session", session, "Session file")->required();
    query->add_option("--file", file, "Query file")->required();
    query->add_flag("--explain", explain_plan, "Print the plan to stderr");
    query->add_flag("--trace-messages", trace, "Print per-step message counts to stderr");

    auto *workload = app.add_subcommand("workload", "Replay a ';'-separated workload");
    workload->add_option("session", session, "Session file")->required();
    workload->add_option("--file", file, "Workload file")->required();
    workload->add_option("--adaptive", adaptive, "on|off")->check(CLI::IsMember({"on", "off"}));
    workload->add_option("--freq-threshold", threshold, "Hot pattern threshold")->check(CLI::PositiveNumber);
    auto *budget_opt =
        workload->add_option("--budget-pct", budget, "Replica budget, percent of each worker's triples")
            ->check(CLI::NonNegativeNumber);
    bool unbounded = false;
    workload->add_flag("--unbounded", unbounded, "No replica budget")->excludes(budget_opt);

    auto *stats = app.add_subcommand("stats", "Print session statistics");
    stats->add_option("session", session, "Session file")->required();
    stats->add_option("what", what, "adaptivity|predicates|balance")
        ->check(CLI::IsMember({"adaptivity", "predicates", "balance"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*load)
            return cmd_load(file, workers, hash, seed, session_out);
        if (*query)
            return cmd_query(session, file, explain_plan, trace);
        if (*workload)
            return cmd_workload(session, file, adaptive, threshold,
                                unbounded ? std::nullopt : std::optional<double>(budget));
        if (*stats)
            return cmd_stats(session, what);
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const MalformedLine &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const QuerySyntaxError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const UnknownPrefix &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const DisconnectedQuery &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    } catch (const json::exception &e) {
        std::cerr << "error: malformed session: " << e.what() << '\n';
        return kParse;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
