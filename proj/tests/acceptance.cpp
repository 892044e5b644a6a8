// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "rstorm/errors.hpp"
#include "rstorm/experiment.hpp"
#include "rstorm/fixtures.hpp"
#include "rstorm/generators.hpp"
#include "rstorm/simulator.hpp"

using namespace rstorm;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

const FixtureStore& store() {
    static const FixtureStore s{RSTORM_TEST_FIXTURES};
    return s;
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os.precision(prec);
    os << std::fixed << v;
    return os.str();
}

ComparisonReport compare(std::vector<std::string> topologies, const std::string& cluster, const std::string& workload,
                         std::uint64_t seed = 1) {
    ExperimentSpec spec;
    spec.topologies = std::move(topologies);
    spec.cluster = cluster;
    spec.workload = workload;
    spec.duration = 60;
    spec.seed = seed;
    return run_experiment(spec, store());
}

Outcome hard_constraint_safety() {
    std::mt19937_64 rng(20150301);
    std::size_t violations = 0;
    std::size_t tasks = 0;
    for (int i = 0; i < 200; ++i) {
        const auto topo = oracle::random_topology(rng, 8, 1500);
        const auto cluster = oracle::random_cluster(rng);
        const auto r = schedule(topo, ClusterState(cluster));
        tasks += r.schedule.assignments.size();
        const auto used = oracle::memory_by_node(r.schedule, topo, *cluster);
        for (std::size_t n = 0; n < cluster->node_count(); ++n)
            if (used[n] > cluster->node(NodeIndex{n}).mem_capacity) ++violations;
    }
    return {violations == 0, "200 pairs, " + std::to_string(tasks) + " placed tasks, " + std::to_string(violations) +
                                 " memory violations"};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> mem(0, 2500);
    std::uniform_real_distribution<double> cpu(0, 150);
    std::uniform_real_distribution<double> w(0, 3);
    int agree = 0;
    for (int i = 0; i < 500; ++i) {
        const auto cluster = oracle::random_cluster(rng, 8);
        const auto state = oracle::random_state(rng, cluster);
        const Task task{{ComponentId("t"), 0}, {std::round(mem(rng)), std::round(cpu(rng)), 0}};
        const NodeIndex ref{rng() % cluster->node_count()};
        const SchedulerConfig cfg = i % 2 ? SchedulerConfig{} : SchedulerConfig{w(rng), w(rng), w(rng) + 0.01};
        const auto expected = oracle::brute_force_choice(task, state, ref, cfg);
        try {
            const auto got = node_selection(task, state, ref, cfg);
            agree += expected && got.node == *expected;
        } catch (const Unschedulable&) {
            agree += !expected;
        }
    }
    return {agree == 500, std::to_string(agree) + "/500 agree with the exhaustive argmin"};
}

Outcome locality_dominance() {
    bool ok = true;
    std::string detail;
    for (const char* topo : {"linear:4,4", "diamond:3,4", "star:2,2,4"}) {
        const auto report = compare({topo}, "clusters/2x6", "network-bound");
        const auto& t = report.topologies.front();
        const auto* rs = t.outcome(SchedulerKind::RStorm);
        const auto* rr = t.outcome(SchedulerKind::RoundRobin);
        const double ratio = t.throughput_ratio.value_or(0.0);
        const bool cheaper = rs->comm.weighted_sum < rr->comm.weighted_sum;
        ok = ok && cheaper && ratio >= 1.2;
        detail += std::string(topo) + " cost " + fmt(rs->comm.weighted_sum, 0) + "<" + fmt(rr->comm.weighted_sum, 0) +
                  " ratio " + fmt(ratio, 2) + "; ";
    }
    return {ok, detail};
}

Outcome cpu_bound_parity() {
    bool ok = true;
    std::string detail;
    for (const char* topo : {"linear:4,4", "diamond:3,4"}) {
        const auto report = compare({topo}, "clusters/2x6", "cpu-bound");
        const auto& t = report.topologies.front();
        const auto* rs = t.outcome(SchedulerKind::RStorm);
        const auto* rr = t.outcome(SchedulerKind::RoundRobin);
        const double ratio = t.throughput_ratio.value_or(0.0);
        const double util_gain = rs->utilization_used.mean / rr->utilization_all.mean;
        const bool pass = rs->nodes_used <= 7 && std::abs(ratio - 1.0) <= 0.05 && util_gain >= 1.5;
        ok = ok && pass;
        detail += std::string(topo) + " nodes " + std::to_string(rs->nodes_used) + "/12 tput ratio " + fmt(ratio) +
                  " util " + fmt(rs->utilization_used.mean) + " vs " + fmt(rr->utilization_all.mean) + " (x" +
                  fmt(util_gain, 2) + "); ";
    }
    return {ok, detail};
}

Outcome oversubscription_collapse() {
    const auto report = compare({"hotspot"}, "clusters/hotspot-2x6", "adversarial");
    const auto& t = report.topologies.front();
    const auto* rs = t.outcome(SchedulerKind::RStorm);
    const auto* rr = t.outcome(SchedulerKind::RoundRobin);

    // Round robin must actually over-subscribe a node's CPU for the scenario to mean anything.
    const auto cluster = std::make_shared<const Cluster>(store().cluster("clusters/hotspot-2x6"));
    const auto topo = store().topology("hotspot");
    const auto placed = round_robin_schedule(topo, ClusterState(cluster));
    double worst = 0;
    for (std::size_t n = 0; n < cluster->node_count(); ++n)
        worst = std::max(worst, -placed.state.avail(NodeIndex{n}).cpu / cluster->node(NodeIndex{n}).cpu_capacity);

    const double share = rs->throughput.mean > 0 ? rr->throughput.mean / rs->throughput.mean : 1.0;
    return {share < 0.2 && worst > 0 && rs->simulated && rr->simulated,
            "round_robin " + fmt(rr->throughput.mean, 0) + " vs rstorm " + fmt(rs->throughput.mean, 0) +
                " tuples/10s (" + fmt(100 * share, 1) + "%), worst node over-subscribed by " + fmt(100 * worst, 0) +
                "%"};
}

Outcome multi_topology() {
    const auto report = compare({"pageload", "processing"}, "clusters/2x12", "industry");
    bool ok = report.hard_constraints_ok && !report.any_unschedulable();
    std::string detail = "violations " + std::to_string(report.violations.size()) + ", unschedulable " +
                         (report.any_unschedulable() ? "yes" : "0") + "; ";
    for (const auto& t : report.topologies) {
        const auto* rs = t.outcome(SchedulerKind::RStorm);
        const auto* rr = t.outcome(SchedulerKind::RoundRobin);
        ok = ok && rs->simulated && rr->simulated && rs->throughput.mean >= rr->throughput.mean;
        detail += t.topology + " " + fmt(rs->throughput.mean, 0) + " vs " + fmt(rr->throughput.mean, 0) + "; ";
    }
    return {ok, detail};
}

// Full schedules and simulation reports for one scenario, serialized.
std::string artifacts(const std::vector<std::string>& refs, const std::string& cluster_ref,
                      const std::string& workload_ref) {
    const auto model = store().workload(workload_ref);
    const auto cluster = std::make_shared<const Cluster>(store().cluster(cluster_ref));
    std::vector<Topology> topologies;
    for (const auto& ref : refs) topologies.push_back(store().topology(ref, model.generator_demands));
    Json doc = Json::array();
    for (auto kind : {SchedulerKind::RStorm, SchedulerKind::RoundRobin}) {
        const auto placed = place(kind, topologies, ClusterState(cluster));
        std::vector<Deployment> deps;
        for (std::size_t i = 0; i < topologies.size(); ++i) {
            deps.push_back({&topologies[i], &placed.schedules[i]});
            doc.push_back(to_json(placed.schedules[i], *cluster));
        }
        SimOptions opts;
        opts.duration = 60;
        opts.seed = 1;
        for (const auto& r : simulate_many(deps, *cluster, model, opts)) doc.push_back(to_json(r));
    }
    return doc.dump();
}

Outcome determinism() {
    struct Scenario {
        std::vector<std::string> topologies;
        const char* cluster;
        const char* workload;
    };
    const std::vector<Scenario> scenarios{
        {{"linear:4,4"}, "clusters/2x6", "network-bound"},   {{"diamond:3,4"}, "clusters/2x6", "network-bound"},
        {{"star:2,2,4"}, "clusters/2x6", "network-bound"},   {{"linear:4,4"}, "clusters/2x6", "cpu-bound"},
        {{"diamond:3,4"}, "clusters/2x6", "cpu-bound"},      {{"hotspot"}, "clusters/hotspot-2x6", "adversarial"},
        {{"pageload", "processing"}, "clusters/2x12", "industry"},
    };
    std::size_t identical = 0;
    std::size_t bytes = 0;
    for (const auto& s : scenarios) {
        const auto first = artifacts(s.topologies, s.cluster, s.workload);
        bytes += first.size();
        bool same = true;
        for (int rep = 0; rep < 2; ++rep) same = same && artifacts(s.topologies, s.cluster, s.workload) == first;
        identical += same;
    }
    return {identical == scenarios.size(), std::to_string(identical) + "/" + std::to_string(scenarios.size()) +
                                               " scenarios byte-identical over 3 runs (" + std::to_string(bytes) +
                                               " bytes each)"};
}

Outcome simulator_sanity() {
    const Topology pair("pair",
                        {{ComponentId("spout"), ComponentKind::Spout, 1, {64, 10, 0}},
                         {ComponentId("sink"), ComponentKind::Bolt, 1, {64, 10, 0}}},
                        {{ComponentId("spout"), ComponentId("sink")}});
    auto on = [&](std::vector<std::size_t> nodes) {
        Schedule s{pair.id(), {{{ComponentId("spout"), 0}, NodeIndex{nodes[0]}}, {{ComponentId("sink"), 0}, NodeIndex{nodes[1]}}},
                   NodeIndex{nodes[0]}, {}};
        return s;
    };
    WorkloadModel base;
    base.name = "sanity";
    base.default_service_time = 0.001;
    base.network_delay = {0.00005, 0.0005, 0.002};
    SimOptions opts;
    opts.duration = 60;

    auto rate = base;
    rate.spout_rate = 100;
    const double q1 = simulate(on({0, 0}), pair, *oracle::uniform_cluster(1, 1), rate, opts).q_per_sink.at("sink");

    auto service = base;
    service.service_time["sink"] = 0.020;
    service.max_pending = 16;
    const double q2 =
        simulate(on({0, 0}), pair, *oracle::uniform_cluster(1, 1, 2048, 200), service, opts).q_per_sink.at("sink");

    auto link = base;
    link.default_service_time = 0.00001;
    link.inter_rack_capacity = 1000;
    link.max_pending = 32;
    const double q3 = simulate(on({0, 1}), pair, *oracle::uniform_cluster(2, 1), link, opts).q_per_sink.at("sink");

    const bool ok = std::abs(q1 - 100) <= 1 && std::abs(q2 - 50) <= 1 && std::abs(q3 - 1000) <= 20;
    return {ok, "rate-limited " + fmt(q1, 2) + "/s (100 +-1%), service-limited " + fmt(q2, 2) +
                    "/s (50 +-2%), link-limited " + fmt(q3, 1) + "/s (1000 +-2%)"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;  // 0 = no runtime limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "hard-constraint safety", 10, hard_constraint_safety},
        {2, "node-selection oracle equivalence", 5, oracle_equivalence},
        {3, "locality dominance (network-bound)", 60, locality_dominance},
        {4, "cpu-bound parity with fewer nodes", 60, cpu_bound_parity},
        {5, "over-subscription collapse", 30, oversubscription_collapse},
        {6, "multi-topology chaining", 60, multi_topology},
        {7, "determinism", 0, determinism},
        {8, "simulator sanity", 0, simulator_sanity},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.budget_s == 0 || secs < c.budget_s;
        const bool pass = o.ok && in_time;
        while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) o.detail.pop_back();
        failed += !pass;
        std::printf("[%s] criterion %d: %s | %s | %.2fs%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, c.budget_s > 0 ? (" (limit " + fmt(c.budget_s, 0) + "s)").c_str() : "");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
