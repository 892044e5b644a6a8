#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "rstorm/errors.hpp"
#include "rstorm/generators.hpp"
#include "rstorm/scheduler.hpp"
#include "rstorm/simulator.hpp"
#include "rstorm/workload.hpp"

using namespace rstorm;

namespace {

Topology pair_topology() {
    return Topology("pair", {{ComponentId("spout"), ComponentKind::Spout, 1, {64, 10, 0}},
                             {ComponentId("sink"), ComponentKind::Bolt, 1, {64, 10, 0}}},
                    {{ComponentId("spout"), ComponentId("sink")}});
}

Schedule place_all(const Topology& t, std::vector<std::size_t> nodes) {
    Schedule s{t.id(), {}, NodeIndex{nodes.front()}, {}};
    std::size_t k = 0;
    for (const auto& task : tasks_of(t)) s.assignments.push_back({task.key, NodeIndex{nodes[k++ % nodes.size()]}});
    return s;
}

WorkloadModel base_model() {
    WorkloadModel m;
    m.name = "test";
    m.default_service_time = 0.001;
    m.network_delay = {0.00005, 0.0005, 0.002};
    return m;
}

SimOptions opts(double duration, std::uint64_t seed = 1) {
    SimOptions o;
    o.duration = duration;
    o.seed = seed;
    return o;
}

WorkloadModel fixture(const char* name) {
    return load_workload(std::filesystem::path(RSTORM_TEST_FIXTURES) / "workloads" / (std::string(name) + ".json"));
}

}  // namespace

TEST_CASE("rate-limited: spout rate 100/s reaches the sink") {
    const auto c = oracle::uniform_cluster(1, 1);
    const auto t = pair_topology();
    auto m = base_model();
    m.spout_rate = 100;
    const auto r = simulate(place_all(t, {0}), t, *c, m, opts(60));
    CHECK(r.q_per_sink.at("sink") == doctest::Approx(100).epsilon(0.01));
    CHECK(r.throughput == doctest::Approx(1000).epsilon(0.01));
    CHECK(r.warmup == doctest::Approx(12));
}

TEST_CASE("service-limited: a 20 ms sink saturates at 50/s") {
    // Two cores, so the spout's generation work does not steal the sink's CPU.
    const auto c = oracle::uniform_cluster(1, 1, 2048, 200);
    const auto t = pair_topology();
    auto m = base_model();
    m.service_time["sink"] = 0.020;
    m.max_pending = 16;
    const auto r = simulate(place_all(t, {0}), t, *c, m, opts(60));
    CHECK(r.q_per_sink.at("sink") == doctest::Approx(50).epsilon(0.02));
    const auto& node = r.cpu_utilization.front();
    // Sink busy all the time, spout 1 ms per 20 ms: (1 + 0.05) / 2 cores.
    CHECK(node.utilization == doctest::Approx(0.525).epsilon(0.02));
}

TEST_CASE("single core processor sharing adds spout and sink work") {
    const auto c = oracle::uniform_cluster(1, 1);
    const auto t = pair_topology();
    auto m = base_model();
    m.service_time["sink"] = 0.020;
    m.max_pending = 16;
    const auto r = simulate(place_all(t, {0}), t, *c, m, opts(60));
    CHECK(r.q_per_sink.at("sink") == doctest::Approx(1.0 / 0.021).epsilon(0.02));
    CHECK(r.cpu_utilization.front().utilization == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("link-limited: the inter-rack link caps throughput") {
    const auto c = oracle::uniform_cluster(2, 1);
    const auto t = pair_topology();
    auto m = base_model();
    m.default_service_time = 0.00001;
    m.inter_rack_capacity = 1000;
    m.max_pending = 32;
    const auto r = simulate(place_all(t, {0, 1}), t, *c, m, opts(60));
    CHECK(r.q_per_sink.at("sink") == doctest::Approx(1000).epsilon(0.02));
    CHECK(r.comm.inter_rack_pairs == 1);
}

TEST_CASE("a pending window bounds throughput by latency") {
    // One outstanding tree: each needs spout work, one hop, sink work and an ack.
    const auto c = oracle::uniform_cluster(2, 1);
    const auto t = pair_topology();
    auto m = base_model();
    m.max_pending = 1;
    const auto r = simulate(place_all(t, {0, 1}), t, *c, m, opts(30));
    const double cycle = 0.001 + 0.002 + 0.001 + 0.002;
    CHECK(r.q_per_sink.at("sink") == doctest::Approx(1.0 / cycle).epsilon(0.01));
}

TEST_CASE("utilization summary") {
    SimReport r;
    r.cpu_utilization = {{"a", 0, 0}, {"b", 0, 0}};
    CHECK(utilization_summary(r, false) == 0.0);
    CHECK(utilization_summary(r, true) == 0.0);
    r.cpu_utilization = {{"a", 1.0, 2}, {"b", 0, 0}};
    CHECK(utilization_summary(r, true) == 1.0);
    CHECK(utilization_summary(r, false) == 0.5);
    r.cpu_utilization = {{"a", 0.5, 1}, {"b", 1.0, 3}, {"c", 0.0, 0}};
    CHECK(utilization_summary(r, true) == doctest::Approx(0.75));
}

TEST_CASE("input errors") {
    const auto c = oracle::uniform_cluster(1, 2);
    const auto t = pair_topology();
    auto m = base_model();
    m.spout_rate = 10;
    auto partial = place_all(t, {0});
    partial.unschedulable.push_back(partial.assignments.back().task);
    partial.assignments.pop_back();
    CHECK_THROWS_AS(simulate(partial, t, *c, m, opts(10)), ValidationError);
    CHECK_THROWS_AS(simulate(place_all(t, {0}), t, *c, m, opts(0)), ValidationError);
    SimOptions bad = opts(10);
    bad.warmup = 10;
    CHECK_THROWS_AS(simulate(place_all(t, {0}), t, *c, m, bad), ValidationError);

    auto unbounded = base_model();
    unbounded.max_pending = 0;
    CHECK_THROWS_AS(simulate(place_all(t, {0}), t, *c, unbounded, opts(10)), ValidationError);
    auto inverted = m;
    inverted.network_delay = {0.01, 0.001, 0.002};
    CHECK_THROWS_AS(inverted.validate(), ValidationError);
}

TEST_CASE("tuples are conserved on every edge") {
    const auto c = oracle::uniform_cluster(2, 6);
    const auto m = fixture("network-bound");
    for (const auto& topo : {gen_linear(4, 4, m.generator_demands), gen_diamond(3, 4, m.generator_demands),
                             gen_star(2, 2, 4, m.generator_demands)}) {
        for (const auto& placed : {schedule(topo, ClusterState(c)), round_robin_schedule(topo, ClusterState(c))}) {
            const auto r = simulate(placed.schedule, topo, *c, m, opts(5));
            REQUIRE(r.edges.size() == topo.edges().size());
            for (const auto& e : r.edges) {
                CAPTURE(e.from);
                CAPTURE(e.to);
                CHECK(e.emitted > 0);
                CHECK(e.emitted == e.received + e.in_flight);
            }
            for (const auto& u : r.cpu_utilization) {
                CHECK(u.utilization >= 0.0);
                CHECK(u.utilization <= 1.0);
            }
            CHECK(r.throughput >= 0.0);
        }
    }
}

TEST_CASE("cycles terminate through the hop limit") {
    const auto c = oracle::uniform_cluster(1, 2);
    Topology t("loop",
               {{ComponentId("s"), ComponentKind::Spout, 1, {64, 10, 0}},
                {ComponentId("a"), ComponentKind::Bolt, 2, {64, 10, 0}},
                {ComponentId("b"), ComponentKind::Bolt, 2, {64, 10, 0}},
                {ComponentId("out"), ComponentKind::Bolt, 1, {64, 10, 0}}},
               {{ComponentId("s"), ComponentId("a")},
                {ComponentId("a"), ComponentId("b")},
                {ComponentId("b"), ComponentId("a")},
                {ComponentId("b"), ComponentId("out")}});
    auto m = base_model();
    m.default_service_time = 0.0001;
    m.max_pending = 4;
    const auto r = simulate(place_all(t, {0, 1}), t, *c, m, opts(5));
    CHECK(r.completed_trees > 0);
    CHECK(r.q_per_sink.at("out") > 0);
    for (const auto& e : r.edges) CHECK(e.emitted == e.received + e.in_flight);
}

TEST_CASE("same seed gives the same report") {
    const auto c = oracle::uniform_cluster(2, 6);
    const auto m = fixture("industry");
    const auto topo = gen_diamond(3, 4, m.generator_demands);
    const auto rr = round_robin_schedule(topo, ClusterState(c));
    const auto a = simulate(rr.schedule, topo, *c, m, opts(5, 42));
    const auto b = simulate(rr.schedule, topo, *c, m, opts(5, 42));
    CHECK(a == b);
    CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("lower delays or wider links never reduce throughput") {
    const auto c = oracle::uniform_cluster(2, 6);
    for (const char* name : {"network-bound", "industry"}) {
        const auto base = fixture(name);
        for (const auto& topo : {gen_linear(4, 4, base.generator_demands), gen_star(2, 2, 4, base.generator_demands)}) {
            const auto rr = round_robin_schedule(topo, ClusterState(c));
            const double ref = simulate(rr.schedule, topo, *c, base, opts(5, 7)).throughput;

            auto faster = base;
            faster.network_delay.inter_rack /= 2;
            auto near = base;
            near.network_delay.intra_rack /= 2;
            auto wide = base;
            wide.inter_rack_capacity = *base.inter_rack_capacity * 2;
            auto wide_rack = base;
            wide_rack.intra_rack_capacity.reset();
            for (const auto& m : {faster, near, wide, wide_rack}) {
                CAPTURE(name);
                CAPTURE(topo.id());
                CHECK(simulate(rr.schedule, topo, *c, m, opts(5, 7)).throughput >= ref);
            }
        }
    }
}

TEST_CASE("one large node ignores inter-rack parameters") {
    std::vector<Rack> racks{{"r1", {{"big", 800, 65536}, {"n2", 100, 2048}}}, {"r2", {{"n3", 100, 2048}}}};
    const Cluster c(racks);
    const auto base = fixture("network-bound");
    const auto topo = gen_diamond(3, 4, base.generator_demands);
    Schedule all{topo.id(), {}, NodeIndex{0}, {}};
    for (const auto& task : tasks_of(topo)) all.assignments.push_back({task.key, NodeIndex{0}});

    auto other = base;
    other.network_delay.inter_rack = 0.05;
    other.inter_rack_capacity = 10;
    other.intra_rack_capacity = 10;
    const auto a = simulate(all, topo, c, base, opts(5, 3));
    const auto b = simulate(all, topo, c, other, opts(5, 3));
    CHECK(a.throughput > 0);
    CHECK(a.throughput == b.throughput);
    CHECK(a.q_per_sink == b.q_per_sink);
}

TEST_CASE("joint simulation shares nodes between topologies") {
    const auto c = oracle::uniform_cluster(1, 1, 4096, 100);
    auto m = base_model();
    m.service_time["sink"] = 0.010;
    m.max_pending = 8;
    const auto t1 = pair_topology();
    const auto t2 = Topology("pair2", t1.components(), t1.edges());
    const auto s1 = place_all(t1, {0});
    auto s2 = place_all(t2, {0});
    s2.topology_id = "pair2";
    const auto alone = simulate(s1, t1, *c, m, opts(20));
    const std::vector<Deployment> both{{&t1, &s1}, {&t2, &s2}};
    const auto joint = simulate_many(both, *c, m, opts(20));
    REQUIRE(joint.size() == 2);
    CHECK(joint[0].topology_id == "pair");
    CHECK(joint[1].topology_id == "pair2");
    const double sum = joint[0].q_per_sink.at("sink") + joint[1].q_per_sink.at("sink");
    CHECK(sum == doctest::Approx(alone.q_per_sink.at("sink")).epsilon(0.03));
    CHECK(joint[0].q_per_sink.at("sink") < 0.6 * alone.q_per_sink.at("sink"));
}

TEST_CASE("report json round trip") {
    const auto c = oracle::uniform_cluster(2, 2);
    const auto t = pair_topology();
    auto m = base_model();
    m.spout_rate = 50;
    const auto r = simulate(place_all(t, {0, 3}), t, *c, m, opts(4));
    CHECK(sim_report_from_json(Json::parse(to_json(r).dump())) == r);
    CHECK_THROWS_AS(sim_report_from_json(Json::parse("{}")), ValidationError);
}

TEST_CASE("workload fixtures load and validate") {
    for (const char* name : {"network-bound", "cpu-bound", "industry", "adversarial"}) {
        CAPTURE(name);
        const auto m = fixture(name);
        CHECK(m.name == name);
        CHECK_NOTHROW(m.validate());
        CHECK(workload_from_json(to_json(m)) == m);
    }
    const auto cpu = fixture("cpu-bound");
    CHECK(cpu.spout_rate == 100.0);
    CHECK(cpu.generator_demands.for_component("sink").mem == 1536);
    CHECK(cpu.generator_demands.for_component("bolt1").mem == 512);
}
