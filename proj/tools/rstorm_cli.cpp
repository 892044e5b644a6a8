// rstorm: schedule, simulate and compare stream topologies on a simulated cluster.
//
// Exit codes: 0 ok, 1 usage or internal error, 2 validation failure,
// 3 unschedulable tasks, 4 missing input, 5 hard-constraint violation.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "rstorm/errors.hpp"
#include "rstorm/experiment.hpp"
#include "rstorm/fixtures.hpp"
#include "rstorm/generators.hpp"
#include "rstorm/scheduler.hpp"
#include "rstorm/simulator.hpp"

using namespace rstorm;

namespace {

enum Exit : int { kOk = 0, kError = 1, kInvalid = 2, kUnschedulable = 3, kMissing = 4, kViolation = 5 };

struct Common {
    std::string fixtures;
    std::vector<std::string> topologies;
    std::string cluster = "clusters/2x6";
    std::string workload;
    std::string out;
    std::vector<double> weights;

    FixtureStore store() const {
        return fixtures.empty() ? FixtureStore::from_environment() : FixtureStore(fixtures);
    }

    SchedulerConfig config() const {
        SchedulerConfig cfg;
        if (!weights.empty()) {
            if (weights.size() != 3) throw ValidationError("--weights takes mem,cpu,bw");
            cfg = {weights[0], weights[1], weights[2]};
        }
        cfg.validate();
        return cfg;
    }
};

void emit(const Json& doc, const std::string& out) {
    if (out.empty()) return;
    if (out == "-") {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw MissingInput("cannot write " + out);
    f << doc.dump(2) << '\n';
}

std::vector<Topology> load_topologies(const Common& c, const FixtureStore& store, const GeneratorDemands& demands) {
    if (c.topologies.empty()) throw ValidationError("at least one --topology is required");
    std::vector<Topology> out;
    for (const auto& ref : c.topologies) {
        out.push_back(store.topology(ref, demands));
        require_valid(out.back());
    }
    return out;
}

void print_cost(const CommunicationCost& cost) {
    std::cout << "  communication pairs: intra_node " << cost.intra_node_pairs << ", intra_rack "
              << cost.intra_rack_pairs << ", inter_rack " << cost.inter_rack_pairs
              << "; weighted sum " << cost.weighted_sum << '\n';
}

int run_schedule(const Common& c, const std::string& scheduler_name) {
    const auto store = c.store();
    const auto demands = c.workload.empty() ? GeneratorDemands{} : store.workload(c.workload).generator_demands;
    const auto topologies = load_topologies(c, store, demands);
    const auto cluster = std::make_shared<const Cluster>(store.cluster(c.cluster));
    const auto kind = parse_scheduler(scheduler_name);
    const auto placed = place(kind, topologies, ClusterState(cluster), c.config());

    Json doc;
    doc["scheduler"] = std::string(to_string(kind));
    doc["schedules"] = Json::array();
    bool unschedulable = false;
    for (std::size_t i = 0; i < topologies.size(); ++i) {
        const auto& s = placed.schedules[i];
        const auto cost = communication_cost(s, topologies[i], *cluster);
        std::cout << "topology " << s.topology_id << " (" << to_string(kind) << "), ref node "
                  << (s.ref_node ? cluster->node(*s.ref_node).id : "-") << ", nodes used " << s.nodes_used() << '\n';
        for (const auto& a : s.assignments)
            std::cout << "  " << std::left << std::setw(24) << to_string(a.task) << cluster->node(a.node).id << '\n';
        for (const auto& t : s.unschedulable) std::cout << "  " << std::setw(24) << to_string(t) << "UNSCHEDULABLE\n";
        print_cost(cost);
        unschedulable = unschedulable || !s.complete();
        Json sj = to_json(s, *cluster);
        sj["communication"] = to_json(cost);
        doc["schedules"].push_back(std::move(sj));
    }
    emit(doc, c.out);

    std::vector<Deployment> deps;
    for (std::size_t i = 0; i < topologies.size(); ++i) deps.push_back({&topologies[i], &placed.schedules[i]});
    if (!memory_violations(deps, *cluster).empty()) return kViolation;
    return unschedulable ? kUnschedulable : kOk;
}

int run_simulate(const Common& c, const std::string& scheduler_name, const SimOptions& opts) {
    const auto store = c.store();
    if (c.workload.empty()) throw ValidationError("--workload is required");
    const auto model = store.workload(c.workload);
    const auto topologies = load_topologies(c, store, model.generator_demands);
    const auto cluster = std::make_shared<const Cluster>(store.cluster(c.cluster));
    const auto kind = parse_scheduler(scheduler_name);
    const auto placed = place(kind, topologies, ClusterState(cluster), c.config());

    std::vector<Deployment> deps;
    for (std::size_t i = 0; i < topologies.size(); ++i) {
        deps.push_back({&topologies[i], &placed.schedules[i]});
        if (!placed.schedules[i].complete()) {
            std::cout << "topology " << topologies[i].id() << ": " << placed.schedules[i].unschedulable.size()
                      << " unschedulable task(s)\n";
            for (const auto& t : placed.schedules[i].unschedulable) std::cout << "  " << to_string(t) << '\n';
            return kUnschedulable;
        }
    }
    if (!memory_violations(deps, *cluster).empty()) return kViolation;

    const auto reports = simulate_many(deps, *cluster, model, opts);
    Json doc = Json::array();
    for (const auto& r : reports) {
        std::cout << "topology " << r.topology_id << " (" << to_string(kind) << ")\n"
                  << "  throughput " << r.throughput << " tuples/10s\n";
        for (const auto& [sink, q] : r.q_per_sink) std::cout << "  sink " << sink << ": " << q << " tuples/s\n";
        std::cout << "  cpu utilization: all nodes " << utilization_summary(r, false) << ", used nodes "
                  << utilization_summary(r, true) << '\n';
        print_cost(r.comm);
        doc.push_back(to_json(r));
    }
    emit(doc, c.out);
    return kOk;
}

int run_compare(const Common& c, const std::vector<std::string>& schedulers, const ExperimentSpec& base) {
    ExperimentSpec spec = base;
    spec.topologies = c.topologies;
    spec.cluster = c.cluster;
    if (c.workload.empty()) throw ValidationError("--workload is required");
    spec.workload = c.workload;
    spec.config = c.config();
    spec.schedulers.clear();
    for (const auto& s : schedulers) spec.schedulers.push_back(parse_scheduler(s));

    const auto report = run_experiment(spec, c.store());
    std::cout << "cluster " << report.cluster << ", workload " << report.workload << ", " << report.repetitions
              << " repetition(s) of " << report.duration << " s\n";
    for (const auto& t : report.topologies) {
        std::cout << "topology " << t.topology << '\n';
        std::cout << "  " << std::left << std::setw(12) << "scheduler" << std::right << std::setw(8) << "nodes"
                  << std::setw(16) << "tput/10s" << std::setw(12) << "stddev" << std::setw(10) << "util"
                  << std::setw(10) << "util*" << std::setw(10) << "inter" << std::setw(12) << "cost" << '\n';
        for (const auto& o : t.outcomes) {
            std::cout << "  " << std::left << std::setw(12) << o.scheduler << std::right << std::setw(8) << o.nodes_used
                      << std::setw(16) << o.throughput.mean << std::setw(12) << o.throughput.stddev << std::setw(10)
                      << o.utilization_all.mean << std::setw(10) << o.utilization_used.mean << std::setw(10)
                      << o.comm.inter_rack_pairs << std::setw(12) << o.comm.weighted_sum << '\n';
            if (!o.unschedulable.empty())
                std::cout << "    " << o.unschedulable.size() << " unschedulable task(s), not simulated\n";
        }
        if (t.throughput_ratio) std::cout << "  throughput ratio rstorm/round_robin " << *t.throughput_ratio << '\n';
        if (t.utilization_ratio) std::cout << "  utilization ratio (used vs all nodes) " << *t.utilization_ratio << '\n';
    }
    std::cout << "(util = mean over all nodes, util* = mean over nodes hosting the topology)\n";
    emit(to_json(report), c.out);

    if (!report.hard_constraints_ok) {
        for (const auto& v : report.violations) std::cerr << "hard-constraint violation: " << v << '\n';
        return kViolation;
    }
    return report.any_unschedulable() ? kUnschedulable : kOk;
}

int run_gen(const std::string& expr, const Common& c) {
    const auto store = c.store();
    const auto demands = c.workload.empty() ? GeneratorDemands{} : store.workload(c.workload).generator_demands;
    const Topology topo = expr == "pageload"     ? gen_pageload(store)
                          : expr == "processing" ? gen_processing(store)
                                                 : generate(expr, demands);
    require_valid(topo);
    const auto doc = to_json(topo);
    if (c.out.empty() || c.out == "-") std::cout << doc.dump(2) << '\n';
    else emit(doc, c.out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resource-aware stream topology scheduler and cluster simulator"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--fixtures", common.fixtures, "Fixture directory (default: $RSTORM_FIXTURES or the source tree)");

    auto add_placement_options = [&](CLI::App* sub, bool many) {
        if (many)
            sub->add_option("-t,--topology", common.topologies,
                            "Generator (linear:4,4, diamond:3,4, star:2,2,4), pageload, processing or a spec file; "
                            "repeat to chain topologies")
                ->required();
        sub->add_option("-c,--cluster", common.cluster, "Cluster fixture or spec file")->capture_default_str();
        sub->add_option("--weights", common.weights, "Distance weights mem,cpu,bw")->delimiter(',');
        sub->add_option("-o,--out", common.out, "Write the machine-readable document here ('-' for stdout)");
    };

    std::string scheduler = "rstorm";
    auto* sched = app.add_subcommand("schedule", "Place topologies and print the schedule and communication cost");
    add_placement_options(sched, true);
    sched->add_option("-s,--scheduler", scheduler, "rstorm or round_robin")->capture_default_str();
    sched->add_option("-w,--workload", common.workload, "Workload fixture supplying generator demands");

    SimOptions sim_opts;
    double warmup = -1.0;
    auto* sim = app.add_subcommand("simulate", "Schedule with one scheduler and simulate");
    add_placement_options(sim, true);
    sim->add_option("-s,--scheduler", scheduler, "rstorm or round_robin")->capture_default_str();
    sim->add_option("-w,--workload", common.workload, "Workload fixture")->required();
    sim->add_option("--duration", sim_opts.duration, "Simulated seconds")->capture_default_str();
    sim->add_option("--warmup", warmup, "Excluded warmup seconds (default duration/5)");
    sim->add_option("--seed", sim_opts.seed, "Random seed")->capture_default_str();

    ExperimentSpec spec;
    std::vector<std::string> schedulers{"rstorm", "round_robin"};
    auto* cmp = app.add_subcommand("compare", "Compare schedulers on the same inputs");
    add_placement_options(cmp, true);
    cmp->add_option("-w,--workload", common.workload, "Workload fixture")->required();
    cmp->add_option("--schedulers", schedulers, "Subset of rstorm,round_robin")->delimiter(',')->capture_default_str();
    cmp->add_option("--duration", spec.duration, "Simulated seconds")->capture_default_str();
    cmp->add_option("--warmup", warmup, "Excluded warmup seconds (default duration/5)");
    cmp->add_option("--seed", spec.seed, "Base seed")->capture_default_str();
    cmp->add_option("--repetitions", spec.repetitions, "Runs per scheduler")->capture_default_str();

    std::string expr;
    auto* gen = app.add_subcommand("gen", "Emit a generated topology as a spec file");
    gen->add_option("generator", expr, "linear:S,P | diamond:W,P | star:A,B,P | pageload | processing")->required();
    gen->add_option("-w,--workload", common.workload, "Workload fixture supplying generator demands");
    gen->add_option("-o,--out", common.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kError;
    }

    try {
        if (warmup >= 0) {
            sim_opts.warmup = warmup;
            spec.warmup = warmup;
        }
        if (*sched) return run_schedule(common, scheduler);
        if (*sim) return run_simulate(common, scheduler, sim_opts);
        if (*cmp) return run_compare(common, schedulers, spec);
        if (*gen) return run_gen(expr, common);
    } catch (const MissingInput& e) {
        std::cerr << "missing input: " << e.what() << '\n';
        return kMissing;
    } catch (const ValidationError& e) {
        std::cerr << "validation failed: " << e.what() << '\n';
        for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
        return kInvalid;
    } catch (const Unschedulable& e) {
        std::cerr << "unschedulable: " << e.what() << '\n';
        return kUnschedulable;
    } catch (const HardConstraintViolation& e) {
        std::cerr << "hard-constraint violation: " << e.what() << '\n';
        return kViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
