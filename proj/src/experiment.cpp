#include "rstorm/experiment.hpp"

#include <cmath>
#include <future>
#include <random>
#include <set>

#include "rstorm/errors.hpp"

namespace rstorm {

std::string_view to_string(SchedulerKind kind) {
    return kind == SchedulerKind::RStorm ? "rstorm" : "round_robin";
}

SchedulerKind parse_scheduler(std::string_view name) {
    if (name == "rstorm") return SchedulerKind::RStorm;
    if (name == "round_robin" || name == "round-robin" || name == "rr") return SchedulerKind::RoundRobin;
    throw ValidationError("unknown scheduler '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
    std::vector<std::string> problems;
    if (topologies.empty()) problems.push_back("no topology given");
    if (schedulers.empty()) problems.push_back("at least one scheduler is required");
    if (repetitions < 1) problems.push_back("repetitions must be >= 1");
    if (!(duration > 0)) problems.push_back("duration must be > 0");
    if (!problems.empty()) throw ValidationError("invalid experiment: " + problems.front(), problems);
    config.validate();
}

Placement place(SchedulerKind kind, const std::vector<Topology>& topologies, const ClusterState& initial,
                const SchedulerConfig& config) {
    Placement out{{}, initial};
    for (const auto& topo : topologies) {
        auto result = kind == SchedulerKind::RStorm ? schedule(topo, out.state, config)
                                                    : round_robin_schedule(topo, out.state);
        out.schedules.push_back(std::move(result.schedule));
        out.state = std::move(result.state);
    }
    return out;
}

Stat summarize(const std::vector<double>& samples) {
    Stat s;
    if (samples.empty()) return s;
    for (double x : samples) s.mean += x;
    s.mean /= static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    }
    return s;
}

const SchedulerOutcome* TopologyComparison::outcome(SchedulerKind kind) const {
    for (const auto& o : outcomes)
        if (o.scheduler == to_string(kind)) return &o;
    return nullptr;
}

bool ComparisonReport::any_unschedulable() const {
    for (const auto& t : topologies)
        for (const auto& o : t.outcomes)
            if (!o.unschedulable.empty()) return true;
    return false;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint32_t rep) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32), rep};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

ComparisonReport run_experiment(const ExperimentSpec& spec, const FixtureStore& store) {
    spec.validate();
    const auto model = store.workload(spec.workload);
    const auto cluster = std::make_shared<const Cluster>(store.cluster(spec.cluster));

    std::vector<Topology> topologies;
    std::set<std::string> ids;
    for (const auto& ref : spec.topologies) {
        topologies.push_back(store.topology(ref, model.generator_demands));
        require_valid(topologies.back());
        if (!ids.insert(topologies.back().id()).second)
            throw ValidationError("topology id '" + topologies.back().id() + "' appears twice");
    }

    SimOptions base;
    base.duration = spec.duration;
    base.warmup = spec.warmup;

    ComparisonReport report;
    report.cluster = spec.cluster;
    report.workload = model.name;
    report.duration = spec.duration;
    report.warmup = spec.warmup.value_or(spec.duration / 5.0);
    report.seed = spec.seed;
    report.repetitions = spec.repetitions;
    for (const auto& t : topologies) report.topologies.push_back({t.id(), {}, std::nullopt, std::nullopt});

    for (auto kind : spec.schedulers) {
        const auto placed = place(kind, topologies, ClusterState(cluster), spec.config);

        std::vector<Deployment> deployments;
        bool complete = true;
        for (std::size_t i = 0; i < topologies.size(); ++i) {
            deployments.push_back({&topologies[i], &placed.schedules[i]});
            complete = complete && placed.schedules[i].complete();
        }
        for (auto& v : memory_violations(deployments, *cluster)) {
            report.hard_constraints_ok = false;
            report.violations.push_back(std::string(to_string(kind)) + ": " + v);
        }

        std::vector<std::vector<SimReport>> runs;
        if (complete) {
            std::vector<std::future<std::vector<SimReport>>> futures;
            for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
                SimOptions opts = base;
                opts.seed = derive_seed(spec.seed, rep);
                futures.push_back(std::async(std::launch::async, [&, opts] {
                    return simulate_many(deployments, *cluster, model, opts);
                }));
            }
            for (auto& f : futures) runs.push_back(f.get());
        }

        for (std::size_t i = 0; i < topologies.size(); ++i) {
            const auto& sched = placed.schedules[i];
            SchedulerOutcome o;
            o.scheduler = std::string(to_string(kind));
            for (const auto& a : sched.assignments) o.placement.emplace_back(to_string(a.task), cluster->node(a.node).id);
            for (const auto& t : sched.unschedulable) o.unschedulable.push_back(to_string(t));
            o.nodes_used = sched.nodes_used();
            o.comm = communication_cost(sched, topologies[i], *cluster);
            o.simulated = complete;
            if (complete) {
                std::vector<double> all;
                std::vector<double> used;
                std::map<std::string, std::vector<double>> q;
                for (const auto& run : runs) {
                    const auto& r = run[i];
                    o.throughput_runs.push_back(r.throughput);
                    all.push_back(utilization_summary(r, false));
                    used.push_back(utilization_summary(r, true));
                    for (const auto& [sink, rate] : r.q_per_sink) q[sink].push_back(rate);
                }
                o.throughput = summarize(o.throughput_runs);
                o.utilization_all = summarize(all);
                o.utilization_used = summarize(used);
                for (const auto& [sink, samples] : q) o.q_per_sink[sink] = summarize(samples);
            }
            report.topologies[i].outcomes.push_back(std::move(o));
        }
    }

    for (auto& t : report.topologies) {
        const auto* rs = t.outcome(SchedulerKind::RStorm);
        const auto* rr = t.outcome(SchedulerKind::RoundRobin);
        if (!rs || !rr || !rs->simulated || !rr->simulated) continue;
        if (rr->throughput.mean > 0) t.throughput_ratio = rs->throughput.mean / rr->throughput.mean;
        if (rr->utilization_all.mean > 0) t.utilization_ratio = rs->utilization_used.mean / rr->utilization_all.mean;
    }
    return report;
}

namespace {

Json stat_json(const Stat& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }
Stat stat_from(const Json& j) { return {j.at("mean").get<double>(), j.at("stddev").get<double>()}; }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
std::optional<double> optional_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

Json to_json(const ComparisonReport& r) {
    Json doc;
    doc["cluster"] = r.cluster;
    doc["workload"] = r.workload;
    doc["duration"] = r.duration;
    doc["warmup"] = r.warmup;
    doc["seed"] = r.seed;
    doc["repetitions"] = r.repetitions;
    doc["hard_constraints_ok"] = r.hard_constraints_ok;
    doc["violations"] = r.violations;
    doc["topologies"] = Json::array();
    for (const auto& t : r.topologies) {
        Json tj;
        tj["topology"] = t.topology;
        tj["throughput_ratio"] = optional_json(t.throughput_ratio);
        tj["utilization_ratio"] = optional_json(t.utilization_ratio);
        tj["schedulers"] = Json::array();
        for (const auto& o : t.outcomes) {
            Json oj;
            oj["scheduler"] = o.scheduler;
            oj["nodes_used"] = o.nodes_used;
            oj["unschedulable"] = o.unschedulable;
            oj["communication"] = to_json(o.comm);
            oj["simulated"] = o.simulated;
            oj["throughput_per_10s"] = stat_json(o.throughput);
            oj["throughput_runs"] = o.throughput_runs;
            oj["q_per_sink"] = Json::object();
            for (const auto& [sink, s] : o.q_per_sink) oj["q_per_sink"][sink] = stat_json(s);
            oj["utilization_all_nodes"] = stat_json(o.utilization_all);
            oj["utilization_used_nodes"] = stat_json(o.utilization_used);
            oj["placement"] = Json::array();
            for (const auto& [task, node] : o.placement) oj["placement"].push_back({task, node});
            tj["schedulers"].push_back(std::move(oj));
        }
        doc["topologies"].push_back(std::move(tj));
    }
    return doc;
}

ComparisonReport comparison_report_from_json(const Json& doc) {
    try {
        ComparisonReport r;
        r.cluster = doc.at("cluster").get<std::string>();
        r.workload = doc.at("workload").get<std::string>();
        r.duration = doc.at("duration").get<double>();
        r.warmup = doc.at("warmup").get<double>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.repetitions = doc.at("repetitions").get<std::uint32_t>();
        r.hard_constraints_ok = doc.at("hard_constraints_ok").get<bool>();
        r.violations = doc.at("violations").get<std::vector<std::string>>();
        for (const auto& tj : doc.at("topologies")) {
            TopologyComparison t;
            t.topology = tj.at("topology").get<std::string>();
            t.throughput_ratio = optional_from(tj.at("throughput_ratio"));
            t.utilization_ratio = optional_from(tj.at("utilization_ratio"));
            for (const auto& oj : tj.at("schedulers")) {
                SchedulerOutcome o;
                o.scheduler = oj.at("scheduler").get<std::string>();
                o.nodes_used = oj.at("nodes_used").get<std::size_t>();
                o.unschedulable = oj.at("unschedulable").get<std::vector<std::string>>();
                o.comm = communication_cost_from_json(oj.at("communication"));
                o.simulated = oj.at("simulated").get<bool>();
                o.throughput = stat_from(oj.at("throughput_per_10s"));
                o.throughput_runs = oj.at("throughput_runs").get<std::vector<double>>();
                for (const auto& [sink, s] : oj.at("q_per_sink").items()) o.q_per_sink[sink] = stat_from(s);
                o.utilization_all = stat_from(oj.at("utilization_all_nodes"));
                o.utilization_used = stat_from(oj.at("utilization_used_nodes"));
                for (const auto& p : oj.at("placement"))
                    o.placement.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
                t.outcomes.push_back(std::move(o));
            }
            r.topologies.push_back(std::move(t));
        }
        return r;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed comparison report: ") + e.what());
    }
}

}  // namespace rstorm
