#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rstorm/cluster.hpp"
#include "rstorm/fixtures.hpp"
#include "rstorm/scheduler.hpp"
#include "rstorm/simulator.hpp"
#include "rstorm/workload.hpp"

namespace rstorm {

enum class SchedulerKind { RStorm, RoundRobin };

std::string_view to_string(SchedulerKind kind);
SchedulerKind parse_scheduler(std::string_view name);  // "rstorm", "round_robin"

struct ExperimentSpec {
    /// Generator expressions or topology spec files. More than one entry
    /// schedules the topologies back to back on a chained cluster state and
    /// simulates them together.
    std::vector<std::string> topologies;
    std::string cluster;
    std::string workload;
    std::vector<SchedulerKind> schedulers{SchedulerKind::RStorm, SchedulerKind::RoundRobin};
    double duration = 60.0;
    std::optional<double> warmup;
    std::uint64_t seed = 1;
    std::uint32_t repetitions = 1;
    SchedulerConfig config;

    void validate() const;  // throws ValidationError
};

/// Topologies placed one after another by a single scheduler.
struct Placement {
    std::vector<Schedule> schedules;
    ClusterState state;
};

Placement place(SchedulerKind kind, const std::vector<Topology>& topologies, const ClusterState& initial,
                const SchedulerConfig& config = {});

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;
    friend bool operator==(const Stat&, const Stat&) = default;
};

Stat summarize(const std::vector<double>& samples);

struct SchedulerOutcome {
    std::string scheduler;
    std::vector<std::pair<std::string, std::string>> placement;  // task -> node id
    std::vector<std::string> unschedulable;
    std::size_t nodes_used = 0;
    CommunicationCost comm;
    bool simulated = false;
    std::vector<double> throughput_runs;  // tuples / 10 s, one per repetition
    Stat throughput;
    std::map<std::string, Stat> q_per_sink;
    Stat utilization_all;   // mean over every node
    Stat utilization_used;  // mean over nodes hosting this topology

    friend bool operator==(const SchedulerOutcome&, const SchedulerOutcome&) = default;
};

struct TopologyComparison {
    std::string topology;
    std::vector<SchedulerOutcome> outcomes;
    /// rstorm / round_robin mean throughput; present only when both ran.
    std::optional<double> throughput_ratio;
    /// rstorm used-node utilization / round_robin all-node utilization.
    std::optional<double> utilization_ratio;

    const SchedulerOutcome* outcome(SchedulerKind kind) const;
    friend bool operator==(const TopologyComparison&, const TopologyComparison&) = default;
};

struct ComparisonReport {
    std::string cluster;
    std::string workload;
    double duration = 0.0;
    double warmup = 0.0;
    std::uint64_t seed = 0;
    std::uint32_t repetitions = 0;
    bool hard_constraints_ok = true;
    std::vector<std::string> violations;
    std::vector<TopologyComparison> topologies;

    bool any_unschedulable() const;
    friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

/// Seed for repetition `rep`; identical across schedulers so runs are paired.
std::uint64_t derive_seed(std::uint64_t base, std::uint32_t rep);

ComparisonReport run_experiment(const ExperimentSpec& spec, const FixtureStore& store = FixtureStore::from_environment());

Json to_json(const ComparisonReport& report);
ComparisonReport comparison_report_from_json(const Json& doc);

}  // namespace rstorm
