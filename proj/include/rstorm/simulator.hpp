#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rstorm/cluster.hpp"
#include "rstorm/scheduler.hpp"
#include "rstorm/topology.hpp"
#include "rstorm/workload.hpp"

namespace rstorm {

struct NodeUtilization {
    std::string node;
    double utilization = 0.0;  // fraction of the window the node's cores were busy
    std::size_t tasks = 0;     // tasks of the reported topology on this node

    friend bool operator==(const NodeUtilization&, const NodeUtilization&) = default;
};

/// Tuple counts for one topology edge. At the end of a run
/// emitted == received + in_flight.
struct EdgeFlow {
    std::string from;
    std::string to;
    std::uint64_t emitted = 0;
    std::uint64_t received = 0;
    std::uint64_t in_flight = 0;

    friend bool operator==(const EdgeFlow&, const EdgeFlow&) = default;
};

struct SimReport {
    std::string topology_id;
    /// Tuples per 10 s window, averaged over sink components, measured
    /// after warmup.
    double throughput = 0.0;
    /// Tuples/s processed by each sink component.
    std::map<std::string, double> q_per_sink;
    std::vector<NodeUtilization> cpu_utilization;
    CommunicationCost comm;
    std::vector<EdgeFlow> edges;
    std::uint64_t completed_trees = 0;
    double duration = 0.0;
    double warmup = 0.0;

    friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct SimOptions {
    double duration = 60.0;         // simulated seconds
    std::optional<double> warmup;   // defaults to duration / 5
    std::uint64_t seed = 1;
};

/// Runs one placed topology. Throws ValidationError for a partial schedule
/// or a non-positive measurement window.
SimReport simulate(const Schedule& schedule, const Topology& topology, const Cluster& cluster,
                   const WorkloadModel& model, const SimOptions& options);

/// Runs several placed topologies on the same cluster at once; co-located
/// tasks share node CPUs and links. One report per deployment, same order.
std::vector<SimReport> simulate_many(std::span<const Deployment> deployments, const Cluster& cluster,
                                     const WorkloadModel& model, const SimOptions& options);

/// Mean CPU utilization over all nodes, or only nodes hosting >= 1 task.
double utilization_summary(const SimReport& report, bool used_nodes_only);

Json to_json(const SimReport& report);
SimReport sim_report_from_json(const Json& doc);

}  // namespace rstorm
