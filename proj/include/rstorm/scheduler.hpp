#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rstorm/cluster.hpp"
#include "rstorm/topology.hpp"

namespace rstorm {

/// Weights applied to the mem, cpu and network terms of the placement
/// distance. At least one must be positive.
struct SchedulerConfig {
    double weight_mem = 1.0;
    double weight_cpu = 1.0;
    double weight_bw = 1.0;

    void validate() const;  // throws ValidationError
    friend bool operator==(const SchedulerConfig&, const SchedulerConfig&) = default;
};

struct Assignment {
    TaskKey task;
    NodeIndex node;
    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Schedule {
    std::string topology_id;
    std::vector<Assignment> assignments;  // in placement order
    std::optional<NodeIndex> ref_node;
    std::vector<TaskKey> unschedulable;

    std::optional<NodeIndex> node_of(const TaskKey& task) const;
    std::size_t nodes_used() const;
    bool complete() const noexcept { return unschedulable.empty(); }

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// A schedule together with the cluster state left after committing it.
/// Feeding `state` into the next call schedules topologies back to back.
struct ScheduleResult {
    Schedule schedule;
    ClusterState state;
};

/// Breadth-first component order. All spouts seed the queue in declaration
/// order; neighbours are visited along outgoing edges in declaration order.
std::vector<ComponentId> bfs_traversal(const Topology& topology);

/// Sweeps the BFS component order taking one task per component per sweep.
std::vector<Task> task_selection(const Topology& topology);

/// sqrt(wm*(m_task - m_avail)^2 + wc*(c_task - c_avail)^2 + wb*netdist(ref, node))
double distance(const Task& task, NodeIndex node, NodeIndex ref, const ClusterState& state,
                const SchedulerConfig& cfg);

struct NodeChoice {
    NodeIndex node;
    NodeIndex ref;
};

/// Picks the node for one task. Without a ref node the most-resourced node of
/// the most-resourced rack becomes the ref and takes the task if its memory
/// fits. Otherwise the memory-feasible node with the smallest distance wins,
/// ties going to the ref node, then flat (rack-major) declaration order.
/// Throws Unschedulable when no node has enough residual memory.
NodeChoice node_selection(const Task& task, const ClusterState& state, std::optional<NodeIndex> ref,
                          const SchedulerConfig& cfg);

/// Resource-aware placement of every task. The input state is not modified;
/// the result carries the post-commit state.
ScheduleResult schedule(const Topology& topology, const ClusterState& state,
                        const SchedulerConfig& cfg = {});

/// Baseline: tasks in declaration order cycle over nodes in declaration
/// order, skipping only nodes whose residual memory cannot hold the task.
ScheduleResult round_robin_schedule(const Topology& topology, const ClusterState& state);

struct CommunicationCost {
    std::size_t intra_node_pairs = 0;
    std::size_t intra_rack_pairs = 0;
    std::size_t inter_rack_pairs = 0;
    double intra_node_weighted = 0.0;
    double intra_rack_weighted = 0.0;
    double inter_rack_weighted = 0.0;
    double weighted_sum = 0.0;

    friend bool operator==(const CommunicationCost&, const CommunicationCost&) = default;
};

/// Classifies every (upstream task, downstream task) pair of every edge by
/// placement tier and sums the network distance. Pairs touching an
/// unplaced task are skipped.
CommunicationCost communication_cost(const Schedule& schedule, const Topology& topology,
                                     const Cluster& cluster);

/// A placed topology.
struct Deployment {
    const Topology* topology = nullptr;
    const Schedule* schedule = nullptr;
};

/// Nodes whose summed assigned memory across all deployments exceeds capacity.
std::vector<std::string> memory_violations(std::span<const Deployment> deployments,
                                           const Cluster& cluster);

Json to_json(const Schedule& schedule, const Cluster& cluster);
Schedule schedule_from_json(const Json& doc, const Cluster& cluster);
Json to_json(const CommunicationCost& cost);
CommunicationCost communication_cost_from_json(const Json& doc);

}  // namespace rstorm
