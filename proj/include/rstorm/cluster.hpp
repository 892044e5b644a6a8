#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rstorm/resources.hpp"
#include "rstorm/topology.hpp"

namespace rstorm {

/// Position of a node in the cluster's flattened (rack-major) node list.
struct NodeIndex {
    std::size_t value = 0;
    friend auto operator<=>(const NodeIndex&, const NodeIndex&) = default;
};

struct RackIndex {
    std::size_t value = 0;
    friend auto operator<=>(const RackIndex&, const RackIndex&) = default;
};

struct Node {
    std::string id;
    double cpu_capacity = 100.0;  // points; 100 per core
    double mem_capacity = 0.0;    // MB

    double cores() const noexcept { return cpu_capacity / 100.0; }
    friend bool operator==(const Node&, const Node&) = default;
};

struct Rack {
    std::string id;
    std::vector<Node> nodes;
    friend bool operator==(const Rack&, const Rack&) = default;
};

/// Three-level network-distance ladder. Must be monotone:
/// intra_node <= intra_rack <= inter_rack.
struct DistanceLadder {
    double intra_node = 0.0;
    double intra_rack = 1.0;
    double inter_rack = 4.0;
    friend bool operator==(const DistanceLadder&, const DistanceLadder&) = default;
};

enum class Tier { IntraNode, IntraRack, InterRack };

std::string_view to_string(Tier tier);

class Cluster {
public:
    /// Throws ValidationError when racks are empty, ids collide, a capacity
    /// is non-positive or the distance ladder is not monotone.
    explicit Cluster(std::vector<Rack> racks, DistanceLadder ladder = {});

    const std::vector<Rack>& racks() const noexcept { return racks_; }
    const DistanceLadder& ladder() const noexcept { return ladder_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t rack_count() const noexcept { return racks_.size(); }

    const Node& node(NodeIndex n) const { return nodes_.at(n.value); }
    RackIndex rack_of(NodeIndex n) const { return rack_of_.at(n.value); }
    /// Flat indices of the rack's nodes, in declaration order.
    std::vector<NodeIndex> nodes_in(RackIndex r) const;
    NodeIndex find_node(const std::string& id) const;  // throws UnknownId
    RackIndex find_rack(const std::string& id) const;  // throws UnknownId

    double total_mem() const noexcept { return total_mem_; }
    double total_cpu() const noexcept { return total_cpu_; }

    Tier tier(NodeIndex a, NodeIndex b) const;

    friend bool operator==(const Cluster& a, const Cluster& b) {
        return a.racks_ == b.racks_ && a.ladder_ == b.ladder_;
    }

private:
    std::vector<Rack> racks_;
    DistanceLadder ladder_;
    std::vector<Node> nodes_;
    std::vector<RackIndex> rack_of_;
    std::vector<std::size_t> rack_begin_;
    double total_mem_ = 0.0;
    double total_cpu_ = 0.0;
};

double network_distance(const Cluster& cluster, NodeIndex a, NodeIndex b);

/// Residual availability per node during scheduling. Memory never goes
/// below zero; cpu may (soft over-subscription). The bw slot is unused:
/// bandwidth availability is the network distance from the ref node and is
/// computed on demand.
class ClusterState {
public:
    explicit ClusterState(std::shared_ptr<const Cluster> cluster);

    const Cluster& cluster() const noexcept { return *cluster_; }
    std::shared_ptr<const Cluster> cluster_ptr() const noexcept { return cluster_; }

    const ResourceVector& avail(NodeIndex n) const { return avail_.at(n.value); }

    /// Overwrites a node's residual availability. Throws ValidationError if
    /// mem is outside [0, capacity] or cpu exceeds capacity.
    void set_available(NodeIndex n, ResourceVector avail);

    /// Subtracts the demand in place. Throws HardConstraintViolation when
    /// memory does not fit; the state is left untouched in that case.
    void commit(const ResourceVector& demand, NodeIndex n);

    friend bool operator==(const ClusterState& a, const ClusterState& b) {
        return *a.cluster_ == *b.cluster_ && a.avail_ == b.avail_;
    }

private:
    std::shared_ptr<const Cluster> cluster_;
    std::vector<ResourceVector> avail_;
};

double network_distance(const ClusterState& state, NodeIndex a, NodeIndex b);

/// Rack maximizing the sum of residual mem and cpu, each normalized by the
/// cluster-wide capacity of that resource. Ties go to the earlier rack.
RackIndex rack_with_most_resources(const ClusterState& state);

/// Same score restricted to one rack's nodes; ties go to the earlier node.
NodeIndex node_with_most_resources(const ClusterState& state, RackIndex rack);

/// Returns a copy of `state` with the task's demand committed to `node`.
ClusterState commit(const ClusterState& state, const Task& task, NodeIndex node);

Cluster cluster_from_json(const Json& doc);
Json to_json(const Cluster& cluster);
Cluster load_cluster(const std::filesystem::path& path);

}  // namespace rstorm
