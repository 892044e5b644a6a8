#include "rstorm/cluster.hpp"

#include <set>

#include "json_util.hpp"
#include "rstorm/errors.hpp"

namespace rstorm {

std::string_view to_string(Tier tier) {
    switch (tier) {
        case Tier::IntraNode: return "intra_node";
        case Tier::IntraRack: return "intra_rack";
        case Tier::InterRack: return "inter_rack";
    }
    return "?";
}

Cluster::Cluster(std::vector<Rack> racks, DistanceLadder ladder)
    : racks_(std::move(racks)), ladder_(ladder) {
    std::vector<std::string> problems;
    if (racks_.empty()) problems.push_back("cluster has no racks");
    std::set<std::string> node_ids;
    std::set<std::string> rack_ids;
    for (std::size_t r = 0; r < racks_.size(); ++r) {
        const auto& rack = racks_[r];
        if (!rack_ids.insert(rack.id).second) problems.push_back("duplicate rack id " + rack.id);
        if (rack.nodes.empty()) problems.push_back("rack " + rack.id + " has no nodes");
        rack_begin_.push_back(nodes_.size());
        for (const auto& node : rack.nodes) {
            if (!node_ids.insert(node.id).second) problems.push_back("duplicate node id " + node.id);
            if (!(node.cpu_capacity > 0)) problems.push_back("node " + node.id + ": cpu capacity must be > 0");
            if (!(node.mem_capacity > 0)) problems.push_back("node " + node.id + ": mem capacity must be > 0");
            nodes_.push_back(node);
            rack_of_.push_back(RackIndex{r});
            total_mem_ += node.mem_capacity;
            total_cpu_ += node.cpu_capacity;
        }
    }
    rack_begin_.push_back(nodes_.size());
    if (ladder_.intra_node < 0 || ladder_.intra_node > ladder_.intra_rack ||
        ladder_.intra_rack > ladder_.inter_rack)
        problems.push_back("distance ladder must satisfy 0 <= intra_node <= intra_rack <= inter_rack");
    if (!problems.empty()) throw ValidationError("invalid cluster: " + problems.front(), problems);
}

std::vector<NodeIndex> Cluster::nodes_in(RackIndex r) const {
    if (r.value >= racks_.size()) throw UnknownId("unknown rack index " + std::to_string(r.value));
    std::vector<NodeIndex> out;
    for (auto i = rack_begin_[r.value]; i < rack_begin_[r.value + 1]; ++i) out.push_back(NodeIndex{i});
    return out;
}

NodeIndex Cluster::find_node(const std::string& id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].id == id) return NodeIndex{i};
    throw UnknownId("unknown node '" + id + "'");
}

RackIndex Cluster::find_rack(const std::string& id) const {
    for (std::size_t i = 0; i < racks_.size(); ++i)
        if (racks_[i].id == id) return RackIndex{i};
    throw UnknownId("unknown rack '" + id + "'");
}

Tier Cluster::tier(NodeIndex a, NodeIndex b) const {
    if (a.value >= nodes_.size() || b.value >= nodes_.size())
        throw UnknownId("node index out of range");
    if (a == b) return Tier::IntraNode;
    return rack_of_[a.value] == rack_of_[b.value] ? Tier::IntraRack : Tier::InterRack;
}

double network_distance(const Cluster& cluster, NodeIndex a, NodeIndex b) {
    switch (cluster.tier(a, b)) {
        case Tier::IntraNode: return cluster.ladder().intra_node;
        case Tier::IntraRack: return cluster.ladder().intra_rack;
        case Tier::InterRack: return cluster.ladder().inter_rack;
    }
    return 0.0;
}

double network_distance(const ClusterState& state, NodeIndex a, NodeIndex b) {
    return network_distance(state.cluster(), a, b);
}

ClusterState::ClusterState(std::shared_ptr<const Cluster> cluster) : cluster_(std::move(cluster)) {
    if (!cluster_) throw std::invalid_argument("ClusterState requires a cluster");
    avail_.reserve(cluster_->node_count());
    for (std::size_t i = 0; i < cluster_->node_count(); ++i) {
        const auto& n = cluster_->node(NodeIndex{i});
        avail_.push_back({n.mem_capacity, n.cpu_capacity, 0.0});
    }
}

void ClusterState::set_available(NodeIndex n, ResourceVector avail) {
    const auto& node = cluster_->node(n);
    if (avail.mem < 0 || avail.mem > node.mem_capacity)
        throw ValidationError("node " + node.id + ": residual memory outside [0, capacity]");
    if (avail.cpu > node.cpu_capacity)
        throw ValidationError("node " + node.id + ": residual cpu exceeds capacity");
    avail_.at(n.value) = avail;
}

void ClusterState::commit(const ResourceVector& demand, NodeIndex n) {
    auto& slot = avail_.at(n.value);
    if (slot.mem < demand.mem)
        throw HardConstraintViolation("node " + cluster_->node(n).id + " has " +
                                      std::to_string(slot.mem) + " MB free, task needs " +
                                      std::to_string(demand.mem));
    slot.mem -= demand.mem;
    slot.cpu -= demand.cpu;
}

ClusterState commit(const ClusterState& state, const Task& task, NodeIndex node) {
    ClusterState next = state;
    next.commit(task.demand, node);
    return next;
}

namespace {

// Sum first, divide once: keeps exact ties exact for power-of-two capacities.
double resource_score(const ClusterState& state, const std::vector<NodeIndex>& nodes) {
    double mem = 0.0;
    double cpu = 0.0;
    for (auto n : nodes) {
        mem += state.avail(n).mem;
        cpu += state.avail(n).cpu;
    }
    const auto& c = state.cluster();
    return mem / c.total_mem() + cpu / c.total_cpu();
}

}  // namespace

RackIndex rack_with_most_resources(const ClusterState& state) {
    const auto& cluster = state.cluster();
    if (cluster.rack_count() == 0) throw Error("empty cluster");
    RackIndex best{0};
    double best_score = resource_score(state, cluster.nodes_in(best));
    for (std::size_t r = 1; r < cluster.rack_count(); ++r) {
        const double score = resource_score(state, cluster.nodes_in(RackIndex{r}));
        if (score > best_score) {
            best_score = score;
            best = RackIndex{r};
        }
    }
    return best;
}

NodeIndex node_with_most_resources(const ClusterState& state, RackIndex rack) {
    const auto nodes = state.cluster().nodes_in(rack);
    NodeIndex best = nodes.front();
    double best_score = resource_score(state, {best});
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double score = resource_score(state, {nodes[i]});
        if (score > best_score) {
            best_score = score;
            best = nodes[i];
        }
    }
    return best;
}

Cluster cluster_from_json(const Json& doc) {
    try {
        std::vector<Rack> racks;
        for (const auto& r : doc.at("racks")) {
            Rack rack;
            rack.id = r.at("id").get<std::string>();
            for (const auto& n : r.at("nodes")) {
                Node node;
                node.id = n.at("id").get<std::string>();
                node.mem_capacity = n.at("mem").get<double>();
                if (n.contains("cpu")) node.cpu_capacity = n.at("cpu").get<double>();
                else node.cpu_capacity = 100.0 * detail::get_or(n, "cores", 1.0);
                rack.nodes.push_back(std::move(node));
            }
            racks.push_back(std::move(rack));
        }
        DistanceLadder ladder;
        if (auto it = doc.find("distances"); it != doc.end()) {
            ladder.intra_node = detail::get_or(*it, "intra_node", ladder.intra_node);
            ladder.intra_rack = detail::get_or(*it, "intra_rack", ladder.intra_rack);
            ladder.inter_rack = detail::get_or(*it, "inter_rack", ladder.inter_rack);
        }
        return Cluster(std::move(racks), ladder);
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed cluster document: ") + e.what());
    }
}

Json to_json(const Cluster& cluster) {
    Json doc;
    doc["racks"] = Json::array();
    for (const auto& rack : cluster.racks()) {
        Json nodes = Json::array();
        for (const auto& n : rack.nodes)
            nodes.push_back({{"id", n.id}, {"cpu", n.cpu_capacity}, {"mem", n.mem_capacity}});
        doc["racks"].push_back({{"id", rack.id}, {"nodes", std::move(nodes)}});
    }
    const auto& l = cluster.ladder();
    doc["distances"] = {{"intra_node", l.intra_node}, {"intra_rack", l.intra_rack}, {"inter_rack", l.inter_rack}};
    return doc;
}

Cluster load_cluster(const std::filesystem::path& path) {
    return cluster_from_json(detail::read_json_file(path));
}

}  // namespace rstorm
