#include "rstorm/scheduler.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "rstorm/errors.hpp"

namespace rstorm {

void SchedulerConfig::validate() const {
    if (weight_mem < 0 || weight_cpu < 0 || weight_bw < 0)
        throw ValidationError("scheduler weights must be non-negative");
    if (!(weight_mem > 0 || weight_cpu > 0 || weight_bw > 0))
        throw ValidationError("at least one scheduler weight must be positive");
}

std::optional<NodeIndex> Schedule::node_of(const TaskKey& task) const {
    for (const auto& a : assignments)
        if (a.task == task) return a.node;
    return std::nullopt;
}

std::size_t Schedule::nodes_used() const {
    std::set<NodeIndex> used;
    for (const auto& a : assignments) used.insert(a.node);
    return used.size();
}

std::vector<ComponentId> bfs_traversal(const Topology& topology) {
    require_valid(topology);
    const auto& comps = topology.components();
    std::vector<bool> visited(comps.size(), false);
    std::deque<std::size_t> queue;
    std::vector<ComponentId> order;

    // Virtual root whose neighbours are the spouts.
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (comps[i].kind != ComponentKind::Spout) continue;
        visited[i] = true;
        queue.push_back(i);
        order.push_back(comps[i].id);
    }
    while (!queue.empty()) {
        const auto cur = queue.front();
        queue.pop_front();
        for (auto next : topology.successors(cur)) {
            if (visited[next]) continue;
            visited[next] = true;
            queue.push_back(next);
            order.push_back(comps[next].id);
        }
    }
    return order;
}

std::vector<Task> task_selection(const Topology& topology) {
    const auto components = bfs_traversal(topology);
    std::vector<const Component*> ordered;
    for (const auto& id : components) ordered.push_back(&topology.component(id));

    std::vector<Task> ordering;
    ordering.reserve(topology.task_count());
    for (std::uint32_t sweep = 0; ordering.size() < topology.task_count(); ++sweep) {
        for (const auto* c : ordered)
            if (sweep < c->parallelism) ordering.push_back({{c->id, sweep}, c->demand});
    }
    return ordering;
}

double distance(const Task& task, NodeIndex node, NodeIndex ref, const ClusterState& state,
                const SchedulerConfig& cfg) {
    const auto& avail = state.avail(node);
    const double dm = task.demand.mem - avail.mem;
    const double dc = task.demand.cpu - avail.cpu;
    const double d = cfg.weight_mem * dm * dm + cfg.weight_cpu * dc * dc +
                     cfg.weight_bw * network_distance(state, ref, node);
    return std::sqrt(d);
}

namespace {

bool fits(const Task& task, const ClusterState& state, NodeIndex node) {
    return state.avail(node).mem >= task.demand.mem;
}

}  // namespace

NodeChoice node_selection(const Task& task, const ClusterState& state, std::optional<NodeIndex> ref,
                          const SchedulerConfig& cfg) {
    if (!ref) {
        const NodeIndex anchor = node_with_most_resources(state, rack_with_most_resources(state));
        if (fits(task, state, anchor)) return {anchor, anchor};
        ref = anchor;
    }

    const std::size_t n = state.cluster().node_count();
    std::optional<NodeIndex> best;
    double best_distance = 0.0;
    // Ref first so that it wins exact ties, then flat declaration order.
    auto consider = [&](NodeIndex node) {
        if (!fits(task, state, node)) return;
        const double d = distance(task, node, *ref, state, cfg);
        if (!best || d < best_distance) {
            best = node;
            best_distance = d;
        }
    };
    consider(*ref);
    for (std::size_t i = 0; i < n; ++i)
        if (NodeIndex{i} != *ref) consider(NodeIndex{i});

    if (!best) throw Unschedulable("no node has " + std::to_string(task.demand.mem) +
                                   " MB free for task " + to_string(task.key));
    return {*best, *ref};
}

ScheduleResult schedule(const Topology& topology, const ClusterState& state, const SchedulerConfig& cfg) {
    cfg.validate();
    const auto ordering = task_selection(topology);

    // Work on a private copy; the caller only sees the finished mapping.
    ClusterState working = state;
    Schedule out;
    out.topology_id = topology.id();
    for (const auto& task : ordering) {
        try {
            const auto choice = node_selection(task, working, out.ref_node, cfg);
            working.commit(task.demand, choice.node);
            out.ref_node = choice.ref;
            out.assignments.push_back({task.key, choice.node});
        } catch (const Unschedulable&) {
            out.unschedulable.push_back(task.key);
        }
    }
    return {std::move(out), std::move(working)};
}

ScheduleResult round_robin_schedule(const Topology& topology, const ClusterState& state) {
    const auto tasks = tasks_of(topology);
    ClusterState working = state;
    Schedule out;
    out.topology_id = topology.id();

    const std::size_t n = working.cluster().node_count();
    std::size_t cursor = 0;
    for (const auto& task : tasks) {
        bool placed = false;
        for (std::size_t step = 0; step < n; ++step) {
            const NodeIndex node{(cursor + step) % n};
            if (working.avail(node).mem < task.demand.mem) continue;
            working.commit(task.demand, node);
            out.assignments.push_back({task.key, node});
            if (!out.ref_node) out.ref_node = node;
            cursor = (node.value + 1) % n;
            placed = true;
            break;
        }
        if (!placed) out.unschedulable.push_back(task.key);
    }
    return {std::move(out), std::move(working)};
}

CommunicationCost communication_cost(const Schedule& schedule, const Topology& topology,
                                     const Cluster& cluster) {
    std::map<TaskKey, NodeIndex> where;
    for (const auto& a : schedule.assignments) where.emplace(a.task, a.node);

    CommunicationCost cost;
    for (const auto& edge : topology.edges()) {
        const auto from = topology.index_of(edge.from);
        const auto to = topology.index_of(edge.to);
        if (!from || !to) continue;
        const auto& up = topology.components()[*from];
        const auto& down = topology.components()[*to];
        for (std::uint32_t i = 0; i < up.parallelism; ++i) {
            const auto a = where.find(TaskKey{up.id, i});
            if (a == where.end()) continue;
            for (std::uint32_t j = 0; j < down.parallelism; ++j) {
                const auto b = where.find(TaskKey{down.id, j});
                if (b == where.end()) continue;
                const double d = network_distance(cluster, a->second, b->second);
                switch (cluster.tier(a->second, b->second)) {
                    case Tier::IntraNode:
                        ++cost.intra_node_pairs;
                        cost.intra_node_weighted += d;
                        break;
                    case Tier::IntraRack:
                        ++cost.intra_rack_pairs;
                        cost.intra_rack_weighted += d;
                        break;
                    case Tier::InterRack:
                        ++cost.inter_rack_pairs;
                        cost.inter_rack_weighted += d;
                        break;
                }
                cost.weighted_sum += d;
            }
        }
    }
    return cost;
}

std::vector<std::string> memory_violations(std::span<const Deployment> deployments, const Cluster& cluster) {
    std::vector<double> used(cluster.node_count(), 0.0);
    for (const auto& d : deployments) {
        for (const auto& a : d.schedule->assignments)
            used.at(a.node.value) += d.topology->component(a.task.component).demand.mem;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < used.size(); ++i) {
        const auto& node = cluster.node(NodeIndex{i});
        if (used[i] > node.mem_capacity)
            out.push_back(node.id + ": " + std::to_string(used[i]) + " MB assigned, capacity " +
                          std::to_string(node.mem_capacity));
    }
    return out;
}

Json to_json(const Schedule& schedule, const Cluster& cluster) {
    Json doc;
    doc["topology"] = schedule.topology_id;
    doc["ref_node"] = schedule.ref_node ? Json(cluster.node(*schedule.ref_node).id) : Json(nullptr);
    doc["assignments"] = Json::array();
    for (const auto& a : schedule.assignments)
        doc["assignments"].push_back({{"component", a.task.component.str()},
                                      {"index", a.task.index},
                                      {"node", cluster.node(a.node).id}});
    doc["unschedulable"] = Json::array();
    for (const auto& t : schedule.unschedulable)
        doc["unschedulable"].push_back({{"component", t.component.str()}, {"index", t.index}});
    return doc;
}

Schedule schedule_from_json(const Json& doc, const Cluster& cluster) {
    Schedule s;
    s.topology_id = doc.at("topology").get<std::string>();
    if (!doc.at("ref_node").is_null()) s.ref_node = cluster.find_node(doc.at("ref_node").get<std::string>());
    for (const auto& a : doc.at("assignments"))
        s.assignments.push_back({{ComponentId(a.at("component").get<std::string>()), a.at("index").get<std::uint32_t>()},
                                 cluster.find_node(a.at("node").get<std::string>())});
    for (const auto& t : doc.at("unschedulable"))
        s.unschedulable.push_back({ComponentId(t.at("component").get<std::string>()), t.at("index").get<std::uint32_t>()});
    return s;
}

Json to_json(const CommunicationCost& cost) {
    return {{"intra_node", {{"pairs", cost.intra_node_pairs}, {"weighted", cost.intra_node_weighted}}},
            {"intra_rack", {{"pairs", cost.intra_rack_pairs}, {"weighted", cost.intra_rack_weighted}}},
            {"inter_rack", {{"pairs", cost.inter_rack_pairs}, {"weighted", cost.inter_rack_weighted}}},
            {"weighted_sum", cost.weighted_sum}};
}

CommunicationCost communication_cost_from_json(const Json& doc) {
    CommunicationCost c;
    c.intra_node_pairs = doc.at("intra_node").at("pairs").get<std::size_t>();
    c.intra_node_weighted = doc.at("intra_node").at("weighted").get<double>();
    c.intra_rack_pairs = doc.at("intra_rack").at("pairs").get<std::size_t>();
    c.intra_rack_weighted = doc.at("intra_rack").at("weighted").get<double>();
    c.inter_rack_pairs = doc.at("inter_rack").at("pairs").get<std::size_t>();
    c.inter_rack_weighted = doc.at("inter_rack").at("weighted").get<double>();
    c.weighted_sum = doc.at("weighted_sum").get<double>();
    return c;
}

}  // namespace rstorm
