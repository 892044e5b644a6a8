#include "rstorm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <random>

#include "rstorm/errors.hpp"

namespace rstorm {

namespace {

constexpr double kWorkEpsilon = 1e-12;

struct TupleMsg {
    std::uint32_t tree = 0;
    std::uint32_t edge = 0;   // global edge id
    std::uint32_t hops = 0;   // edges traversed so far
};

// Each sender keeps its own shuffle stream so routing does not depend on
// event interleaving; paired runs with different timings stay coupled.
struct OutEdge {
    std::uint32_t edge = 0;
    std::vector<std::size_t> order;  // downstream task ids, shuffled
    std::size_t cursor = 0;
    std::mt19937_64 rng;
};

struct TaskRt {
    std::size_t deployment = 0;
    std::size_t component = 0;  // index within its topology
    std::size_t node = 0;
    bool spout = false;
    bool sink = false;
    double service_time = 0.0;
    std::vector<OutEdge> out;

    std::deque<TupleMsg> queue;
    bool busy = false;
    bool generating = false;  // spout: current work item creates a new tree
    TupleMsg current;
    double remaining = 0.0;

    std::uint32_t pending = 0;
    double next_emit = 0.0;
    bool wake_scheduled = false;
};

struct NodeRt {
    double cores = 1.0;
    std::vector<std::size_t> active;  // tasks with work in service
    double last = 0.0;
    double busy = 0.0;  // integral of busy cores
    double busy_at_warmup = 0.0;
    std::uint64_t version = 0;
};

struct LinkRt {
    std::optional<double> capacity;
    double next_free = 0.0;
};

struct Tree {
    std::size_t spout_task = 0;
    std::uint32_t outstanding = 0;
};

enum class EventKind { Arrival, NodeTimer, SpoutWake, Ack, WarmupMark };

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Arrival;
    std::size_t target = 0;
    std::uint64_t version = 0;
    TupleMsg msg;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

struct DeploymentRt {
    const Topology* topology = nullptr;
    std::size_t edge_base = 0;               // first global edge id
    std::vector<std::uint64_t> sink_counts;  // per component, post-warmup
    std::uint64_t completed_trees = 0;
};

class Engine {
public:
    Engine(std::span<const Deployment> deployments, const Cluster& cluster, const WorkloadModel& model,
           const SimOptions& options)
        : cluster_(cluster), model_(model), seed_(options.seed) {
        duration_ = options.duration;
        warmup_ = options.warmup.value_or(options.duration / 5.0);
        if (!(duration_ > 0) || warmup_ < 0 || !(duration_ > warmup_))
            throw ValidationError("simulation needs duration > warmup >= 0");
        model_.validate();

        for (std::size_t i = 0; i < cluster.node_count(); ++i)
            nodes_.push_back(NodeRt{cluster.node(NodeIndex{i}).cores(), {}, 0.0, 0.0, 0.0, 0});
        for (std::size_t r = 0; r < cluster.rack_count(); ++r)
            rack_links_.push_back(LinkRt{model.intra_rack_capacity});
        inter_link_.capacity = model.inter_rack_capacity;

        for (std::size_t d = 0; d < deployments.size(); ++d) build(d, deployments[d]);
        emitted_.assign(edge_count_, 0);
        received_.assign(edge_count_, 0);
    }

    std::vector<SimReport> run(std::span<const Deployment> deployments) {
        push({warmup_, 0, EventKind::WarmupMark, 0, 0, {}});
        for (std::size_t t = 0; t < tasks_.size(); ++t)
            if (tasks_[t].spout) try_emit(t, 0.0);

        while (!events_.empty() && events_.top().time <= duration_) {
            const Event ev = events_.top();
            events_.pop();
            now_ = ev.time;
            dispatch(ev);
        }
        now_ = duration_;
        for (std::size_t n = 0; n < nodes_.size(); ++n) advance(n);
        return reports(deployments);
    }

private:
    void build(std::size_t d, const Deployment& dep) {
        const Topology& topo = *dep.topology;
        require_valid(topo);
        if (!dep.schedule->complete())
            throw ValidationError("schedule for '" + topo.id() + "' is partial");

        DeploymentRt drt;
        drt.topology = &topo;
        drt.edge_base = edge_count_;
        drt.sink_counts.assign(topo.components().size(), 0);
        edge_count_ += topo.edges().size();

        // Global task id of (component, index).
        std::vector<std::vector<std::size_t>> ids(topo.components().size());
        for (std::size_t c = 0; c < topo.components().size(); ++c) {
            const auto& comp = topo.components()[c];
            for (std::uint32_t i = 0; i < comp.parallelism; ++i) {
                const auto node = dep.schedule->node_of(TaskKey{comp.id, i});
                if (!node) throw ValidationError("task " + to_string(TaskKey{comp.id, i}) + " is not placed");
                TaskRt t;
                t.deployment = d;
                t.component = c;
                t.node = node->value;
                t.spout = comp.kind == ComponentKind::Spout;
                t.sink = topo.is_sink(c);
                t.service_time = model_.service_time_for(comp.id);
                ids[c].push_back(tasks_.size());
                tasks_.push_back(std::move(t));
            }
        }
        for (std::size_t e = 0; e < topo.edges().size(); ++e) {
            const auto from = topo.index_of(topo.edges()[e].from);
            const auto to = topo.index_of(topo.edges()[e].to);
            for (auto src : ids[*from]) {
                OutEdge out;
                out.edge = static_cast<std::uint32_t>(drt.edge_base + e);
                out.order = ids[*to];
                std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                                  static_cast<std::uint32_t>(src), out.edge};
                out.rng.seed(seq);
                std::shuffle(out.order.begin(), out.order.end(), out.rng);
                tasks_[src].out.push_back(std::move(out));
            }
        }
        max_hops_.push_back(static_cast<std::uint32_t>(topo.components().size() - 1));
        deployments_.push_back(std::move(drt));
    }

    void push(Event ev) {
        ev.seq = seq_++;
        events_.push(ev);
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EventKind::Arrival: on_arrival(ev.target, ev.msg); break;
            case EventKind::NodeTimer: on_timer(ev.target, ev.version); break;
            case EventKind::SpoutWake:
                tasks_[ev.target].wake_scheduled = false;
                try_emit(ev.target, now_);
                break;
            case EventKind::Ack: {
                auto& spout = tasks_[ev.target];
                if (spout.pending > 0) --spout.pending;
                try_emit(ev.target, now_);
                break;
            }
            case EventKind::WarmupMark:
                for (std::size_t n = 0; n < nodes_.size(); ++n) {
                    advance(n);
                    nodes_[n].busy_at_warmup = nodes_[n].busy;
                }
                break;
        }
    }

    // Processor sharing: each active task gets min(1, cores / active) of a core.
    static double share(const NodeRt& node) {
        if (node.active.empty()) return 1.0;
        return std::min(1.0, node.cores / static_cast<double>(node.active.size()));
    }

    void advance(std::size_t n) {
        auto& node = nodes_[n];
        const double dt = now_ - node.last;
        if (dt > 0 && !node.active.empty()) {
            const double s = share(node);
            for (auto t : node.active) tasks_[t].remaining -= dt * s;
            node.busy += dt * std::min(static_cast<double>(node.active.size()), node.cores);
        }
        node.last = now_;
    }

    void reschedule(std::size_t n) {
        auto& node = nodes_[n];
        ++node.version;
        if (node.active.empty()) return;
        double least = std::numeric_limits<double>::infinity();
        for (auto t : node.active) least = std::min(least, tasks_[t].remaining);
        push({now_ + std::max(0.0, least) / share(node), 0, EventKind::NodeTimer, n, node.version, {}});
    }

    void start_work(std::size_t t) {
        auto& task = tasks_[t];
        task.busy = true;
        task.remaining = task.service_time;
        advance(task.node);
        nodes_[task.node].active.push_back(t);
        reschedule(task.node);
    }

    void on_timer(std::size_t n, std::uint64_t version) {
        auto& node = nodes_[n];
        if (version != node.version) return;
        advance(n);

        // The task this timer was armed for finishes even if rounding left a
        // sliver of work; anything else within epsilon finishes with it.
        std::size_t target = node.active.front();
        for (auto t : node.active)
            if (tasks_[t].remaining < tasks_[target].remaining) target = t;
        std::vector<std::size_t> finished;
        std::vector<std::size_t> still;
        for (auto t : node.active) {
            if (t == target || tasks_[t].remaining <= kWorkEpsilon) finished.push_back(t);
            else still.push_back(t);
        }
        node.active = std::move(still);
        for (auto t : finished) complete(t);
        reschedule(n);
    }

    double hop_delay(std::size_t a, std::size_t b) const {
        switch (cluster_.tier(NodeIndex{a}, NodeIndex{b})) {
            case Tier::IntraNode: return model_.network_delay.intra_node;
            case Tier::IntraRack: return model_.network_delay.intra_rack;
            case Tier::InterRack: return model_.network_delay.inter_rack;
        }
        return 0.0;
    }

    void send(std::size_t from, OutEdge& out, TupleMsg msg) {
        if (out.cursor == out.order.size()) {
            std::shuffle(out.order.begin(), out.order.end(), out.rng);
            out.cursor = 0;
        }
        const std::size_t to = out.order[out.cursor++];
        msg.edge = out.edge;
        ++msg.hops;
        ++emitted_[msg.edge];

        const std::size_t a = tasks_[from].node;
        const std::size_t b = tasks_[to].node;
        double depart = now_;
        LinkRt* link = nullptr;
        switch (cluster_.tier(NodeIndex{a}, NodeIndex{b})) {
            case Tier::IntraNode: break;
            case Tier::IntraRack: link = &rack_links_[cluster_.rack_of(NodeIndex{a}).value]; break;
            case Tier::InterRack: link = &inter_link_; break;
        }
        if (link && link->capacity) {
            depart = std::max(now_, link->next_free) + 1.0 / *link->capacity;
            link->next_free = depart;
        }
        push({depart + hop_delay(a, b), 0, EventKind::Arrival, to, 0, msg});
    }

    void on_arrival(std::size_t t, TupleMsg msg) {
        ++received_[msg.edge];
        auto& task = tasks_[t];
        if (task.busy) {
            task.queue.push_back(msg);
            return;
        }
        task.current = msg;
        task.generating = false;
        start_work(t);
    }

    void try_emit(std::size_t t, double now) {
        auto& task = tasks_[t];
        if (task.busy || task.wake_scheduled) return;
        if (model_.max_pending > 0 && task.pending >= model_.max_pending) return;
        if (model_.spout_rate) {
            if (now < task.next_emit) {
                task.wake_scheduled = true;
                push({task.next_emit, 0, EventKind::SpoutWake, t, 0, {}});
                return;
            }
            task.next_emit = now + 1.0 / *model_.spout_rate;
        }
        ++task.pending;
        task.generating = true;
        start_work(t);
    }

    std::uint32_t new_tree(std::size_t spout) {
        if (!free_trees_.empty()) {
            const auto id = free_trees_.back();
            free_trees_.pop_back();
            trees_[id] = Tree{spout, 0};
            return id;
        }
        trees_.push_back(Tree{spout, 0});
        return static_cast<std::uint32_t>(trees_.size() - 1);
    }

    void count_sink(const TaskRt& task) {
        if (now_ >= warmup_) ++deployments_[task.deployment].sink_counts[task.component];
    }

    void finish_tree(std::uint32_t id, std::size_t at_task) {
        const auto spout = trees_[id].spout_task;
        free_trees_.push_back(id);
        if (now_ >= warmup_) ++deployments_[tasks_[spout].deployment].completed_trees;
        const double delay = hop_delay(tasks_[at_task].node, tasks_[spout].node);
        push({now_ + delay, 0, EventKind::Ack, spout, 0, {}});
    }

    void complete(std::size_t t) {
        auto& task = tasks_[t];
        task.busy = false;
        task.remaining = 0.0;

        if (task.generating) {
            task.generating = false;
            const auto id = new_tree(t);
            TupleMsg root{id, 0, 0};
            for (auto& out : task.out) send(t, out, root);
            trees_[id].outstanding = static_cast<std::uint32_t>(task.out.size());
            if (task.out.empty()) {
                count_sink(task);
                finish_tree(id, t);
            }
            try_emit(t, now_);
            return;
        }

        const TupleMsg msg = task.current;
        if (task.sink) count_sink(task);
        std::uint32_t emitted = 0;
        if (msg.hops < max_hops_[task.deployment]) {
            for (auto& out : task.out) {
                send(t, out, msg);
                ++emitted;
            }
        }
        auto& tree = trees_[msg.tree];
        tree.outstanding += emitted;
        if (--tree.outstanding == 0) finish_tree(msg.tree, t);

        if (!task.queue.empty()) {
            task.current = task.queue.front();
            task.queue.pop_front();
            start_work(t);
        }
    }

    std::vector<SimReport> reports(std::span<const Deployment> deployments) {
        std::vector<std::uint64_t> in_flight(edge_count_, 0);
        auto pending = events_;
        while (!pending.empty()) {
            if (pending.top().kind == EventKind::Arrival) ++in_flight[pending.top().msg.edge];
            pending.pop();
        }

        const double window = duration_ - warmup_;
        std::vector<SimReport> out;
        for (std::size_t d = 0; d < deployments_.size(); ++d) {
            const auto& drt = deployments_[d];
            const Topology& topo = *drt.topology;
            SimReport r;
            r.topology_id = topo.id();
            r.duration = duration_;
            r.warmup = warmup_;
            r.completed_trees = drt.completed_trees;

            double sum = 0.0;
            std::size_t sinks = 0;
            for (std::size_t c = 0; c < topo.components().size(); ++c) {
                if (!topo.is_sink(c)) continue;
                const double rate = static_cast<double>(drt.sink_counts[c]) / window;
                r.q_per_sink[topo.components()[c].id.str()] = rate;
                sum += rate;
                ++sinks;
            }
            r.throughput = sinks ? 10.0 * sum / static_cast<double>(sinks) : 0.0;

            std::vector<std::size_t> per_node(nodes_.size(), 0);
            for (const auto& t : tasks_)
                if (t.deployment == d) ++per_node[t.node];
            for (std::size_t n = 0; n < nodes_.size(); ++n) {
                const auto& node = nodes_[n];
                const double u = (node.busy - node.busy_at_warmup) / (node.cores * window);
                r.cpu_utilization.push_back({cluster_.node(NodeIndex{n}).id, std::clamp(u, 0.0, 1.0), per_node[n]});
            }

            r.comm = communication_cost(*deployments[d].schedule, topo, cluster_);
            for (std::size_t e = 0; e < topo.edges().size(); ++e) {
                const auto g = drt.edge_base + e;
                r.edges.push_back({topo.edges()[e].from.str(), topo.edges()[e].to.str(), emitted_[g],
                                   received_[g], in_flight[g]});
            }
            out.push_back(std::move(r));
        }
        return out;
    }

    const Cluster& cluster_;
    WorkloadModel model_;
    std::uint64_t seed_ = 0;
    double duration_ = 0.0;
    double warmup_ = 0.0;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;

    std::vector<TaskRt> tasks_;
    std::vector<NodeRt> nodes_;
    std::vector<LinkRt> rack_links_;
    LinkRt inter_link_;
    std::vector<DeploymentRt> deployments_;
    std::vector<std::uint32_t> max_hops_;
    std::size_t edge_count_ = 0;
    std::vector<std::uint64_t> emitted_;
    std::vector<std::uint64_t> received_;
    std::vector<Tree> trees_;
    std::vector<std::uint32_t> free_trees_;
    std::priority_queue<Event, std::vector<Event>, Later> events_;
};

}  // namespace

std::vector<SimReport> simulate_many(std::span<const Deployment> deployments, const Cluster& cluster,
                                     const WorkloadModel& model, const SimOptions& options) {
    Engine engine(deployments, cluster, model, options);
    return engine.run(deployments);
}

SimReport simulate(const Schedule& schedule, const Topology& topology, const Cluster& cluster,
                   const WorkloadModel& model, const SimOptions& options) {
    const Deployment dep{&topology, &schedule};
    return simulate_many(std::span(&dep, 1), cluster, model, options).front();
}

double utilization_summary(const SimReport& report, bool used_nodes_only) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& u : report.cpu_utilization) {
        if (used_nodes_only && u.tasks == 0) continue;
        sum += u.utilization;
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

Json to_json(const SimReport& r) {
    Json doc;
    doc["topology"] = r.topology_id;
    doc["throughput_per_10s"] = r.throughput;
    doc["q_per_sink"] = Json::object();
    for (const auto& [name, q] : r.q_per_sink) doc["q_per_sink"][name] = q;
    doc["cpu_utilization"] = Json::array();
    for (const auto& u : r.cpu_utilization)
        doc["cpu_utilization"].push_back({{"node", u.node}, {"utilization", u.utilization}, {"tasks", u.tasks}});
    doc["communication"] = to_json(r.comm);
    doc["edges"] = Json::array();
    for (const auto& e : r.edges)
        doc["edges"].push_back({{"from", e.from}, {"to", e.to}, {"emitted", e.emitted},
                                {"received", e.received}, {"in_flight", e.in_flight}});
    doc["completed_trees"] = r.completed_trees;
    doc["duration"] = r.duration;
    doc["warmup"] = r.warmup;
    return doc;
}

SimReport sim_report_from_json(const Json& doc) try {
    SimReport r;
    r.topology_id = doc.at("topology").get<std::string>();
    r.throughput = doc.at("throughput_per_10s").get<double>();
    for (const auto& [name, q] : doc.at("q_per_sink").items()) r.q_per_sink[name] = q.get<double>();
    for (const auto& u : doc.at("cpu_utilization"))
        r.cpu_utilization.push_back({u.at("node").get<std::string>(), u.at("utilization").get<double>(),
                                     u.at("tasks").get<std::size_t>()});
    r.comm = communication_cost_from_json(doc.at("communication"));
    for (const auto& e : doc.at("edges"))
        r.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                           e.at("emitted").get<std::uint64_t>(), e.at("received").get<std::uint64_t>(),
                           e.at("in_flight").get<std::uint64_t>()});
    r.completed_trees = doc.at("completed_trees").get<std::uint64_t>();
    r.duration = doc.at("duration").get<double>();
    r.warmup = doc.at("warmup").get<double>();
    return r;
} catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed simulation report: ") + e.what());
}

}  // namespace rstorm
