#include "rstorm/topology.hpp"

#include <deque>
#include <map>
#include <set>

#include "json_util.hpp"
#include "rstorm/errors.hpp"

namespace rstorm {

std::string_view to_string(ComponentKind kind) {
    return kind == ComponentKind::Spout ? "spout" : "bolt";
}

std::string to_string(const TaskKey& key) {
    return key.component.str() + "#" + std::to_string(key.index);
}

Topology::Topology(std::string id, std::vector<Component> components, std::vector<Edge> edges)
    : id_(std::move(id)), components_(std::move(components)), edges_(std::move(edges)) {}

std::optional<std::size_t> Topology::index_of(const ComponentId& id) const {
    for (std::size_t i = 0; i < components_.size(); ++i)
        if (components_[i].id == id) return i;
    return std::nullopt;
}

const Component& Topology::component(const ComponentId& id) const {
    auto idx = index_of(id);
    if (!idx) throw UnknownId("unknown component '" + id.str() + "' in topology " + id_);
    return components_[*idx];
}

std::vector<std::size_t> Topology::successors(std::size_t index) const {
    std::vector<std::size_t> out;
    const auto& from = components_.at(index).id;
    for (const auto& e : edges_) {
        if (e.from != from) continue;
        if (auto to = index_of(e.to)) out.push_back(*to);
    }
    return out;
}

bool Topology::is_sink(std::size_t index) const {
    const auto& id = components_.at(index).id;
    for (const auto& e : edges_)
        if (e.from == id && index_of(e.to)) return false;
    return true;
}

std::size_t Topology::task_count() const {
    std::size_t n = 0;
    for (const auto& c : components_) n += c.parallelism;
    return n;
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::EmptyName: return "EmptyName";
        case ViolationKind::DuplicateComponent: return "DuplicateComponent";
        case ViolationKind::ZeroParallelism: return "ZeroParallelism";
        case ViolationKind::NegativeDemand: return "NegativeDemand";
        case ViolationKind::UnknownEndpoint: return "UnknownEndpoint";
        case ViolationKind::SelfLoop: return "SelfLoop";
        case ViolationKind::NoSpout: return "NoSpout";
        case ViolationKind::SpoutHasInDegree: return "SpoutHasInDegree";
        case ViolationKind::UnreachableComponent: return "UnreachableComponent";
    }
    return "?";
}

std::string describe(const Violation& v) {
    std::string out(to_string(v.kind));
    if (!v.subject.empty()) out += " (" + v.subject + ")";
    return out;
}

std::vector<Violation> validate(const Topology& topology) {
    std::vector<Violation> out;
    const auto& comps = topology.components();

    std::set<ComponentId> seen;
    for (const auto& c : comps) {
        if (c.id.empty()) out.push_back({ViolationKind::EmptyName, ""});
        else if (!seen.insert(c.id).second)
            out.push_back({ViolationKind::DuplicateComponent, c.id.str()});
        if (c.parallelism < 1) out.push_back({ViolationKind::ZeroParallelism, c.id.str()});
        if (c.demand.mem < 0 || c.demand.cpu < 0 || c.demand.bw < 0)
            out.push_back({ViolationKind::NegativeDemand, c.id.str()});
    }

    for (const auto& e : topology.edges()) {
        const std::string label = e.from.str() + "->" + e.to.str();
        const auto from = topology.index_of(e.from);
        const auto to = topology.index_of(e.to);
        if (!from || !to) {
            out.push_back({ViolationKind::UnknownEndpoint, label});
            continue;
        }
        if (*from == *to) out.push_back({ViolationKind::SelfLoop, label});
        if (comps[*to].kind == ComponentKind::Spout)
            out.push_back({ViolationKind::SpoutHasInDegree, label});
    }

    std::deque<std::size_t> frontier;
    std::vector<bool> reached(comps.size(), false);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (comps[i].kind == ComponentKind::Spout) {
            reached[i] = true;
            frontier.push_back(i);
        }
    }
    const bool has_spout = !frontier.empty();
    if (!has_spout) out.push_back({ViolationKind::NoSpout, topology.id()});
    while (!frontier.empty()) {
        const auto cur = frontier.front();
        frontier.pop_front();
        for (auto next : topology.successors(cur)) {
            if (!reached[next]) {
                reached[next] = true;
                frontier.push_back(next);
            }
        }
    }
    // Without a spout every component is unreachable; NoSpout already covers it.
    if (has_spout) {
        for (std::size_t i = 0; i < comps.size(); ++i)
            if (!reached[i]) out.push_back({ViolationKind::UnreachableComponent, comps[i].id.str()});
    }
    return out;
}

void require_valid(const Topology& topology) {
    auto violations = validate(topology);
    if (violations.empty()) return;
    std::vector<std::string> lines;
    for (const auto& v : violations) lines.push_back(describe(v));
    const std::string what = "topology '" + topology.id() + "' is invalid: " + lines.front();
    throw ValidationError(what, std::move(lines));
}

std::vector<Task> tasks_of(const Topology& topology) {
    require_valid(topology);
    std::vector<Task> tasks;
    tasks.reserve(topology.task_count());
    for (const auto& c : topology.components())
        for (std::uint32_t i = 0; i < c.parallelism; ++i) tasks.push_back({{c.id, i}, c.demand});
    return tasks;
}

namespace {

ComponentKind parse_kind(const std::string& s) {
    if (s == "spout") return ComponentKind::Spout;
    if (s == "bolt") return ComponentKind::Bolt;
    throw ValidationError("unknown component kind '" + s + "'");
}

}  // namespace

Topology topology_from_json(const Json& doc) {
    try {
        std::vector<Component> comps;
        for (const auto& c : doc.at("components")) {
            Component comp;
            comp.id = ComponentId(c.at("name").get<std::string>());
            comp.kind = parse_kind(c.at("kind").get<std::string>());
            const auto par = detail::get_or<std::int64_t>(c, "parallelism", 1);
            if (par < 0) throw ValidationError("negative parallelism for " + comp.id.str());
            comp.parallelism = static_cast<std::uint32_t>(par);
            comp.demand.cpu = detail::get_or(c, "cpu", 0.0);
            comp.demand.mem = detail::get_or(c, "mem", 0.0);
            comp.demand.bw = detail::get_or(c, "bw", 0.0);
            comps.push_back(std::move(comp));
        }
        std::vector<Edge> edges;
        if (auto it = doc.find("edges"); it != doc.end()) {
            for (const auto& e : *it) {
                if (!e.is_array() || e.size() != 2)
                    throw ValidationError("edge must be a [from, to] pair");
                edges.push_back({ComponentId(e[0].get<std::string>()),
                                 ComponentId(e[1].get<std::string>())});
            }
        }
        return Topology(doc.at("id").get<std::string>(), std::move(comps), std::move(edges));
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed topology document: ") + e.what());
    }
}

Json to_json(const Topology& topology) {
    Json doc;
    doc["id"] = topology.id();
    doc["components"] = Json::array();
    for (const auto& c : topology.components()) {
        doc["components"].push_back({{"name", c.id.str()},
                                     {"kind", to_string(c.kind)},
                                     {"parallelism", c.parallelism},
                                     {"cpu", c.demand.cpu},
                                     {"mem", c.demand.mem},
                                     {"bw", c.demand.bw}});
    }
    doc["edges"] = Json::array();
    for (const auto& e : topology.edges()) doc["edges"].push_back({e.from.str(), e.to.str()});
    return doc;
}

Topology load_topology(const std::filesystem::path& path) {
    return topology_from_json(detail::read_json_file(path));
}

void save_topology(const Topology& topology, const std::filesystem::path& path) {
    detail::write_json_file(to_json(topology), path);
}

}  // namespace rstorm
