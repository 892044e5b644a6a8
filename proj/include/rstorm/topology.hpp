#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rstorm/resources.hpp"

namespace rstorm {

/// Name of a spout or bolt, unique within its topology.
class ComponentId {
public:
    ComponentId() = default;
    explicit ComponentId(std::string name) : name_(std::move(name)) {}

    const std::string& str() const noexcept { return name_; }
    bool empty() const noexcept { return name_.empty(); }

    friend auto operator<=>(const ComponentId&, const ComponentId&) = default;

private:
    std::string name_;
};

enum class ComponentKind { Spout, Bolt };

std::string_view to_string(ComponentKind kind);

struct Component {
    ComponentId id;
    ComponentKind kind = ComponentKind::Bolt;
    std::uint32_t parallelism = 1;
    ResourceVector demand;  // per task

    friend bool operator==(const Component&, const Component&) = default;
};

/// Directed stream subscription: `to` consumes what `from` emits.
struct Edge {
    ComponentId from;
    ComponentId to;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct TaskKey {
    ComponentId component;
    std::uint32_t index = 0;

    friend auto operator<=>(const TaskKey&, const TaskKey&) = default;
};

std::string to_string(const TaskKey& key);

struct Task {
    TaskKey key;
    ResourceVector demand;

    friend bool operator==(const Task&, const Task&) = default;
};

/// A stream topology. Component and edge declaration order is significant:
/// it is the tie-break order for traversal and round-robin placement.
class Topology {
public:
    Topology() = default;
    Topology(std::string id, std::vector<Component> components, std::vector<Edge> edges);

    const std::string& id() const noexcept { return id_; }
    const std::vector<Component>& components() const noexcept { return components_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    std::optional<std::size_t> index_of(const ComponentId& id) const;
    const Component& component(const ComponentId& id) const;  // throws UnknownId

    /// Components consuming `index`'s stream, in edge declaration order.
    /// Edges with unknown endpoints are ignored.
    std::vector<std::size_t> successors(std::size_t index) const;
    bool is_sink(std::size_t index) const;

    std::size_t task_count() const;

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    std::string id_;
    std::vector<Component> components_;
    std::vector<Edge> edges_;
};

enum class ViolationKind {
    EmptyName,
    DuplicateComponent,
    ZeroParallelism,
    NegativeDemand,
    UnknownEndpoint,
    SelfLoop,
    NoSpout,
    SpoutHasInDegree,
    UnreachableComponent,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string subject;  // component name or "from->to"

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::string describe(const Violation& v);

std::vector<Violation> validate(const Topology& topology);

/// Throws ValidationError listing every violation.
void require_valid(const Topology& topology);

/// Tasks in component declaration order, index 0..parallelism-1 within each.
std::vector<Task> tasks_of(const Topology& topology);

Topology topology_from_json(const Json& doc);
Json to_json(const Topology& topology);
Topology load_topology(const std::filesystem::path& path);
void save_topology(const Topology& topology, const std::filesystem::path& path);

}  // namespace rstorm
