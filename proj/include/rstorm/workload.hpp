#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "rstorm/resources.hpp"
#include "rstorm/topology.hpp"

namespace rstorm {

struct TierDelays {
    double intra_node = 0.0;  // seconds per hop
    double intra_rack = 0.0;
    double inter_rack = 0.0;
    friend bool operator==(const TierDelays&, const TierDelays&) = default;
};

/// Per-task demands applied to generated benchmark topologies.
struct GeneratorDemands {
    ResourceVector fallback{128.0, 10.0, 0.0};
    std::map<std::string, ResourceVector> components;

    ResourceVector for_component(const std::string& name) const;
    friend bool operator==(const GeneratorDemands&, const GeneratorDemands&) = default;
};

/// Timing model the simulator runs a placed topology under.
struct WorkloadModel {
    std::string name;

    /// CPU seconds per tuple on one full core (100 points).
    double default_service_time = 0.0;
    std::map<std::string, double> service_time;

    TierDelays network_delay;

    /// Aggregate tuples/s per rack's intra-rack link and for the single
    /// inter-rack link. Absent means unbounded.
    std::optional<double> intra_rack_capacity;
    std::optional<double> inter_rack_capacity;

    /// Tuples/s offered per spout task; absent means the spout emits as fast
    /// as its pending window allows.
    std::optional<double> spout_rate;

    /// Outstanding tuple trees per spout task; 0 disables the window.
    std::uint32_t max_pending = 0;

    GeneratorDemands generator_demands;

    double service_time_for(const ComponentId& component) const;

    void validate() const;  // throws ValidationError
    friend bool operator==(const WorkloadModel&, const WorkloadModel&) = default;
};

WorkloadModel workload_from_json(const Json& doc);
Json to_json(const WorkloadModel& model);
WorkloadModel load_workload(const std::filesystem::path& path);

}  // namespace rstorm
