#include "rstorm/workload.hpp"

#include <vector>

#include "json_util.hpp"
#include "rstorm/errors.hpp"

namespace rstorm {

ResourceVector GeneratorDemands::for_component(const std::string& name) const {
    auto it = components.find(name);
    return it == components.end() ? fallback : it->second;
}

double WorkloadModel::service_time_for(const ComponentId& component) const {
    auto it = service_time.find(component.str());
    return it == service_time.end() ? default_service_time : it->second;
}

void WorkloadModel::validate() const {
    std::vector<std::string> problems;
    if (default_service_time < 0) problems.push_back("service_time.default must be >= 0");
    for (const auto& [name, t] : service_time)
        if (t < 0) problems.push_back("service_time for " + name + " must be >= 0");
    const auto& d = network_delay;
    if (d.intra_node < 0 || d.intra_node > d.intra_rack || d.intra_rack > d.inter_rack)
        problems.push_back("network_delay must satisfy 0 <= intra_node <= intra_rack <= inter_rack");
    if (intra_rack_capacity && !(*intra_rack_capacity > 0))
        problems.push_back("link_capacity.intra_rack must be > 0");
    if (inter_rack_capacity && !(*inter_rack_capacity > 0))
        problems.push_back("link_capacity.inter_rack must be > 0");
    if (spout_rate && !(*spout_rate > 0)) problems.push_back("spout_rate must be > 0");
    if (!spout_rate && max_pending == 0)
        problems.push_back("an unbounded spout_rate needs a max_pending window");
    if (!problems.empty()) throw ValidationError("invalid workload '" + name + "': " + problems.front(), problems);
}

namespace {

std::optional<double> optional_rate(const Json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) {
        if (it->get<std::string>() == "unbounded") return std::nullopt;
        throw ValidationError(std::string(key) + ": expected a number or \"unbounded\"");
    }
    return it->get<double>();
}

Json rate_json(const std::optional<double>& rate) {
    return rate ? Json(*rate) : Json("unbounded");
}

ResourceVector demand_from_json(const Json& obj, ResourceVector base) {
    base.cpu = detail::get_or(obj, "cpu", base.cpu);
    base.mem = detail::get_or(obj, "mem", base.mem);
    base.bw = detail::get_or(obj, "bw", base.bw);
    return base;
}

Json demand_json(const ResourceVector& v) {
    return {{"cpu", v.cpu}, {"mem", v.mem}, {"bw", v.bw}};
}

}  // namespace

WorkloadModel workload_from_json(const Json& doc) {
    try {
        WorkloadModel m;
        m.name = detail::get_or<std::string>(doc, "name", "");
        if (auto it = doc.find("service_time"); it != doc.end()) {
            if (it->is_number()) {
                m.default_service_time = it->get<double>();
            } else {
                m.default_service_time = detail::get_or(*it, "default", 0.0);
                if (auto c = it->find("components"); c != it->end())
                    for (const auto& [name, t] : c->items()) m.service_time[name] = t.get<double>();
            }
        }
        if (auto it = doc.find("network_delay"); it != doc.end()) {
            m.network_delay.intra_node = detail::get_or(*it, "intra_node", 0.0);
            m.network_delay.intra_rack = detail::get_or(*it, "intra_rack", 0.0);
            m.network_delay.inter_rack = detail::get_or(*it, "inter_rack", 0.0);
        }
        if (auto it = doc.find("link_capacity"); it != doc.end()) {
            m.intra_rack_capacity = optional_rate(*it, "intra_rack");
            m.inter_rack_capacity = optional_rate(*it, "inter_rack");
        }
        m.spout_rate = optional_rate(doc, "spout_rate");
        m.max_pending = detail::get_or<std::uint32_t>(doc, "max_pending", 0);
        if (auto it = doc.find("generator_demands"); it != doc.end()) {
            if (auto f = it->find("default"); f != it->end())
                m.generator_demands.fallback = demand_from_json(*f, m.generator_demands.fallback);
            if (auto c = it->find("components"); c != it->end())
                for (const auto& [name, d] : c->items())
                    m.generator_demands.components[name] = demand_from_json(d, m.generator_demands.fallback);
        }
        m.validate();
        return m;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed workload document: ") + e.what());
    }
}

Json to_json(const WorkloadModel& m) {
    Json doc;
    doc["name"] = m.name;
    Json overrides = Json::object();
    for (const auto& [name, t] : m.service_time) overrides[name] = t;
    doc["service_time"] = {{"default", m.default_service_time}, {"components", overrides}};
    doc["network_delay"] = {{"intra_node", m.network_delay.intra_node},
                            {"intra_rack", m.network_delay.intra_rack},
                            {"inter_rack", m.network_delay.inter_rack}};
    doc["link_capacity"] = {{"intra_rack", rate_json(m.intra_rack_capacity)},
                            {"inter_rack", rate_json(m.inter_rack_capacity)}};
    doc["spout_rate"] = rate_json(m.spout_rate);
    doc["max_pending"] = m.max_pending;
    Json comps = Json::object();
    for (const auto& [name, d] : m.generator_demands.components) comps[name] = demand_json(d);
    doc["generator_demands"] = {{"default", demand_json(m.generator_demands.fallback)}, {"components", comps}};
    return doc;
}

WorkloadModel load_workload(const std::filesystem::path& path) {
    auto m = workload_from_json(detail::read_json_file(path));
    if (m.name.empty()) m.name = path.stem().string();
    return m;
}

}  // namespace rstorm
