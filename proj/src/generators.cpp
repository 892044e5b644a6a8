#include "rstorm/generators.hpp"

#include <charconv>
#include <string>
#include <vector>

#include "rstorm/errors.hpp"

namespace rstorm {

namespace {

Component make(const std::string& name, ComponentKind kind, int parallelism, const GeneratorDemands& demands) {
    return Component{ComponentId(name), kind, static_cast<std::uint32_t>(parallelism), demands.for_component(name)};
}

Edge link(const std::string& from, const std::string& to) {
    return Edge{ComponentId(from), ComponentId(to)};
}

void require_positive(int value, const char* what) {
    if (value < 1) throw ValidationError(std::string(what) + " must be >= 1, got " + std::to_string(value));
}

}  // namespace

Topology gen_linear(int stages, int parallelism, const GeneratorDemands& demands) {
    if (stages < 2) throw ValidationError("linear topology needs at least 2 stages, got " + std::to_string(stages));
    require_positive(parallelism, "parallelism");
    std::vector<Component> comps{make("spout", ComponentKind::Spout, parallelism, demands)};
    std::vector<Edge> edges;
    std::string prev = "spout";
    for (int i = 1; i < stages; ++i) {
        const std::string name = "bolt" + std::to_string(i);
        comps.push_back(make(name, ComponentKind::Bolt, parallelism, demands));
        edges.push_back(link(prev, name));
        prev = name;
    }
    return Topology("linear", std::move(comps), std::move(edges));
}

Topology gen_diamond(int width, int parallelism, const GeneratorDemands& demands) {
    require_positive(width, "diamond width");
    require_positive(parallelism, "parallelism");
    std::vector<Component> comps{make("spout", ComponentKind::Spout, parallelism, demands)};
    std::vector<Edge> edges;
    for (int i = 1; i <= width; ++i) {
        const std::string name = "bolt" + std::to_string(i);
        comps.push_back(make(name, ComponentKind::Bolt, parallelism, demands));
        edges.push_back(link("spout", name));
    }
    comps.push_back(make("sink", ComponentKind::Bolt, parallelism, demands));
    for (int i = 1; i <= width; ++i) edges.push_back(link("bolt" + std::to_string(i), "sink"));
    return Topology("diamond", std::move(comps), std::move(edges));
}

Topology gen_star(int spouts, int sinks, int parallelism, const GeneratorDemands& demands) {
    require_positive(spouts, "star spouts");
    require_positive(sinks, "star sinks");
    require_positive(parallelism, "parallelism");
    std::vector<Component> comps;
    std::vector<Edge> edges;
    for (int i = 1; i <= spouts; ++i) {
        const std::string name = "spout" + std::to_string(i);
        comps.push_back(make(name, ComponentKind::Spout, parallelism, demands));
        edges.push_back(link(name, "center"));
    }
    comps.push_back(make("center", ComponentKind::Bolt, parallelism, demands));
    for (int i = 1; i <= sinks; ++i) {
        const std::string name = "sink" + std::to_string(i);
        comps.push_back(make(name, ComponentKind::Bolt, parallelism, demands));
        edges.push_back(link("center", name));
    }
    return Topology("star", std::move(comps), std::move(edges));
}

namespace {

Topology load_fixture_topology(const FixtureStore& store, const char* name) {
    auto topo = load_topology(store.resolve(name, "topologies"));
    require_valid(topo);
    return topo;
}

std::vector<int> parse_args(std::string_view args, std::string_view expr) {
    std::vector<int> out;
    while (!args.empty()) {
        const auto comma = args.find(',');
        const auto piece = args.substr(0, comma);
        int value = 0;
        const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
        if (ec != std::errc() || ptr != piece.data() + piece.size())
            throw ValidationError("bad generator argument '" + std::string(piece) + "' in " + std::string(expr));
        out.push_back(value);
        if (comma == std::string_view::npos) break;
        args.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace

Topology gen_pageload(const FixtureStore& store) { return load_fixture_topology(store, "pageload"); }
Topology gen_processing(const FixtureStore& store) { return load_fixture_topology(store, "processing"); }

bool is_generator_expression(std::string_view expr) {
    const auto name = expr.substr(0, expr.find(':'));
    return expr.find(':') != std::string_view::npos &&
           (name == "linear" || name == "diamond" || name == "star");
}

Topology generate(std::string_view expr, const GeneratorDemands& demands) {
    const auto colon = expr.find(':');
    const auto name = expr.substr(0, colon);
    const auto args = colon == std::string_view::npos ? std::vector<int>{} : parse_args(expr.substr(colon + 1), expr);
    auto need = [&](std::size_t n) {
        if (args.size() != n)
            throw ValidationError(std::string(name) + " takes " + std::to_string(n) + " arguments: " + std::string(expr));
    };
    if (name == "linear") {
        need(2);
        return gen_linear(args[0], args[1], demands);
    }
    if (name == "diamond") {
        need(2);
        return gen_diamond(args[0], args[1], demands);
    }
    if (name == "star") {
        need(3);
        return gen_star(args[0], args[1], args[2], demands);
    }
    throw MissingInput("unknown generator '" + std::string(name) + "'");
}

}  // namespace rstorm
