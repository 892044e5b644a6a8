#pragma once

#include <string_view>

#include "rstorm/fixtures.hpp"
#include "rstorm/topology.hpp"
#include "rstorm/workload.hpp"

namespace rstorm {

/// spout -> bolt1 -> ... -> bolt{stages-1}, every component `parallelism` wide.
Topology gen_linear(int stages, int parallelism, const GeneratorDemands& demands = {});

/// spout -> {bolt1..bolt{width}} -> sink.
Topology gen_diamond(int width, int parallelism, const GeneratorDemands& demands = {});

/// {spout1..spout{spouts}} -> center -> {sink1..sink{sinks}}.
Topology gen_star(int spouts, int sinks, int parallelism, const GeneratorDemands& demands = {});

/// Industry-shaped topologies loaded from topologies/pageload.json and
/// topologies/processing.json; both are validated on load.
Topology gen_pageload(const FixtureStore& store = FixtureStore::from_environment());
Topology gen_processing(const FixtureStore& store = FixtureStore::from_environment());

/// True for "linear:..", "diamond:..", "star:..".
bool is_generator_expression(std::string_view expr);

/// Builds a topology from "name:a,b[,c]". Throws ValidationError on bad
/// arguments and MissingInput for an unknown generator name.
Topology generate(std::string_view expr, const GeneratorDemands& demands = {});

}  // namespace rstorm
