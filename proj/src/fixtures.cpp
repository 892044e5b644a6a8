#include "rstorm/fixtures.hpp"

#include <cstdlib>

#include "rstorm/errors.hpp"
#include "rstorm/generators.hpp"

#ifndef RSTORM_DEFAULT_FIXTURE_DIR
#define RSTORM_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace rstorm {

namespace fs = std::filesystem;

FixtureStore::FixtureStore(fs::path root) : root_(std::move(root)) {}

FixtureStore FixtureStore::from_environment() {
    if (const char* env = std::getenv("RSTORM_FIXTURES"); env && *env) return FixtureStore(env);
    return FixtureStore(RSTORM_DEFAULT_FIXTURE_DIR);
}

fs::path FixtureStore::resolve(std::string_view ref, std::string_view subdir) const {
    const fs::path given(ref);
    std::vector<fs::path> candidates{given, fs::path(std::string(ref) + ".json")};
    if (given.is_relative()) {
        candidates.push_back(root_ / given);
        candidates.push_back(root_ / (std::string(ref) + ".json"));
        candidates.push_back(root_ / subdir / given);
        candidates.push_back(root_ / subdir / (std::string(ref) + ".json"));
    }
    for (const auto& c : candidates) {
        std::error_code ec;
        if (fs::is_regular_file(c, ec)) return c;
    }
    throw MissingInput("cannot find " + std::string(subdir) + " fixture '" + std::string(ref) + "' (root " +
                       root_.string() + ")");
}

Cluster FixtureStore::cluster(std::string_view ref) const { return load_cluster(resolve(ref, "clusters")); }

WorkloadModel FixtureStore::workload(std::string_view ref) const { return load_workload(resolve(ref, "workloads")); }

Topology FixtureStore::topology(std::string_view ref, const GeneratorDemands& demands) const {
    if (is_generator_expression(ref)) return generate(ref, demands);
    return load_topology(resolve(ref, "topologies"));
}

}  // namespace rstorm
