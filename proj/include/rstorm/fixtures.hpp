#pragma once

#include <filesystem>
#include <string_view>

#include "rstorm/cluster.hpp"
#include "rstorm/topology.hpp"
#include "rstorm/workload.hpp"

namespace rstorm {

/// Resolves cluster, workload and topology references against a fixture
/// directory laid out as clusters/, workloads/ and topologies/.
///
/// A reference is tried as a path first (with and without a .json suffix),
/// then relative to the root, then inside the matching subdirectory. So
/// "clusters/2x6", "2x6" and "/abs/path/2x6.json" all work for clusters.
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path root);

    /// Root from $RSTORM_FIXTURES, falling back to the source tree's fixtures/.
    static FixtureStore from_environment();

    const std::filesystem::path& root() const noexcept { return root_; }

    Cluster cluster(std::string_view ref) const;
    WorkloadModel workload(std::string_view ref) const;

    /// Generator expressions ("linear:4,4", "diamond:3,2", "star:2,2,4") are
    /// built with `demands`; anything else is loaded from a spec file.
    Topology topology(std::string_view ref, const GeneratorDemands& demands = {}) const;

    std::filesystem::path resolve(std::string_view ref, std::string_view subdir) const;  // throws MissingInput

private:
    std::filesystem::path root_;
};

}  // namespace rstorm
