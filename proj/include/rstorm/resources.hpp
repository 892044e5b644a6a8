#pragma once

#include "json.hpp"

namespace rstorm {

using Json = nlohmann::ordered_json;

/// Demand or availability triple. `mem` is the only hard constraint;
/// `cpu` and `bw` are soft.
struct ResourceVector {
    double mem = 0.0;  // MB
    double cpu = 0.0;  // CPU points, 100 per core
    double bw = 0.0;   // bandwidth units

    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;
};

}  // namespace rstorm
