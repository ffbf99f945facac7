#pragma once

#include <cstddef>
#include <cstdint>

namespace sitnet {

// Dense 0-based vertex id.
using VertexId = std::uint32_t;
// Index into Network::edges().
using EdgeId = std::uint32_t;

// |F| at or below this is treated as zero flow everywhere.
inline constexpr double kFlowEpsilon = 1e-12;

}  // namespace sitnet
