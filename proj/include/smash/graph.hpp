#pragma once

#include <cstddef>
#include <vector>

namespace smash {

using StateIndex = std::size_t;

/// Successor lists; parallel edges and self loops are allowed.
using Adjacency = std::vector<std::vector<StateIndex>>;

/// Tarjan's algorithm. Components come out in reverse topological order of
/// the condensation (sink components first); members are sorted ascending.
std::vector<std::vector<StateIndex>> strongly_connected_components(
    const Adjacency& graph);

/// Components with no edge leaving them. A finite digraph has at least one.
std::vector<std::vector<StateIndex>> closed_components(const Adjacency& graph);

}  // namespace smash
