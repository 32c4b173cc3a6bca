#include "smash/graph.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace smash {

namespace {
constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
}

// Iterative Tarjan; recursion depth would otherwise scale with state count.
std::vector<std::vector<StateIndex>> strongly_connected_components(
    const Adjacency& graph) {
  const std::size_t n = graph.size();
  std::vector<std::size_t> index(n, kUnvisited);
  std::vector<std::size_t> lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<StateIndex> stack;
  std::vector<std::vector<StateIndex>> components;
  std::size_t counter = 0;

  // (vertex, position of next successor to look at)
  std::vector<std::pair<StateIndex, std::size_t>> call_stack;

  for (StateIndex root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call_stack.emplace_back(root, 0);
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call_stack.empty()) {
      auto& [v, pos] = call_stack.back();
      if (pos < graph[v].size()) {
        const StateIndex w = graph[v][pos++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call_stack.emplace_back(w, 0);
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      const StateIndex done = v;
      call_stack.pop_back();
      if (!call_stack.empty()) {
        const StateIndex parent = call_stack.back().first;
        lowlink[parent] = std::min(lowlink[parent], lowlink[done]);
      }
      if (lowlink[done] == index[done]) {
        std::vector<StateIndex> component;
        StateIndex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != done);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
    }
  }
  return components;
}

std::vector<std::vector<StateIndex>> closed_components(const Adjacency& graph) {
  auto components = strongly_connected_components(graph);
  std::vector<std::size_t> component_of(graph.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (StateIndex v : components[c]) component_of[v] = c;
  }
  std::vector<std::vector<StateIndex>> closed;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const bool leaks = std::any_of(
        components[c].begin(), components[c].end(), [&](StateIndex v) {
          return std::any_of(graph[v].begin(), graph[v].end(),
                             [&](StateIndex w) { return component_of[w] != c; });
        });
    if (!leaks) closed.push_back(std::move(components[c]));
  }
  return closed;
}

}  // namespace smash
