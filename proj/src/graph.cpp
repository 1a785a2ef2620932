#include "gbn/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "gbn/error.hpp"

namespace gbn {

std::string weight_name(const Edge& e) {
    return "w[" + std::to_string(e.parent + 1) + "," + std::to_string(e.child + 1) + "]";
}

std::span<const Edge> DagStructure::incoming(int child) const {
    if (child < 0 || child >= p_) throw IndexOutOfRange("node index out of range");
    const auto c = static_cast<std::size_t>(child);
    return std::span<const Edge>(edges_).subspan(offsets_[c], offsets_[c + 1] - offsets_[c]);
}

std::size_t DagStructure::incoming_offset(int child) const {
    if (child < 0 || child >= p_) throw IndexOutOfRange("node index out of range");
    return offsets_[static_cast<std::size_t>(child)];
}

std::vector<int> DagStructure::parents(int j) const {
    std::vector<int> out;
    for (const Edge& e : incoming(j)) out.push_back(e.parent);
    return out;
}

std::optional<std::size_t> DagStructure::edge_index(int parent, int child) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{parent, child});
    if (it == edges_.end() || *it != Edge{parent, child}) return std::nullopt;
    return static_cast<std::size_t>(it - edges_.begin());
}

bool DagStructure::identity_order() const noexcept {
    for (int r = 0; r < p_; ++r)
        if (topo_[static_cast<std::size_t>(r)] != r) return false;
    return true;
}

DagStructure build_dag(int p, std::span<const Edge> edges) {
    if (p < 1) throw IndexOutOfRange("node count must be positive");

    DagStructure dag;
    dag.p_ = p;
    dag.edges_.assign(edges.begin(), edges.end());
    for (const Edge& e : dag.edges_) {
        if (e.parent < 0 || e.parent >= p || e.child < 0 || e.child >= p)
            throw IndexOutOfRange("edge " + weight_name(e) + " has an index outside 1.." +
                                  std::to_string(p));
        if (e.parent == e.child) throw CycleError("self-loop on node " + std::to_string(e.child + 1));
    }
    std::sort(dag.edges_.begin(), dag.edges_.end());
    if (auto dup = std::adjacent_find(dag.edges_.begin(), dag.edges_.end()); dup != dag.edges_.end())
        throw DuplicateEdgeError("duplicate edge " + weight_name(*dup));

    const auto np = static_cast<std::size_t>(p);
    dag.offsets_.assign(np + 1, 0);
    for (const Edge& e : dag.edges_) ++dag.offsets_[static_cast<std::size_t>(e.child) + 1];
    for (std::size_t j = 0; j < np; ++j) dag.offsets_[j + 1] += dag.offsets_[j];

    // Kahn's method, smallest ready index first.
    std::vector<std::vector<int>> children(np);
    std::vector<int> indegree(np, 0);
    for (const Edge& e : dag.edges_) {
        children[static_cast<std::size_t>(e.parent)].push_back(e.child);
        ++indegree[static_cast<std::size_t>(e.child)];
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < p; ++v)
        if (indegree[static_cast<std::size_t>(v)] == 0) ready.push(v);

    dag.position_.assign(np, -1);
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        dag.position_[static_cast<std::size_t>(v)] = static_cast<int>(dag.topo_.size());
        dag.topo_.push_back(v);
        for (int c : children[static_cast<std::size_t>(v)])
            if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
    if (dag.topo_.size() != np) throw CycleError("edge set contains a directed cycle");
    return dag;
}

DagStructure full_dag(int p) {
    std::vector<Edge> edges;
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < j; ++i) edges.push_back({i, j});
    return build_dag(p, edges);
}

}  // namespace gbn
