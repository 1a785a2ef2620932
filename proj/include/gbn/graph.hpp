#ifndef GBN_GRAPH_HPP
#define GBN_GRAPH_HPP

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gbn {

/// Directed edge parent -> child, 0-based. Ordered by (child, parent) so that
/// parameter vectors group the incoming weights of each node together.
struct Edge {
    int parent = 0;
    int child = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend std::strong_ordering operator<=>(const Edge& a, const Edge& b) {
        if (auto c = a.child <=> b.child; c != 0) return c;
        return a.parent <=> b.parent;
    }
};

/// 1-based display name, "w[i,j]".
std::string weight_name(const Edge& e);

/// Known DAG over p nodes with a deterministic topological order.
///
/// Immutable after construction. Node indices are 0-based; `position(v)` gives
/// the rank of node v in the topological order (smallest-index Kahn), so every
/// edge satisfies position(parent) < position(child). When labels already
/// satisfy parent < child the order is the identity.
class DagStructure {
public:
    DagStructure() = default;

    int p() const noexcept { return p_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    /// Canonical edge list, sorted by (child, parent).
    std::span<const Edge> edges() const noexcept { return edges_; }

    /// Incoming edges of `child` as a contiguous slice of edges().
    std::span<const Edge> incoming(int child) const;
    /// Index into edges() of the first incoming edge of `child`.
    std::size_t incoming_offset(int child) const;

    /// Parents of j, ascending.
    std::vector<int> parents(int j) const;

    std::optional<std::size_t> edge_index(int parent, int child) const;

    /// position(v): topological rank of node v.
    int position(int node) const { return position_.at(static_cast<std::size_t>(node)); }
    /// topological_order()[r]: node at rank r.
    std::span<const int> topological_order() const noexcept { return topo_; }
    bool identity_order() const noexcept;

    friend bool operator==(const DagStructure&, const DagStructure&) = default;

private:
    friend DagStructure build_dag(int p, std::span<const Edge> edges);

    int p_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;  // size p+1
    std::vector<int> position_;
    std::vector<int> topo_;
};

/// Validates indices, rejects duplicates and cycles, and computes the order.
/// Throws IndexOutOfRange, DuplicateEdgeError or CycleError.
DagStructure build_dag(int p, std::span<const Edge> edges);

/// All i<j edges on p nodes.
DagStructure full_dag(int p);

}  // namespace gbn

#endif  // GBN_GRAPH_HPP
