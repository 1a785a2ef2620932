#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "gbn/error.hpp"
#include "gbn/graph.hpp"
#include "test_support.hpp"

using namespace gbn;

TEST_CASE("toy graph keeps identity order and parent sets") {
    const DagStructure dag = test::toy_dag();
    CHECK(dag.p() == 3);
    CHECK(dag.identity_order());
    CHECK(dag.parents(0).empty());
    CHECK(dag.parents(1) == std::vector<int>{0});
    CHECK(dag.parents(2) == std::vector<int>{0, 1});
    REQUIRE(dag.num_edges() == 3);
    CHECK(dag.edges()[0] == Edge{0, 1});
    CHECK(dag.edges()[1] == Edge{0, 2});
    CHECK(dag.edges()[2] == Edge{1, 2});
}

TEST_CASE("empty graph") {
    const DagStructure dag = build_dag(4, {});
    CHECK(dag.identity_order());
    for (int j = 0; j < 4; ++j) CHECK(dag.parents(j).empty());
}

TEST_CASE("invalid edge sets are rejected") {
    const std::vector<Edge> two_cycle{{0, 1}, {1, 0}};
    CHECK_THROWS_AS(build_dag(2, two_cycle), CycleError);
    const std::vector<Edge> three_cycle{{0, 1}, {1, 2}, {2, 0}};
    CHECK_THROWS_AS(build_dag(3, three_cycle), CycleError);
    const std::vector<Edge> self_loop{{1, 1}};
    CHECK_THROWS_AS(build_dag(2, self_loop), CycleError);
    const std::vector<Edge> dup{{0, 1}, {0, 1}};
    CHECK_THROWS_AS(build_dag(2, dup), DuplicateEdgeError);
    const std::vector<Edge> out_of_range{{0, 3}};
    CHECK_THROWS_AS(build_dag(3, out_of_range), IndexOutOfRange);
    CHECK_THROWS_AS(test::toy_dag().parents(3), IndexOutOfRange);
    CHECK_THROWS_AS(test::toy_dag().parents(-1), IndexOutOfRange);
}

TEST_CASE("unordered labels get the smallest-index Kahn order") {
    // 2 -> 0 -> 1, node 3 isolated
    const std::vector<Edge> edges{{2, 0}, {0, 1}};
    const DagStructure dag = build_dag(4, edges);
    CHECK_FALSE(dag.identity_order());
    const std::vector<int> expected{2, 0, 1, 3};
    CHECK(std::equal(expected.begin(), expected.end(), dag.topological_order().begin()));
    for (const Edge& e : dag.edges()) CHECK(dag.position(e.parent) < dag.position(e.child));
}

TEST_CASE("property: parents round-trip and relabeling invariance on random DAGs") {
    std::mt19937_64 rng(20240501);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = 1 + static_cast<int>(rng() % 12);
        std::vector<Edge> edges;
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < j; ++i)
                if (rng() % 3 == 0) edges.push_back({i, j});
        const DagStructure dag = build_dag(p, edges);
        CHECK(dag.identity_order());

        std::set<std::pair<int, int>> input, rebuilt;
        for (const Edge& e : edges) input.insert({e.parent, e.child});
        for (int j = 0; j < p; ++j)
            for (int i : dag.parents(j)) rebuilt.insert({i, j});
        CHECK(input == rebuilt);
        for (int j = 0; j < p; ++j) {
            const auto parents = dag.parents(j);
            CHECK(std::is_sorted(parents.begin(), parents.end()));
        }

        std::vector<int> perm(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) perm[static_cast<std::size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Edge> relabeled;
        for (const Edge& e : edges)
            relabeled.push_back({perm[static_cast<std::size_t>(e.parent)], perm[static_cast<std::size_t>(e.child)]});
        const DagStructure other = build_dag(p, relabeled);
        for (const Edge& e : other.edges()) CHECK(other.position(e.parent) < other.position(e.child));
        // isomorphic: mapping perm sends each parent set onto the relabeled one
        for (int j = 0; j < p; ++j) {
            std::vector<int> mapped;
            for (int i : dag.parents(j)) mapped.push_back(perm[static_cast<std::size_t>(i)]);
            std::sort(mapped.begin(), mapped.end());
            CHECK(mapped == other.parents(perm[static_cast<std::size_t>(j)]));
        }
    }
}

TEST_CASE("edge lookup and full DAG") {
    const DagStructure full = full_dag(4);
    CHECK(full.num_edges() == 6);
    CHECK(full.edge_index(0, 3).has_value());
    CHECK_FALSE(full.edge_index(3, 0).has_value());
    CHECK(full.incoming_offset(3) == 3);
    CHECK(weight_name(Edge{0, 2}) == "w[1,3]");
}
