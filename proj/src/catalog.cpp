// Catalog of named cubic graphs used as building blocks and fixtures.
#include "snarkforge/multipole.hpp"

namespace snarkforge {

Multipole generalized_petersen(int n, int k) {
    Multipole g;
    g.add_vertices(2 * n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);     // outer cycle
    for (int i = 0; i < n; ++i) g.add_edge(i, n + i);           // spokes
    for (int i = 0; i < n; ++i) g.add_edge(n + i, n + (i + k) % n); // inner star
    g.validate();
    return g;
}

Multipole named_graph(const std::string& key) {
    if (key == "K4") {
        return graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    }
    if (key == "K33") {
        return graph_from_edges(6, {{0, 3}, {0, 4}, {0, 5}, {1, 3}, {1, 4}, {1, 5},
                                    {2, 3}, {2, 4}, {2, 5}});
    }
    if (key == "Petersen") return generalized_petersen(5, 2);
    if (key == "Heawood") {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < 14; ++i) edges.push_back({i, (i + 1) % 14});
        // Chords of the LCF description [5,-5]^7.
        for (auto c : {std::pair{0, 5}, {1, 10}, {2, 7}, {3, 12}, {4, 9}, {6, 11}, {8, 13}})
            edges.push_back(c);
        return graph_from_edges(14, edges);
    }
    if (key == "Q3") {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j)
                if (__builtin_popcount(i ^ j) == 1) edges.push_back({i, j});
        return graph_from_edges(8, edges);
    }
    if (key == "GP(8,3)") return generalized_petersen(8, 3);
    if (key == "GP(10,3)") return generalized_petersen(10, 3);
    if (key == "GP(12,5)") return generalized_petersen(12, 5);
    throw MalformedInput("unknown graph name: " + key);
}

std::vector<std::string> catalog_keys() {
    return {"K4", "K33", "Petersen", "Heawood", "Q3", "GP(8,3)", "GP(10,3)", "GP(12,5)"};
}

} // namespace snarkforge
