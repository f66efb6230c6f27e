#pragma once
// Cubic graphs and multipoles with dangling edges (semiedges), junction and
// closure operations, a catalog of named graphs, small invariants (girth,
// bipartiteness, cyclic edge connectivity), and file formats (graph6, DOT,
// adjacency JSON).

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "snarkforge/errors.hpp"

namespace snarkforge {

// One end of an edge: either a vertex id or a dangling semiedge id.
// Exactly one of the two fields is set (>= 0).
struct End {
    int v = -1;
    int s = -1;
    static End vertex(int id) { return End{id, -1}; }
    static End semi(int id) { return End{-1, id}; }
    bool is_vertex() const { return v >= 0; }
    bool operator==(const End&) const = default;
};

struct Edge {
    End a, b;
    bool operator==(const Edge&) const = default;
};

// A multipole is cubic everywhere; its semiedges are grouped into ordered
// connectors plus an ordered residual list.  A multipole without semiedges
// is an ordinary cubic graph.  Values are immutable once built: operations
// return new objects.  Vertex ids are dense 0..n-1; semiedge ids are stable
// under junction (never reused), so captured connector lists stay valid.
class Multipole {
public:
    // Builder interface.  Invariants are only enforced by validate(), so
    // partially built objects are fine in between.
    int add_vertex() { return n_++; }
    void add_vertices(int k) { n_ += k; }
    void add_edge(int u, int v) { edges_.push_back({End::vertex(u), End::vertex(v)}); }
    int add_stub(int v); // new dangling edge at v, returns the semiedge id
    void add_raw_edge(End a, End b);
    void add_connector(std::vector<int> semiedge_ids) { connectors_.push_back(std::move(semiedge_ids)); }
    void add_residual(int semiedge_id) { residual_.push_back(semiedge_id); }
    void validate() const; // throws InvalidMultipole

    int num_vertices() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& connectors() const { return connectors_; }
    const std::vector<int>& residual_semiedges() const { return residual_; }
    int next_semiedge_id() const { return next_semiedge_; }
    bool is_graph() const;
    int degree(int v) const; // loops count twice

private:
    int n_ = 0;
    int next_semiedge_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> connectors_;
    std::vector<int> residual_;
};

// A dipole is a multipole whose connectors are exactly [input, output].
using Dipole = Multipole;

// {|input|, |output|, residual count}; requires exactly two connectors.
std::array<int, 3> dipole_kind(const Multipole& d);

// Coalesces the edges carrying free semiedges s and t into one edge.
Multipole junction(const Multipole& m, int s, int t);

// Joins the i-th output semiedge to the output_to_input[i]-th input
// semiedge of an (a,a)-pole without residuals; empty pairing means identity.
Multipole closure(const Multipole& d, const std::vector<int>& output_to_input = {});

// Removes the vertices of a path (1, 2 or 3 vertices) from a cubic graph.
// One vertex: 3-pole with a single connector.  Edge u-v: (2,2)-pole, the
// semiedges formerly at u become the input connector, those at v the output.
// Path u-w-v: (2,2;1)-pole, w's remaining semiedge is residual.  Remaining
// vertices are renumbered densely in ascending old-id order.
Multipole remove_path(const Multipole& g, const std::vector<int>& path);

// Relabels b's vertices and semiedges past a's; connectors a's then b's.
Multipole disjoint_union(const Multipole& a, const Multipole& b);

int girth(const Multipole& g); // Acyclic if there is no cycle

bool is_bipartite(const Multipole& g, std::vector<int>* colour = nullptr);

// True iff no edge cut of fewer than k edges separates two subgraphs that
// each contain a cycle.  Exhaustive over cuts of size 1..k-1 (k <= 4).
bool cyclic_edge_connectivity_at_least(const Multipole& g, int k, int vertex_cap = 100);

// graph6 in the standard public format (simple graphs only).
Multipole parse_graph6(std::string_view text);
std::string emit_graph6(const Multipole& g);

std::string emit_dot(const Multipole& m); // semiedges drawn as point nodes
std::string adjacency_json(const Multipole& g); // {"n":..., "edges":[[a,b],...]}

Multipole graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges);

// Same vertex count and same multiset of edges on the same labelling.
bool same_labelled_graph(const Multipole& a, const Multipole& b);

// Neighbour lists over vertex-vertex edges (parallel edges repeat, loops
// appear twice); semiedge edges are skipped.
std::vector<std::vector<int>> vertex_adjacency(const Multipole& g);

// Catalog of named simple cubic graphs.
// Keys: K4, K33, Petersen, Heawood, Q3, GP(8,3), GP(10,3), GP(12,5).
Multipole named_graph(const std::string& key);
std::vector<std::string> catalog_keys();
Multipole generalized_petersen(int n, int k);

} // namespace snarkforge
