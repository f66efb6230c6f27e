// Multipole operations: junction, closure, path removal, invariants.
#include "snarkforge/multipole.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace snarkforge {

int Multipole::add_stub(int v) {
    int s = next_semiedge_++;
    edges_.push_back({End::vertex(v), End::semi(s)});
    return s;
}

void Multipole::add_raw_edge(End a, End b) {
    edges_.push_back({a, b});
    for (End e : {a, b})
        if (!e.is_vertex()) next_semiedge_ = std::max(next_semiedge_, e.s + 1);
}

bool Multipole::is_graph() const {
    for (const auto& e : edges_)
        if (!e.a.is_vertex() || !e.b.is_vertex()) return false;
    return true;
}

int Multipole::degree(int v) const {
    int d = 0;
    for (const auto& e : edges_) {
        if (e.a.is_vertex() && e.a.v == v) ++d;
        if (e.b.is_vertex() && e.b.v == v) ++d;
    }
    return d;
}

void Multipole::validate() const {
    std::vector<int> deg(n_, 0);
    std::set<int> dangling;
    for (const auto& e : edges_) {
        for (End end : {e.a, e.b}) {
            if (end.is_vertex() == (end.s >= 0))
                throw InvalidMultipole("edge end must be exactly a vertex or a semiedge");
            if (end.is_vertex()) {
                if (end.v >= n_) throw InvalidMultipole("edge end references a missing vertex");
                ++deg[end.v];
            } else {
                if (!dangling.insert(end.s).second)
                    throw InvalidMultipole("semiedge id used twice");
            }
        }
    }
    for (int v = 0; v < n_; ++v)
        if (deg[v] != 3) throw InvalidMultipole("vertex " + std::to_string(v) + " has degree " + std::to_string(deg[v]));
    std::set<int> listed;
    auto take = [&](int s) {
        if (!dangling.count(s)) throw InvalidMultipole("connector lists a semiedge that is not dangling");
        if (!listed.insert(s).second) throw InvalidMultipole("semiedge listed twice across connectors");
    };
    for (const auto& c : connectors_)
        for (int s : c) take(s);
    for (int s : residual_) take(s);
    if (listed.size() != dangling.size())
        throw InvalidMultipole("semiedge missing from every connector");
}

std::array<int, 3> dipole_kind(const Multipole& d) {
    if (d.connectors().size() != 2)
        throw InvalidMultipole("dipole needs exactly two connectors");
    return {static_cast<int>(d.connectors()[0].size()),
            static_cast<int>(d.connectors()[1].size()),
            static_cast<int>(d.residual_semiedges().size())};
}

namespace {

int edge_with_semiedge(const Multipole& m, int s) {
    for (int i = 0; i < static_cast<int>(m.edges().size()); ++i) {
        const auto& e = m.edges()[i];
        if ((!e.a.is_vertex() && e.a.s == s) || (!e.b.is_vertex() && e.b.s == s)) return i;
    }
    return -1;
}

End other_end(const Edge& e, int s) {
    if (!e.a.is_vertex() && e.a.s == s) return e.b;
    return e.a;
}

} // namespace

Multipole junction(const Multipole& m, int s, int t) {
    if (s == t) throw SemiedgeNotFree("junction needs two distinct semiedges");
    int es = edge_with_semiedge(m, s), et = edge_with_semiedge(m, t);
    if (es < 0 || et < 0) throw SemiedgeNotFree("semiedge is not free in this multipole");
    if (es == et)
        throw InvalidMultipole("junction of the two ends of one edge would leave a vertex-free loop");

    Multipole out;
    out.add_vertices(m.num_vertices());
    for (int i = 0; i < static_cast<int>(m.edges().size()); ++i) {
        if (i == et) continue;
        if (i == es)
            out.add_raw_edge(other_end(m.edges()[es], s), other_end(m.edges()[et], t));
        else
            out.add_raw_edge(m.edges()[i].a, m.edges()[i].b);
    }
    for (const auto& c : m.connectors()) {
        std::vector<int> kept;
        for (int id : c)
            if (id != s && id != t) kept.push_back(id);
        if (!kept.empty()) out.add_connector(std::move(kept));
    }
    for (int id : m.residual_semiedges())
        if (id != s && id != t) out.add_residual(id);
    // No validate() here: junction is pure edge surgery and is also used on
    // non-cubic intermediates (chains of dangling edges, rebuild tests).
    return out;
}

Multipole closure(const Multipole& d, const std::vector<int>& output_to_input) {
    auto kind = dipole_kind(d);
    if (kind[0] != kind[1]) throw ArityMismatch("closure needs |input| == |output|");
    if (kind[2] != 0) throw ArityMismatch("closure needs no residual semiedges");
    int a = kind[0];
    std::vector<int> pairing = output_to_input;
    if (pairing.empty())
        for (int i = 0; i < a; ++i) pairing.push_back(i);
    if (static_cast<int>(pairing.size()) != a) throw ArityMismatch("pairing size must match arity");
    std::vector<bool> seen(a, false);
    for (int p : pairing) {
        if (p < 0 || p >= a || seen[p]) throw MalformedInput("pairing must be a permutation");
        seen[p] = true;
    }
    // Semiedge ids are stable under junction, so capture them up front.
    std::vector<int> input = d.connectors()[0], output = d.connectors()[1];
    Multipole g = d;
    for (int i = 0; i < a; ++i) g = junction(g, output[i], input[pairing[i]]);
    // Junction drops connectors as they empty; only a == 0 leaves them behind.
    if (!g.connectors().empty()) {
        Multipole out;
        out.add_vertices(g.num_vertices());
        for (const auto& e : g.edges()) out.add_raw_edge(e.a, e.b);
        g = out;
    }
    g.validate();
    return g;
}

Multipole remove_path(const Multipole& g, const std::vector<int>& path) {
    if (!g.is_graph()) throw InvalidMultipole("remove_path expects a graph without semiedges");
    if (path.empty() || path.size() > 3) throw PathNotInGraph("path must have 1, 2 or 3 vertices");
    std::set<int> removed(path.begin(), path.end());
    if (removed.size() != path.size()) throw PathNotInGraph("path vertices must be distinct");
    for (int v : path)
        if (v < 0 || v >= g.num_vertices()) throw PathNotInGraph("path vertex not in graph");
    auto has_edge = [&](int u, int v) {
        for (const auto& e : g.edges())
            if ((e.a.v == u && e.b.v == v) || (e.a.v == v && e.b.v == u)) return true;
        return false;
    };
    for (size_t i = 0; i + 1 < path.size(); ++i)
        if (!has_edge(path[i], path[i + 1])) throw PathNotInGraph("consecutive path vertices are not adjacent");
    if (path.size() == 3 && has_edge(path[0], path[2]))
        throw PathNotInGraph("path endpoints must not be adjacent");

    // Dense renumbering of the surviving vertices in ascending old-id order.
    std::vector<int> relabel(g.num_vertices(), -1);
    int next = 0;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (!removed.count(v)) relabel[v] = next++;

    Multipole out;
    out.add_vertices(next);
    std::map<int, std::vector<int>> stubs; // removed vertex -> its new semiedges, edge order
    for (const auto& e : g.edges()) {
        bool ra = removed.count(e.a.v) > 0, rb = removed.count(e.b.v) > 0;
        if (ra && rb) continue; // interior path edge disappears with its ends
        if (!ra && !rb) {
            out.add_edge(relabel[e.a.v], relabel[e.b.v]);
        } else {
            int kept = ra ? e.b.v : e.a.v;
            int gone = ra ? e.a.v : e.b.v;
            stubs[gone].push_back(out.add_stub(relabel[kept]));
        }
    }
    if (path.size() == 1) {
        out.add_connector(stubs[path[0]]);
    } else if (path.size() == 2) {
        out.add_connector(stubs[path[0]]);
        out.add_connector(stubs[path[1]]);
    } else {
        out.add_connector(stubs[path[0]]);
        out.add_connector(stubs[path[2]]);
        for (int s : stubs[path[1]]) out.add_residual(s);
    }
    out.validate();
    return out;
}

Multipole disjoint_union(const Multipole& a, const Multipole& b) {
    Multipole out = a;
    int vn = a.num_vertices(), sn = a.next_semiedge_id();
    out.add_vertices(b.num_vertices());
    auto shift = [&](End e) {
        return e.is_vertex() ? End::vertex(e.v + vn) : End::semi(e.s + sn);
    };
    for (const auto& e : b.edges()) out.add_raw_edge(shift(e.a), shift(e.b));
    for (const auto& c : b.connectors()) {
        std::vector<int> ids;
        for (int s : c) ids.push_back(s + sn);
        out.add_connector(std::move(ids));
    }
    for (int s : b.residual_semiedges()) out.add_residual(s + sn);
    return out;
}

namespace {

// Incidence over vertex-vertex edges only: vertex -> list of (edge id, other).
std::vector<std::vector<std::pair<int, int>>> incidence(const Multipole& g) {
    std::vector<std::vector<std::pair<int, int>>> inc(g.num_vertices());
    for (int i = 0; i < static_cast<int>(g.edges().size()); ++i) {
        const auto& e = g.edges()[i];
        if (!e.a.is_vertex() || !e.b.is_vertex()) continue;
        inc[e.a.v].push_back({i, e.b.v});
        inc[e.b.v].push_back({i, e.a.v});
    }
    return inc;
}

} // namespace

int girth(const Multipole& g) {
    auto inc = incidence(g);
    int best = -1;
    for (const auto& e : g.edges())
        if (e.a.is_vertex() && e.b.is_vertex() && e.a.v == e.b.v) best = 1;
    if (best < 0) {
        // Shortest cycle through each start vertex by BFS with parent edges.
        for (int start = 0; start < g.num_vertices() && best != 2; ++start) {
            std::vector<int> dist(g.num_vertices(), -1), via(g.num_vertices(), -1);
            std::queue<int> q;
            dist[start] = 0;
            q.push(start);
            while (!q.empty()) {
                int u = q.front();
                q.pop();
                for (auto [eid, w] : inc[u]) {
                    if (eid == via[u]) continue;
                    if (dist[w] < 0) {
                        dist[w] = dist[u] + 1;
                        via[w] = eid;
                        q.push(w);
                    } else {
                        int len = dist[u] + dist[w] + 1;
                        if (best < 0 || len < best) best = len;
                    }
                }
            }
        }
    }
    if (best < 0) throw Acyclic("graph has no cycle");
    return best;
}

bool is_bipartite(const Multipole& g, std::vector<int>* colour) {
    auto inc = incidence(g);
    std::vector<int> col(g.num_vertices(), -1);
    bool ok = true;
    for (int start = 0; start < g.num_vertices() && ok; ++start) {
        if (col[start] >= 0) continue;
        col[start] = 0;
        std::queue<int> q;
        q.push(start);
        while (!q.empty() && ok) {
            int u = q.front();
            q.pop();
            for (auto [eid, w] : inc[u]) {
                (void)eid;
                if (col[w] < 0) {
                    col[w] = 1 - col[u];
                    q.push(w);
                } else if (col[w] == col[u]) {
                    ok = false;
                }
            }
        }
    }
    if (colour) *colour = col;
    return ok;
}

bool cyclic_edge_connectivity_at_least(const Multipole& g, int k, int vertex_cap) {
    if (!g.is_graph()) throw InvalidMultipole("cyclic edge connectivity is defined on graphs");
    if (k < 1 || k > 4) throw MalformedInput("supported cut bounds are 1..4");
    if (g.num_vertices() > vertex_cap) throw TooLarge("graph too large for exhaustive cut search");
    int m = static_cast<int>(g.edges().size());

    // Does removing the flagged edges split off >= 2 cyclic components?
    auto separates_cycles = [&](const std::vector<bool>& cut) {
        std::vector<int> comp(g.num_vertices(), -1);
        int ncomp = 0;
        std::vector<std::vector<std::pair<int, int>>> inc(g.num_vertices());
        for (int i = 0; i < m; ++i) {
            if (cut[i]) continue;
            const auto& e = g.edges()[i];
            inc[e.a.v].push_back({i, e.b.v});
            inc[e.b.v].push_back({i, e.a.v});
        }
        for (int s = 0; s < g.num_vertices(); ++s) {
            if (comp[s] >= 0) continue;
            comp[s] = ncomp;
            std::queue<int> q;
            q.push(s);
            while (!q.empty()) {
                int u = q.front();
                q.pop();
                for (auto [eid, w] : inc[u]) {
                    (void)eid;
                    if (comp[w] < 0) {
                        comp[w] = ncomp;
                        q.push(w);
                    }
                }
            }
            ++ncomp;
        }
        if (ncomp < 2) return false;
        std::vector<int> nv(ncomp, 0), ne(ncomp, 0);
        for (int v = 0; v < g.num_vertices(); ++v) ++nv[comp[v]];
        for (int i = 0; i < m; ++i)
            if (!cut[i]) ++ne[comp[g.edges()[i].a.v]];
        int cyclic = 0;
        for (int c = 0; c < ncomp; ++c)
            if (ne[c] >= nv[c]) ++cyclic; // a connected component has a cycle iff |E| >= |V|
        return cyclic >= 2;
    };

    std::vector<bool> cut(m, false);
    // Enumerate all edge subsets of size 1..k-1.
    auto rec = [&](auto&& self, int from, int want) -> bool {
        if (want == 0) return separates_cycles(cut);
        for (int i = from; i <= m - want; ++i) {
            cut[i] = true;
            if (self(self, i + 1, want - 1)) return true;
            cut[i] = false;
        }
        return false;
    };
    for (int size = 1; size < k; ++size)
        if (rec(rec, 0, size)) return false;
    return true;
}

std::string emit_dot(const Multipole& m) {
    std::string out = "graph {\n  node [shape=circle];\n";
    for (int v = 0; v < m.num_vertices(); ++v)
        out += "  v" + std::to_string(v) + ";\n";
    std::vector<int> semis;
    for (const auto& e : m.edges())
        for (End end : {e.a, e.b})
            if (!end.is_vertex()) semis.push_back(end.s);
    for (int s : semis)
        out += "  s" + std::to_string(s) + " [shape=point];\n";
    auto name = [](End e) {
        return (e.is_vertex() ? "v" + std::to_string(e.v) : "s" + std::to_string(e.s));
    };
    for (const auto& e : m.edges())
        out += "  " + name(e.a) + " -- " + name(e.b) + ";\n";
    out += "}\n";
    return out;
}

Multipole graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    Multipole g;
    g.add_vertices(n);
    for (auto [u, v] : edges) g.add_edge(u, v);
    g.validate();
    return g;
}

bool same_labelled_graph(const Multipole& a, const Multipole& b) {
    if (!a.is_graph() || !b.is_graph()) return false;
    if (a.num_vertices() != b.num_vertices()) return false;
    auto norm = [](const Multipole& g) {
        std::vector<std::pair<int, int>> es;
        for (const auto& e : g.edges())
            es.push_back({std::min(e.a.v, e.b.v), std::max(e.a.v, e.b.v)});
        std::sort(es.begin(), es.end());
        return es;
    };
    return norm(a) == norm(b);
}

std::vector<std::vector<int>> vertex_adjacency(const Multipole& g) {
    std::vector<std::vector<int>> adj(g.num_vertices());
    for (const auto& e : g.edges()) {
        if (!e.a.is_vertex() || !e.b.is_vertex()) continue;
        adj[e.a.v].push_back(e.b.v);
        adj[e.b.v].push_back(e.a.v);
    }
    return adj;
}

} // namespace snarkforge
