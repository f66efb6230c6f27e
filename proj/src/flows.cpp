// Tetrahedral flow search engine, cover correspondence, matchings, PMI.
#include "snarkforge/flows.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>

namespace snarkforge {

namespace {

// Shared search structure: edge endpoints (vertex id or -1 for a dangling
// end), incident edge triples per vertex, and a deterministic branch order
// (DFS discovery, optionally with a boundary prefix that is branched first).
struct SearchBase {
    int m = 0, n = 0;
    std::vector<std::array<int, 2>> ev;
    std::vector<std::vector<int>> ve;
    std::vector<int> order;

    explicit SearchBase(const Multipole& x) {
        m = static_cast<int>(x.edges().size());
        n = x.num_vertices();
        ev.resize(m);
        ve.resize(n);
        for (int i = 0; i < m; ++i) {
            const Edge& e = x.edges()[i];
            ev[i] = {e.a.is_vertex() ? e.a.v : -1, e.b.is_vertex() ? e.b.v : -1};
            if (e.a.is_vertex()) ve[e.a.v].push_back(i);
            if (e.b.is_vertex()) ve[e.b.v].push_back(i);
        }
        for (int v = 0; v < n; ++v)
            if (ve[v].size() != 3)
                throw InvalidMultipole("flow search needs a cubic structure");
    }

    // Preorder DFS from vertex 0; edges enter the order when first seen at a
    // visited vertex, disconnected leftovers follow by id.
    std::vector<int> dfs_edge_order() const {
        std::vector<int> out;
        std::vector<bool> eseen(m, false), vseen(n, false);
        std::vector<int> stack;
        auto visit = [&](int start) {
            stack.push_back(start);
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                if (vseen[v]) continue;
                vseen[v] = true;
                for (int e : ve[v]) {
                    if (!eseen[e]) {
                        eseen[e] = true;
                        out.push_back(e);
                    }
                }
                // Push neighbours in reverse so lower ids are explored first.
                for (auto it = ve[v].rbegin(); it != ve[v].rend(); ++it) {
                    int w = ev[*it][0] == v ? ev[*it][1] : ev[*it][0];
                    if (w >= 0 && !vseen[w]) stack.push_back(w);
                }
            }
        };
        for (int v = 0; v < n; ++v)
            if (!vseen[v]) visit(v);
        for (int e = 0; e < m; ++e)
            if (!eseen[e]) out.push_back(e);
        return out;
    }
};

struct FlowEngine {
    enum Signal { sig_none, sig_boundary, sig_stop };
    enum class Visit { keep_going, next_boundary, stop };

    const SearchBase& base;
    const Tetrahedron& t;
    std::vector<int> order;      // branch preference; first `nboundary` are boundary
    int nboundary = 0;
    std::vector<Point4> domain;  // points of t, ascending
    std::vector<Point4> root_domain;
    long long budget;
    std::function<Visit(const std::vector<Point4>&)> visit;

    Point4 third[16][16] = {};
    std::vector<Point4> val;
    std::vector<int> cnt;
    std::vector<int> trail;
    std::vector<std::pair<int, Point4>> forced;
    long long nodes = 0;
    int branches_open = 0;

    FlowEngine(const SearchBase& b, const Tetrahedron& tetra, long long node_budget)
        : base(b), t(tetra), budget(node_budget) {
        domain = t.points();
        for (Point4 p : domain)
            for (Point4 q : domain) third[p][q] = t.third_on_line(p, q);
        val.assign(base.m, 0);
        cnt.assign(base.n, 0);
        order = base.dfs_edge_order();
        root_domain = domain;
    }

    void restrict_root_to_orbit_reps() {
        // One representative per orbit of Aut(t): lowest corner, lowest midpoint.
        Point4 corner = 0, mid = 0;
        for (Point4 p : domain) {
            int w = t.weight(p);
            if (w == 1 && corner == 0) corner = p;
            if (w == 2 && mid == 0) mid = p;
        }
        root_domain = {corner, mid};
    }

    void put_boundary_first(const std::vector<int>& boundary_edges) {
        std::vector<bool> is_b(base.m, false);
        std::vector<int> front;
        for (int e : boundary_edges)
            if (!is_b[e]) {
                is_b[e] = true;
                front.push_back(e);
            }
        nboundary = static_cast<int>(front.size());
        for (int e : order)
            if (!is_b[e]) front.push_back(e);
        order = front;
    }

    bool assign(int e, Point4 p) {
        if (++nodes > budget) throw BudgetExhausted("flow search node budget exceeded");
        val[e] = p;
        trail.push_back(e);
        // Bookkeeping must run for both endpoints even after a conflict so
        // that undo_to remains an exact inverse.
        bool ok = true;
        for (int v : {base.ev[e][0], base.ev[e][1]}) {
            if (v < 0) continue;
            ++cnt[v];
            if (!ok) continue;
            if (cnt[v] == 2) {
                int free_e = -1;
                Point4 a = 0, b = 0;
                for (int f : base.ve[v]) {
                    if (val[f] == 0) { free_e = f; continue; }
                    // A loop contributes its value at both of its slots.
                    (a == 0 ? a : b) = val[f];
                }
                if (free_e < 0) continue; // loop completed the vertex early
                if (b == 0) b = a;        // assigned edge was a loop
                Point4 z = third[a][b];
                if (z == 0)
                    ok = false;
                else
                    forced.push_back({free_e, z});
            } else if (cnt[v] == 3) {
                Point4 x = val[base.ve[v][0]], y = val[base.ve[v][1]], z = val[base.ve[v][2]];
                if (third[x][y] != z) ok = false;
            }
        }
        return ok;
    }

    void undo_to(size_t checkpoint) {
        while (trail.size() > checkpoint) {
            int e = trail.back();
            trail.pop_back();
            val[e] = 0;
            for (int v : {base.ev[e][0], base.ev[e][1]})
                if (v >= 0) --cnt[v];
        }
    }

    // Drains the forced queue; false on conflict.
    bool propagate() {
        while (!forced.empty()) {
            auto [e, z] = forced.back();
            forced.pop_back();
            if (val[e] != 0) {
                if (val[e] != z) return false;
                continue;
            }
            if (!assign(e, z)) return false;
        }
        return true;
    }

    int pick_edge() const {
        for (int e : order)
            if (val[e] == 0) return e;
        return -1;
    }

    Signal run() {
        int e = pick_edge();
        if (e < 0) {
            switch (visit(val)) {
                case Visit::stop: return sig_stop;
                case Visit::next_boundary: return sig_boundary;
                case Visit::keep_going: return sig_none;
            }
        }
        bool at_boundary = false;
        for (int i = 0; i < nboundary; ++i) at_boundary = at_boundary || order[i] == e;
        const std::vector<Point4>& dom = branches_open == 0 ? root_domain : domain;
        ++branches_open;
        for (Point4 p : dom) {
            size_t cp = trail.size();
            forced.clear();
            bool ok = assign(e, p) && propagate();
            Signal sig = ok ? run() : sig_none;
            undo_to(cp);
            forced.clear();
            if (sig == sig_stop) {
                --branches_open;
                return sig_stop;
            }
            if (sig == sig_boundary && !at_boundary) {
                --branches_open;
                return sig_boundary;
            }
            // sig_boundary absorbed here: continue with the next value.
        }
        --branches_open;
        return sig_none;
    }
};

// Runs one engine per root value on its own thread and merges results in
// root-value order; `configure` finalises each engine, `collect` reads it.
template <typename Configure, typename Collect>
void run_root_split(const SearchBase& base, const Tetrahedron& t, const FlowOptions& opt,
                    const std::vector<Point4>& roots, Configure configure, Collect collect) {
    int workers = std::max(1, opt.threads);
    if (workers == 1 || roots.size() <= 1) {
        for (Point4 p : roots) {
            FlowEngine eng(base, t, opt.node_budget);
            configure(eng);
            eng.root_domain = {p};
            eng.run();
            collect(eng, p);
        }
        return;
    }
    std::vector<std::unique_ptr<FlowEngine>> engines;
    std::vector<std::exception_ptr> errors(roots.size());
    for (Point4 p : roots) {
        engines.push_back(std::make_unique<FlowEngine>(base, t, opt.node_budget));
        configure(*engines.back());
        engines.back()->root_domain = {p};
    }
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < std::min<int>(workers, static_cast<int>(roots.size())); ++w)
        pool.emplace_back([&] {
            for (size_t i = next++; i < roots.size(); i = next++) {
                try {
                    engines[i]->run();
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (size_t i = 0; i < roots.size(); ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
    for (size_t i = 0; i < roots.size(); ++i) collect(*engines[i], roots[i]);
}

} // namespace

FlowResult find_tflow(const Multipole& x, const Tetrahedron& t, FlowMode mode,
                      const FlowOptions& opt) {
    SearchBase base(x);
    FlowResult result;

    if (mode == FlowMode::first) {
        FlowEngine eng(base, t, opt.node_budget);
        eng.restrict_root_to_orbit_reps(); // existence is symmetry-invariant
        eng.visit = [&](const std::vector<Point4>& values) {
            result.flow = TFlow{t, values};
            return FlowEngine::Visit::stop;
        };
        eng.run();
        if (result.flow && !is_valid_tflow(x, *result.flow))
            throw Error("internal: search produced an invalid flow");
        return result;
    }

    std::vector<Point4> roots = t.points();
    if (mode == FlowMode::count) {
        result.count = 0;
        std::vector<long long> partial(roots.size(), 0);
        std::vector<size_t> idx_of(16, 0);
        for (size_t i = 0; i < roots.size(); ++i) idx_of[roots[i]] = i;
        run_root_split(base, t, opt, roots,
                       [&](FlowEngine& eng) {
                           eng.visit = [&partial, &idx_of, &eng](const std::vector<Point4>&) {
                               ++partial[idx_of[eng.root_domain[0]]];
                               return FlowEngine::Visit::keep_going;
                           };
                       },
                       [&](FlowEngine&, Point4) {});
        for (long long c : partial) result.count += c;
        return result;
    }

    // enumerate_all
    if (opt.sink) {
        FlowEngine eng(base, t, opt.node_budget);
        eng.visit = [&](const std::vector<Point4>& values) {
            return opt.sink(TFlow{t, values}) ? FlowEngine::Visit::keep_going
                                              : FlowEngine::Visit::stop;
        };
        eng.run();
        return result;
    }
    std::vector<std::vector<TFlow>> per_root(roots.size());
    std::vector<size_t> idx_of(16, 0);
    for (size_t i = 0; i < roots.size(); ++i) idx_of[roots[i]] = i;
    run_root_split(base, t, opt, roots,
                   [&](FlowEngine& eng) {
                       eng.visit = [&per_root, &idx_of, &t, &eng](const std::vector<Point4>& values) {
                           per_root[idx_of[eng.root_domain[0]]].push_back(TFlow{t, values});
                           return FlowEngine::Visit::keep_going;
                       };
                   },
                   [&](FlowEngine&, Point4) {});
    for (auto& chunk : per_root)
        for (auto& f : chunk) result.flows.push_back(std::move(f));
    return result;
}

bool is_valid_tflow(const Multipole& x, const TFlow& f) {
    if (f.values.size() != x.edges().size()) return false;
    for (Point4 p : f.values)
        if (!f.tetra.contains(p)) return false;
    std::vector<std::vector<Point4>> at(x.num_vertices());
    for (size_t i = 0; i < x.edges().size(); ++i) {
        const Edge& e = x.edges()[i];
        if (e.a.is_vertex()) at[e.a.v].push_back(f.values[i]);
        if (e.b.is_vertex()) at[e.b.v].push_back(f.values[i]);
    }
    for (const auto& triple : at) {
        if (triple.size() != 3) return false;
        if (line_or_circle(f.tetra, triple[0], triple[1], triple[2]) != TripleKind::line)
            return false;
    }
    return true;
}

std::set<std::vector<Point4>> boundary_value_sets(const Multipole& x, const Tetrahedron& t,
                                                  const std::vector<int>& semiedges,
                                                  const FlowOptions& opt) {
    SearchBase base(x);
    std::vector<int> bedges;
    for (int s : semiedges) {
        int found = -1;
        for (int i = 0; i < base.m; ++i) {
            const Edge& e = x.edges()[i];
            if ((!e.a.is_vertex() && e.a.s == s) || (!e.b.is_vertex() && e.b.s == s)) found = i;
        }
        if (found < 0) throw MalformedInput("semiedge not present in the multipole");
        bedges.push_back(found);
    }

    std::set<std::vector<Point4>> tuples;
    std::mutex mu;
    // Restrict the first boundary edge to orbit representatives, then close
    // the tuple set under the symmetries of t.
    FlowEngine probe(base, t, opt.node_budget);
    probe.restrict_root_to_orbit_reps();
    std::vector<Point4> roots = probe.root_domain;

    run_root_split(base, t, opt, roots,
                   [&](FlowEngine& eng) {
                       eng.put_boundary_first(bedges);
                       eng.visit = [&tuples, &mu, &bedges, &eng](const std::vector<Point4>& values) {
                           std::vector<Point4> tuple;
                           for (int e : bedges) tuple.push_back(values[e]);
                           {
                               std::lock_guard<std::mutex> lock(mu);
                               tuples.insert(std::move(tuple));
                           }
                           return FlowEngine::Visit::next_boundary;
                       };
                   },
                   [&](FlowEngine&, Point4) {});

    std::set<std::vector<Point4>> closed;
    for (const auto& g : tetra_symmetries(t))
        for (const auto& tup : tuples) {
            std::vector<Point4> image;
            for (Point4 p : tup) image.push_back(g(p));
            closed.insert(std::move(image));
        }
    return closed;
}

PMCover cover_from_tflow(const Multipole& g, const TFlow& flow) {
    if (!g.is_graph()) throw NotAT1Flow("cover extraction needs a graph without semiedges");
    if (!(flow.tetra == tetra_T1())) throw NotAT1Flow("flow is not over the tetrahedron T1");
    if (!is_valid_tflow(g, flow)) throw NotAT1Flow("assignment violates the line condition");
    PMCover cover;
    cover.matchings.assign(4, {});
    for (size_t e = 0; e < flow.values.size(); ++e)
        for (int i = 0; i < 4; ++i)
            if (((flow.values[e] >> i) & 1) == 0) cover.matchings[i].push_back(static_cast<int>(e));
    return cover;
}

TFlow tflow_from_cover(const Multipole& g, const PMCover& c) {
    if (!g.is_graph()) throw NotACover("covers are defined on graphs without semiedges");
    if (c.matchings.size() != 4) throw NotACover("exactly four matchings are required");
    int m = static_cast<int>(g.edges().size());
    std::vector<Point4> values(m, 15);
    std::vector<bool> covered(m, false);
    for (int i = 0; i < 4; ++i) {
        std::vector<bool> hit(g.num_vertices(), false);
        for (int e : c.matchings[i]) {
            if (e < 0 || e >= m) throw NotACover("matching references a missing edge");
            const Edge& ed = g.edges()[e];
            if (ed.a.v == ed.b.v || hit[ed.a.v] || hit[ed.b.v])
                throw NotACover("matching is not a matching");
            hit[ed.a.v] = hit[ed.b.v] = true;
            values[e] = static_cast<Point4>(values[e] & ~(1 << i));
            covered[e] = true;
        }
        for (int v = 0; v < g.num_vertices(); ++v)
            if (!hit[v]) throw NotACover("matching does not cover every vertex");
    }
    for (int e = 0; e < m; ++e)
        if (!covered[e]) throw NotACover("the matchings do not cover every edge");
    TFlow f{tetra_T1(), values};
    if (!is_valid_tflow(g, f)) throw Error("internal: cover produced an invalid flow");
    return f;
}

std::optional<std::vector<int>> is_3_edge_colourable(const Multipole& g) {
    if (!g.is_graph()) throw InvalidMultipole("edge colouring needs a graph");
    SearchBase base(g);
    std::vector<int> order = base.dfs_edge_order();
    std::vector<int> colour(base.m, -1);
    std::vector<std::array<bool, 3>> used(base.n, {false, false, false});

    auto rec = [&](auto&& self, int idx) -> bool {
        if (idx == base.m) return true;
        int e = order[idx];
        auto [a, b] = base.ev[e];
        if (a == b) return false; // a loop never admits a proper colouring
        for (int c = 0; c < 3; ++c) {
            if (used[a][c] || used[b][c]) continue;
            used[a][c] = used[b][c] = true;
            colour[e] = c;
            if (self(self, idx + 1)) return true;
            used[a][c] = used[b][c] = false;
            colour[e] = -1;
        }
        return false;
    };
    if (!rec(rec, 0)) return std::nullopt;
    return colour;
}

std::vector<std::vector<int>> enumerate_perfect_matchings(const Multipole& g, int max_matchings) {
    if (!g.is_graph()) throw InvalidMultipole("matchings are defined on graphs");
    int n = g.num_vertices(), m = static_cast<int>(g.edges().size());
    std::vector<std::vector<int>> incident(n);
    for (int e = 0; e < m; ++e) {
        const Edge& ed = g.edges()[e];
        if (ed.a.v != ed.b.v) {
            incident[ed.a.v].push_back(e);
            incident[ed.b.v].push_back(e);
        }
    }
    std::vector<std::vector<int>> out;
    std::vector<bool> covered(n, false);
    std::vector<int> current;
    auto rec = [&](auto&& self) -> void {
        int v = -1;
        for (int u = 0; u < n; ++u)
            if (!covered[u]) { v = u; break; }
        if (v < 0) {
            if (static_cast<int>(out.size()) >= max_matchings)
                throw TooManyMatchings("perfect matching cap exceeded");
            out.push_back(current);
            return;
        }
        for (int e : incident[v]) {
            const Edge& ed = g.edges()[e];
            int w = ed.a.v == v ? ed.b.v : ed.a.v;
            if (covered[w]) continue;
            covered[v] = covered[w] = true;
            current.push_back(e);
            self(self);
            current.pop_back();
            covered[v] = covered[w] = false;
        }
    };
    if (n % 2 == 0) rec(rec);
    return out;
}

std::optional<PMCover> cover_with_k_matchings(const Multipole& g, int k, int max_matchings) {
    if (k < 3) throw MalformedInput("covering a cubic graph needs k >= 3");
    auto pms = enumerate_perfect_matchings(g, max_matchings);
    int m = static_cast<int>(g.edges().size());
    std::vector<std::vector<int>> containing(m);
    for (size_t i = 0; i < pms.size(); ++i)
        for (int e : pms[i]) containing[e].push_back(static_cast<int>(i));

    std::vector<int> covered(m, 0), chosen;
    std::vector<bool> in_use(pms.size(), false);
    auto rec = [&](auto&& self) -> bool {
        int best = -1;
        for (int e = 0; e < m; ++e)
            if (covered[e] == 0 && (best < 0 || containing[e].size() < containing[best].size()))
                best = e;
        if (best < 0) return true;
        if (static_cast<int>(chosen.size()) == k) return false;
        for (int mi : containing[best]) {
            if (in_use[mi]) continue;
            in_use[mi] = true;
            chosen.push_back(mi);
            for (int e : pms[mi]) ++covered[e];
            if (self(self)) return true;
            for (int e : pms[mi]) --covered[e];
            chosen.pop_back();
            in_use[mi] = false;
        }
        return false;
    };
    if (m > 0 && !rec(rec)) return std::nullopt;
    PMCover cover;
    for (int mi : chosen) cover.matchings.push_back(pms[mi]);
    while (static_cast<int>(cover.matchings.size()) < k && !cover.matchings.empty())
        cover.matchings.push_back(cover.matchings.front());
    return cover;
}

const char* pmi_value_name(PMIValue v) {
    switch (v) {
        case PMIValue::three: return "3";
        case PMIValue::four: return "4";
        case PMIValue::five: return "5";
        case PMIValue::lower_bound_5: return ">=5";
    }
    return "?";
}

bool has_bridge(const Multipole& g) {
    int m = static_cast<int>(g.edges().size());
    auto adj = vertex_adjacency(g);
    for (int i = 0; i < m; ++i) {
        const Edge& e = g.edges()[i];
        if (!e.a.is_vertex() || !e.b.is_vertex() || e.a.v == e.b.v) continue;
        // BFS from one endpoint avoiding edge i.
        std::vector<bool> seen(g.num_vertices(), false);
        std::queue<int> q;
        seen[e.a.v] = true;
        q.push(e.a.v);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                const Edge& f = g.edges()[j];
                if (!f.a.is_vertex() || !f.b.is_vertex()) continue;
                int w = -1;
                if (f.a.v == u) w = f.b.v;
                else if (f.b.v == u) w = f.a.v;
                if (w >= 0 && !seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
            }
        }
        if (!seen[e.b.v]) return true;
    }
    return false;
}

PMIResult perfect_matching_index(const Multipole& g, const FlowOptions& opt, int max_matchings) {
    if (!g.is_graph()) throw InvalidMultipole("perfect matching index needs a graph");
    g.validate();
    if (has_bridge(g)) throw NotBridgeless("perfect matching index needs a bridgeless graph");

    PMIResult r;
    if (auto colouring = is_3_edge_colourable(g)) {
        r.value = PMIValue::three;
        PMCover cover;
        cover.matchings.assign(3, {});
        for (size_t e = 0; e < colouring->size(); ++e)
            cover.matchings[(*colouring)[e]].push_back(static_cast<int>(e));
        r.cover = cover;
        return r;
    }
    FlowResult f = find_tflow(g, tetra_T1(), FlowMode::first, opt);
    if (f.flow) {
        r.value = PMIValue::four;
        r.flow = f.flow;
        return r;
    }
    if (auto cover = cover_with_k_matchings(g, 5, max_matchings)) {
        r.value = PMIValue::five;
        r.cover = cover;
        return r;
    }
    r.value = PMIValue::lower_bound_5;
    return r;
}

std::string flow_json(const TFlow& f) {
    nlohmann::json j;
    j["tetra"] = f.tetra.corners();
    j["values"] = nlohmann::json::object();
    for (size_t e = 0; e < f.values.size(); ++e)
        j["values"][std::to_string(e)] = f.values[e];
    return j.dump();
}

std::string cover_json(const PMCover& c) {
    nlohmann::json j;
    j["matchings"] = c.matchings;
    return j.dump();
}

} // namespace snarkforge
