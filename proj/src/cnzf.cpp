// Circular nowhere-zero flow existence and lower-bound ladders.
#include "snarkforge/flows.hpp"

#include <algorithm>
#include <numeric>

namespace snarkforge {

namespace {

struct CnzfSearch {
    int m = 0, n = 0, lo = 0, hi = 0;
    std::vector<std::array<int, 2>> ev; // edge endpoints, +x flows a -> b
    std::vector<std::vector<int>> ve;
    std::vector<int> order;             // non-loop edges, DFS discovery
    std::vector<int> val;               // 0 = unassigned (values never 0)
    std::vector<long long> sum;         // signed balance so far per vertex
    std::vector<int> open;              // unassigned non-loop edges per vertex
    std::vector<int> trail;
    std::vector<std::pair<int, int>> forced;
    long long nodes = 0, budget;

    CnzfSearch(const Multipole& g, int q, int p, long long node_budget)
        : lo(q), hi(p - q), budget(node_budget) {
        m = static_cast<int>(g.edges().size());
        n = g.num_vertices();
        ev.assign(m, {-1, -1});
        ve.resize(n);
        val.assign(m, 0);
        sum.assign(n, 0);
        open.assign(n, 0);
        for (int i = 0; i < m; ++i) {
            const Edge& e = g.edges()[i];
            ev[i] = {e.a.v, e.b.v};
            if (e.a.v == e.b.v) continue; // loops carry q and cancel in the balance
            ve[e.a.v].push_back(i);
            ve[e.b.v].push_back(i);
            open[e.a.v]++;
            open[e.b.v]++;
        }
        // Deterministic DFS discovery order over non-loop edges.
        std::vector<bool> eseen(m, false), vseen(n, false);
        std::vector<int> stack;
        for (int s = 0; s < n; ++s) {
            if (vseen[s]) continue;
            stack.push_back(s);
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                if (vseen[v]) continue;
                vseen[v] = true;
                for (int e : ve[v])
                    if (!eseen[e]) {
                        eseen[e] = true;
                        order.push_back(e);
                    }
                for (auto it = ve[v].rbegin(); it != ve[v].rend(); ++it) {
                    int w = ev[*it][0] == v ? ev[*it][1] : ev[*it][0];
                    if (!vseen[w]) stack.push_back(w);
                }
            }
        }
    }

    int sign_at(int e, int v) const { return ev[e][0] == v ? 1 : -1; }

    bool in_range(long long x) const {
        long long a = x < 0 ? -x : x;
        return a >= lo && a <= hi;
    }

    bool assign(int e, int x) {
        if (++nodes > budget) throw BudgetExhausted("circular flow node budget exceeded");
        val[e] = x;
        trail.push_back(e);
        // Bookkeeping must run for both endpoints even after a conflict so
        // that undo_to remains an exact inverse.
        bool ok = true;
        for (int v : {ev[e][0], ev[e][1]}) {
            sum[v] += sign_at(e, v) * static_cast<long long>(x);
            --open[v];
            if (!ok) continue;
            if (open[v] == 0) {
                if (sum[v] != 0) ok = false;
            } else if (open[v] == 1) {
                int free_e = -1;
                for (int f : ve[v])
                    if (val[f] == 0) { free_e = f; break; }
                long long need = -sum[v] * sign_at(free_e, v);
                if (!in_range(need))
                    ok = false;
                else
                    forced.push_back({free_e, static_cast<int>(need)});
            }
        }
        return ok;
    }

    void undo_to(size_t checkpoint) {
        while (trail.size() > checkpoint) {
            int e = trail.back();
            trail.pop_back();
            for (int v : {ev[e][0], ev[e][1]}) {
                sum[v] -= sign_at(e, v) * static_cast<long long>(val[e]);
                ++open[v];
            }
            val[e] = 0;
        }
    }

    bool propagate() {
        while (!forced.empty()) {
            auto [e, x] = forced.back();
            forced.pop_back();
            if (val[e] != 0) {
                if (val[e] != x) return false;
                continue;
            }
            if (!assign(e, x)) return false;
        }
        return true;
    }

    bool run(size_t idx) {
        while (idx < order.size() && val[order[idx]] != 0) ++idx;
        if (idx == order.size()) return true;
        int e = order[idx];
        for (int a = lo; a <= hi; ++a)
            for (int x : {a, -a}) {
                size_t cp = trail.size();
                forced.clear();
                bool ok = assign(e, x) && propagate() && run(idx + 1);
                if (ok) return true;
                undo_to(cp);
                forced.clear();
            }
        return false;
    }
};

bool fraction_less(const Fraction& a, const Fraction& b) {
    return static_cast<long long>(a.p) * b.q < static_cast<long long>(b.p) * a.q;
}

std::string fraction_text(const Fraction& f) {
    if (f.q == 1) return std::to_string(f.p);
    return std::to_string(f.p) + "/" + std::to_string(f.q);
}

// Largest edge cut over all vertex bipartitions; 0 when no cut crosses.
int max_cut_size(const Multipole& g) {
    int n = g.num_vertices();
    if (n < 2) return 0;
    int best = 0;
    for (unsigned long mask = 1; mask < (1ul << (n - 1)); ++mask) {
        // Vertex n-1 stays on the fixed side to skip complements.
        int cut = 0;
        for (const Edge& e : g.edges()) {
            bool a = (mask >> e.a.v) & 1 && e.a.v < n - 1;
            bool b = (mask >> e.b.v) & 1 && e.b.v < n - 1;
            if (a != b) ++cut;
        }
        best = std::max(best, cut);
    }
    return best;
}

} // namespace

bool has_cnzf(const Multipole& g, int p, int q, long long node_budget) {
    if (!g.is_graph()) throw InvalidMultipole("circular flows are defined on graphs");
    if (q < 1 || p < 2 * q || std::gcd(p, q) != 1)
        throw MalformedInput("flow value must be a reduced fraction p/q with p >= 2q");
    CnzfSearch s(g, q, p, node_budget);
    return s.run(0);
}

CnzfLadder circular_flow_lower_bound(const Multipole& g, int q_max, int exact_cap,
                                     long long node_budget) {
    if (!g.is_graph()) throw InvalidMultipole("circular flows are defined on graphs");
    if (q_max < 1) throw MalformedInput("denominator bound must be at least 1");

    CnzfLadder ladder;
    auto gap_candidates = [](const std::optional<Fraction>& above,
                             const std::optional<Fraction>& below, int qbound) {
        // Reduced fractions r with above < r < below (bounds of [2,5] apply
        // when a side is missing), ascending.
        std::vector<Fraction> out;
        for (int q = 1; q <= qbound; ++q)
            for (int p = 2 * q; p <= 5 * q; ++p) {
                if (std::gcd(p, q) != 1) continue;
                Fraction f{p, q};
                if (above && !fraction_less(*above, f)) continue;
                if (below && !fraction_less(f, *below)) continue;
                out.push_back(f);
            }
        std::sort(out.begin(), out.end(), fraction_less);
        return out;
    };

    for (const Fraction& f : gap_candidates(std::nullopt, std::nullopt, q_max)) {
        bool ok = has_cnzf(g, f.p, f.q, node_budget);
        ladder.entries.push_back({f, ok});
        if (ok) {
            ladder.smallest_pass = f;
            break;
        }
        ladder.largest_fail = f;
    }

    if (ladder.smallest_pass && g.num_vertices() <= exact_cap && g.num_vertices() <= 20) {
        // Any circular flow value of the graph is |cut| / |smaller side of an
        // orientation of that cut| for some cut, so its reduced denominator
        // stays below the largest cut size. Sweep the open gap under that
        // bound; if every candidate fails, the smallest pass is exact.
        int qbound = max_cut_size(g) - 1;
        for (const Fraction& f : gap_candidates(ladder.largest_fail, ladder.smallest_pass,
                                                std::max(qbound, 0))) {
            bool ok = has_cnzf(g, f.p, f.q, node_budget);
            ladder.entries.push_back({f, ok});
            if (ok) {
                // Everything below f in the gap was just tested and failed.
                ladder.smallest_pass = f;
                break;
            }
            ladder.largest_fail = f;
        }
        ladder.exact = ladder.smallest_pass;
    }

    if (ladder.exact)
        ladder.statement = "Phi_c = " + fraction_text(*ladder.exact);
    else if (ladder.largest_fail && ladder.smallest_pass)
        ladder.statement = fraction_text(*ladder.largest_fail) + " < Phi_c <= " +
                           fraction_text(*ladder.smallest_pass);
    else if (ladder.largest_fail)
        ladder.statement = "Phi_c > " + fraction_text(*ladder.largest_fail);
    else if (ladder.smallest_pass)
        ladder.statement = "Phi_c <= " + fraction_text(*ladder.smallest_pass);
    else
        ladder.statement = "no candidates tested";
    return ladder;
}

} // namespace snarkforge
