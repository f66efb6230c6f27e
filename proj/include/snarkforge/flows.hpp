#pragma once
// Tetrahedral flow search on cubic graphs and multipoles, the perfect
// matching cover correspondence, perfect matching index, and circular
// nowhere-zero flow checks.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "snarkforge/geometry.hpp"
#include "snarkforge/multipole.hpp"

namespace snarkforge {

// Edge labelling by points of the tetrahedron; values indexed by edge
// position in the multipole (dangling edges included).
struct TFlow {
    Tetrahedron tetra;
    std::vector<Point4> values;
};

enum class FlowMode { first, count, enumerate_all };

struct FlowOptions {
    long long node_budget = 10'000'000;     // per worker; BudgetExhausted beyond
    int threads = 1;                        // used by count/enumerate only
    std::function<bool(const TFlow&)> sink; // enumerate: return false to stop early
};

struct FlowResult {
    std::optional<TFlow> flow; // first
    long long count = 0;       // count
    std::vector<TFlow> flows;  // enumerate (filled when no sink is given)
};

// Backtracking search assigning points of t edge by edge with forced-value
// propagation at every vertex that has two assigned edges.  `first` returns
// one flow or nothing, `count` the exact number, `enumerate_all` streams all
// flows in deterministic order.
FlowResult find_tflow(const Multipole& x, const Tetrahedron& t, FlowMode mode,
                      const FlowOptions& opt = {});

// Independent validation pass: all values in t, every vertex triple a line.
bool is_valid_tflow(const Multipole& x, const TFlow& f);

// All value tuples over the listed dangling edges (given by semiedge id)
// realisable by some T-flow on x.  The interior search stops at the first
// witness per boundary tuple.
std::set<std::vector<Point4>> boundary_value_sets(const Multipole& x, const Tetrahedron& t,
                                                  const std::vector<int>& semiedges,
                                                  const FlowOptions& opt = {});

// An ordered list of edge sets, each a perfect matching, jointly covering E.
struct PMCover {
    std::vector<std::vector<int>> matchings;
};

// T1-flow <-> cover by 4 perfect matchings: matching i collects the edges
// whose value has i-th coordinate 0; round-trips are identities.
PMCover cover_from_tflow(const Multipole& g, const TFlow& flow); // NotAT1Flow
TFlow tflow_from_cover(const Multipole& g, const PMCover& c);    // NotACover

// Proper 3-edge-colouring by backtracking; colour per edge, or nothing.
std::optional<std::vector<int>> is_3_edge_colourable(const Multipole& g);

// All perfect matchings by recursive edge inclusion at the lowest uncovered
// vertex; TooManyMatchings beyond the cap.
std::vector<std::vector<int>> enumerate_perfect_matchings(const Multipole& g,
                                                          int max_matchings = 100000);

// Exact set cover of E by at most k perfect matchings, padded to exactly k
// entries by repetition; nothing if impossible.
std::optional<PMCover> cover_with_k_matchings(const Multipole& g, int k,
                                              int max_matchings = 100000);

enum class PMIValue { three, four, five, lower_bound_5 };
const char* pmi_value_name(PMIValue v); // "3", "4", "5", ">=5"

struct PMIResult {
    PMIValue value = PMIValue::lower_bound_5;
    std::optional<PMCover> cover; // witness for 3 and 5
    std::optional<TFlow> flow;    // witness for 4 (over T1)
};

// 3 if 3-edge-colourable, else 4 if a T-flow exists, else 5 with a 5-cover
// witness, else the honest lower_bound_5.  Requires bridgeless cubic input.
PMIResult perfect_matching_index(const Multipole& g, const FlowOptions& opt = {},
                                 int max_matchings = 100000);

bool has_bridge(const Multipole& g);

// Orientation plus integer flow with every |value| in [q, p-q]; the integer
// form of a nowhere-zero circular p/q-flow.  Requires gcd(p,q)=1, p >= 2q.
bool has_cnzf(const Multipole& g, int p, int q, long long node_budget = 10'000'000);

struct Fraction {
    int p = 0, q = 1;
    bool operator==(const Fraction&) const = default;
};

struct CnzfEntry {
    Fraction r;
    bool exists;
};

// Evidence ladder over reduced fractions p/q in [2, 5] with q <= q_max,
// ascending, stopping at the first flow found.  When the graph is small
// enough (n <= exact_cap) the open gap between the largest failure and the
// smallest success is swept over every fraction whose denominator the cut
// structure permits; if all fail, the bound is exact.
struct CnzfLadder {
    std::vector<CnzfEntry> entries;
    std::optional<Fraction> largest_fail;
    std::optional<Fraction> smallest_pass;
    std::optional<Fraction> exact;
    std::string statement;
};

CnzfLadder circular_flow_lower_bound(const Multipole& g, int q_max, int exact_cap = 8,
                                     long long node_budget = 10'000'000);

std::string flow_json(const TFlow& f);   // {"tetra":[...], "values":{"edge":point}}
std::string cover_json(const PMCover& c); // {"matchings":[[edge,...],...]}

} // namespace snarkforge
