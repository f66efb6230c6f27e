// Circular nowhere-zero flow existence and lower-bound ladders.
#include <doctest.h>

#include "snarkforge/flows.hpp"

#include <algorithm>
#include <vector>

using namespace snarkforge;

namespace {

// Exhaustive reference check: some assignment of values with |x| in
// [q, p-q] balances every vertex of the reference orientation.
bool brute_force_cnzf(const Multipole& g, int p, int q) {
    int m = static_cast<int>(g.edges().size());
    std::vector<int> domain;
    for (int a = q; a <= p - q; ++a) {
        domain.push_back(a);
        domain.push_back(-a);
    }
    std::vector<int> idx(m, 0);
    while (true) {
        std::vector<long long> sum(g.num_vertices(), 0);
        for (int e = 0; e < m; ++e) {
            const Edge& ed = g.edges()[e];
            sum[ed.a.v] += domain[idx[e]];
            sum[ed.b.v] -= domain[idx[e]];
        }
        bool ok = true;
        for (long long s : sum) ok = ok && s == 0;
        if (ok) return true;
        int pos = 0;
        while (pos < m && ++idx[pos] == static_cast<int>(domain.size())) idx[pos++] = 0;
        if (pos == m) break;
    }
    return false;
}

Multipole theta_graph() {
    Multipole g;
    g.add_vertices(2);
    g.add_edge(0, 1);
    g.add_edge(0, 1);
    g.add_edge(0, 1);
    return g;
}

Multipole dumbbell_graph() {
    Multipole g;
    g.add_vertices(2);
    g.add_edge(0, 0);
    g.add_edge(0, 1);
    g.add_edge(1, 1);
    return g;
}

Multipole cycle_graph(int n) {
    Multipole g;
    g.add_vertices(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

} // namespace

TEST_CASE("flow existence matches exhaustive search on small graphs") {
    const std::vector<std::pair<int, int>> candidates = {
        {2, 1}, {3, 1}, {4, 1}, {5, 1}, {5, 2}, {7, 2}, {9, 2}, {7, 3}, {8, 3}, {10, 3}};

    SUBCASE("triangle-free multigraphs") {
        for (auto [p, q] : candidates) {
            CAPTURE(p);
            CAPTURE(q);
            CHECK(has_cnzf(theta_graph(), p, q) == brute_force_cnzf(theta_graph(), p, q));
            CHECK(has_cnzf(dumbbell_graph(), p, q) == brute_force_cnzf(dumbbell_graph(), p, q));
            CHECK(has_cnzf(cycle_graph(5), p, q) == brute_force_cnzf(cycle_graph(5), p, q));
        }
    }
    SUBCASE("complete graph on four vertices") {
        for (auto [p, q] : candidates) {
            CAPTURE(p);
            CAPTURE(q);
            CHECK(has_cnzf(named_graph("K4"), p, q) == brute_force_cnzf(named_graph("K4"), p, q));
        }
    }
}

TEST_CASE("known flow values") {
    Multipole pet = named_graph("Petersen");
    CHECK(has_cnzf(pet, 5, 1));
    CHECK_FALSE(has_cnzf(pet, 4, 1));
    CHECK_FALSE(has_cnzf(pet, 9, 2));

    Multipole k33 = named_graph("K33");
    CHECK(has_cnzf(k33, 3, 1));
    CHECK_FALSE(has_cnzf(k33, 2, 1));
    CHECK(has_cnzf(k33, 7, 2));
    CHECK_FALSE(has_cnzf(k33, 5, 2));

    CHECK(has_cnzf(cycle_graph(7), 2, 1)); // even-degree graphs bottom out
    CHECK_FALSE(has_cnzf(dumbbell_graph(), 5, 1)); // bridges kill every flow
}

TEST_CASE("argument validation") {
    Multipole k4 = named_graph("K4");
    CHECK_THROWS_AS(has_cnzf(k4, 3, 2), MalformedInput);  // p < 2q
    CHECK_THROWS_AS(has_cnzf(k4, 4, 2), MalformedInput);  // not reduced
    CHECK_THROWS_AS(has_cnzf(k4, 4, 0), MalformedInput);  // denominator
    CHECK_THROWS_AS(circular_flow_lower_bound(k4, 0), MalformedInput);
    Multipole pole = remove_path(named_graph("Petersen"), {0});
    CHECK_THROWS_AS(has_cnzf(pole, 4, 1), InvalidMultipole);
    CHECK_THROWS_AS(circular_flow_lower_bound(pole, 1), InvalidMultipole);

    CHECK_THROWS_AS(has_cnzf(named_graph("Petersen"), 5, 1, 5), BudgetExhausted);
}

TEST_CASE("evidence ladders") {
    SUBCASE("the Petersen graph stays an interval at small denominators") {
        CnzfLadder l = circular_flow_lower_bound(named_graph("Petersen"), 2);
        REQUIRE(l.largest_fail.has_value());
        REQUIRE(l.smallest_pass.has_value());
        CHECK(*l.largest_fail == Fraction{9, 2});
        CHECK(*l.smallest_pass == Fraction{5, 1});
        CHECK_FALSE(l.exact.has_value()); // too large for the exhaustive sweep
        CHECK(l.statement == "9/2 < Phi_c <= 5");
        // Ladder rungs ascend: 2, 5/2, 3, 7/2, 4, 9/2 all fail, then 5.
        REQUIRE(l.entries.size() == 7);
        for (size_t i = 0; i + 1 < l.entries.size(); ++i) CHECK_FALSE(l.entries[i].exists);
        CHECK(l.entries.back().exists);
    }

    SUBCASE("the complete graph on four vertices is pinned exactly") {
        CnzfLadder l = circular_flow_lower_bound(named_graph("K4"), 1);
        REQUIRE(l.exact.has_value());
        CHECK(*l.exact == Fraction{4, 1});
        CHECK(l.statement == "Phi_c = 4");
        // The sweep must have probed the gap between 3 and 4.
        std::vector<Fraction> probed;
        for (const CnzfEntry& e : l.entries) probed.push_back(e.r);
        auto has = [&](Fraction f) {
            return std::find(probed.begin(), probed.end(), f) != probed.end();
        };
        CHECK(has(Fraction{10, 3}));
        CHECK(has(Fraction{7, 2}));
        CHECK(has(Fraction{11, 3}));
    }

    SUBCASE("bipartite graphs reach the floor for cubic graphs") {
        CnzfLadder l = circular_flow_lower_bound(named_graph("K33"), 2);
        REQUIRE(l.exact.has_value());
        CHECK(*l.exact == Fraction{3, 1});
        CHECK(l.statement == "Phi_c = 3");
    }

    SUBCASE("even-degree graphs are exactly two") {
        CnzfLadder l = circular_flow_lower_bound(cycle_graph(5), 1);
        REQUIRE(l.exact.has_value());
        CHECK(*l.exact == Fraction{2, 1});
        CHECK(l.statement == "Phi_c = 2");
    }

    SUBCASE("bridged graphs fail the whole ladder") {
        CnzfLadder l = circular_flow_lower_bound(dumbbell_graph(), 1);
        CHECK_FALSE(l.smallest_pass.has_value());
        REQUIRE(l.largest_fail.has_value());
        CHECK(*l.largest_fail == Fraction{5, 1});
        CHECK(l.statement == "Phi_c > 5");
    }
}
