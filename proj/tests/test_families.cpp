// Halin graph construction, fragments, family builders (windmill, treelike,
// even order, composite), and the certificate pipeline with its tampering
// defences.
#include <doctest.h>

#include "snarkforge/families.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

using namespace snarkforge;
using S = Shape;

namespace {

FlowOptions test_opt() {
    FlowOptions opt;
    opt.node_budget = 8'000'000'000LL;
    return opt;
}

bool all_cubic(const Multipole& g) {
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.degree(v) != 3) return false;
    return true;
}

std::set<ShapeTransition> shapes_of(const Dipole& d, bool weighted) {
    TransitionRelation r =
        weighted ? weighted_transition_relation(d, RelationLevel::shapes, false, test_opt())
                 : transition_relation(d, RelationLevel::shapes, false, test_opt());
    return r.shapes;
}

bool subset_of(const std::set<ShapeTransition>& rel, const TransitionRelation& table) {
    return std::all_of(rel.begin(), rel.end(),
                       [&](const ShapeTransition& t) { return table.shapes.count(t) > 0; });
}

} // namespace

TEST_CASE("halin graphs from nested-list trees") {
    SUBCASE("single internal vertex gives K4") {
        HalinGraph h = build_halin("[[],[],[]]");
        CHECK(h.graph.num_vertices() == 4);
        CHECK(h.perimeter == std::vector<int>{1, 2, 3});
        CHECK(h.internal == std::vector<int>{0});
        CHECK(all_cubic(h.graph));
        CHECK(same_labelled_graph(h.graph, named_graph("K4")));
    }
    SUBCASE("two internal vertices give the triangular prism") {
        HalinGraph h = build_halin("[[],[],[[],[]]]");
        CHECK(h.graph.num_vertices() == 6);
        CHECK(h.perimeter == std::vector<int>{1, 2, 4, 5});
        CHECK(h.internal == std::vector<int>{0, 3});
        CHECK(all_cubic(h.graph));
        CHECK(girth(h.graph) == 3);
        Multipole prism = graph_from_edges(
            6, {{0, 1}, {0, 2}, {0, 3}, {3, 4}, {3, 5}, {1, 2}, {2, 4}, {4, 5}, {5, 1}});
        CHECK(same_labelled_graph(h.graph, prism));
    }
    SUBCASE("caterpillar specs") {
        CHECK(caterpillar_spec(1) == "[[],[],[]]");
        CHECK(caterpillar_spec(2) == "[[],[],[[],[]]]");
        HalinGraph h = build_halin(caterpillar_spec(3));
        CHECK(h.graph.num_vertices() == 8);
        CHECK(h.perimeter.size() == 5);
        CHECK(h.internal.size() == 3);
        CHECK(all_cubic(h.graph));
        CHECK_THROWS_AS(caterpillar_spec(0), InvalidTreeSpec);
    }
    SUBCASE("malformed specs") {
        CHECK_THROWS_AS(build_halin("[]"), InvalidTreeSpec);
        CHECK_THROWS_AS(build_halin("[[],[]]"), InvalidTreeSpec);
        CHECK_THROWS_AS(build_halin("[[],[],[],[]]"), InvalidTreeSpec);
        CHECK_THROWS_AS(build_halin("[[],[],[[]]]"), InvalidTreeSpec);
        CHECK_THROWS_AS(build_halin("5"), InvalidTreeSpec);
        CHECK_THROWS_AS(build_halin("not json"), InvalidTreeSpec);
    }
}

TEST_CASE("decollineators cut from snarks") {
    Dipole d = decollineator_from_snark(named_graph("Petersen"), 0, 1,
                                        DecollineatorEvidence::verify, test_opt());
    CHECK(d.num_vertices() == 8);
    CHECK(dipole_kind(d) == std::array<int, 3>{2, 2, 0});
    CHECK(classify_dipole(d, test_opt()).count(DipoleClass::decollineator) == 1);
    CHECK(shapes_of(d, false) == decollineator_transitions().shapes);

    CHECK_THROWS_AS(decollineator_from_snark(named_graph("K4"), 0, 1,
                                             DecollineatorEvidence::verify, test_opt()),
                    NotADecollineator);
    // trusted skips the flow search and takes the caller's word
    Dipole k4 = decollineator_from_snark(named_graph("K4"), 0, 1, DecollineatorEvidence::trusted);
    CHECK(dipole_kind(k4) == std::array<int, 3>{2, 2, 0});
}

TEST_CASE("bipartite blocks") {
    Dipole b = bipartite_block(named_graph("K33"), 0, 3, 1, test_opt());
    CHECK(b.num_vertices() == 3);
    CHECK(dipole_kind(b) == std::array<int, 3>{2, 2, 1});
    std::set<ShapeTransition> rel = shapes_of(b, true);
    CHECK(!rel.empty());
    CHECK(subset_of(rel, bipartite_weighted_transitions()));

    CHECK_THROWS_AS(bipartite_block(named_graph("Petersen"), 0, 1, 2, test_opt()), NotBipartite);
    // RelationOutsideB stays unreachable for honest bipartite inputs: the
    // weighted relation of a bipartite block always lies inside the table.
}

TEST_CASE("fragments and their composition") {
    HalinFragment f = petersen_fragment(test_opt());
    CHECK(f.decol.num_vertices() == 8);
    CHECK(f.blocks.size() == 1);
    CHECK(f.pole.num_vertices() == 11);
    CHECK(dipole_kind(f.pole) == std::array<int, 3>{2, 2, 1});
    CHECK(subset_of(shapes_of(f.pole, true), halin_piece_transitions()));

    SUBCASE("catalog sizes") {
        CHECK(standard_fragment("q3", test_opt()).pole.num_vertices() == 13);
        CHECK(standard_fragment("heawood", test_opt()).pole.num_vertices() == 19);
        CHECK(standard_fragment("gp83", test_opt()).pole.num_vertices() == 21);
        CHECK(fragment_keys().size() == 6);
        CHECK_THROWS_AS(standard_fragment("nope", test_opt()), MalformedInput);
    }
    SUBCASE("arity checks") {
        CHECK_THROWS_AS(make_halin_fragment(f.blocks[0], f.blocks[0]), ArityMismatch);
        CHECK_THROWS_AS(make_halin_fragment(f.decol, f.decol), ArityMismatch);
        CHECK_THROWS_AS(extend_fragment(f, f.blocks[0]), ArityMismatch);
    }
    SUBCASE("stationary extension") {
        Dipole insertion = remove_path(named_graph("Heawood"), {0, 1});
        CHECK(insertion.num_vertices() == 12);
        CHECK(shapes_of(insertion, false) == transition_table("stationary").shapes);
        HalinFragment wide = extend_fragment(f, insertion);
        CHECK(wide.blocks.size() == 2);
        CHECK(wide.pole.num_vertices() == 23);
        CHECK(dipole_kind(wide.pole) == std::array<int, 3>{2, 2, 1});
    }
}

TEST_CASE("named transition tables") {
    CHECK(transition_table("admissible").shapes.size() == 8);
    CHECK(transition_table("collinear").shapes.size() == 2);
    CHECK(transition_table("decollineator").shapes.size() == 6);
    CHECK(transition_table("bipartite-weighted").shapes.size() == 18);
    CHECK(transition_table("halin-piece").shapes.size() == 17);
    CHECK(transition_table("halin-square").shapes.size() == 8);
    CHECK(transition_table("bipartite-weighted").weighted);
    CHECK(!transition_table("admissible").weighted);

    const TransitionRelation& st = transition_table("stationary");
    CHECK(st.shapes.size() == 6);
    for (const auto& t : st.shapes) {
        CHECK(t.from == t.to);
        CHECK(transition_table("admissible").shapes.count(t) == 1);
    }

    const TransitionRelation& db = transition_table("decollineator-bipartite");
    CHECK(db.weighted);
    CHECK(db.shapes == compose_relations(decollineator_transitions(),
                                         bipartite_weighted_transitions(), ComposeOp::join)
                           .shapes);

    const TransitionRelation& al = transition_table("angle-to-line");
    CHECK(al.shapes == std::set<ShapeTransition>{{S::ang, S::ls, 0}});

    CHECK_THROWS_AS(transition_table("nope"), MalformedInput);
}

TEST_CASE("windmill of three petersen fragments") {
    HalinFragment pf = petersen_fragment(test_opt());
    FamilyMember m = windmill(pf, pf, pf, WeldOrientation::straight, test_opt());

    CHECK(m.graph.num_vertices() == 34);
    CHECK(m.graph.is_graph());
    CHECK(all_cubic(m.graph));
    CHECK(girth(m.graph) == 5);
    CHECK(cyclic_edge_connectivity_at_least(m.graph, 4));

    const Certificate& c = m.certificate;
    CHECK(c.kind == "windmill-walk");
    CHECK(c.order == 34);
    CHECK(c.pieces.size() == 6);
    CHECK(c.steps.size() == 4);
    CHECK(c.steps.back().rule == "closed-walk");
    CHECK(verify_certificate(c, m.graph, test_opt()));

    SUBCASE("same graph as the K4 treelike snark, certified inductively") {
        FamilyMember h = halin_snark(build_halin("[[],[],[]]"), {pf, pf, pf},
                                     WeldOrientation::straight, test_opt());
        CHECK(same_labelled_graph(h.graph, m.graph));
        CHECK(h.certificate.kind == "halin-inductive");
        CHECK(h.certificate.steps.back().rule == "closure-stationary");
        CHECK(verify_certificate(h.certificate, h.graph, test_opt()));
    }
    SUBCASE("crossed welds certify too") {
        FamilyMember x = windmill(pf, pf, pf, WeldOrientation::crossed, test_opt());
        CHECK(x.graph.num_vertices() == 34);
        CHECK(girth(x.graph) == 5);
        CHECK(verify_certificate(x.certificate, x.graph, test_opt()));
        FamilyMember hx = halin_snark(build_halin("[[],[],[]]"), {pf, pf, pf},
                                      WeldOrientation::crossed, test_opt());
        CHECK(verify_certificate(hx.certificate, hx.graph, test_opt()));
    }
    SUBCASE("fragment count must match the perimeter") {
        CHECK_THROWS_AS(halin_snark(build_halin("[[],[],[]]"), {pf, pf},
                                    WeldOrientation::straight, test_opt()),
                        FragmentCountMismatch);
    }
}

TEST_CASE("certificate serialisation and tampering") {
    HalinFragment pf = petersen_fragment(test_opt());
    FamilyMember m = windmill(pf, pf, pf, WeldOrientation::straight, test_opt());
    const Certificate& c = m.certificate;

    SUBCASE("json round trip") {
        std::string text = certificate_json(c);
        Certificate back = parse_certificate(text);
        CHECK(certificate_json(back) == text);
        CHECK(verify_certificate(back, m.graph, test_opt()));
        CHECK_THROWS_AS(parse_certificate("{"), MalformedInput);
        CHECK_THROWS_AS(parse_certificate("{\"schema\":2}"), MalformedInput);
    }
    SUBCASE("member json carries the invariants") {
        nlohmann::json j = nlohmann::json::parse(member_json(m));
        CHECK(j["schema"] == 1);
        CHECK(j["order"] == 34);
        CHECK(j["girth"] == 5);
        CHECK(j["cyclic4"] == true);
        CHECK(j["graph6"] == c.graph6);
        CHECK(j["certificate"]["kind"] == "windmill-walk");
    }
    SUBCASE("removing a relation entry is caught by the replay") {
        Certificate bad = c;
        for (CertificatePiece& p : bad.pieces)
            if (!p.relation.empty() && p.name == "f1.decol") p.relation.erase(p.relation.begin());
        CHECK_THROWS_AS(verify_certificate(bad, m.graph, test_opt()), CertificateMismatch);
    }
    SUBCASE("adding a relation entry is caught as well") {
        Certificate bad = c;
        bad.pieces[0].relation.insert({S::ls, S::ls, 0});
        CHECK_THROWS_AS(verify_certificate(bad, m.graph, test_opt()), CertificateMismatch);
    }
    SUBCASE("wrong order") {
        Certificate bad = c;
        bad.order = 36;
        CHECK_THROWS_AS(verify_certificate(bad, m.graph, test_opt()), CertificateMismatch);
    }
    SUBCASE("wrong graph6") {
        Certificate bad = c;
        bad.graph6 = emit_graph6(named_graph("Petersen"));
        CHECK_THROWS_AS(verify_certificate(bad, m.graph, test_opt()), CertificateMismatch);
    }
    SUBCASE("bound too tight for the stored relation") {
        Certificate bad = c;
        bad.pieces[0].bound = "collinear"; // decollineator relation leaves it
        CHECK_THROWS_AS(verify_certificate(bad, m.graph, test_opt()), CertificateMismatch);
    }
    SUBCASE("dropping a link breaks the edge accounting") {
        Certificate bad = c;
        bad.links.pop_back();
        CHECK_THROWS_AS(verify_certificate(bad, m.graph, test_opt()), CertificateMismatch);
    }
    SUBCASE("unknown kind or rule") {
        Certificate bad = c;
        bad.kind = "optimistic";
        CHECK_THROWS_AS(verify_certificate(bad, m.graph, test_opt()), CertificateMismatch);
        Certificate bad2 = c;
        bad2.steps.back().rule = "closure-stationary"; // wrong arity for the walk inputs
        CHECK_THROWS_AS(verify_certificate(bad2, m.graph, test_opt()), CertificateMismatch);
    }
    SUBCASE("certificate against the wrong graph") {
        FamilyMember other = windmill(pf, pf, pf, WeldOrientation::crossed, test_opt());
        if (!same_labelled_graph(other.graph, m.graph))
            CHECK_THROWS_AS(verify_certificate(c, other.graph, test_opt()), CertificateMismatch);
    }
}

TEST_CASE("ring fixtures keep the member's layout") {
    HalinFragment pf = petersen_fragment(test_opt());
    HalinGraph h = build_halin("[[],[],[]]");
    std::vector<HalinFragment> fr{pf, pf, pf};
    FamilyMember m = halin_snark(h, fr, WeldOrientation::straight, test_opt());

    Dipole x = halin_ring_minus_fragment(h, fr, 0);
    CHECK(x.num_vertices() == 23);
    CHECK(dipole_kind(x) == std::array<int, 3>{2, 2, 1});

    Dipole y = halin_ring_minus_decollineator(h, fr, 0);
    CHECK(y.num_vertices() == 26);
    CHECK(dipole_kind(y) == std::array<int, 3>{2, 2, 0});

    Dipole z = halin_ring_severed(h, fr, 0);
    CHECK(z.num_vertices() == 34);
    CHECK(dipole_kind(z) == std::array<int, 3>{2, 2, 0});
    CHECK(same_labelled_graph(closure(z), m.graph));

    Dipole zc = halin_ring_severed(h, fr, 1, WeldOrientation::crossed);
    FamilyMember mc = halin_snark(h, fr, WeldOrientation::crossed, test_opt());
    CHECK(same_labelled_graph(closure(zc, {1, 0}), mc.graph));
}

TEST_CASE("ring fixture relations (slow)") {
    HalinFragment pf = petersen_fragment(test_opt());
    HalinGraph h = build_halin("[[],[],[]]");
    std::vector<HalinFragment> fr{pf, pf, pf};

    std::set<ShapeTransition> xr = shapes_of(halin_ring_minus_fragment(h, fr, 0), true);
    CHECK(subset_of(xr, transition_table("halin-square")));

    std::set<ShapeTransition> yr = shapes_of(halin_ring_minus_decollineator(h, fr, 0), false);
    CHECK(yr == transition_table("collinear").shapes); // attains both entries

    std::set<ShapeTransition> zr = shapes_of(halin_ring_severed(h, fr, 0), false);
    CHECK(subset_of(zr, transition_table("angle-to-line")));
}

TEST_CASE("composite members from certified poles (slow)") {
    HalinFragment pf = petersen_fragment(test_opt());
    HalinGraph h = build_halin("[[],[],[]]");
    std::vector<HalinFragment> fr{pf, pf, pf};
    FamilyMember m = halin_snark(h, fr, WeldOrientation::straight, test_opt());

    SUBCASE("decollineator plus one ring collineator") {
        Dipole y = halin_ring_minus_decollineator(h, fr, 0);
        FamilyMember g1 = composite_family({pf.decol, y}, CompositeVariant::collineator_chain,
                                           WeldOrientation::straight, test_opt());
        CHECK(g1.graph.num_vertices() == 34);
        CHECK(girth(g1.graph) == 5);
        CHECK(g1.certificate.kind == "collineator-chain");
        CHECK(verify_certificate(g1.certificate, g1.graph, test_opt()));
    }
    SUBCASE("one severed pole closes back into the member") {
        Dipole z = halin_ring_severed(h, fr, 0);
        FamilyMember g2 = composite_family({z}, CompositeVariant::angle_chain,
                                           WeldOrientation::straight, test_opt());
        CHECK(same_labelled_graph(g2.graph, m.graph));
        CHECK(g2.certificate.kind == "angle-chain");
        CHECK(verify_certificate(g2.certificate, g2.graph, test_opt()));
    }
    SUBCASE("two severed poles chain into a double-order member") {
        Dipole z = halin_ring_severed(h, fr, 0);
        FamilyMember g2 = composite_family({z, z}, CompositeVariant::angle_chain,
                                           WeldOrientation::straight, test_opt());
        CHECK(g2.graph.num_vertices() == 68);
        CHECK(girth(g2.graph) == 5);
        CHECK(verify_certificate(g2.certificate, g2.graph, test_opt()));
    }
}

TEST_CASE("composite input validation") {
    HalinFragment pf = petersen_fragment(test_opt());
    CHECK_THROWS_AS(composite_family({}, CompositeVariant::angle_chain), InvalidParts);
    CHECK_THROWS_AS(composite_family({pf.decol}, CompositeVariant::collineator_chain),
                    InvalidParts);
    CHECK_THROWS_AS(composite_family({pf.blocks[0], pf.blocks[0]},
                                     CompositeVariant::collineator_chain),
                    InvalidParts); // residual semiedge on a part

    // self-closing a two-vertex pole creates parallel edges
    Multipole tiny;
    int u = tiny.add_vertex(), v = tiny.add_vertex();
    tiny.add_edge(u, v);
    tiny.add_connector({tiny.add_stub(u), tiny.add_stub(u)});
    tiny.add_connector({tiny.add_stub(v), tiny.add_stub(v)});
    tiny.validate();
    CHECK_THROWS_AS(composite_family({tiny}, CompositeVariant::angle_chain), InvalidParts);
}

TEST_CASE("even order family members") {
    FlowOptions opt = test_opt();
    SUBCASE("order 42 windmill with a heawood block") {
        FamilyMember m = even_order_family(42, opt);
        CHECK(m.graph.num_vertices() == 42);
        CHECK(girth(m.graph) >= 5);
        CHECK(cyclic_edge_connectivity_at_least(m.graph, 4));
        CHECK(m.certificate.kind == "windmill-walk");
        CHECK(verify_certificate(m.certificate, m.graph, opt));
    }
    SUBCASE("order 44 uses the gp83 block") {
        FamilyMember m = even_order_family(44, opt);
        CHECK(m.graph.num_vertices() == 44);
        CHECK(girth(m.graph) >= 5);
        CHECK(verify_certificate(m.certificate, m.graph, opt));
    }
    SUBCASE("order 46 is the prism treelike snark") {
        FamilyMember m = even_order_family(46, opt);
        CHECK(m.graph.num_vertices() == 46);
        CHECK(girth(m.graph) >= 5);
        CHECK(m.certificate.kind == "halin-inductive");
        CHECK(verify_certificate(m.certificate, m.graph, opt));
    }
    SUBCASE("order 50 doubles the heawood block") {
        FamilyMember m = even_order_family(50, opt);
        CHECK(m.graph.num_vertices() == 50);
        CHECK(girth(m.graph) >= 5);
        CHECK(verify_certificate(m.certificate, m.graph, opt));
    }
    SUBCASE("order 54 inserts a stationary heawood pole") {
        FamilyMember m = even_order_family(54, opt);
        CHECK(m.graph.num_vertices() == 54);
        CHECK(girth(m.graph) >= 5);
        CHECK(verify_certificate(m.certificate, m.graph, opt));
    }
    SUBCASE("order 58 extends the caterpillar") {
        FamilyMember m = even_order_family(58, opt);
        CHECK(m.graph.num_vertices() == 58);
        CHECK(m.certificate.kind == "halin-inductive");
        CHECK(verify_certificate(m.certificate, m.graph, opt));
    }
    SUBCASE("unsupported orders") {
        CHECK_THROWS_AS(even_order_family(40, opt), UnsupportedOrder);
        CHECK_THROWS_AS(even_order_family(41, opt), UnsupportedOrder);
        CHECK_THROWS_AS(even_order_family(43, opt), UnsupportedOrder);
        CHECK_THROWS_AS(even_order_family(0, opt), UnsupportedOrder);
    }
}
