// Transition relations of dipoles, their composition, classification, the
// admissibility checks, and the named constant relations.  Pair-level data
// is always expressed in the canonical tetrahedron T0; boundary sweeps are
// cached per dipole structure because fragments recur across the family
// builders.

#include "snarkforge/transitions.hpp"

#include <algorithm>
#include <initializer_list>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace snarkforge {

namespace {

std::string end_token(const End& e) {
    return e.is_vertex() ? "v" + std::to_string(e.v) : "s" + std::to_string(e.s);
}

// Serialises everything the boundary sweep depends on: the labelled edge
// list, the connector and residual layout, the tetrahedron, and the queried
// semiedge order.
std::string structural_key(const Multipole& m, const Tetrahedron& t,
                           const std::vector<int>& semiedges) {
    std::string key = "n" + std::to_string(m.num_vertices()) + "|e";
    for (const Edge& e : m.edges()) key += end_token(e.a) + ":" + end_token(e.b) + ",";
    key += "|c";
    for (const auto& c : m.connectors()) {
        for (int id : c) key += std::to_string(id) + ",";
        key += ";";
    }
    key += "|r";
    for (int id : m.residual_semiedges()) key += std::to_string(id) + ",";
    key += "|t";
    for (Point4 c : t.corners()) key += std::to_string(static_cast<int>(c)) + ",";
    key += "|q";
    for (int id : semiedges) key += std::to_string(id) + ",";
    return key;
}

const std::set<std::vector<Point4>>& cached_boundary_values(const Multipole& m,
                                                            const Tetrahedron& t,
                                                            const std::vector<int>& semiedges,
                                                            const FlowOptions& opt) {
    static std::mutex lock;
    static std::map<std::string, std::set<std::vector<Point4>>> cache;
    std::string key = structural_key(m, t, semiedges);
    {
        std::scoped_lock guard(lock);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto values = boundary_value_sets(m, t, semiedges, opt);
    std::scoped_lock guard(lock);
    return cache.emplace(key, std::move(values)).first->second;
}

std::array<Point4, 2> sorted_pair(Point4 a, Point4 b) {
    return {std::min(a, b), std::max(a, b)};
}

TransitionRelation relation_of_dipole(const Dipole& d, bool weighted, RelationLevel level,
                                      bool split_degenerate, const FlowOptions& opt,
                                      bool use_cache) {
    const Tetrahedron& t = tetra_T0();
    std::vector<int> semiedges(d.connectors()[0]);
    semiedges.insert(semiedges.end(), d.connectors()[1].begin(), d.connectors()[1].end());
    if (weighted) semiedges.push_back(d.residual_semiedges()[0]);

    TransitionRelation r;
    r.weighted = weighted;
    std::set<PairTransition> pairs;
    std::set<std::vector<Point4>> fresh;
    if (!use_cache) fresh = boundary_value_sets(d, t, semiedges, opt);
    const auto& tuples = use_cache ? cached_boundary_values(d, t, semiedges, opt) : fresh;
    for (const auto& tup : tuples) {
        PairTransition p;
        p.in = sorted_pair(tup[0], tup[1]);
        p.out = sorted_pair(tup[2], tup[3]);
        p.residual_weight = weighted ? t.weight(tup[4]) : 0;
        pairs.insert(p);
        r.shapes.insert({t.classify_pair(p.in[0], p.in[1], !split_degenerate),
                         t.classify_pair(p.out[0], p.out[1], !split_degenerate),
                         p.residual_weight});
    }
    if (level == RelationLevel::pairs) r.pairs = std::move(pairs);
    return r;
}

TransitionRelation make_shape_relation(bool weighted,
                                       std::initializer_list<ShapeTransition> entries) {
    TransitionRelation r;
    r.weighted = weighted;
    r.shapes = entries;
    return r;
}

bool shape_subset(const std::set<ShapeTransition>& a, const std::set<ShapeTransition>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// The unique pair of corners of t summing to s, ascending; {0,0} when s is
// not the sum of two corners.
std::array<Point4, 2> corner_pair_for(const Tetrahedron& t, Point4 s) {
    const auto& c = t.corners();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (add(c[i], c[j]) == s) return sorted_pair(c[i], c[j]);
    return {0, 0};
}

std::string point_pair_text(const std::array<Point4, 2>& p) {
    return "{" + std::to_string(static_cast<int>(p[0])) + "," +
           std::to_string(static_cast<int>(p[1])) + "}";
}

std::string pair_text(const PairTransition& p) {
    return point_pair_text(p.in) + " -> " + point_pair_text(p.out);
}

} // namespace

TransitionRelation transition_relation(const Dipole& d, RelationLevel level,
                                       bool split_degenerate, const FlowOptions& opt,
                                       bool use_cache) {
    if (dipole_kind(d) != std::array<int, 3>{2, 2, 0})
        throw ArityMismatch("transition_relation needs a (2,2)-pole");
    return relation_of_dipole(d, false, level, split_degenerate, opt, use_cache);
}

TransitionRelation weighted_transition_relation(const Dipole& d, RelationLevel level,
                                                bool split_degenerate, const FlowOptions& opt,
                                                bool use_cache) {
    if (dipole_kind(d) != std::array<int, 3>{2, 2, 1})
        throw ArityMismatch("weighted_transition_relation needs a (2,2;1)-pole");
    return relation_of_dipole(d, true, level, split_degenerate, opt, use_cache);
}

TransitionRelation compose_relations(const TransitionRelation& r1,
                                     const TransitionRelation& r2, ComposeOp op) {
    TransitionRelation out;
    if (op == ComposeOp::join) {
        if (r1.weighted && r2.weighted)
            throw WeightArityMismatch("join composes at most one weighted relation");
        out.weighted = r1.weighted || r2.weighted;
        for (const auto& a : r1.shapes)
            for (const auto& b : r2.shapes)
                if (a.to == b.from) out.shapes.insert({a.from, b.to, a.weight + b.weight});
    } else {
        if (!r1.weighted || !r2.weighted)
            throw WeightArityMismatch("odot composes two weighted relations");
        out.weighted = true;
        for (const auto& a : r1.shapes)
            for (const auto& b : r2.shapes) {
                if (a.to != b.from || a.weight + b.weight > 3) continue;
                out.shapes.insert({a.from, b.to, 3 - a.weight * b.weight});
            }
    }
    return out;
}

Dipole compose_dipoles(const Dipole& m1, const Dipole& m2, ComposeOp op) {
    auto k1 = dipole_kind(m1), k2 = dipole_kind(m2);
    if (op == ComposeOp::odot &&
        (k1 != std::array<int, 3>{2, 2, 1} || k2 != std::array<int, 3>{2, 2, 1}))
        throw ArityMismatch("odot composes two (2,2;1)-poles");
    if (k1[1] != k2[0]) throw ArityMismatch("join needs |output(m1)| == |input(m2)|");

    Multipole u = disjoint_union(m1, m2);
    std::vector<int> out1 = u.connectors()[1];
    std::vector<int> in2 = u.connectors()[2];
    if (op == ComposeOp::odot) {
        int r1 = u.residual_semiedges()[0];
        int r2 = u.residual_semiedges()[1];
        int v = u.add_vertex();
        int a = u.add_stub(v);
        int b = u.add_stub(v);
        u.add_residual(u.add_stub(v));
        u = junction(u, r1, a);
        u = junction(u, r2, b);
    }
    for (std::size_t i = 0; i < out1.size(); ++i) u = junction(u, out1[i], in2[i]);
    u.validate();
    return u;
}

const char* dipole_class_name(DipoleClass c) {
    switch (c) {
        case DipoleClass::stationary: return "stationary";
        case DipoleClass::decollineator: return "decollineator";
        case DipoleClass::deangulator: return "deangulator";
        case DipoleClass::collineator: return "collineator";
    }
    throw Error("unknown dipole class");
}

std::set<DipoleClass> classify_relation(const TransitionRelation& r) {
    bool ls_ang = false, ls_ls = false, hl_hl = false, ang_ang = false;
    bool only_collinear = true;
    for (const auto& e : r.shapes) {
        Shape f = merge_degenerate(e.from), t = merge_degenerate(e.to);
        if ((f == Shape::ls && t == Shape::ang) || (f == Shape::ang && t == Shape::ls))
            ls_ang = true;
        bool collinear = (f == Shape::ls && t == Shape::ls) || (f == Shape::hl && t == Shape::hl);
        if (f == Shape::ls && t == Shape::ls) ls_ls = true;
        if (f == Shape::hl && t == Shape::hl) hl_hl = true;
        if (f == Shape::ang && t == Shape::ang) ang_ang = true;
        if (!collinear) only_collinear = false;
    }
    std::set<DipoleClass> tags;
    if (!ls_ang) tags.insert(DipoleClass::stationary);
    if (!ls_ls && !hl_hl) tags.insert(DipoleClass::decollineator);
    if (!ang_ang) tags.insert(DipoleClass::deangulator);
    if (only_collinear) tags.insert(DipoleClass::collineator);
    return tags;
}

std::set<DipoleClass> classify_dipole(const Dipole& d, const FlowOptions& opt) {
    return classify_relation(transition_relation(d, RelationLevel::shapes, false, opt));
}

AdmissibilityReport check_admissible(const TransitionRelation& r) {
    if (r.weighted) throw WeightArityMismatch("check_admissible expects an unweighted relation");
    AdmissibilityReport rep;
    const auto& admissible = admissible_transitions().shapes;
    for (const auto& e : r.shapes) {
        ShapeTransition merged{merge_degenerate(e.from), merge_degenerate(e.to), 0};
        if (!admissible.count(merged))
            rep.violations.push_back(std::string("shape ") + shape_name(e.from) + " -> " +
                                     shape_name(e.to) + " is not admissible");
    }
    if (r.pairs) {
        const Tetrahedron& t = tetra_T0();
        auto triangle = [&](const std::array<Point4, 2>& pr) {
            std::set<Point4> tri;
            for (Point4 x : pr) {
                if (t.weight(x) == 1) {
                    tri.insert(x);
                } else {
                    auto cp = corner_pair_for(t, x);
                    tri.insert(cp[0]);
                    tri.insert(cp[1]);
                }
            }
            return tri;
        };
        // Each refinement is checked on its own so that a bad pair reports
        // everything that is wrong with it, not just the first failure.
        for (const auto& p : *r.pairs) {
            Point4 trace_in = add(p.in[0], p.in[1]);
            Point4 trace_out = add(p.out[0], p.out[1]);
            Shape f = t.classify_pair(p.in[0], p.in[1], true);
            Shape g = t.classify_pair(p.out[0], p.out[1], true);
            if (trace_in != trace_out)
                rep.violations.push_back("trace changes in " + pair_text(p));
            if (f == Shape::hl && g == Shape::hl && trace_in != trace_out)
                rep.violations.push_back("half-line target changes in " + pair_text(p));
            if (f == Shape::ls && g == Shape::ls && p.in != p.out)
                rep.violations.push_back("line segment is not preserved in " + pair_text(p));
            if (f == Shape::ang && g == Shape::ls && p.out != corner_pair_for(t, trace_in))
                rep.violations.push_back("angle does not open onto the corner pair of its trace in " +
                                         pair_text(p));
            if (f == Shape::alt && g == Shape::alt && triangle(p.in) != triangle(p.out))
                rep.violations.push_back("altitude leaves its triangle in " + pair_text(p));
        }
    }
    rep.admissible = rep.violations.empty();
    return rep;
}

bool bip_3pole_check(const Multipole& g, int v, const FlowOptions& opt) {
    Multipole pole = remove_path(g, {v});
    const Tetrahedron& t = tetra_T0();
    for (const auto& tup : cached_boundary_values(pole, t, pole.connectors()[0], opt))
        if (line_or_circle(t, tup[0], tup[1], tup[2]) != TripleKind::line) return false;
    return true;
}

const TransitionRelation& admissible_transitions() {
    static const TransitionRelation r = make_shape_relation(
        false, {{Shape::ls, Shape::ls},
                {Shape::hl, Shape::hl},
                {Shape::ang, Shape::ang},
                {Shape::alt, Shape::alt},
                {Shape::ax, Shape::ax},
                {Shape::dpt, Shape::dpt},
                {Shape::ang, Shape::ls},
                {Shape::ls, Shape::ang}});
    return r;
}

const TransitionRelation& collinear_transitions() {
    static const TransitionRelation r =
        make_shape_relation(false, {{Shape::ls, Shape::ls}, {Shape::hl, Shape::hl}});
    return r;
}

const TransitionRelation& decollineator_transitions() {
    static const TransitionRelation r = [] {
        TransitionRelation d;
        for (const auto& e : admissible_transitions().shapes)
            if (!collinear_transitions().shapes.count(e)) d.shapes.insert(e);
        if (d.shapes.size() != 6 || !shape_subset(d.shapes, admissible_transitions().shapes))
            throw Error("non-collinear transition table corrupted");
        return d;
    }();
    return r;
}

const TransitionRelation& bipartite_weighted_transitions() {
    static const TransitionRelation r = [] {
        TransitionRelation b = make_shape_relation(
            true, {{Shape::ls, Shape::hl, 1},   {Shape::hl, Shape::ls, 1},
                   {Shape::ls, Shape::alt, 1},  {Shape::alt, Shape::ls, 1},
                   {Shape::hl, Shape::dpt, 1},  {Shape::dpt, Shape::hl, 1},
                   {Shape::ls, Shape::ang, 2},  {Shape::ang, Shape::ls, 2},
                   {Shape::ls, Shape::ax, 2},   {Shape::ax, Shape::ls, 2},
                   {Shape::ls, Shape::dpt, 2},  {Shape::dpt, Shape::ls, 2},
                   {Shape::ang, Shape::dpt, 2}, {Shape::dpt, Shape::ang, 2},
                   {Shape::hl, Shape::hl, 2},   {Shape::alt, Shape::alt, 2},
                   {Shape::hl, Shape::alt, 2},  {Shape::alt, Shape::hl, 2}});
        if (b.shapes.size() != 18) throw Error("bipartite transition table corrupted");
        for (const auto& e : b.shapes)
            if (e.weight != 1 && e.weight != 2) throw Error("bipartite transition table corrupted");
        return b;
    }();
    return r;
}

const TransitionRelation& halin_piece_transitions() {
    static const TransitionRelation r = [] {
        TransitionRelation m = compose_relations(decollineator_transitions(),
                                                 bipartite_weighted_transitions(), ComposeOp::join);
        m.shapes.insert({Shape::ax, Shape::hl, 1});
        m.shapes.insert({Shape::ls, Shape::hl, 1});
        if (m.shapes.size() != 17) throw Error("piece transition table corrupted");
        return m;
    }();
    return r;
}

const TransitionRelation& halin_square_transitions() {
    static const TransitionRelation r = [] {
        TransitionRelation m = compose_relations(halin_piece_transitions(),
                                                 halin_piece_transitions(), ComposeOp::odot);
        m.shapes.erase({Shape::dpt, Shape::alt, 1});
        m.shapes.erase({Shape::alt, Shape::dpt, 1});
        if (m.shapes.size() != 8 || !shape_subset(m.shapes, halin_piece_transitions().shapes))
            throw Error("square transition table corrupted");
        return m;
    }();
    return r;
}

std::string relation_json(const TransitionRelation& r) {
    nlohmann::json j;
    j["shapes"] = nlohmann::json::array();
    for (const auto& e : r.shapes)
        j["shapes"].push_back({shape_name(e.from), shape_name(e.to),
                               e.weight == 0 ? nlohmann::json() : nlohmann::json(e.weight)});
    if (r.pairs) {
        j["pairs"] = nlohmann::json::array();
        for (const auto& p : *r.pairs)
            j["pairs"].push_back({{p.in[0], p.in[1]},
                                  {p.out[0], p.out[1]},
                                  p.residual_weight == 0 ? nlohmann::json()
                                                         : nlohmann::json(p.residual_weight)});
    }
    return j.dump();
}

std::string relation_dot(const TransitionRelation& r) {
    std::string out = "digraph transitions {\n  rankdir=LR;\n";
    std::set<Shape> nodes;
    for (const auto& e : r.shapes) {
        nodes.insert(e.from);
        nodes.insert(e.to);
    }
    for (Shape s : nodes) out += std::string("  ") + shape_name(s) + ";\n";
    for (const auto& e : r.shapes) {
        out += std::string("  ") + shape_name(e.from) + " -> " + shape_name(e.to);
        if (e.weight != 0) out += " [label=\"" + std::to_string(e.weight) + "\"]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

} // namespace snarkforge
