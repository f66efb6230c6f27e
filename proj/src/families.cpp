// Snark family builders (windmill, treelike, even-order, composite) and the
// relation certificate pipeline: ring assembly from fragment pieces, piece
// relation enumeration, composition steps, JSON round-trip, and independent
// replay verification.

#include "snarkforge/families.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

namespace snarkforge {

namespace {

using nlohmann::json;

constexpr std::array<int, 3> kind22{2, 2, 0};
constexpr std::array<int, 3> kind221{2, 2, 1};

// ---------- Halin graphs ----------

struct TreeNode {
    std::vector<TreeNode> kids;
};

TreeNode parse_tree(const json& j, bool root) {
    if (!j.is_array()) throw InvalidTreeSpec("tree nodes must be lists");
    TreeNode n;
    for (const auto& k : j) n.kids.push_back(parse_tree(k, false));
    if (root) {
        if (n.kids.size() != 3) throw InvalidTreeSpec("the root needs exactly three subtrees");
    } else if (n.kids.size() == 1 || n.kids.size() > 2) {
        throw InvalidTreeSpec("every internal vertex needs exactly two subtrees");
    }
    return n;
}

// Validates the Halin structure and returns the tree neighbour of each leaf.
std::vector<int> leaf_anchors(const HalinGraph& h) {
    h.graph.validate();
    if (!h.graph.is_graph()) throw InvalidTreeSpec("a Halin graph has no semiedges");
    int n = h.graph.num_vertices();
    int m = static_cast<int>(h.perimeter.size());
    if (m < 3) throw InvalidTreeSpec("the perimeter needs at least three leaves");
    if (m + static_cast<int>(h.internal.size()) != n)
        throw InvalidTreeSpec("perimeter and internal lists must cover every vertex");
    std::vector<int> role(n, -1); // 0 leaf, 1 internal
    for (int v : h.perimeter) {
        if (v < 0 || v >= n || role[v] != -1) throw InvalidTreeSpec("bad perimeter list");
        role[v] = 0;
    }
    for (int v : h.internal) {
        if (v < 0 || v >= n || role[v] != -1) throw InvalidTreeSpec("bad internal list");
        role[v] = 1;
    }
    auto adj = vertex_adjacency(h.graph);
    std::vector<int> anchors(m, -1);
    for (int i = 0; i < m; ++i) {
        int leaf = h.perimeter[i];
        std::multiset<int> circuit, tree;
        for (int u : adj[leaf]) (role[u] == 0 ? circuit : tree).insert(u);
        if (tree.size() != 1) throw InvalidTreeSpec("every leaf needs exactly one tree neighbour");
        std::multiset<int> expect{h.perimeter[(i + m - 1) % m], h.perimeter[(i + 1) % m]};
        if (circuit != expect)
            throw InvalidTreeSpec("the leaf circuit must follow the perimeter order");
        anchors[i] = *tree.begin();
    }
    return anchors;
}

// ---------- small dipole helpers ----------

int semiedge_host(const Multipole& m, int s) {
    for (const Edge& e : m.edges()) {
        if (!e.a.is_vertex() && e.a.s == s && e.b.is_vertex()) return e.b.v;
        if (!e.b.is_vertex() && e.b.s == s && e.a.is_vertex()) return e.a.v;
    }
    throw InvalidMultipole("semiedge has no host vertex");
}

std::string structural_string(const Multipole& d) {
    std::ostringstream os;
    os << d.num_vertices() << ";";
    for (const Edge& e : d.edges()) {
        os << (e.a.is_vertex() ? "v" : "s") << (e.a.is_vertex() ? e.a.v : e.a.s) << "-";
        os << (e.b.is_vertex() ? "v" : "s") << (e.b.is_vertex() ? e.b.v : e.b.s) << ",";
    }
    os << ";";
    for (const auto& c : d.connectors()) {
        for (int s : c) os << s << ",";
        os << "|";
    }
    os << ";";
    for (int s : d.residual_semiedges()) os << s << ",";
    return os.str();
}

bool is_simple(const Multipole& g) {
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : g.edges()) {
        if (!e.a.is_vertex() || !e.b.is_vertex()) continue;
        if (e.a.v == e.b.v) return false;
        auto key = std::minmax(e.a.v, e.b.v);
        if (!seen.insert(key).second) return false;
    }
    return true;
}

bool inside_table(const std::set<ShapeTransition>& rel, const TransitionRelation& table) {
    for (const ShapeTransition& t : rel)
        if (!table.shapes.count(t)) return false;
    return true;
}

// ---------- ring assembly ----------

enum class RingMode { closed, minus_fragment, minus_decollineator, severed };

struct RingAssembly {
    Multipole graph;
    std::vector<CertificatePiece> pieces;
    std::vector<const Dipole*> piece_sources; // parallel to pieces
    std::vector<std::array<int, 2>> links;
    std::vector<std::vector<int>> fragment_pieces; // fragment index -> piece indices
    std::vector<int> anchors;                      // tree neighbour of each leaf, h labelling
};

void check_fragment_arity(const HalinFragment& f) {
    if (dipole_kind(f.decol) != kind22)
        throw ArityMismatch("a fragment decollineator must be a (2,2)-pole");
    if (f.blocks.empty() || dipole_kind(f.blocks[0]) != kind221)
        throw ArityMismatch("the first fragment block must be a (2,2;1)-pole");
    for (size_t b = 1; b < f.blocks.size(); ++b)
        if (dipole_kind(f.blocks[b]) != kind22)
            throw ArityMismatch("extension blocks must be (2,2)-poles");
}

RingAssembly assemble_ring(const HalinGraph& h, const std::vector<HalinFragment>& fragments,
                           RingMode mode, int cut, WeldOrientation weld) {
    RingAssembly a;
    a.anchors = leaf_anchors(h);
    int m = static_cast<int>(h.perimeter.size());
    if (static_cast<int>(fragments.size()) != m)
        throw FragmentCountMismatch("need exactly one fragment per perimeter vertex, got " +
                                    std::to_string(fragments.size()) + " for " +
                                    std::to_string(m) + " leaves");
    if (mode != RingMode::closed && (cut < 0 || cut >= m))
        throw MalformedInput("cut index out of range");

    a.fragment_pieces.assign(m, {});
    std::vector<int> block0_piece(m, -1);
    int nv = 0;
    for (int i = 0; i < m; ++i) {
        check_fragment_arity(fragments[i]);
        bool with_decol =
            !((mode == RingMode::minus_fragment || mode == RingMode::minus_decollineator) &&
              i == cut);
        bool with_blocks = !(mode == RingMode::minus_fragment && i == cut);
        auto add_piece = [&](const Dipole* d, const std::string& name, bool weighted,
                             const std::string& bound) {
            CertificatePiece p;
            p.name = name;
            p.weighted = weighted;
            p.bound = bound;
            for (int v = 0; v < d->num_vertices(); ++v) p.vertices.push_back(nv + v);
            p.input.assign(2, {-1, -1});
            p.output.assign(2, {-1, -1});
            if (weighted) p.residual.assign(1, {-1, -1});
            a.pieces.push_back(std::move(p));
            a.piece_sources.push_back(d);
            a.fragment_pieces[i].push_back(static_cast<int>(a.pieces.size()) - 1);
            nv += d->num_vertices();
        };
        std::string fi = "f" + std::to_string(i);
        if (with_decol) add_piece(&fragments[i].decol, fi + ".decol", false, "decollineator");
        if (with_blocks) {
            block0_piece[i] = static_cast<int>(a.pieces.size());
            add_piece(&fragments[i].blocks[0], fi + ".block0", true, "bipartite-weighted");
            for (size_t b = 1; b < fragments[i].blocks.size(); ++b)
                add_piece(&fragments[i].blocks[b], fi + ".block" + std::to_string(b), false,
                          "stationary");
        }
    }
    std::vector<int> internal_rank(h.graph.num_vertices(), -1);
    std::vector<int> internal_map;
    for (size_t t = 0; t < h.internal.size(); ++t) {
        internal_rank[h.internal[t]] = static_cast<int>(t);
        internal_map.push_back(nv + static_cast<int>(t));
    }
    nv += static_cast<int>(h.internal.size());

    Multipole& g = a.graph;
    g.add_vertices(nv);
    for (size_t pi = 0; pi < a.pieces.size(); ++pi) {
        const Dipole& d = *a.piece_sources[pi];
        int base = a.pieces[pi].vertices.front();
        for (const Edge& e : d.edges())
            if (e.a.is_vertex() && e.b.is_vertex()) g.add_edge(base + e.a.v, base + e.b.v);
    }
    for (const Edge& e : h.graph.edges())
        if (internal_rank[e.a.v] >= 0 && internal_rank[e.b.v] >= 0) {
            int u = internal_map[internal_rank[e.a.v]];
            int w = internal_map[internal_rank[e.b.v]];
            g.add_edge(u, w);
            a.links.push_back({u, w}); // tree edge, interior to no piece
        }

    // Absolute vertex carrying semiedge j of a piece connector (0 input,
    // 1 output, 2 residual).
    auto host = [&](int pi, int connector, int j) {
        const Dipole& d = *a.piece_sources[pi];
        int s = connector == 2 ? d.residual_semiedges()[j] : d.connectors()[connector][j];
        return a.pieces[pi].vertices.front() + semiedge_host(d, s);
    };
    auto link_edge = [&](int from_piece, int j_out, int to_piece, int j_in) {
        int u = host(from_piece, 1, j_out);
        int v = host(to_piece, 0, j_in);
        g.add_edge(u, v);
        a.links.push_back({u, v});
        a.pieces[from_piece].output[j_out] = {u, v};
        a.pieces[to_piece].input[j_in] = {v, u};
    };

    // seams between consecutive pieces of one fragment, index order
    for (int i = 0; i < m; ++i)
        for (size_t p = 0; p + 1 < a.fragment_pieces[i].size(); ++p)
            for (int j = 0; j < 2; ++j)
                link_edge(a.fragment_pieces[i][p], j, a.fragment_pieces[i][p + 1], j);

    // ring junctions between consecutive fragments
    auto sigma = [&](int j) { return weld == WeldOrientation::straight ? j : 1 - j; };
    for (int i = 0; i < m; ++i) {
        int next = (i + 1) % m;
        bool skip = (mode == RingMode::minus_fragment && (i == cut || next == cut)) ||
                    (mode == RingMode::minus_decollineator && next == cut) ||
                    (mode == RingMode::severed && next == cut);
        if (skip) continue;
        for (int j = 0; j < 2; ++j)
            link_edge(a.fragment_pieces[i].back(), j, a.fragment_pieces[next].front(), sigma(j));
    }

    // residual edges to the tree anchors
    for (int i = 0; i < m; ++i) {
        if (mode == RingMode::minus_fragment && i == cut) continue;
        int u = host(block0_piece[i], 2, 0);
        int w = internal_map[internal_rank[a.anchors[i]]];
        g.add_edge(u, w);
        a.links.push_back({u, w});
        a.pieces[block0_piece[i]].residual[0] = {u, w};
    }

    if (mode != RingMode::closed) {
        int in_piece = mode == RingMode::minus_fragment
                           ? a.fragment_pieces[(cut + 1) % m].front()
                           : a.fragment_pieces[cut].front();
        int out_piece = a.fragment_pieces[(cut + m - 1) % m].back();
        std::vector<int> in_stubs, out_stubs;
        for (int j = 0; j < 2; ++j) in_stubs.push_back(g.add_stub(host(in_piece, 0, j)));
        for (int j = 0; j < 2; ++j) out_stubs.push_back(g.add_stub(host(out_piece, 1, j)));
        g.add_connector(in_stubs);
        g.add_connector(out_stubs);
        if (mode == RingMode::minus_fragment)
            g.add_residual(g.add_stub(internal_map[internal_rank[a.anchors[cut]]]));
    }
    g.validate();
    return a;
}

// ---------- certificate construction ----------

// Enumerates the shape relation of every piece, sweeping each distinct
// structure once (the builder may hit the process-wide relation cache).
void fill_piece_relations(std::vector<CertificatePiece>& pieces,
                          const std::vector<const Dipole*>& sources, const FlowOptions& opt) {
    std::map<std::string, std::set<ShapeTransition>> done;
    for (size_t pi = 0; pi < pieces.size(); ++pi) {
        std::string key = structural_string(*sources[pi]) + (pieces[pi].weighted ? "|w" : "|u");
        auto it = done.find(key);
        if (it == done.end()) {
            TransitionRelation r =
                pieces[pi].weighted
                    ? weighted_transition_relation(*sources[pi], RelationLevel::shapes, false, opt)
                    : transition_relation(*sources[pi], RelationLevel::shapes, false, opt);
            it = done.emplace(key, std::move(r.shapes)).first;
        }
        pieces[pi].relation = it->second;
    }
}

StepRef piece_ref(int i) { return StepRef{false, i}; }
StepRef step_ref(const std::vector<CertificateStep>& steps) {
    return StepRef{true, static_cast<int>(steps.size()) - 1};
}

// Chains binary table-joins over refs; a single ref folds to itself.
StepRef fold_join(std::vector<CertificateStep>& steps, const std::vector<StepRef>& refs) {
    StepRef acc = refs.front();
    for (size_t i = 1; i < refs.size(); ++i) {
        steps.push_back({"table-join", {acc, refs[i]}});
        acc = step_ref(steps);
    }
    return acc;
}

std::vector<CertificateStep> windmill_steps(const RingAssembly& a) {
    std::vector<CertificateStep> steps;
    std::vector<StepRef> frag;
    for (int i = 0; i < 3; ++i) {
        std::vector<StepRef> refs;
        for (int pi : a.fragment_pieces[i]) refs.push_back(piece_ref(pi));
        frag.push_back(fold_join(steps, refs));
    }
    steps.push_back({"closed-walk", frag});
    return steps;
}

std::vector<CertificateStep> halin_steps(const HalinGraph& h, const RingAssembly& a) {
    std::vector<CertificateStep> steps;
    int m = static_cast<int>(h.perimeter.size());
    std::vector<int> leaf_index(h.graph.num_vertices(), -1);
    for (int i = 0; i < m; ++i) leaf_index[h.perimeter[i]] = i;
    auto adj = vertex_adjacency(h.graph);

    std::vector<StepRef> frag(m);
    for (int i = 1; i < m; ++i) {
        std::vector<StepRef> refs;
        for (int pi : a.fragment_pieces[i]) refs.push_back(piece_ref(pi));
        frag[i] = fold_join(steps, refs);
    }
    // Bound the ring minus fragment 0 by rebuilding it as nested two-pole
    // combines over the tree, rooted at the anchor of leaf 0: each internal
    // vertex joins the poles of its two branches and carries the fresh
    // residual edge towards its parent.
    auto combine = [&](auto&& self, int u, int from) -> StepRef {
        std::vector<StepRef> kids;
        for (int v : adj[u]) {
            if (v == from) continue;
            kids.push_back(leaf_index[v] >= 0 ? frag[leaf_index[v]] : self(self, v, u));
        }
        steps.push_back({"combine-square", kids});
        return step_ref(steps);
    };
    StepRef x = combine(combine, a.anchors[0], h.perimeter[0]);

    std::vector<StepRef> brefs;
    for (size_t p = 1; p < a.fragment_pieces[0].size(); ++p)
        brefs.push_back(piece_ref(a.fragment_pieces[0][p]));
    StepRef b0 = fold_join(steps, brefs);
    steps.push_back({"junction-filter", {b0, x}});
    StepRef y = step_ref(steps);
    steps.push_back({"table-join", {piece_ref(a.fragment_pieces[0][0]), y}});
    StepRef z = step_ref(steps);
    steps.push_back({"closure-stationary", {z}});
    return steps;
}

FamilyMember finish_member(const char* what, RingAssembly&& a, const std::string& kind,
                           std::vector<CertificateStep>&& steps) {
    if (!is_simple(a.graph))
        throw MalformedInput(std::string(what) + " did not assemble into a simple graph");
    FamilyMember member;
    member.graph = std::move(a.graph);
    Certificate& c = member.certificate;
    c.kind = kind;
    c.order = member.graph.num_vertices();
    c.graph6 = emit_graph6(member.graph);
    c.pieces = std::move(a.pieces);
    c.links = std::move(a.links);
    c.steps = std::move(steps);
    return member;
}

void check_pole_bookkeeping(const HalinGraph& h, const std::vector<HalinFragment>& fragments,
                            int built_order) {
    int expect = static_cast<int>(h.internal.size());
    for (const HalinFragment& f : fragments) expect += f.pole.num_vertices();
    if (expect != built_order)
        throw MalformedInput("fragment poles do not match their pieces; order bookkeeping failed");
}

// ---------- composite assembly ----------

const char* variant_name(CompositeVariant v) {
    return v == CompositeVariant::collineator_chain ? "collineator-chain" : "angle-chain";
}

} // namespace

// ---------- Halin graph construction ----------

HalinGraph build_halin(const std::string& tree_spec) {
    json j;
    try {
        j = json::parse(tree_spec);
    } catch (const json::exception& e) {
        throw InvalidTreeSpec(std::string("tree spec is not valid JSON: ") + e.what());
    }
    TreeNode root = parse_tree(j, true);

    HalinGraph h;
    auto walk = [&](auto&& self, const TreeNode& node) -> int {
        int id = h.graph.add_vertex();
        (node.kids.empty() ? h.perimeter : h.internal).push_back(id);
        for (const TreeNode& k : node.kids) h.graph.add_edge(id, self(self, k));
        return id;
    };
    walk(walk, root);
    int m = static_cast<int>(h.perimeter.size());
    for (int i = 0; i < m; ++i) h.graph.add_edge(h.perimeter[i], h.perimeter[(i + 1) % m]);
    h.graph.validate();
    return h;
}

std::string caterpillar_spec(int internal_vertices) {
    if (internal_vertices < 1)
        throw InvalidTreeSpec("a caterpillar needs at least one internal vertex");
    std::string tail = "[],[]";
    for (int i = 1; i < internal_vertices; ++i) tail = "[],[" + tail + "]";
    return "[[]," + tail + "]";
}

// ---------- fragment constructors ----------

Dipole decollineator_from_snark(const Multipole& g, int u, int v, DecollineatorEvidence evidence,
                                const FlowOptions& opt) {
    if (evidence == DecollineatorEvidence::verify) {
        FlowResult r = find_tflow(g, tetra_T0(), FlowMode::first, opt);
        if (r.flow)
            throw NotADecollineator(
                "the source graph admits a tetrahedral flow, so the pole has a collinear "
                "transition");
    }
    return remove_path(g, {u, v});
}

Dipole bipartite_block(const Multipole& g, int u, int w, int v, const FlowOptions& opt) {
    if (!is_bipartite(g)) throw NotBipartite("a block is cut from a bipartite cubic graph");
    Dipole d = remove_path(g, {u, w, v});
    TransitionRelation r = weighted_transition_relation(d, RelationLevel::shapes, false, opt);
    if (!inside_table(r.shapes, bipartite_weighted_transitions()))
        throw RelationOutsideB("the enumerated weighted relation leaves the bipartite table");
    return d;
}

HalinFragment make_halin_fragment(const Dipole& decol, const Dipole& block) {
    if (dipole_kind(decol) != kind22)
        throw ArityMismatch("a fragment decollineator must be a (2,2)-pole");
    if (dipole_kind(block) != kind221)
        throw ArityMismatch("a fragment block must be a (2,2;1)-pole");
    HalinFragment f;
    f.decol = decol;
    f.blocks = {block};
    f.pole = compose_dipoles(decol, block, ComposeOp::join);
    return f;
}

HalinFragment extend_fragment(const HalinFragment& f, const Dipole& stationary_block) {
    if (dipole_kind(stationary_block) != kind22)
        throw ArityMismatch("extension blocks must be (2,2)-poles");
    HalinFragment out = f;
    out.blocks.push_back(stationary_block);
    out.pole = compose_dipoles(out.pole, stationary_block, ComposeOp::join);
    return out;
}

namespace {

struct BlockSpec {
    const char* graph;
    int u, w, v;
};

const std::map<std::string, BlockSpec>& block_specs() {
    static const std::map<std::string, BlockSpec> specs{
        {"petersen", {"K33", 0, 3, 1}},    {"heawood", {"Heawood", 0, 1, 2}},
        {"gp83", {"GP(8,3)", 0, 1, 2}},    {"gp103", {"GP(10,3)", 0, 1, 2}},
        {"gp125", {"GP(12,5)", 0, 1, 2}},  {"q3", {"Q3", 0, 1, 3}},
    };
    return specs;
}

} // namespace

HalinFragment standard_fragment(const std::string& key, const FlowOptions& opt) {
    auto it = block_specs().find(key);
    if (it == block_specs().end()) throw MalformedInput("unknown fragment key: " + key);
    Dipole d = decollineator_from_snark(named_graph("Petersen"), 0, 1,
                                        DecollineatorEvidence::verify, opt);
    const BlockSpec& b = it->second;
    return make_halin_fragment(d, bipartite_block(named_graph(b.graph), b.u, b.w, b.v, opt));
}

HalinFragment petersen_fragment(const FlowOptions& opt) { return standard_fragment("petersen", opt); }

std::vector<std::string> fragment_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, spec] : block_specs()) keys.push_back(k);
    return keys;
}

// ---------- named tables ----------

const TransitionRelation& transition_table(const std::string& name) {
    if (name == "admissible") return admissible_transitions();
    if (name == "collinear") return collinear_transitions();
    if (name == "stationary") {
        static const TransitionRelation r = [] {
            TransitionRelation s;
            for (const auto& e : admissible_transitions().shapes)
                if (e.from == e.to) s.shapes.insert(e);
            return s;
        }();
        return r;
    }
    if (name == "decollineator") return decollineator_transitions();
    if (name == "bipartite-weighted") return bipartite_weighted_transitions();
    if (name == "halin-piece") return halin_piece_transitions();
    if (name == "halin-square") return halin_square_transitions();
    if (name == "decollineator-bipartite") {
        static const TransitionRelation r = compose_relations(
            decollineator_transitions(), bipartite_weighted_transitions(), ComposeOp::join);
        return r;
    }
    if (name == "angle-to-line") {
        static const TransitionRelation r = compose_relations(
            decollineator_transitions(), collinear_transitions(), ComposeOp::join);
        return r;
    }
    throw MalformedInput("unknown transition table: " + name);
}

// ---------- certificate JSON ----------

namespace {

json pairs_json(const std::vector<std::array<int, 2>>& v) {
    json arr = json::array();
    for (const auto& p : v) arr.push_back(json::array({p[0], p[1]}));
    return arr;
}

std::vector<std::array<int, 2>> parse_pairs(const json& j) {
    if (!j.is_array()) throw MalformedInput("expected a list of vertex pairs");
    std::vector<std::array<int, 2>> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw MalformedInput("vertex pairs have two entries");
        out.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return out;
}

json relation_entries(const std::set<ShapeTransition>& rel) {
    json arr = json::array();
    for (const auto& t : rel) {
        json e = json::array({shape_name(t.from), shape_name(t.to)});
        if (t.weight == 0)
            e.push_back(nullptr);
        else
            e.push_back(t.weight);
        arr.push_back(e);
    }
    return arr;
}

} // namespace

std::string certificate_json(const Certificate& c) {
    json j;
    j["schema"] = 1;
    j["kind"] = c.kind;
    j["order"] = c.order;
    j["graph6"] = c.graph6;
    j["pieces"] = json::array();
    for (const CertificatePiece& p : c.pieces) {
        json pj;
        pj["name"] = p.name;
        pj["weighted"] = p.weighted;
        pj["vertices"] = p.vertices;
        pj["input"] = pairs_json(p.input);
        pj["output"] = pairs_json(p.output);
        pj["residual"] = pairs_json(p.residual);
        pj["bound"] = p.bound;
        pj["relation"] = relation_entries(p.relation);
        j["pieces"].push_back(std::move(pj));
    }
    j["links"] = pairs_json(c.links);
    j["steps"] = json::array();
    for (const CertificateStep& s : c.steps) {
        json sj;
        sj["rule"] = s.rule;
        sj["inputs"] = json::array();
        for (const StepRef& r : s.inputs) {
            json rj;
            rj[r.is_step ? "step" : "piece"] = r.index;
            sj["inputs"].push_back(std::move(rj));
        }
        j["steps"].push_back(std::move(sj));
    }
    return j.dump(2);
}

Certificate parse_certificate(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("certificate is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema").get<int>() != 1) throw MalformedInput("unsupported certificate schema");
        Certificate c;
        c.kind = j.at("kind").get<std::string>();
        c.order = j.at("order").get<int>();
        c.graph6 = j.at("graph6").get<std::string>();
        for (const auto& pj : j.at("pieces")) {
            CertificatePiece p;
            p.name = pj.at("name").get<std::string>();
            p.weighted = pj.at("weighted").get<bool>();
            p.vertices = pj.at("vertices").get<std::vector<int>>();
            p.input = parse_pairs(pj.at("input"));
            p.output = parse_pairs(pj.at("output"));
            p.residual = parse_pairs(pj.at("residual"));
            p.bound = pj.at("bound").get<std::string>();
            for (const auto& ej : pj.at("relation")) {
                if (!ej.is_array() || ej.size() != 3)
                    throw MalformedInput("relation entries are [from, to, weight]");
                ShapeTransition t;
                t.from = shape_from_name(ej[0].get<std::string>());
                t.to = shape_from_name(ej[1].get<std::string>());
                t.weight = ej[2].is_null() ? 0 : ej[2].get<int>();
                if (t.weight < 0 || t.weight > 2)
                    throw MalformedInput("relation weights are 1 or 2");
                p.relation.insert(t);
            }
            c.pieces.push_back(std::move(p));
        }
        c.links = parse_pairs(j.at("links"));
        for (const auto& sj : j.at("steps")) {
            CertificateStep s;
            s.rule = sj.at("rule").get<std::string>();
            for (const auto& rj : sj.at("inputs")) {
                StepRef r;
                if (rj.contains("piece")) {
                    r = StepRef{false, rj.at("piece").get<int>()};
                } else if (rj.contains("step")) {
                    r = StepRef{true, rj.at("step").get<int>()};
                } else {
                    throw MalformedInput("step inputs reference a piece or a step");
                }
                s.inputs.push_back(r);
            }
            c.steps.push_back(std::move(s));
        }
        return c;
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("malformed certificate: ") + e.what());
    }
}

// ---------- certificate verification ----------

namespace {

struct StepValue {
    std::set<ShapeTransition> rel;
    bool weighted = false;
};

Dipole extract_piece(const Multipole& g, const CertificatePiece& p,
                     const std::vector<int>& owner, const std::vector<int>& local, int pi,
                     const std::vector<char>& is_link) {
    Dipole d;
    d.add_vertices(static_cast<int>(p.vertices.size()));
    for (size_t i = 0; i < g.edges().size(); ++i) {
        const Edge& e = g.edges()[i];
        if (!is_link[i] && owner[e.a.v] == pi && owner[e.b.v] == pi)
            d.add_edge(local[e.a.v], local[e.b.v]);
    }
    std::vector<int> in, out;
    for (const auto& b : p.input) in.push_back(d.add_stub(local[b[0]]));
    for (const auto& b : p.output) out.push_back(d.add_stub(local[b[0]]));
    d.add_connector(in);
    d.add_connector(out);
    for (const auto& b : p.residual) d.add_residual(d.add_stub(local[b[0]]));
    d.validate();
    return d;
}

} // namespace

bool verify_certificate(const Certificate& c, const Multipole& g, const FlowOptions& opt) {
    auto fail = [](const std::string& msg) { throw CertificateMismatch(msg); };

    if (c.kind != "windmill-walk" && c.kind != "halin-inductive" &&
        c.kind != "collineator-chain" && c.kind != "angle-chain")
        fail("unknown certificate kind: " + c.kind);
    if (!g.is_graph()) fail("the certified object must be a closed graph");
    int n = g.num_vertices();
    if (c.order != n) fail("order mismatch");
    Multipole stored;
    try {
        stored = parse_graph6(c.graph6);
    } catch (const Error& e) {
        throw CertificateMismatch(std::string("stored graph6 is unreadable: ") + e.what());
    }
    if (!same_labelled_graph(stored, g)) fail("the stored graph6 does not reproduce the graph");
    if (c.pieces.empty()) fail("a certificate needs at least one piece");
    if (c.steps.empty()) fail("a certificate needs at least one step");

    // piece membership and local labelling
    std::vector<int> owner(n, -1), local(n, -1);
    for (size_t pi = 0; pi < c.pieces.size(); ++pi) {
        const CertificatePiece& p = c.pieces[pi];
        if (p.vertices.empty()) fail("piece without vertices: " + p.name);
        for (size_t k = 0; k < p.vertices.size(); ++k) {
            int v = p.vertices[k];
            if (v < 0 || v >= n) fail("piece vertex out of range in " + p.name);
            if (owner[v] != -1) fail("pieces overlap at vertex " + std::to_string(v));
            owner[v] = static_cast<int>(pi);
            local[v] = static_cast<int>(k);
        }
    }

    // Every edge is either a declared link or interior to one piece.  Links
    // take precedence so ring closures landing inside a single piece (a
    // one-part composite) are still treated as boundary edges.
    auto norm = [](int a, int b) {
        return std::array<int, 2>{std::min(a, b), std::max(a, b)};
    };
    std::multiset<std::array<int, 2>> links;
    for (const auto& l : c.links) {
        if (l[0] < 0 || l[0] >= n || l[1] < 0 || l[1] >= n) fail("link endpoint out of range");
        links.insert(norm(l[0], l[1]));
    }
    std::vector<std::multiset<std::array<int, 2>>> crossing(c.pieces.size());
    std::vector<char> is_link(g.edges().size(), 0);
    for (size_t i = 0; i < g.edges().size(); ++i) {
        int u = g.edges()[i].a.v, v = g.edges()[i].b.v;
        auto it = links.find(norm(u, v));
        if (it != links.end()) {
            links.erase(it);
            is_link[i] = 1;
            if (owner[u] != -1) crossing[owner[u]].insert({u, v});
            if (owner[v] != -1) crossing[owner[v]].insert({v, u});
        } else if (owner[u] != owner[v] || owner[u] == -1) {
            fail("edge " + std::to_string(u) + "-" + std::to_string(v) +
                 " is neither inside a piece nor a declared link");
        }
    }
    if (!links.empty()) fail("declared links are not present in the graph");

    // declared boundaries match the crossing edges exactly
    for (size_t pi = 0; pi < c.pieces.size(); ++pi) {
        const CertificatePiece& p = c.pieces[pi];
        if (p.input.size() != 2 || p.output.size() != 2)
            fail("piece connectors must have two edges each: " + p.name);
        if (p.residual.size() != (p.weighted ? 1u : 0u)) fail("residual arity of " + p.name);
        std::multiset<std::array<int, 2>> declared;
        for (const auto* list : {&p.input, &p.output, &p.residual})
            for (const auto& b : *list) {
                if (b[0] < 0 || b[0] >= n || b[1] < 0 || b[1] >= n)
                    fail("boundary endpoint out of range in " + p.name);
                if (owner[b[0]] != static_cast<int>(pi))
                    fail("boundary of " + p.name + " must start inside the piece");
                declared.insert({b[0], b[1]});
            }
        if (declared != crossing[pi])
            fail("declared boundary of " + p.name + " does not match the graph");
        for (const ShapeTransition& t : p.relation)
            if (p.weighted ? (t.weight != 1 && t.weight != 2) : t.weight != 0)
                fail("relation weights of " + p.name + " do not match its arity");
    }

    // bound containment and replay jobs, one per distinct piece structure
    struct Job {
        Dipole d;
        std::set<ShapeTransition> expect;
        bool weighted = false;
        std::string names;
    };
    std::map<std::string, Job> jobs;
    for (size_t pi = 0; pi < c.pieces.size(); ++pi) {
        const CertificatePiece& p = c.pieces[pi];
        const TransitionRelation* table = nullptr;
        try {
            table = &transition_table(p.bound);
        } catch (const MalformedInput& e) {
            throw CertificateMismatch("piece " + p.name + ": " + e.what());
        }
        if (table->weighted != p.weighted) fail("bound arity of " + p.name);
        if (!inside_table(p.relation, *table))
            fail("stored relation of " + p.name + " leaves its bound " + p.bound);
        Dipole d;
        try {
            d = extract_piece(g, p, owner, local, static_cast<int>(pi), is_link);
        } catch (const Error& e) {
            throw CertificateMismatch("piece " + p.name + " does not cut out a valid pole: " +
                                      e.what());
        }
        std::string key = structural_string(d) + (p.weighted ? "|w" : "|u");
        auto [it, fresh] = jobs.try_emplace(std::move(key));
        if (fresh) {
            it->second.d = std::move(d);
            it->second.expect = p.relation;
            it->second.weighted = p.weighted;
            it->second.names = p.name;
        } else {
            if (it->second.expect != p.relation)
                fail("structurally identical pieces store different relations: " + p.name);
            it->second.names += "," + p.name;
        }
    }

    // replay each distinct structure from scratch, in parallel
    std::vector<Job*> work;
    for (auto& [key, job] : jobs) work.push_back(&job);
    std::sort(work.begin(), work.end(),
              [](const Job* a, const Job* b) { return a->d.num_vertices() > b->d.num_vertices(); });
    int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(work.size())));
    FlowOptions inner = opt;
    inner.threads = std::max(1, opt.threads / workers);
    std::atomic<size_t> next{0};
    std::mutex error_lock;
    std::string error;
    auto run_jobs = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            Job& job = *work[i];
            try {
                TransitionRelation r =
                    job.weighted ? weighted_transition_relation(job.d, RelationLevel::shapes,
                                                                false, inner, false)
                                 : transition_relation(job.d, RelationLevel::shapes, false, inner,
                                                       false);
                if (r.shapes != job.expect)
                    throw CertificateMismatch("replayed relation of " + job.names +
                                              " differs from the stored one");
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_lock);
                if (error.empty()) error = e.what();
            }
        }
    };
    if (workers == 1) {
        run_jobs();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(run_jobs);
        for (auto& t : pool) t.join();
    }
    if (!error.empty()) fail(error);

    // re-run the composition steps on the stored relations
    std::vector<StepValue> pvals;
    for (const CertificatePiece& p : c.pieces) pvals.push_back({p.relation, p.weighted});
    std::vector<StepValue> svals;
    auto deref = [&](const StepRef& r) -> const StepValue& {
        if (r.is_step) {
            if (r.index < 0 || r.index >= static_cast<int>(svals.size()))
                throw CertificateMismatch("step input references a missing step");
            return svals[r.index];
        }
        if (r.index < 0 || r.index >= static_cast<int>(pvals.size()))
            throw CertificateMismatch("step input references a missing piece");
        return pvals[r.index];
    };
    const std::set<ShapeTransition>& piece_table = transition_table("halin-piece").shapes;
    const std::set<ShapeTransition>& square_table = transition_table("halin-square").shapes;
    const std::set<ShapeTransition>& admissible = transition_table("admissible").shapes;
    for (size_t si = 0; si < c.steps.size(); ++si) {
        const CertificateStep& s = c.steps[si];
        if (s.rule != "table-join" && s.rule != "combine-square" && s.rule != "junction-filter" &&
            s.rule != "closed-walk" && s.rule != "closure-stationary")
            fail("unknown step rule: " + s.rule);
        bool terminal = s.rule == "closed-walk" || s.rule == "closure-stationary";
        if (terminal != (si + 1 == c.steps.size()))
            fail("exactly the final step must be terminal");
        size_t arity = s.rule == "closure-stationary" ? 1 : s.rule == "closed-walk" ? 3 : 2;
        if (s.inputs.size() != arity) fail("step " + s.rule + " takes " + std::to_string(arity) +
                                           " inputs");
        StepValue out;
        if (s.rule == "table-join") {
            const StepValue& a = deref(s.inputs[0]);
            const StepValue& b = deref(s.inputs[1]);
            if (a.weighted && b.weighted) fail("table-join composes at most one weighted relation");
            out.weighted = a.weighted || b.weighted;
            for (const auto& x : a.rel)
                for (const auto& y : b.rel)
                    if (x.to == y.from) out.rel.insert({x.from, y.to, x.weight + y.weight});
        } else if (s.rule == "combine-square") {
            const StepValue& a = deref(s.inputs[0]);
            const StepValue& b = deref(s.inputs[1]);
            if (!a.weighted || !b.weighted) fail("combine-square needs weighted inputs");
            for (const StepValue* v : {&a, &b})
                for (const auto& t : v->rel)
                    if (!piece_table.count(t))
                        fail("combine-square inputs must stay inside the halin-piece table");
            out.weighted = true;
            for (const auto& x : a.rel)
                for (const auto& y : b.rel) {
                    if (x.to != y.from || x.weight + y.weight > 3) continue;
                    ShapeTransition t{x.from, y.to, 3 - x.weight * y.weight};
                    if (square_table.count(t)) out.rel.insert(t);
                }
        } else if (s.rule == "junction-filter") {
            const StepValue& a = deref(s.inputs[0]);
            const StepValue& b = deref(s.inputs[1]);
            if (!a.weighted || !b.weighted) fail("junction-filter needs weighted inputs");
            out.weighted = false;
            for (const auto& x : a.rel)
                for (const auto& y : b.rel) {
                    if (x.to != y.from || x.weight != y.weight) continue;
                    ShapeTransition t{x.from, y.to, 0};
                    if (admissible.count(t)) out.rel.insert(t);
                }
        } else if (s.rule == "closed-walk") {
            const StepValue& a = deref(s.inputs[0]);
            const StepValue& b = deref(s.inputs[1]);
            const StepValue& cc = deref(s.inputs[2]);
            if (!a.weighted || !b.weighted || !cc.weighted)
                fail("closed-walk needs three weighted relations");
            for (const auto& x : a.rel)
                for (const auto& y : b.rel)
                    for (const auto& z : cc.rel)
                        if (x.to == y.from && y.to == z.from && z.to == x.from &&
                            (x.weight == 2) + (y.weight == 2) + (z.weight == 2) == 1)
                            fail(std::string("a closed walk with exactly one weight-2 step "
                                             "remains, starting at ") +
                                 shape_name(x.from));
        } else {
            const StepValue& a = deref(s.inputs[0]);
            if (a.weighted) fail("closure applies to an unweighted relation");
            for (const auto& t : a.rel)
                if (t.from == t.to)
                    fail(std::string("a stationary transition remains: ") + shape_name(t.from));
        }
        svals.push_back(std::move(out));
    }
    return true;
}

// ---------- members ----------

std::string member_json(const FamilyMember& m) {
    json j;
    j["schema"] = 1;
    j["order"] = m.graph.num_vertices();
    j["girth"] = girth(m.graph);
    try {
        j["cyclic4"] = cyclic_edge_connectivity_at_least(m.graph, 4);
    } catch (const TooLarge&) {
        j["cyclic4"] = nullptr;
    }
    j["graph6"] = m.certificate.graph6;
    j["certificate"] = json::parse(certificate_json(m.certificate));
    return j.dump(2);
}

FamilyMember windmill(const HalinFragment& f1, const HalinFragment& f2, const HalinFragment& f3,
                      WeldOrientation weld, const FlowOptions& opt) {
    HalinGraph h = build_halin("[[],[],[]]");
    std::vector<HalinFragment> fragments{f1, f2, f3};
    RingAssembly a = assemble_ring(h, fragments, RingMode::closed, 0, weld);
    check_pole_bookkeeping(h, fragments, a.graph.num_vertices());
    fill_piece_relations(a.pieces, a.piece_sources, opt);
    std::vector<CertificateStep> steps = windmill_steps(a);
    return finish_member("the windmill", std::move(a), "windmill-walk", std::move(steps));
}

FamilyMember halin_snark(const HalinGraph& h, const std::vector<HalinFragment>& fragments,
                         WeldOrientation weld, const FlowOptions& opt) {
    RingAssembly a = assemble_ring(h, fragments, RingMode::closed, 0, weld);
    check_pole_bookkeeping(h, fragments, a.graph.num_vertices());
    fill_piece_relations(a.pieces, a.piece_sources, opt);
    std::vector<CertificateStep> steps = halin_steps(h, a);
    return finish_member("the treelike snark", std::move(a), "halin-inductive", std::move(steps));
}

Dipole halin_ring_minus_fragment(const HalinGraph& h, const std::vector<HalinFragment>& fragments,
                                 int index, WeldOrientation weld) {
    return assemble_ring(h, fragments, RingMode::minus_fragment, index, weld).graph;
}

Dipole halin_ring_minus_decollineator(const HalinGraph& h,
                                      const std::vector<HalinFragment>& fragments, int index,
                                      WeldOrientation weld) {
    return assemble_ring(h, fragments, RingMode::minus_decollineator, index, weld).graph;
}

Dipole halin_ring_severed(const HalinGraph& h, const std::vector<HalinFragment>& fragments,
                          int index, WeldOrientation weld) {
    return assemble_ring(h, fragments, RingMode::severed, index, weld).graph;
}

FamilyMember even_order_family(int n, const FlowOptions& opt) {
    if (n < 42 || n % 2 != 0)
        throw UnsupportedOrder("the family covers every even order n >= 42");
    if (n % 12 == 10) {
        int k = (n - 22) / 12;
        HalinGraph h = build_halin(caterpillar_spec(k));
        std::vector<HalinFragment> fragments(h.perimeter.size(), petersen_fragment(opt));
        return halin_snark(h, fragments, WeldOrientation::straight, opt);
    }
    std::string special;
    int base = 0;
    bool two_special = false;
    switch (n % 12) {
    case 6: special = "heawood"; base = 42; break;
    case 8: special = "gp83"; base = 44; break;
    case 0: special = "gp103"; base = 48; break;
    case 2: special = "heawood"; base = 50; two_special = true; break;
    default: special = "gp125"; base = 52; break; // n % 12 == 4
    }
    HalinFragment f0 = standard_fragment(special, opt);
    Dipole insertion = remove_path(named_graph("Heawood"), {0, 1});
    for (int t = (n - base) / 12; t > 0; --t) f0 = extend_fragment(f0, insertion);
    HalinFragment f1 = two_special ? standard_fragment("heawood", opt) : petersen_fragment(opt);
    return windmill(f0, f1, petersen_fragment(opt), WeldOrientation::straight, opt);
}

FamilyMember composite_family(const std::vector<Dipole>& parts, CompositeVariant variant,
                              WeldOrientation weld, const FlowOptions& opt) {
    size_t min_parts = variant == CompositeVariant::collineator_chain ? 2 : 1;
    if (parts.size() < min_parts)
        throw InvalidParts(variant == CompositeVariant::collineator_chain
                               ? "a collineator chain needs the decollineator plus at least one "
                                 "collineator"
                               : "an angle chain needs at least one part");
    for (const Dipole& p : parts)
        if (dipole_kind(p) != kind22)
            throw InvalidParts("composite parts must be (2,2)-poles without residual edges");

    int k = static_cast<int>(parts.size());
    Certificate c;
    c.kind = variant_name(variant);
    Multipole g;
    std::vector<CertificatePiece> pieces;
    std::vector<const Dipole*> sources;
    int nv = 0;
    for (int i = 0; i < k; ++i) {
        CertificatePiece p;
        p.name = "part" + std::to_string(i);
        p.weighted = false;
        p.bound = variant == CompositeVariant::angle_chain
                      ? "angle-to-line"
                      : (i == 0 ? "decollineator" : "collinear");
        for (int v = 0; v < parts[i].num_vertices(); ++v) p.vertices.push_back(nv + v);
        p.input.assign(2, {-1, -1});
        p.output.assign(2, {-1, -1});
        pieces.push_back(std::move(p));
        sources.push_back(&parts[i]);
        nv += parts[i].num_vertices();
    }
    g.add_vertices(nv);
    for (int i = 0; i < k; ++i) {
        int base = pieces[i].vertices.front();
        for (const Edge& e : parts[i].edges())
            if (e.a.is_vertex() && e.b.is_vertex()) g.add_edge(base + e.a.v, base + e.b.v);
    }
    auto sigma = [&](int j) { return weld == WeldOrientation::straight ? j : 1 - j; };
    std::vector<std::array<int, 2>> links;
    for (int i = 0; i < k; ++i) {
        int next = (i + 1) % k;
        for (int j = 0; j < 2; ++j) {
            int u = pieces[i].vertices.front() +
                    semiedge_host(parts[i], parts[i].connectors()[1][j]);
            int v = pieces[next].vertices.front() +
                    semiedge_host(parts[next], parts[next].connectors()[0][sigma(j)]);
            g.add_edge(u, v);
            links.push_back({u, v});
            pieces[i].output[j] = {u, v};
            pieces[next].input[sigma(j)] = {v, u};
        }
    }
    g.validate();
    if (!is_simple(g)) throw InvalidParts("the composite closure is not a simple graph");

    fill_piece_relations(pieces, sources, opt);

    std::vector<StepRef> refs;
    for (int i = 0; i < k; ++i) refs.push_back(piece_ref(i));
    std::vector<CertificateStep> steps;
    StepRef folded = fold_join(steps, refs);
    steps.push_back({"closure-stationary", {folded}});

    FamilyMember member;
    member.graph = std::move(g);
    c.order = member.graph.num_vertices();
    c.graph6 = emit_graph6(member.graph);
    c.pieces = std::move(pieces);
    c.links = std::move(links);
    c.steps = std::move(steps);
    member.certificate = std::move(c);
    return member;
}

} // namespace snarkforge
