// Command-line front end.  Four commands: `generate` builds a snark family
// member, verifies its relation certificate, and writes graph6 + metadata
// JSON; `pmi` computes the perfect matching index of a cubic graph with a
// witness file; `transitions` prints the transition relation of a dipole cut
// from a graph; `cfn` prints a circular flow number evidence ladder.
//
// Exit codes: 0 success, 1 property not satisfied (failed certificate or
// --assert-ge), 2 usage or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "snarkforge/families.hpp"
#include "snarkforge/flows.hpp"
#include "snarkforge/multipole.hpp"
#include "snarkforge/transitions.hpp"

namespace {

using nlohmann::json;
using namespace snarkforge;

// Exit statuses distinguished by the error mapping in main().
constexpr int exit_ok = 0;
constexpr int exit_unsatisfied = 1;
constexpr int exit_usage = 2;

struct PropertyNotSatisfied : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int env_threads() {
    const char* v = std::getenv("SNARKFORGE_THREADS");
    if (v == nullptr) return 1;
    int n = std::atoi(v);
    return n >= 1 ? n : 1;
}

Multipole read_graph_file(const std::string& path) {
    std::string line;
    if (path == "-") {
        if (!std::getline(std::cin, line))
            throw MalformedInput("no graph6 line on standard input");
    } else {
        std::ifstream in(path);
        if (!in) throw MalformedInput("cannot open " + path);
        if (!std::getline(in, line)) throw MalformedInput(path + " is empty");
    }
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return parse_graph6(line);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw MalformedInput("cannot write " + path);
    out << content;
    if (!out.good()) throw MalformedInput("short write to " + path);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
}

std::vector<int> parse_path_spec(const std::string& s) {
    std::vector<int> path;
    for (const std::string& tok : split_commas(s)) {
        try {
            size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
            path.push_back(v);
        } catch (const std::exception&) {
            throw MalformedInput("--path wants comma-separated vertex ids, got '" + s + "'");
        }
    }
    return path;
}

// ---------- generate ----------

struct GenerateOptions {
    std::string fragments = "petersen,petersen,petersen";
    std::string tree;
    std::string weld = "straight";
    std::string variant;
    std::string out;
    int n = 0;
    int k = 1;
    // Certificate sweeps are exhaustive; the default leaves room for the
    // largest catalogued blocks.
    long long budget = 100'000'000'000;
    int threads = env_threads();
};

WeldOrientation parse_weld(const std::string& w) {
    if (w == "straight") return WeldOrientation::straight;
    if (w == "crossed") return WeldOrientation::crossed;
    throw MalformedInput("--weld wants straight or crossed, got '" + w + "'");
}

std::vector<HalinFragment> load_fragments(const std::string& spec, const FlowOptions& opt) {
    std::vector<HalinFragment> fragments;
    for (const std::string& key : split_commas(spec)) fragments.push_back(standard_fragment(key, opt));
    return fragments;
}

int emit_member(const std::string& family, const FamilyMember& m, const FlowOptions& opt,
                std::string out_prefix) {
    if (!verify_certificate(m.certificate, m.graph, opt))
        throw CertificateMismatch("certificate replay failed");
    if (out_prefix.empty()) out_prefix = family + "-" + std::to_string(m.certificate.order);

    const std::string g6_path = out_prefix + ".g6";
    const std::string meta_path = out_prefix + ".json";
    write_file(g6_path, emit_graph6(m.graph) + "\n");
    write_file(meta_path, member_json(m) + "\n");

    json meta = json::parse(member_json(m));
    json report = {
        {"schema", 1},
        {"family", family},
        {"kind", m.certificate.kind},
        {"order", meta["order"]},
        {"girth", meta["girth"]},
        {"cyclic4", meta["cyclic4"]},
        {"pmi", ">=5"},
        {"certificate", "verified"},
        {"files", {{"graph6", g6_path}, {"metadata", meta_path}}},
    };
    std::cout << report.dump(2) << "\n";
    return exit_ok;
}

int cmd_generate_windmill(const GenerateOptions& o) {
    FlowOptions opt{.node_budget = o.budget, .threads = o.threads, .sink = {}};
    std::vector<HalinFragment> f = load_fragments(o.fragments, opt);
    if (f.size() != 3)
        throw FragmentCountMismatch("windmill wants exactly 3 fragments, got " +
                                    std::to_string(f.size()));
    return emit_member("windmill", windmill(f[0], f[1], f[2], parse_weld(o.weld), opt), opt, o.out);
}

int cmd_generate_treelike(const GenerateOptions& o) {
    FlowOptions opt{.node_budget = o.budget, .threads = o.threads, .sink = {}};
    HalinGraph h = build_halin(caterpillar_spec(o.k));
    std::vector<HalinFragment> f;
    if (o.fragments == "petersen,petersen,petersen" && h.perimeter.size() != 3)
        f.assign(h.perimeter.size(), petersen_fragment(opt));
    else
        f = load_fragments(o.fragments, opt);
    return emit_member("treelike", halin_snark(h, f, parse_weld(o.weld), opt), opt, o.out);
}

int cmd_generate_halin(const GenerateOptions& o) {
    FlowOptions opt{.node_budget = o.budget, .threads = o.threads, .sink = {}};
    HalinGraph h = build_halin(o.tree);
    std::vector<HalinFragment> f;
    if (o.fragments == "petersen,petersen,petersen" && h.perimeter.size() != 3)
        f.assign(h.perimeter.size(), petersen_fragment(opt));
    else
        f = load_fragments(o.fragments, opt);
    return emit_member("halin", halin_snark(h, f, parse_weld(o.weld), opt), opt, o.out);
}

int cmd_generate_even_order(const GenerateOptions& o) {
    FlowOptions opt{.node_budget = o.budget, .threads = o.threads, .sink = {}};
    return emit_member("even-order", even_order_family(o.n, opt), opt, o.out);
}

int cmd_generate_composite(const GenerateOptions& o) {
    FlowOptions opt{.node_budget = o.budget, .threads = o.threads, .sink = {}};
    if (o.k < 1) throw InvalidParts("--k wants at least 1 chain link");

    // Chain links are rings of three Petersen fragments with one piece
    // removed (g1) or one junction severed (g2); both closures are members
    // of the windmill family, so their relation bounds are the certified
    // ones.
    HalinGraph h = build_halin(caterpillar_spec(1));
    std::vector<HalinFragment> f(3, petersen_fragment(opt));
    WeldOrientation weld = parse_weld(o.weld);

    std::vector<Dipole> parts;
    CompositeVariant variant;
    if (o.variant == "g1") {
        variant = CompositeVariant::collineator_chain;
        parts.push_back(f[0].decol);
        for (int i = 0; i < o.k; ++i) parts.push_back(halin_ring_minus_decollineator(h, f, 0, weld));
    } else if (o.variant == "g2") {
        variant = CompositeVariant::angle_chain;
        for (int i = 0; i < o.k; ++i) parts.push_back(halin_ring_severed(h, f, 0, weld));
    } else {
        throw MalformedInput("--variant wants g1 or g2, got '" + o.variant + "'");
    }
    FamilyMember m = composite_family(parts, variant, weld, opt);
    return emit_member("composite-" + o.variant, m, opt, o.out);
}

// ---------- pmi ----------

struct PmiOptions {
    std::string input;
    std::string witness;
    long long budget = 10'000'000;
    int direct_cap = default_direct_search_cap;
    int assert_ge = 0;
    int threads = env_threads();
};

int cmd_pmi(const PmiOptions& o) {
    Multipole g = read_graph_file(o.input);
    if (g.num_vertices() > o.direct_cap)
        throw TooLarge("direct search is capped at " + std::to_string(o.direct_cap) +
                       " vertices (" + std::to_string(g.num_vertices()) +
                       " given); raise --direct-cap to override");
    FlowOptions opt{.node_budget = o.budget, .threads = o.threads, .sink = {}};
    PMIResult r = perfect_matching_index(g, opt);

    std::string witness_path = o.witness;
    if (witness_path.empty()) witness_path = (o.input == "-" ? "witness" : o.input) + ".witness.json";
    json witness = {{"schema", 1}, {"pmi", pmi_value_name(r.value)}};
    if (r.cover) witness["cover"] = json::parse(cover_json(*r.cover));
    if (r.flow) witness["flow"] = json::parse(flow_json(*r.flow));
    write_file(witness_path, witness.dump(2) + "\n");

    json report = {
        {"schema", 1},
        {"order", g.num_vertices()},
        {"pmi", pmi_value_name(r.value)},
        {"witness", witness_path},
    };
    std::cout << report.dump(2) << "\n";

    int value = r.value == PMIValue::three ? 3 : r.value == PMIValue::four ? 4 : 5;
    if (o.assert_ge > 0 && value < o.assert_ge)
        throw PropertyNotSatisfied("perfect matching index " + std::to_string(value) +
                                   " is below the asserted bound " + std::to_string(o.assert_ge));
    return exit_ok;
}

// ---------- transitions ----------

struct TransitionsOptions {
    std::string input;
    std::string path;
    bool weighted = false;
    bool split_degenerate = false;
    bool dot = false;
    long long budget = 10'000'000;
    int threads = env_threads();
};

int cmd_transitions(const TransitionsOptions& o) {
    Multipole g = read_graph_file(o.input);
    std::vector<int> path = parse_path_spec(o.path);
    if (path.size() != 2 && path.size() != 3)
        throw MalformedInput("--path wants two vertices u,v or three vertices u,w,v");
    if (o.weighted && path.size() != 3)
        throw MalformedInput("--weighted applies to a three-vertex path u,w,v");

    Dipole d = remove_path(g, path);
    FlowOptions opt{.node_budget = o.budget, .threads = o.threads, .sink = {}};
    TransitionRelation r = path.size() == 3
        ? weighted_transition_relation(d, RelationLevel::pairs, o.split_degenerate, opt)
        : transition_relation(d, RelationLevel::pairs, o.split_degenerate, opt);

    if (o.dot) {
        std::cout << relation_dot(r);
        return exit_ok;
    }
    json report = {
        {"schema", 1},
        {"kind", path.size() == 3 ? "(2,2;1)-pole" : "(2,2)-pole"},
        {"relation", json::parse(relation_json(r))},
    };
    if (!r.weighted) {
        json classes = json::array();
        for (DipoleClass c : classify_relation(r)) classes.push_back(dipole_class_name(c));
        report["classes"] = classes;
    }
    std::cout << report.dump(2) << "\n";
    return exit_ok;
}

// ---------- cfn ----------

struct CfnOptions {
    std::string input;
    int qmax = 2;
    int exact_cap = 8;
    long long budget = 10'000'000;
};

int cmd_cfn(const CfnOptions& o) {
    Multipole g = read_graph_file(o.input);
    if (has_bridge(g))
        throw NotBridgeless("a graph with a bridge has no nowhere-zero flow of any kind");
    CnzfLadder l = circular_flow_lower_bound(g, o.qmax, o.exact_cap, o.budget);

    json entries = json::array();
    for (const CnzfEntry& e : l.entries)
        entries.push_back({{"p", e.r.p}, {"q", e.r.q}, {"exists", e.exists}});
    json report = {
        {"schema", 1},
        {"order", g.num_vertices()},
        {"entries", entries},
        {"statement", l.statement},
        {"exact", l.exact ? json({{"p", l.exact->p}, {"q", l.exact->q}}) : json(nullptr)},
    };
    std::cout << report.dump(2) << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"snarkforge: snark families with relation certificates, perfect matching "
                 "indices, dipole transition relations, and circular flow bounds"};
    app.require_subcommand(1);

    GenerateOptions go;
    CLI::App* gen = app.add_subcommand("generate", "Build a family member, verify its "
                                       "certificate, and write graph6 + metadata JSON");
    gen->require_subcommand(1);
    auto add_common = [&](CLI::App* c) {
        c->add_option("--out", go.out, "Output prefix for .g6 and .json files");
        c->add_option("--budget", go.budget, "Search node budget for relation sweeps");
        c->add_option("--threads", go.threads, "Worker threads for certificate replay");
    };
    CLI::App* gw = gen->add_subcommand("windmill", "Three fragments welded around a hub");
    gw->add_option("--fragments", go.fragments, "Comma-separated fragment keys (exactly 3)");
    gw->add_option("--weld", go.weld, "Junction orientation: straight or crossed");
    add_common(gw);
    CLI::App* gt = gen->add_subcommand("treelike", "Caterpillar-tree member with k+2 fragments");
    gt->add_option("--k", go.k, "Caterpillar length; order is 12(k+1)+10 with petersen fragments");
    gt->add_option("--fragments", go.fragments, "Comma-separated fragment keys (one per leaf)");
    gt->add_option("--weld", go.weld, "Junction orientation: straight or crossed");
    add_common(gt);
    CLI::App* gh = gen->add_subcommand("halin", "Member over an arbitrary tree");
    gh->add_option("--tree", go.tree, "Tree as nested JSON lists, e.g. [[],[],[[],[]]]")
        ->required();
    gh->add_option("--fragments", go.fragments, "Comma-separated fragment keys (one per leaf)");
    gh->add_option("--weld", go.weld, "Junction orientation: straight or crossed");
    add_common(gh);
    CLI::App* ge = gen->add_subcommand("even-order", "Member of any even order >= 42");
    ge->add_option("--n", go.n, "Number of vertices (even, at least 42)")->required();
    add_common(ge);
    CLI::App* gc = gen->add_subcommand("composite", "Chain of certified poles, closed into a ring");
    gc->add_option("--variant", go.variant, "g1 (collineator chain) or g2 (angle chain)")
        ->required();
    gc->add_option("--k", go.k, "Number of chain links");
    gc->add_option("--weld", go.weld, "Junction orientation: straight or crossed");
    add_common(gc);

    PmiOptions po;
    CLI::App* pmi = app.add_subcommand("pmi", "Perfect matching index of a cubic graph");
    pmi->add_option("input", po.input, "graph6 file, or - for stdin")->required();
    pmi->add_option("--budget", po.budget, "Search node budget");
    pmi->add_option("--direct-cap", po.direct_cap, "Largest order searched directly");
    pmi->add_option("--assert-ge", po.assert_ge, "Exit 1 unless the index reaches this value");
    pmi->add_option("--witness", po.witness, "Witness file path (default: INPUT.witness.json)");
    pmi->add_option("--threads", po.threads, "Worker threads");

    TransitionsOptions to;
    CLI::App* tr = app.add_subcommand("transitions", "Transition relation of a dipole cut "
                                      "from a graph by removing a path");
    tr->add_option("input", to.input, "graph6 file, or - for stdin")->required();
    tr->add_option("--path", to.path, "Vertices to remove: u,v for a (2,2)-pole, "
                   "u,w,v for a (2,2;1)-pole")->required();
    tr->add_flag("--weighted", to.weighted, "Expect the weighted relation of a (2,2;1)-pole");
    tr->add_flag("--split-degenerate", to.split_degenerate,
                 "Keep the two degenerate shapes apart");
    tr->add_flag("--dot", to.dot, "Emit a DOT digraph instead of JSON");
    tr->add_option("--budget", to.budget, "Search node budget");
    tr->add_option("--threads", to.threads, "Worker threads");

    CfnOptions co;
    CLI::App* cfn = app.add_subcommand("cfn", "Circular flow number evidence ladder");
    cfn->add_option("input", co.input, "graph6 file, or - for stdin")->required();
    cfn->add_option("--qmax", co.qmax, "Largest denominator tested");
    cfn->add_option("--exact-cap", co.exact_cap, "Largest order for exact gap sweeps");
    cfn->add_option("--budget", co.budget, "Search node budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (gen->parsed()) {
            if (gw->parsed()) return cmd_generate_windmill(go);
            if (gt->parsed()) return cmd_generate_treelike(go);
            if (gh->parsed()) return cmd_generate_halin(go);
            if (ge->parsed()) return cmd_generate_even_order(go);
            if (gc->parsed()) return cmd_generate_composite(go);
        }
        if (pmi->parsed()) return cmd_pmi(po);
        if (tr->parsed()) return cmd_transitions(to);
        if (cfn->parsed()) return cmd_cfn(co);
        std::cerr << "error: no command\n";
        return exit_usage;
    } catch (const PropertyNotSatisfied& e) {
        std::cerr << "unsatisfied: " << e.what() << "\n";
        return exit_unsatisfied;
    } catch (const CertificateMismatch& e) {
        std::cerr << "unsatisfied: " << e.what() << "\n";
        return exit_unsatisfied;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
