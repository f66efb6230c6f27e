#pragma once
// Snark families with perfect matching index at least 5: Halin graphs and
// ring fragments, windmill and treelike snarks, an even-order family for
// every even order >= 42, and composite families chained from certified
// (2,2)-poles.  Every constructed graph carries a relation certificate whose
// verification re-enumerates the transition relation of each piece and
// re-runs the composition steps, independently of the builder.

#include <array>
#include <set>
#include <string>
#include <vector>

#include "snarkforge/errors.hpp"
#include "snarkforge/flows.hpp"
#include "snarkforge/multipole.hpp"
#include "snarkforge/transitions.hpp"

namespace snarkforge {

// A Halin graph: a plane tree without 2-valent vertices plus the circuit
// through its leaves in plane order.  `perimeter` lists the leaves in
// circuit order, `internal` the remaining tree vertices.
struct HalinGraph {
    Multipole graph;
    std::vector<int> perimeter;
    std::vector<int> internal;
};

// Builds a Halin graph from a nested-list tree: the root carries exactly
// three subtrees, every other internal vertex exactly two (a single subtree
// would leave a 2-valent vertex), and leaves are empty lists.  Vertices are
// numbered in depth-first preorder, so the leaf circuit follows the plane
// order.  "[[],[],[]]" gives K4 and "[[],[],[[],[]]]" the triangular prism.
// Throws InvalidTreeSpec on malformed JSON or wrong child counts.
HalinGraph build_halin(const std::string& tree_spec);

// The nested-list spec of the caterpillar tree with k >= 1 internal
// vertices (k + 2 leaves); k = 1 is the K4 tree.
std::string caterpillar_spec(int internal_vertices);

enum class DecollineatorEvidence { verify, trusted };

// The (2,2)-pole G_uv obtained by removing the adjacent vertices u, v from
// a cubic graph with no tetrahedral flow.  Graphs without a flow are exactly
// the graphs whose G_uv admits no collinear transition, so `verify` runs the
// flow search on g and throws NotADecollineator if a flow exists; `trusted`
// skips the search (for large inputs whose index is certified elsewhere).
Dipole decollineator_from_snark(const Multipole& g, int u, int v,
                                DecollineatorEvidence evidence = DecollineatorEvidence::verify,
                                const FlowOptions& opt = {});

// The (2,2;1)-pole G_uwv obtained by removing the path u-w-v from a
// bipartite cubic graph; its weighted relation is enumerated and checked
// against the bipartite table.  Throws NotBipartite or RelationOutsideB.
Dipole bipartite_block(const Multipole& g, int u, int w, int v, const FlowOptions& opt = {});

// A ring fragment: a decollineator joined with a bipartite block and
// optionally further stationary collineator blocks.  `pole` is the joined
// (2,2;1)-pole decol o blocks[0] o blocks[1] o ...; blocks[0] carries the
// residual edge.  The pieces are kept separately so certificates can replay
// each of them instead of the whole fragment.
struct HalinFragment {
    Dipole decol;
    std::vector<Dipole> blocks;
    Dipole pole;
};

// Joins a (2,2)-pole decollineator with a (2,2;1)-pole block.
HalinFragment make_halin_fragment(const Dipole& decol, const Dipole& block);

// Appends a stationary (2,2)-pole (one whose relation fixes every shape,
// such as the Heawood graph minus two adjacent vertices) after the
// fragment's blocks; certificates bound such blocks by the stationary
// table, so extending with anything else produces a certificate that fails
// to verify.
HalinFragment extend_fragment(const HalinFragment& f, const Dipole& stationary_block);

// Catalog fragments: the 8-vertex Petersen decollineator joined with a
// bipartite block cut from the named graph.  Keys: petersen (K33 block,
// 11 vertices), heawood (19), gp83 (21), gp103 (25), gp125 (29), q3 (13).
// Edge and path choices are the lexicographically first valid ones.
HalinFragment standard_fragment(const std::string& key, const FlowOptions& opt = {});
HalinFragment petersen_fragment(const FlowOptions& opt = {});
std::vector<std::string> fragment_keys();

// Named relation tables certificates refer to: "admissible", "collinear",
// "stationary" (the six shape-fixing admissible transitions),
// "decollineator", "bipartite-weighted", "halin-piece", "halin-square",
// "decollineator-bipartite" (join of the decollineator and bipartite
// tables) and "angle-to-line" (join of the decollineator and collinear
// tables, = {ang -> ls}).  Throws MalformedInput on an unknown name.
const TransitionRelation& transition_table(const std::string& name);

// One replayable piece of a certificate: a subgraph of the member given by
// its vertex list (local ids = list positions), its boundary edges as
// {inside, outside} vertex pairs in connector order, the enumerated shape
// relation, and the named table bounding it.
struct CertificatePiece {
    std::string name;
    bool weighted = false;
    std::vector<int> vertices;
    std::vector<std::array<int, 2>> input;
    std::vector<std::array<int, 2>> output;
    std::vector<std::array<int, 2>> residual;
    std::string bound;
    std::set<ShapeTransition> relation;
};

// Step input: an enumerated piece relation or the result of an earlier step.
struct StepRef {
    bool is_step = false;
    int index = 0;
};

// Composition steps, applied to the stored piece relations:
//   table-join        r1 o r2 through the shared middle shape (weight sums)
//   combine-square    both inputs within the halin-piece table; result is
//                     their odot composite meeted with the halin-square table
//   junction-filter   weighted relations sharing one residual edge: compose
//                     through equal middle shape and equal weight, then meet
//                     with the admissible table (result unweighted)
//   closed-walk       terminal: fails iff the three inputs admit a directed
//                     closed walk with exactly one weight-2 step
//   closure-stationary terminal: fails iff the input contains some s -> s
struct CertificateStep {
    std::string rule;
    std::vector<StepRef> inputs;
};

struct Certificate {
    std::string kind; // windmill-walk | halin-inductive | collineator-chain | angle-chain
    int order = 0;
    std::string graph6;
    std::vector<CertificatePiece> pieces;
    std::vector<std::array<int, 2>> links; // every member edge not internal to a piece
    std::vector<CertificateStep> steps;
};

std::string certificate_json(const Certificate& c);
Certificate parse_certificate(const std::string& text); // MalformedInput

// Replays the certificate against g: the stored graph6 must reproduce g,
// the pieces must tile g with the declared boundary edges and `links`
// accounting for every edge, each piece's relation is re-enumerated from
// scratch (bypassing the relation cache) and compared to the stored one and
// to its named bound, and the steps are re-run on the stored relations with
// the terminal step confirming that no stationary closure transition
// remains.  Returns true; throws CertificateMismatch on any failure.
// Distinct piece structures are swept once and in parallel per opt.threads.
bool verify_certificate(const Certificate& c, const Multipole& g, const FlowOptions& opt = {});

struct FamilyMember {
    Multipole graph;
    Certificate certificate;
};

// {"schema":1, order, girth, cyclic4, graph6, certificate}; cyclic4 is null
// when the graph is too large for the exhaustive cut check.
std::string member_json(const FamilyMember& m);

// Orientation of the ring junctions between consecutive fragments: straight
// welds output j to input j, crossed to input 1-j.  The certificates hold
// for either choice.
enum class WeldOrientation { straight, crossed };

// Ring of three fragments around a hub vertex carrying the residual edges;
// certified by the absence of a directed closed 3-walk with exactly one
// weight-2 step (the hub forces a line, and every line has weights 1,1,2).
FamilyMember windmill(const HalinFragment& f1, const HalinFragment& f2, const HalinFragment& f3,
                      WeldOrientation weld = WeldOrientation::straight,
                      const FlowOptions& opt = {});

// Substitutes fragment i for perimeter vertex i of a Halin graph: ring
// junctions between consecutive fragments, residual edges to the tree
// neighbours, tree kept as is.  Certified by the inductive chain: fragment
// relations fold inside the halin-piece table, tree-guided combine-square
// steps bound the ring minus fragment 0 by the halin-square table, the
// junction-filter and the final join with fragment 0's decollineator leave
// at most {ang -> ls}, which admits no stationary closure transition.
// Throws FragmentCountMismatch.
FamilyMember halin_snark(const HalinGraph& h, const std::vector<HalinFragment>& fragments,
                         WeldOrientation weld = WeldOrientation::straight,
                         const FlowOptions& opt = {});

// The cut-open forms of the ring, as used by the relation theorems.  All
// three keep the vertex layout of the closed member where possible:
//   minus fragment `index`:      (2,2;1)-pole, input = the input connector
//     of fragment index+1, output = the output of fragment index-1,
//     residual = the freed edge at the tree neighbour of leaf `index`;
//   minus the decollineator of fragment `index`: (2,2)-pole, input = the
//     first block's input of fragment index, output = fragment index-1's;
//   severed before fragment `index` (ring junction index-1 -> index
//     removed): (2,2)-pole whose closure is the member graph again.
Dipole halin_ring_minus_fragment(const HalinGraph& h, const std::vector<HalinFragment>& fragments,
                                 int index, WeldOrientation weld = WeldOrientation::straight);
Dipole halin_ring_minus_decollineator(const HalinGraph& h,
                                      const std::vector<HalinFragment>& fragments, int index,
                                      WeldOrientation weld = WeldOrientation::straight);
Dipole halin_ring_severed(const HalinGraph& h, const std::vector<HalinFragment>& fragments,
                          int index, WeldOrientation weld = WeldOrientation::straight);

// A nontrivial snark of every even order n >= 42: orders 10 mod 12 come
// from caterpillar treelike snarks with petersen fragments, the other
// residues from windmills whose first fragment uses a heawood, gp83, gp103,
// gp125 or a second heawood block, plus Heawood edge-cut collineator
// insertions adding 12 vertices each.  Throws UnsupportedOrder for odd n or
// n < 42.
FamilyMember even_order_family(int n, const FlowOptions& opt = {});

// Composite members from certified (2,2)-poles joined in a ring.
//   collineator_chain: parts[0] bounded by the decollineator table, the
//     rest by the collinear table; the folded relation lies in
//     {ang -> ls}, which has no stationary transition.
//   angle_chain: every part bounded by the angle-to-line table; the fold of
//     two or more copies of {ang -> ls} is empty.
// The builder checks arity and count only; the relation bounds are enforced
// when the certificate is verified (each part is one piece).  Throws
// InvalidParts on wrong arity, residual edges, too few parts, or a
// non-simple closure.
enum class CompositeVariant { collineator_chain, angle_chain };
FamilyMember composite_family(const std::vector<Dipole>& parts, CompositeVariant variant,
                              WeldOrientation weld = WeldOrientation::straight,
                              const FlowOptions& opt = {});

// Family members up to this order also get a direct flow search in tests
// and the CLI; beyond it only the certificate path runs.
inline constexpr int default_direct_search_cap = 60;

} // namespace snarkforge
