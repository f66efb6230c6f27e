#pragma once
// Transition relations of dipoles: which input-pair -> output-pair value
// combinations a (2,2)-pole or (2,2;1)-pole admits under tetrahedral flows,
// at the exact pair level and at the shape level; relation and dipole
// composition, dipole classification, admissibility checking, and the named
// constant relations the snark certificates are checked against.
//
// All pair-level data lives in the canonical tetrahedron T0.

#include <array>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "snarkforge/flows.hpp"
#include "snarkforge/geometry.hpp"
#include "snarkforge/multipole.hpp"

namespace snarkforge {

// weight == 0 means unweighted (from a (2,2)-pole); 1 or 2 is the weight of
// the residual value (from a (2,2;1)-pole).
struct ShapeTransition {
    Shape from{};
    Shape to{};
    int weight = 0;
    auto operator<=>(const ShapeTransition&) const = default;
};

// Value pairs are unordered and stored ascending; degenerate {x,x} allowed.
struct PairTransition {
    std::array<Point4, 2> in{};
    std::array<Point4, 2> out{};
    int residual_weight = 0;
    auto operator<=>(const PairTransition&) const = default;
};

// The shape level is always present; the pair level only when the relation
// was enumerated from a dipole at pair level (shapes are then derived from
// the pairs, never stored independently).  `weighted` distinguishes an empty
// (2,2;1)-pole relation from an empty (2,2)-pole relation.
struct TransitionRelation {
    bool weighted = false;
    std::set<ShapeTransition> shapes;
    std::optional<std::set<PairTransition>> pairs;
};

enum class RelationLevel { shapes, pairs };

// Relation of a (2,2)-pole: every T0-flow contributes ({values on the input
// connector}, {values on the output connector}).  split_degenerate keeps the
// degenerate shapes dc/dm apart instead of merging them into dpt.  Boundary
// sweeps are cached per dipole structure, so repeated calls are cheap;
// use_cache = false forces a fresh sweep (certificate replay wants results
// that do not depend on anything a builder computed earlier).
// Throws ArityMismatch unless d is a (2,2)-pole.
TransitionRelation transition_relation(const Dipole& d,
                                       RelationLevel level = RelationLevel::pairs,
                                       bool split_degenerate = false,
                                       const FlowOptions& opt = {},
                                       bool use_cache = true);

// Relation of a (2,2;1)-pole; each transition carries the weight (1 or 2)
// of the value on the residual edge.  Throws ArityMismatch otherwise.
TransitionRelation weighted_transition_relation(const Dipole& d,
                                                RelationLevel level = RelationLevel::pairs,
                                                bool split_degenerate = false,
                                                const FlowOptions& opt = {},
                                                bool use_cache = true);

enum class ComposeOp { join, odot };

// Shape-level relational composition through a shared middle shape.
// join: at most one operand weighted, the weight is inherited.  odot: both
// operands weighted; entries with residual weights i, j compose only when
// i + j <= 3, and the composite weight is k = 3 - i*j.  The result carries
// no pair level.  Throws WeightArityMismatch on the wrong weight arity.
TransitionRelation compose_relations(const TransitionRelation& r1,
                                     const TransitionRelation& r2, ComposeOp op);

// join: connects the output connector of m1 to the input connector of m2
// end by end (sizes must match); the result keeps m1's input and m2's
// output, and the residual semiedges of both.  odot: joins two (2,2;1)-poles
// and attaches their two residual semiedges to a fresh vertex carrying one
// new residual edge.  Throws ArityMismatch on wrong connector sizes.
Dipole compose_dipoles(const Dipole& m1, const Dipole& m2, ComposeOp op);

enum class DipoleClass { stationary, decollineator, deangulator, collineator };
const char* dipole_class_name(DipoleClass c);

// Tags from the shape level (degenerate shapes merged first):
// stationary    - no ls->ang and no ang->ls,
// decollineator - no ls->ls and no hl->hl,
// deangulator   - no ang->ang,
// collineator   - relation contained in {ls->ls, hl->hl}.
std::set<DipoleClass> classify_relation(const TransitionRelation& r);
std::set<DipoleClass> classify_dipole(const Dipole& d, const FlowOptions& opt = {});

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<std::string> violations; // one human-readable line each
};

// Checks an unweighted relation against the admissible set: every shape
// entry must lie in admissible_transitions(), and when the pair level is
// present it must satisfy the pair refinements: equal input and output sums
// (the trace), hl->hl keeping the half-line target, ls->ls being the
// identity, ang->ls producing the corner pair of the trace, and alt->alt
// staying in the triangle.  Throws WeightArityMismatch on a weighted input.
AdmissibilityReport check_admissible(const TransitionRelation& r);

// True iff every flow-realisable value triple on the three dangling edges
// of g with vertex v removed forms a line of the tetrahedron (never a
// circle).  Holds for every vertex of a bipartite cubic graph; fails for
// some vertices of non-bipartite graphs such as the Petersen graph.
bool bip_3pole_check(const Multipole& g, int v, const FlowOptions& opt = {});

// Named constant relations (shape level, merged alphabet, immutable).
// Every transition any (2,2)-pole admits lies in this 8-entry set.
const TransitionRelation& admissible_transitions();
// {ls->ls, hl->hl}: what a collineator may admit.
const TransitionRelation& collinear_transitions();
// The admissible non-collinear transitions (6 entries); the relation of a
// decollineator is contained in this set, and the (2,2)-pole obtained from
// the Petersen graph by removing two adjacent vertices attains all of it.
const TransitionRelation& decollineator_transitions();
// The 18 weighted transitions a bipartite (2,2;1)-pole may admit; the
// Heawood-graph (2,2;1)-pole attains all of them.
const TransitionRelation& bipartite_weighted_transitions();
// Relation bound for the pieces of the treelike snark construction:
// decollineator_transitions composed with bipartite_weighted_transitions,
// plus ax ->1 hl and ls ->1 hl.  17 entries.
const TransitionRelation& halin_piece_transitions();
// Bound for the odot-square of two pieces: halin_piece odot halin_piece
// minus {dpt ->1 alt, alt ->1 dpt}.  8 entries.
const TransitionRelation& halin_square_transitions();

// {"shapes":[["ang","ls",null],...]} plus "pairs" when present.
std::string relation_json(const TransitionRelation& r);
// DOT digraph over shape nodes for visual diffing of relation diagrams.
std::string relation_dot(const TransitionRelation& r);

} // namespace snarkforge
