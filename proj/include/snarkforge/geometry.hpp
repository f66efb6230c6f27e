#pragma once
// Incidence geometry of PG(3,2).  Points are the 15 nonzero 4-bit vectors
// over GF(2) (bit i of the encoding holds coordinate i+1); lines are the 35
// zero-sum triples.  A tetrahedron is spanned by four points in general
// position and carries the weight function and the seven-shape
// classification of point pairs that the rest of the library is built on.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "snarkforge/errors.hpp"

namespace snarkforge {

// A point of PG(3,2): value in 1..15.  The zero vector appears only as an
// intermediate sum, never as a point.
using Point4 = std::uint8_t;

constexpr int num_pg32_points = 15;
constexpr int num_pg32_lines = 35;

// Componentwise XOR; x + x = 0.
inline Point4 add(Point4 x, Point4 y) { return static_cast<Point4>(x ^ y); }

// True iff x, y, z are pairwise distinct nonzero vectors with x + y + z = 0.
bool is_line(Point4 x, Point4 y, Point4 z);

// All 35 lines of PG(3,2) as ascending triples, lexicographically sorted.
const std::vector<std::array<Point4, 3>>& all_lines();

// Pair shapes.  ls: line segment, hl: half-line, ang: angle, alt: altitude,
// ax: axis, dc/dm: double corner/midpoint, dpt: merged double point.
enum class Shape : std::uint8_t { ls, hl, ang, alt, ax, dc, dm, dpt };

inline Shape merge_degenerate(Shape s) {
    return (s == Shape::dc || s == Shape::dm) ? Shape::dpt : s;
}
const char* shape_name(Shape s);
Shape shape_from_name(std::string_view name); // MalformedInput on unknown tag

// A collineation of PG(3,2): an invertible linear map, stored as the images
// of the four unit vectors.  Applying it to x XORs the columns selected by
// the bits of x.
struct Collineation {
    std::array<Point4, 4> col{1, 2, 4, 8};

    Point4 operator()(Point4 x) const {
        Point4 y = 0;
        for (int i = 0; i < 4; ++i)
            if (x & (1u << i)) y = add(y, col[i]);
        return y;
    }
    // this followed by g, i.e. x -> g(this(x)).
    Collineation then(const Collineation& g) const;
    Collineation inverse() const; // NotABasis if singular (cannot happen for valid values)
    bool operator==(const Collineation&) const = default;
};

class Tetrahedron {
public:
    // Corners must form a basis of GF(2)^4; throws NotABasis otherwise.
    static Tetrahedron from_corners(const std::array<Point4, 4>& corners);

    const std::array<Point4, 4>& corners() const { return corners_; }

    // Number of nonzero coefficients of y in the corner basis; 0 for the
    // zero vector, 1 for corners, 2 for midpoints, 3 for triangle centres,
    // 4 for the barycentre.
    int weight(Point4 y) const { return weight_[y]; }

    bool contains(Point4 p) const { return p != 0 && weight_[p] <= 2; }

    // The 10 points (4 corners + 6 midpoints), ascending.
    const std::vector<Point4>& points() const { return points_; }
    // The 6 lines <c_i, c_j> = {c_i, c_i + c_j, c_j}, as ascending triples.
    const std::vector<std::array<Point4, 3>>& lines() const { return lines_; }

    // Shape of an unordered, possibly degenerate pair of points of this
    // tetrahedron.  Throws PointNotInTetrahedron if either point is outside.
    Shape classify_pair(Point4 p, Point4 q, bool merge_deg = false) const;

    // The third point of the line of T through {p, q}, or 0 when no line of
    // T contains both (degenerate pairs included).  Points must lie in T.
    Point4 third_on_line(Point4 p, Point4 q) const;

    bool operator==(const Tetrahedron& o) const { return corners_ == o.corners_; }

private:
    Tetrahedron() = default;

    std::array<Point4, 4> corners_{};
    Collineation inverse_basis_{}; // maps corner i back to unit vector e_i
    std::array<std::uint8_t, 16> weight_{};
    std::vector<Point4> points_;
    std::vector<std::array<Point4, 3>> lines_;
    std::array<std::array<std::uint8_t, 16>, 16> shape_{};  // 255 = undefined
    std::array<std::array<Point4, 16>, 16> third_{};
};

// Canonical tetrahedra: T0 spanned by the unit vectors and T1 spanned by
// their complements (the weight-3 vectors of T0).
const Tetrahedron& tetra_T0();
const Tetrahedron& tetra_T1();

// The involution Lambda exchanging T0 and T1: swaps each unit vector with
// its antipode and fixes the six midpoints.
const Collineation& lambda_swap();

enum class TripleKind { line, circle, neither };

// Classifies a zero-sum triple of points of T as a line of T or a circle
// (the three midpoints of a triangle); neither iff x + y + z != 0.
TripleKind line_or_circle(const Tetrahedron& t, Point4 x, Point4 y, Point4 z);

// Exact counts over all 55 unordered (possibly degenerate) pairs of T.
std::map<Shape, int> shape_census(const Tetrahedron& t);

// The collineation mapping from[i] to to[i]; both quadruples must be bases.
Collineation collineation_from_bases(const std::array<Point4, 4>& from,
                                     const std::array<Point4, 4>& to);

// The 24 collineations preserving t (induced by corner permutations).
std::vector<Collineation> tetra_symmetries(const Tetrahedron& t);

} // namespace snarkforge
