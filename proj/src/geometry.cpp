#include "snarkforge/geometry.hpp"

#include <algorithm>

namespace snarkforge {

bool is_line(Point4 x, Point4 y, Point4 z) {
    if (x == 0 || y == 0 || z == 0) return false;
    if (x == y || y == z || x == z) return false;
    return (x ^ y ^ z) == 0;
}

const std::vector<std::array<Point4, 3>>& all_lines() {
    static const std::vector<std::array<Point4, 3>> lines = [] {
        std::vector<std::array<Point4, 3>> out;
        for (Point4 x = 1; x <= 15; ++x)
            for (Point4 y = static_cast<Point4>(x + 1); y <= 15; ++y) {
                Point4 z = add(x, y);
                if (z > y) out.push_back({x, y, z});
            }
        std::sort(out.begin(), out.end());
        return out;
    }();
    return lines;
}

const char* shape_name(Shape s) {
    switch (s) {
        case Shape::ls: return "ls";
        case Shape::hl: return "hl";
        case Shape::ang: return "ang";
        case Shape::alt: return "alt";
        case Shape::ax: return "ax";
        case Shape::dc: return "dc";
        case Shape::dm: return "dm";
        case Shape::dpt: return "dpt";
    }
    return "?";
}

Shape shape_from_name(std::string_view name) {
    for (Shape s : {Shape::ls, Shape::hl, Shape::ang, Shape::alt, Shape::ax,
                    Shape::dc, Shape::dm, Shape::dpt})
        if (name == shape_name(s)) return s;
    throw MalformedInput("unknown shape tag: " + std::string(name));
}

namespace {

// Gauss-Jordan inverse of a 4x4 GF(2) matrix given as columns; returns false
// if singular.
bool invert_gf2(const std::array<Point4, 4>& cols, std::array<Point4, 4>& inv_cols) {
    // rows[i] holds row i of [M | I] packed as 8 bits: low 4 = M, high 4 = I.
    std::array<std::uint8_t, 4> rows{};
    for (int r = 0; r < 4; ++r) {
        std::uint8_t m = 0;
        for (int c = 0; c < 4; ++c)
            if (cols[c] & (1u << r)) m |= static_cast<std::uint8_t>(1u << c);
        rows[r] = static_cast<std::uint8_t>(m | (1u << (4 + r)));
    }
    for (int c = 0; c < 4; ++c) {
        int pivot = -1;
        for (int r = c; r < 4; ++r)
            if (rows[r] & (1u << c)) { pivot = r; break; }
        if (pivot < 0) return false;
        std::swap(rows[c], rows[pivot]);
        for (int r = 0; r < 4; ++r)
            if (r != c && (rows[r] & (1u << c))) rows[r] ^= rows[c];
    }
    for (int c = 0; c < 4; ++c) {
        Point4 col = 0;
        for (int r = 0; r < 4; ++r)
            if (rows[r] & (1u << (4 + c))) col |= static_cast<Point4>(1u << r);
        inv_cols[c] = col;
    }
    return true;
}

} // namespace

Collineation Collineation::then(const Collineation& g) const {
    Collineation out;
    for (int i = 0; i < 4; ++i) out.col[i] = g(col[i]);
    return out;
}

Collineation Collineation::inverse() const {
    Collineation out;
    if (!invert_gf2(col, out.col)) throw NotABasis("collineation matrix is singular");
    return out;
}

Tetrahedron Tetrahedron::from_corners(const std::array<Point4, 4>& corners) {
    Tetrahedron t;
    t.corners_ = corners;
    Collineation basis{corners};
    std::array<Point4, 4> inv_cols{};
    for (Point4 c : corners)
        if (c == 0) throw NotABasis("corner is the zero vector");
    if (!invert_gf2(basis.col, inv_cols))
        throw NotABasis("corners do not span GF(2)^4");
    t.inverse_basis_ = Collineation{inv_cols};

    for (int y = 0; y < 16; ++y) {
        Point4 coeffs = t.inverse_basis_(static_cast<Point4>(y));
        t.weight_[y] = static_cast<std::uint8_t>(__builtin_popcount(coeffs));
    }

    for (Point4 y = 1; y <= 15; ++y)
        if (t.weight_[y] <= 2) t.points_.push_back(y);

    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            std::array<Point4, 3> line{corners[i], add(corners[i], corners[j]), corners[j]};
            std::sort(line.begin(), line.end());
            t.lines_.push_back(line);
        }
    std::sort(t.lines_.begin(), t.lines_.end());

    for (auto& row : t.shape_) row.fill(255);
    for (auto& row : t.third_) row.fill(0);

    // Shapes are determined by the weight triple (|p|, |q|, |p+q|).
    for (Point4 p : t.points_)
        for (Point4 q : t.points_) {
            int wp = t.weight_[p], wq = t.weight_[q], ws = t.weight_[add(p, q)];
            Shape s;
            if (p == q) {
                s = (wp == 1) ? Shape::dc : Shape::dm;
            } else if (wp == 1 && wq == 1) {
                s = Shape::ls;
            } else if (wp == 2 && wq == 2) {
                s = (ws == 2) ? Shape::ang : Shape::ax;
            } else {
                s = (ws == 1) ? Shape::hl : Shape::alt;
            }
            t.shape_[p][q] = static_cast<std::uint8_t>(s);
        }

    for (const auto& line : t.lines_)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j)
                    t.third_[line[i]][line[j]] =
                        static_cast<Point4>(line[0] ^ line[1] ^ line[2] ^ line[i] ^ line[j]);
    return t;
}

Shape Tetrahedron::classify_pair(Point4 p, Point4 q, bool merge_deg) const {
    if (!contains(p)) throw PointNotInTetrahedron("point " + std::to_string(p) + " is not in the tetrahedron");
    if (!contains(q)) throw PointNotInTetrahedron("point " + std::to_string(q) + " is not in the tetrahedron");
    Shape s = static_cast<Shape>(shape_[p][q]);
    return merge_deg ? merge_degenerate(s) : s;
}

Point4 Tetrahedron::third_on_line(Point4 p, Point4 q) const {
    if (!contains(p) || !contains(q))
        throw PointNotInTetrahedron("pair is not inside the tetrahedron");
    return third_[p][q];
}

const Tetrahedron& tetra_T0() {
    static const Tetrahedron t = Tetrahedron::from_corners({1, 2, 4, 8});
    return t;
}

const Tetrahedron& tetra_T1() {
    static const Tetrahedron t = Tetrahedron::from_corners({14, 13, 11, 7});
    return t;
}

const Collineation& lambda_swap() {
    static const Collineation lambda{std::array<Point4, 4>{14, 13, 11, 7}};
    return lambda;
}

TripleKind line_or_circle(const Tetrahedron& t, Point4 x, Point4 y, Point4 z) {
    if (!t.contains(x) || !t.contains(y) || !t.contains(z))
        throw PointNotInTetrahedron("triple is not inside the tetrahedron");
    if ((x ^ y ^ z) != 0 || x == y || y == z || x == z) return TripleKind::neither;
    std::array<Point4, 3> triple{x, y, z};
    std::sort(triple.begin(), triple.end());
    for (const auto& line : t.lines())
        if (line == triple) return TripleKind::line;
    // A zero-sum triple of points of T that is not a line of T consists of
    // the three midpoints of a triangle.
    return TripleKind::circle;
}

std::map<Shape, int> shape_census(const Tetrahedron& t) {
    std::map<Shape, int> census;
    const auto& pts = t.points();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i; j < pts.size(); ++j)
            ++census[t.classify_pair(pts[i], pts[j])];
    return census;
}

Collineation collineation_from_bases(const std::array<Point4, 4>& from,
                                     const std::array<Point4, 4>& to) {
    std::array<Point4, 4> from_inv{};
    if (!invert_gf2(from, from_inv)) throw NotABasis("'from' quadruple is not a basis");
    std::array<Point4, 4> to_inv{};
    if (!invert_gf2(to, to_inv)) throw NotABasis("'to' quadruple is not a basis");
    // x -> To(FromInverse(x)) sends from[i] to to[i].
    return Collineation{from_inv}.then(Collineation{to});
}

std::vector<Collineation> tetra_symmetries(const Tetrahedron& t) {
    std::array<int, 4> perm{0, 1, 2, 3};
    std::vector<Collineation> out;
    do {
        std::array<Point4, 4> to{};
        for (int i = 0; i < 4; ++i) to[i] = t.corners()[perm[i]];
        out.push_back(collineation_from_bases(t.corners(), to));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

} // namespace snarkforge
