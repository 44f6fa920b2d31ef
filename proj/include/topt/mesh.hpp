#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace topt {

enum class BoundaryTag : std::uint8_t { Gamma0, Gamma1, Gamma2 };

enum class Edge : std::uint8_t { Left, Right, Bottom, Top };

struct BoundaryEdge {
    std::array<int, 2> nodes;
    BoundaryTag tag = BoundaryTag::Gamma2;
};

/// Structured right-triangle mesh of [0,lx]x[0,ly].
/// Every cell is split along the bottom-left -> top-right diagonal, so all
/// triangles are non-obtuse and the implicit heat step satisfies a discrete
/// maximum principle.
struct Mesh {
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<BoundaryEdge> boundary_edges;
    double lx = 0, ly = 0;
    int nx = 0, ny = 0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int tri_count() const { return static_cast<int>(triangles.size()); }
    int node_index(int i, int j) const { return j * (nx + 1) + i; }
    double tri_area(int t) const;

    /// Nodes lying on at least one Gamma0-tagged edge, sorted ascending.
    std::vector<int> gamma0_nodes() const;
};

/// One tagged interval on one of the four rectangle edges. The interval
/// coordinate runs along x for bottom/top and along y for left/right.
struct BoundarySegment {
    Edge edge = Edge::Left;
    double s0 = 0, s1 = 0;
    BoundaryTag tag = BoundaryTag::Gamma0;
};

struct BoundarySpec {
    std::vector<BoundarySegment> segments;
};

Mesh build_rect_mesh(double lx, double ly, int nx, int ny);

/// Returns a copy of `mesh` with boundary edges re-tagged. An edge gets a
/// segment's tag iff both its endpoints lie in the segment's closed interval
/// (tolerance 1e-12 * edge length); everything else is Gamma2.
/// Overlapping segments on the same edge are rejected.
Mesh tag_boundary(const Mesh& mesh, const BoundarySpec& spec);

}  // namespace topt
