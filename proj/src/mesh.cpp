#include "topt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace topt {

double Mesh::tri_area(int t) const {
    const auto& tri = triangles[t];
    const auto& a = nodes[tri[0]];
    const auto& b = nodes[tri[1]];
    const auto& c = nodes[tri[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

std::vector<int> Mesh::gamma0_nodes() const {
    std::set<int> out;
    for (const auto& e : boundary_edges) {
        if (e.tag == BoundaryTag::Gamma0) {
            out.insert(e.nodes[0]);
            out.insert(e.nodes[1]);
        }
    }
    return {out.begin(), out.end()};
}

Mesh build_rect_mesh(double lx, double ly, int nx, int ny) {
    if (!(lx > 0) || !(ly > 0)) throw std::invalid_argument("mesh: side lengths must be positive");
    if (nx < 1 || ny < 1) throw std::invalid_argument("mesh: subdivision counts must be >= 1");

    Mesh m;
    m.lx = lx;
    m.ly = ly;
    m.nx = nx;
    m.ny = ny;

    m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes.push_back({lx * i / nx, ly * j / ny});

    m.triangles.reserve(2u * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int v00 = m.node_index(i, j);
            int v10 = m.node_index(i + 1, j);
            int v01 = m.node_index(i, j + 1);
            int v11 = m.node_index(i + 1, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    }

    for (int i = 0; i < nx; ++i)
        m.boundary_edges.push_back({{m.node_index(i, 0), m.node_index(i + 1, 0)}});
    for (int j = 0; j < ny; ++j)
        m.boundary_edges.push_back({{m.node_index(nx, j), m.node_index(nx, j + 1)}});
    for (int i = nx; i > 0; --i)
        m.boundary_edges.push_back({{m.node_index(i, ny), m.node_index(i - 1, ny)}});
    for (int j = ny; j > 0; --j)
        m.boundary_edges.push_back({{m.node_index(0, j), m.node_index(0, j - 1)}});

    return m;
}

namespace {

Edge classify_edge(const Mesh& m, const BoundaryEdge& e) {
    const auto& a = m.nodes[e.nodes[0]];
    const auto& b = m.nodes[e.nodes[1]];
    const double tol = 1e-12 * std::max(m.lx, m.ly);
    if (std::abs(a[0]) < tol && std::abs(b[0]) < tol) return Edge::Left;
    if (std::abs(a[0] - m.lx) < tol && std::abs(b[0] - m.lx) < tol) return Edge::Right;
    if (std::abs(a[1]) < tol && std::abs(b[1]) < tol) return Edge::Bottom;
    return Edge::Top;
}

double edge_coord(Edge e, const std::array<double, 2>& p) {
    return (e == Edge::Bottom || e == Edge::Top) ? p[0] : p[1];
}

}  // namespace

Mesh tag_boundary(const Mesh& mesh, const BoundarySpec& spec) {
    for (std::size_t i = 0; i < spec.segments.size(); ++i) {
        const auto& si = spec.segments[i];
        if (si.s1 < si.s0) throw std::invalid_argument("boundary: empty interval");
        double len = (si.edge == Edge::Bottom || si.edge == Edge::Top) ? mesh.lx : mesh.ly;
        if (si.s0 < -1e-12 * len || si.s1 > len * (1 + 1e-12))
            throw std::invalid_argument("boundary: interval outside edge");
        for (std::size_t j = i + 1; j < spec.segments.size(); ++j) {
            const auto& sj = spec.segments[j];
            if (si.edge == sj.edge && si.s0 < sj.s1 && sj.s0 < si.s1)
                throw std::invalid_argument("boundary: overlapping segments on one edge");
        }
    }

    Mesh out = mesh;
    for (auto& e : out.boundary_edges) {
        e.tag = BoundaryTag::Gamma2;
        Edge side = classify_edge(out, e);
        double len = (side == Edge::Bottom || side == Edge::Top) ? out.lx : out.ly;
        double tol = 1e-12 * len;
        double c0 = edge_coord(side, out.nodes[e.nodes[0]]);
        double c1 = edge_coord(side, out.nodes[e.nodes[1]]);
        for (const auto& s : spec.segments) {
            if (s.edge != side) continue;
            if (c0 >= s.s0 - tol && c0 <= s.s1 + tol && c1 >= s.s0 - tol && c1 <= s.s1 + tol) {
                e.tag = s.tag;
                break;
            }
        }
    }
    return out;
}

}  // namespace topt
