#include "topt/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace topt {

namespace {

struct TriGeom {
    double area;
    // grad(phi_k) = (bx[k], by[k]), constant on the triangle
    std::array<double, 3> bx, by;
};

TriGeom tri_geometry(const Mesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const auto& p0 = mesh.nodes[tri[0]];
    const auto& p1 = mesh.nodes[tri[1]];
    const auto& p2 = mesh.nodes[tri[2]];
    double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    TriGeom g;
    g.area = 0.5 * det;
    g.bx = {(p1[1] - p2[1]) / det, (p2[1] - p0[1]) / det, (p0[1] - p1[1]) / det};
    g.by = {(p2[0] - p1[0]) / det, (p0[0] - p2[0]) / det, (p1[0] - p0[0]) / det};
    return g;
}

}  // namespace

SparseMatrix assemble_mass(const Mesh& mesh) {
    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(9u * mesh.tri_count());
    cols.reserve(9u * mesh.tri_count());
    vals.reserve(9u * mesh.tri_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        double a = mesh.tri_area(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                rows.push_back(tri[i]);
                cols.push_back(tri[j]);
                vals.push_back(a / 12.0 * (i == j ? 2.0 : 1.0));
            }
    }
    return SparseMatrix::from_triplets(mesh.node_count(), rows, cols, vals);
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const ElementField& coeff) {
    if (static_cast<int>(coeff.size()) != mesh.tri_count())
        throw std::invalid_argument("assemble_stiffness: coefficient length mismatch");
    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(9u * mesh.tri_count());
    cols.reserve(9u * mesh.tri_count());
    vals.reserve(9u * mesh.tri_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        if (coeff[t] < 0) throw std::invalid_argument("assemble_stiffness: negative coefficient");
        TriGeom g = tri_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                rows.push_back(tri[i]);
                cols.push_back(tri[j]);
                vals.push_back(coeff[t] * g.area * (g.bx[i] * g.bx[j] + g.by[i] * g.by[j]));
            }
    }
    return SparseMatrix::from_triplets(mesh.node_count(), rows, cols, vals);
}

SparseMatrix assemble_elastic_stiffness(const Mesh& mesh, const ElementField& coeff,
                                        double lambda1, double lambda2) {
    if (static_cast<int>(coeff.size()) != mesh.tri_count())
        throw std::invalid_argument("assemble_elastic_stiffness: coefficient length mismatch");
    if (!(lambda1 > 0) || !(lambda2 > 0))
        throw std::invalid_argument("assemble_elastic_stiffness: Lame constants must be positive");
    // Voigt (exx, eyy, 2*exy) material matrix for sigma = 2*l1*eps + l2*tr(eps)*I
    const double d00 = 2 * lambda1 + lambda2, d01 = lambda2, d22 = lambda1;
    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(36u * mesh.tri_count());
    cols.reserve(36u * mesh.tri_count());
    vals.reserve(36u * mesh.tri_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        if (coeff[t] < 0) throw std::invalid_argument("assemble_elastic_stiffness: negative coefficient");
        TriGeom g = tri_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        // B columns per dof: x-dof k -> (bx, 0, by), y-dof k -> (0, by, bx)
        double B[3][6];
        for (int k = 0; k < 3; ++k) {
            B[0][2 * k] = g.bx[k]; B[0][2 * k + 1] = 0;
            B[1][2 * k] = 0;       B[1][2 * k + 1] = g.by[k];
            B[2][2 * k] = g.by[k]; B[2][2 * k + 1] = g.bx[k];
        }
        for (int a = 0; a < 6; ++a) {
            double db0 = d00 * B[0][a] + d01 * B[1][a];
            double db1 = d01 * B[0][a] + d00 * B[1][a];
            double db2 = d22 * B[2][a];
            for (int b = 0; b < 6; ++b) {
                double k = coeff[t] * g.area * (B[0][b] * db0 + B[1][b] * db1 + B[2][b] * db2);
                rows.push_back(2 * tri[a / 2] + a % 2);
                cols.push_back(2 * tri[b / 2] + b % 2);
                vals.push_back(k);
            }
        }
    }
    return SparseMatrix::from_triplets(2 * mesh.node_count(), rows, cols, vals);
}

std::vector<double> assemble_load_scalar(const Mesh& mesh, double f, double g) {
    std::vector<double> F(mesh.node_count(), 0.0);
    if (f != 0.0) {
        for (int t = 0; t < mesh.tri_count(); ++t) {
            double a = mesh.tri_area(t) / 3.0;
            for (int k : mesh.triangles[t]) F[k] += f * a;
        }
    }
    if (g != 0.0) {
        for (const auto& e : mesh.boundary_edges) {
            if (e.tag != BoundaryTag::Gamma1) continue;
            const auto& p = mesh.nodes[e.nodes[0]];
            const auto& q = mesh.nodes[e.nodes[1]];
            double len = std::hypot(q[0] - p[0], q[1] - p[1]);
            F[e.nodes[0]] += g * len / 2.0;
            F[e.nodes[1]] += g * len / 2.0;
        }
    }
    return F;
}

std::vector<double> assemble_load_vector(const Mesh& mesh, const std::array<double, 2>& f,
                                         const std::array<double, 2>& g) {
    std::vector<double> F(2 * mesh.node_count(), 0.0);
    if (f[0] != 0.0 || f[1] != 0.0) {
        for (int t = 0; t < mesh.tri_count(); ++t) {
            double a = mesh.tri_area(t) / 3.0;
            for (int k : mesh.triangles[t]) {
                F[2 * k] += f[0] * a;
                F[2 * k + 1] += f[1] * a;
            }
        }
    }
    if (g[0] != 0.0 || g[1] != 0.0) {
        for (const auto& e : mesh.boundary_edges) {
            if (e.tag != BoundaryTag::Gamma1) continue;
            const auto& p = mesh.nodes[e.nodes[0]];
            const auto& q = mesh.nodes[e.nodes[1]];
            double len = std::hypot(q[0] - p[0], q[1] - p[1]);
            for (int end : e.nodes) {
                F[2 * end] += g[0] * len / 2.0;
                F[2 * end + 1] += g[1] * len / 2.0;
            }
        }
    }
    return F;
}

void apply_dirichlet(SparseMatrix& a, std::vector<double>& b, const std::vector<int>& fixed) {
    if (fixed.empty())
        throw std::invalid_argument("apply_dirichlet: empty Dirichlet set");
    std::vector<char> is_fixed(a.size(), 0);
    for (int d : fixed) {
        if (d < 0 || d >= a.size()) throw std::invalid_argument("apply_dirichlet: dof out of range");
        is_fixed[d] = 1;
    }
    std::vector<int> rows, cols;
    std::vector<double> vals;
    const auto& ro = a.row_offsets();
    const auto& ci = a.col_indices();
    const auto& v = a.values();
    for (int i = 0; i < a.size(); ++i) {
        if (is_fixed[i]) {
            rows.push_back(i);
            cols.push_back(i);
            vals.push_back(1.0);
            b[i] = 0.0;
            continue;
        }
        for (int p = ro[i]; p < ro[i + 1]; ++p) {
            if (is_fixed[ci[p]]) continue;
            rows.push_back(i);
            cols.push_back(ci[p]);
            vals.push_back(v[p]);
        }
    }
    a = SparseMatrix::from_triplets(a.size(), rows, cols, vals);
}

std::vector<std::array<double, 2>> element_gradients(const Mesh& mesh, const NodalField& u) {
    if (u.components != 1 || static_cast<int>(u.values.size()) != mesh.node_count())
        throw std::invalid_argument("element_gradients: expected scalar nodal field");
    std::vector<std::array<double, 2>> out(mesh.tri_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        TriGeom g = tri_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        double gx = 0, gy = 0;
        for (int k = 0; k < 3; ++k) {
            gx += g.bx[k] * u.values[tri[k]];
            gy += g.by[k] * u.values[tri[k]];
        }
        out[t] = {gx, gy};
    }
    return out;
}

ElementField element_gradient_sq(const Mesh& mesh, const NodalField& u) {
    auto g = element_gradients(mesh, u);
    ElementField out(g.size());
    for (std::size_t t = 0; t < g.size(); ++t) out[t] = g[t][0] * g[t][0] + g[t][1] * g[t][1];
    return out;
}

std::vector<std::array<double, 3>> element_strains(const Mesh& mesh, const NodalField& u) {
    if (u.components != 2 || static_cast<int>(u.values.size()) != 2 * mesh.node_count())
        throw std::invalid_argument("element_strains: expected displacement field");
    std::vector<std::array<double, 3>> out(mesh.tri_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        TriGeom g = tri_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        double ux_x = 0, ux_y = 0, uy_x = 0, uy_y = 0;
        for (int k = 0; k < 3; ++k) {
            ux_x += g.bx[k] * u.values[2 * tri[k]];
            ux_y += g.by[k] * u.values[2 * tri[k]];
            uy_x += g.bx[k] * u.values[2 * tri[k] + 1];
            uy_y += g.by[k] * u.values[2 * tri[k] + 1];
        }
        out[t] = {ux_x, uy_y, 0.5 * (ux_y + uy_x)};
    }
    return out;
}

ElementField element_strain_energy_density(const Mesh& mesh, const NodalField& u,
                                           double lambda1, double lambda2) {
    auto eps = element_strains(mesh, u);
    ElementField out(eps.size());
    for (std::size_t t = 0; t < eps.size(); ++t) {
        double tr = eps[t][0] + eps[t][1];
        double frob2 = eps[t][0] * eps[t][0] + eps[t][1] * eps[t][1] + 2 * eps[t][2] * eps[t][2];
        out[t] = 2 * lambda1 * frob2 + lambda2 * tr * tr;
    }
    return out;
}

std::vector<double> lumped_areas(const Mesh& mesh) {
    std::vector<double> a(mesh.node_count(), 0.0);
    for (int t = 0; t < mesh.tri_count(); ++t) {
        double third = mesh.tri_area(t) / 3.0;
        for (int k : mesh.triangles[t]) a[k] += third;
    }
    return a;
}

NodalField project_to_nodes(const Mesh& mesh, const ElementField& e) {
    if (static_cast<int>(e.size()) != mesh.tri_count())
        throw std::invalid_argument("project_to_nodes: element field length mismatch");
    std::vector<double> num(mesh.node_count(), 0.0);
    std::vector<double> den(mesh.node_count(), 0.0);
    for (int t = 0; t < mesh.tri_count(); ++t) {
        double third = mesh.tri_area(t) / 3.0;
        for (int k : mesh.triangles[t]) {
            num[k] += third * e[t];
            den[k] += third;
        }
    }
    NodalField out;
    out.components = 1;
    out.values.resize(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) out.values[i] = num[i] / den[i];
    return out;
}

ElementField nodal_to_element(const Mesh& mesh, const std::vector<double>& nodal) {
    if (static_cast<int>(nodal.size()) != mesh.node_count())
        throw std::invalid_argument("nodal_to_element: length mismatch");
    ElementField out(mesh.tri_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        out[t] = (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
    }
    return out;
}

}  // namespace topt
