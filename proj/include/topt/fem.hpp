#pragma once

#include <array>
#include <vector>

#include "topt/linsys.hpp"
#include "topt/mesh.hpp"

namespace topt {

/// One value per mesh node (scalar) or two interleaved values per node
/// (displacement: dofs 2i, 2i+1).
struct NodalField {
    std::vector<double> values;
    int components = 1;
};

/// One value per triangle.
using ElementField = std::vector<double>;

SparseMatrix assemble_mass(const Mesh& mesh);

/// K[i][j] = sum_T coeff(T) * int_T grad(phi_i).grad(phi_j). coeff >= 0.
SparseMatrix assemble_stiffness(const Mesh& mesh, const ElementField& coeff);

/// 2n x 2n plane-strain operator for sigma(u) = 2*lambda1*eps(u) + lambda2*tr(eps(u))*I.
SparseMatrix assemble_elastic_stiffness(const Mesh& mesh, const ElementField& coeff,
                                        double lambda1, double lambda2);

/// F_i = int_D f*phi_i + int_{Gamma1} g*phi_i, constant f and g, linear traces
/// integrated exactly on each Gamma1 edge.
std::vector<double> assemble_load_scalar(const Mesh& mesh, double f, double g);
std::vector<double> assemble_load_vector(const Mesh& mesh, const std::array<double, 2>& f,
                                         const std::array<double, 2>& g);

/// Symmetric elimination of homogeneous Dirichlet dofs: zero rows/columns,
/// unit diagonal, zero rhs entries. `fixed` must be nonempty.
void apply_dirichlet(SparseMatrix& a, std::vector<double>& b, const std::vector<int>& fixed);

/// Per-triangle gradient of a P1 scalar field.
std::vector<std::array<double, 2>> element_gradients(const Mesh& mesh, const NodalField& u);

/// Per-triangle |grad u|^2 of a scalar field.
ElementField element_gradient_sq(const Mesh& mesh, const NodalField& u);

/// Per-triangle symmetric strain (eps_xx, eps_yy, eps_xy) of a displacement field.
std::vector<std::array<double, 3>> element_strains(const Mesh& mesh, const NodalField& u);

/// Per-triangle eps(u):sigma(u) = 2*lambda1*|eps|^2 + lambda2*tr(eps)^2.
ElementField element_strain_energy_density(const Mesh& mesh, const NodalField& u,
                                           double lambda1, double lambda2);

/// Lumped L2 projection of an element field to nodes:
/// node_i = sum_{T>i} area(T)/3 * e(T) / sum_{T>i} area(T)/3.
NodalField project_to_nodes(const Mesh& mesh, const ElementField& e);

/// Lumped nodal areas sum_{T>i} area(T)/3 (the mass-matrix row sums).
std::vector<double> lumped_areas(const Mesh& mesh);

/// Element coefficient from a nodal field: mean of the three vertex values.
ElementField nodal_to_element(const Mesh& mesh, const std::vector<double>& nodal);

}  // namespace topt
