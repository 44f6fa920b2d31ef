#pragma once

#include <memory>
#include <vector>

#include "topt/fem.hpp"
#include "topt/linsys.hpp"
#include "topt/mesh.hpp"

namespace topt {

/// Nodal density values (not required to stay nonnegative during the flow;
/// kappa evaluation floors them).
struct DensityField {
    std::vector<double> values;
};

struct SmoothingParams {
    double delta = 1e-2;    // implicit-Euler time for densities/sensitivities
    double epsilon = 1e-7;  // implicit-Euler time for the filter weight
    double eta = 1e-2;      // filter radius parameter
};

/// Shared factorizations for one mesh: the mass matrix, the unit stiffness,
/// and cached (M + t*K1) Cholesky factors keyed by t.
class SmoothingOperator {
public:
    explicit SmoothingOperator(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }
    const SparseMatrix& mass() const { return mass_; }
    const SparseMatrix& unit_stiffness() const { return stiff1_; }
    const BandCholesky& mass_factor() const { return *mass_chol_; }

    /// One implicit Euler step of the Neumann heat equation:
    /// solves (M + delta*K1) x = M*field. delta = 0 is the identity.
    std::vector<double> heat_smooth(const std::vector<double>& field, double delta) const;

    /// Elliptic sensitivity screen: solves (M + eta*K(rho_bar)) x = M*s_delta
    /// with rho_bar as element coefficient. eta = 0 is the identity.
    std::vector<double> filter_sensitivity(const std::vector<double>& s_delta,
                                           const std::vector<double>& rho_bar,
                                           double eta) const;

private:
    const BandCholesky& factor_for(double t) const;

    const Mesh* mesh_;
    SparseMatrix mass_;
    SparseMatrix stiff1_;
    std::unique_ptr<BandCholesky> mass_chol_;
    mutable std::vector<std::pair<double, std::unique_ptr<BandCholesky>>> cache_;
};

/// Convenience wrappers constructing a fresh operator (tests, small meshes).
std::vector<double> heat_smooth(const Mesh& mesh, const std::vector<double>& field, double delta);
std::vector<double> filter_sensitivity(const Mesh& mesh, const std::vector<double>& s_delta,
                                       const std::vector<double>& rho_bar, double eta);

/// Total lumped mass 1^T M rho.
double total_mass(const SparseMatrix& mass, const std::vector<double>& rho);

}  // namespace topt
