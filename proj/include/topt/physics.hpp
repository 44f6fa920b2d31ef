#pragma once

#include <array>
#include <vector>

#include "topt/fem.hpp"
#include "topt/linsys.hpp"
#include "topt/material.hpp"
#include "topt/mesh.hpp"
#include "topt/smoothing.hpp"

namespace topt {

struct StateSolution {
    NodalField u;
    double objective = 0;  // J = 1/2 * F.u
    SolveReport solve_report;
};

/// Density-dependent scalar diffusion: -div(kappa(rho) grad u) = f,
/// u = 0 on Gamma0, kappa(rho) du/dn = g on Gamma1, homogeneous on Gamma2.
struct HeatProblem {
    Mesh mesh;
    KappaParams kappa;
    double f = 0;  // constant source
    double g = 0;  // constant flux on Gamma1

    std::vector<int> dirichlet_dofs() const { return mesh.gamma0_nodes(); }
};

/// Plane Lame system with sigma(u) = 2*lambda1*eps(u) + lambda2*tr(eps(u))*I.
struct ElasticProblem {
    Mesh mesh;
    KappaParams kappa;
    double lambda1 = 1, lambda2 = 1;
    std::array<double, 2> f{0, 0};
    std::array<double, 2> g{0, 0};

    std::vector<int> dirichlet_dofs() const;
};

StateSolution solve_state_heat(const HeatProblem& prob, const DensityField& rho);
StateSolution solve_state_elastic(const ElasticProblem& prob, const DensityField& rho);

/// Nodal sensitivity: sensitivity_scale * kappa'(rho_T) * |grad u|^2_T,
/// lumped-projected to nodes. rho must be the density the state was solved at.
NodalField sensitivity_heat(const HeatProblem& prob, const DensityField& rho,
                            const StateSolution& state);

/// Same with the strain energy density eps(u):sigma(u) in place of |grad u|^2.
NodalField sensitivity_elastic(const ElasticProblem& prob, const DensityField& rho,
                               const StateSolution& state);

}  // namespace topt
