#include "topt/physics.hpp"

#include <numeric>
#include <stdexcept>

namespace topt {

namespace {

ElementField kappa_coeff(const Mesh& mesh, const KappaParams& kp,
                         const std::vector<double>& rho) {
    std::vector<double> floored(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) floored[i] = floor_density(rho[i], kp);
    ElementField coeff = nodal_to_element(mesh, floored);
    for (auto& c : coeff) c = kappa(floor_density(c, kp), kp);
    return coeff;
}

StateSolution solve_eliminated(SparseMatrix a, std::vector<double> rhs,
                               const std::vector<int>& fixed, int components) {
    apply_dirichlet(a, rhs, fixed);
    SolveResult sol = solve_spd_banded(a, rhs);
    StateSolution st;
    st.u.components = components;
    st.u.values = std::move(sol.x);
    st.solve_report = sol.report;
    return st;
}

}  // namespace

std::vector<int> ElasticProblem::dirichlet_dofs() const {
    std::vector<int> dofs;
    for (int n : mesh.gamma0_nodes()) {
        dofs.push_back(2 * n);
        dofs.push_back(2 * n + 1);
    }
    return dofs;
}

StateSolution solve_state_heat(const HeatProblem& prob, const DensityField& rho) {
    prob.kappa.validate();
    SparseMatrix k = assemble_stiffness(prob.mesh, kappa_coeff(prob.mesh, prob.kappa, rho.values));
    std::vector<double> load = assemble_load_scalar(prob.mesh, prob.f, prob.g);
    StateSolution st = solve_eliminated(std::move(k), load, prob.dirichlet_dofs(), 1);
    st.objective = 0.5 * std::inner_product(load.begin(), load.end(), st.u.values.begin(), 0.0);
    return st;
}

StateSolution solve_state_elastic(const ElasticProblem& prob, const DensityField& rho) {
    prob.kappa.validate();
    SparseMatrix k = assemble_elastic_stiffness(prob.mesh,
                                                kappa_coeff(prob.mesh, prob.kappa, rho.values),
                                                prob.lambda1, prob.lambda2);
    std::vector<double> load = assemble_load_vector(prob.mesh, prob.f, prob.g);
    StateSolution st = solve_eliminated(std::move(k), load, prob.dirichlet_dofs(), 2);
    st.objective = 0.5 * std::inner_product(load.begin(), load.end(), st.u.values.begin(), 0.0);
    return st;
}

namespace {

NodalField scaled_sensitivity(const Mesh& mesh, const KappaParams& kp,
                              const std::vector<double>& rho, const ElementField& density_term) {
    ElementField elem(mesh.tri_count());
    std::vector<double> floored(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) floored[i] = floor_density(rho[i], kp);
    ElementField rho_elem = nodal_to_element(mesh, floored);
    for (int t = 0; t < mesh.tri_count(); ++t)
        elem[t] = kp.sensitivity_scale * kappa_prime(floor_density(rho_elem[t], kp), kp) *
                  density_term[t];
    return project_to_nodes(mesh, elem);
}

}  // namespace

NodalField sensitivity_heat(const HeatProblem& prob, const DensityField& rho,
                            const StateSolution& state) {
    return scaled_sensitivity(prob.mesh, prob.kappa, rho.values,
                              element_gradient_sq(prob.mesh, state.u));
}

NodalField sensitivity_elastic(const ElasticProblem& prob, const DensityField& rho,
                               const StateSolution& state) {
    return scaled_sensitivity(prob.mesh, prob.kappa, rho.values,
                              element_strain_energy_density(prob.mesh, state.u, prob.lambda1,
                                                            prob.lambda2));
}

}  // namespace topt
