#include "topt/smoothing.hpp"

#include <numeric>
#include <stdexcept>

namespace topt {

SmoothingOperator::SmoothingOperator(const Mesh& mesh) : mesh_(&mesh) {
    mass_ = assemble_mass(mesh);
    stiff1_ = assemble_stiffness(mesh, ElementField(mesh.tri_count(), 1.0));
    mass_chol_ = std::make_unique<BandCholesky>(mass_);
}

const BandCholesky& SmoothingOperator::factor_for(double t) const {
    for (const auto& [key, chol] : cache_)
        if (key == t) return *chol;
    cache_.emplace_back(t, std::make_unique<BandCholesky>(SparseMatrix::axpy(mass_, t, stiff1_)));
    return *cache_.back().second;
}

std::vector<double> SmoothingOperator::heat_smooth(const std::vector<double>& field,
                                                   double delta) const {
    if (delta < 0) throw std::invalid_argument("heat_smooth: delta must be >= 0");
    if (static_cast<int>(field.size()) != mesh_->node_count())
        throw std::invalid_argument("heat_smooth: field length mismatch");
    if (delta == 0) return field;
    return factor_for(delta).solve(matvec(mass_, field));
}

std::vector<double> SmoothingOperator::filter_sensitivity(const std::vector<double>& s_delta,
                                                          const std::vector<double>& rho_bar,
                                                          double eta) const {
    if (eta < 0) throw std::invalid_argument("filter_sensitivity: eta must be >= 0");
    if (static_cast<int>(s_delta.size()) != mesh_->node_count() ||
        static_cast<int>(rho_bar.size()) != mesh_->node_count())
        throw std::invalid_argument("filter_sensitivity: field length mismatch");
    if (eta == 0) return s_delta;
    SparseMatrix k_rho = assemble_stiffness(*mesh_, nodal_to_element(*mesh_, rho_bar));
    BandCholesky chol(SparseMatrix::axpy(mass_, eta, k_rho));
    return chol.solve(matvec(mass_, s_delta));
}

std::vector<double> heat_smooth(const Mesh& mesh, const std::vector<double>& field, double delta) {
    return SmoothingOperator(mesh).heat_smooth(field, delta);
}

std::vector<double> filter_sensitivity(const Mesh& mesh, const std::vector<double>& s_delta,
                                       const std::vector<double>& rho_bar, double eta) {
    return SmoothingOperator(mesh).filter_sensitivity(s_delta, rho_bar, eta);
}

double total_mass(const SparseMatrix& mass, const std::vector<double>& rho) {
    auto mrho = matvec(mass, rho);
    return std::accumulate(mrho.begin(), mrho.end(), 0.0);
}

}  // namespace topt
