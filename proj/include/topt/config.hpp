#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topt/flow.hpp"
#include "topt/material.hpp"
#include "topt/mesh.hpp"

namespace topt {

struct RunConfig {
    std::string problem = "heat";  // "heat" | "elastic"
    double lx = 1, ly = 1;
    int nx = 64, ny = 64;
    BoundarySpec boundary;
    KappaParams material;
    double lambda1 = 1, lambda2 = 1;     // elastic only
    double f_scalar = 0, g_scalar = 0;   // heat sources
    std::array<double, 2> f_vec{0, 0};   // elastic sources
    std::array<double, 2> g_vec{0, 0};
    FlowParams flow;
    double rho0 = 1.0;
    std::string rho0_file;  // overrides rho0 when nonempty
    std::string output_dir = "out";
    unsigned seed = 0;

    // sweep extensions (empty for plain runs)
    std::vector<double> sweep_deltas;
    std::vector<double> sweep_etas;
    struct TauOverride { double delta, eta, tau; };
    std::vector<TauOverride> tau_map;

    // verify-order extensions
    std::vector<double> order_etas;
    double eta_ref = 1e-6;
    int coarsen = 24;

    double tau_for(double delta, double eta) const;
    Problem make_problem() const;
    DensityField make_rho0(const Mesh& mesh) const;
};

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

}  // namespace topt
