#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "topt/physics.hpp"
#include "topt/smoothing.hpp"

namespace topt {

struct FlowParams {
    SmoothingParams smoothing;
    double tau = 1e-3;
    int steps = 0;
    int checkpoint_every = 10;
};

struct FlowRecord {
    int step = 0;
    double objective = 0;
    double total_mass = 0;
    double min_rho = 0;
    double max_rho = 0;
    int state_iterations = 0;
    int negativity_events = 0;  // nodes floored before kappa evaluation
};

struct FlowHistory {
    std::vector<FlowRecord> records;  // length steps+1, includes initial state
    std::vector<std::pair<int, DensityField>> checkpoints;
    bool completed = true;
    std::string error;
};

using Problem = std::variant<HeatProblem, ElasticProblem>;

const Mesh& problem_mesh(const Problem& prob);
const KappaParams& problem_kappa(const Problem& prob);

/// Shared per-mesh state for a single flow: assembled mass/stiffness
/// factorizations reused across steps.
class FlowEngine {
public:
    explicit FlowEngine(const Problem& prob);

    /// One step of the filtered Wasserstein gradient flow:
    ///   rho~ = heat_smooth(rho, delta)
    ///   u, J = state solve with kappa(rho~)
    ///   S    = sensitivity(rho~, u), node-projected
    ///   S_d  = heat_smooth(S, delta)
    ///   rho- = heat_smooth(rho, epsilon)
    ///   S_e  = filter_sensitivity(S_d, rho-, eta)
    ///   M rho' = M rho + tau * K(rho) S_e
    DensityField step(const DensityField& rho, const FlowParams& params, FlowRecord& record) const;

    FlowHistory run(const DensityField& rho0, const FlowParams& params,
                    DensityField* final_rho = nullptr) const;

    const SmoothingOperator& smoother() const { return smoother_; }
    StateSolution solve_state(const DensityField& rho) const;
    NodalField sensitivity(const DensityField& rho, const StateSolution& state) const;

private:
    const Problem* prob_;
    SmoothingOperator smoother_;
};

/// Runs the flow for each eta (plus eta_ref standing in for eta = 0), takes
/// E(eta) = max over checkpoints of W2 between the eta-run and the reference
/// run, and returns the least-squares slope of log E(eta) vs log eta.
struct EtaOrderResult {
    std::vector<double> etas;
    std::vector<double> errors;  // E(eta), aligned with etas
    double slope = 0;
};

EtaOrderResult verify_eta_order(const Problem& prob, const DensityField& rho0,
                                const FlowParams& params_base, std::vector<double> etas,
                                double eta_ref, int coarsen_cells = 24);

}  // namespace topt
