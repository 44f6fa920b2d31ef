#include "topt/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "topt/transport.hpp"

namespace topt {

const Mesh& problem_mesh(const Problem& prob) {
    return std::visit([](const auto& p) -> const Mesh& { return p.mesh; }, prob);
}

const KappaParams& problem_kappa(const Problem& prob) {
    return std::visit([](const auto& p) -> const KappaParams& { return p.kappa; }, prob);
}

FlowEngine::FlowEngine(const Problem& prob)
    : prob_(&prob), smoother_(problem_mesh(prob)) {}

StateSolution FlowEngine::solve_state(const DensityField& rho) const {
    if (const auto* h = std::get_if<HeatProblem>(prob_)) return solve_state_heat(*h, rho);
    return solve_state_elastic(std::get<ElasticProblem>(*prob_), rho);
}

NodalField FlowEngine::sensitivity(const DensityField& rho, const StateSolution& state) const {
    if (const auto* h = std::get_if<HeatProblem>(prob_)) return sensitivity_heat(*h, rho, state);
    return sensitivity_elastic(std::get<ElasticProblem>(*prob_), rho, state);
}

DensityField FlowEngine::step(const DensityField& rho, const FlowParams& params,
                              FlowRecord& record) const {
    const Mesh& mesh = problem_mesh(*prob_);
    const KappaParams& kp = problem_kappa(*prob_);
    const auto& sp = params.smoothing;

    DensityField rho_tilde{smoother_.heat_smooth(rho.values, sp.delta)};

    record.negativity_events = 0;
    for (double v : rho_tilde.values)
        if (v < kp.density_floor) ++record.negativity_events;

    StateSolution state = solve_state(rho_tilde);
    record.objective = state.objective;
    record.state_iterations = state.solve_report.iterations;

    NodalField s = sensitivity(rho_tilde, state);
    std::vector<double> s_delta = smoother_.heat_smooth(s.values, sp.delta);
    std::vector<double> rho_bar = smoother_.heat_smooth(rho.values, sp.epsilon);
    for (auto& v : rho_bar) v = std::max(v, 0.0);  // filter weight must stay >= 0
    std::vector<double> s_eta = smoother_.filter_sensitivity(s_delta, rho_bar, sp.eta);

    // M rho' = M rho -/+ tau * K(rho) S_eta, with the transport stiffness
    // weighted by the *current* density (clamped at 0 elementwise). The sign
    // follows the sensitivity convention so the flow always descends: with the
    // adjoint convention (negative scale) S_eta approximates +dJ/drho and the
    // descent direction is -K S_eta; a positive scale flips S_eta's sign and
    // with it the update.
    ElementField rho_elem = nodal_to_element(mesh, rho.values);
    for (auto& c : rho_elem) c = std::max(c, 0.0);
    SparseMatrix k_rho = assemble_stiffness(mesh, rho_elem);
    std::vector<double> rhs = matvec(smoother_.mass(), rho.values);
    std::vector<double> ks = matvec(k_rho, s_eta);
    const double sign = kp.sensitivity_scale > 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += sign * params.tau * ks[i];
    DensityField next{smoother_.mass_factor().solve(rhs)};

    record.total_mass = total_mass(smoother_.mass(), next.values);
    auto [mn, mx] = std::minmax_element(next.values.begin(), next.values.end());
    record.min_rho = *mn;
    record.max_rho = *mx;
    return next;
}

FlowHistory FlowEngine::run(const DensityField& rho0, const FlowParams& params,
                            DensityField* final_rho) const {
    if (params.steps < 0) throw std::invalid_argument("run_flow: steps must be >= 0");
    if (!(params.tau > 0)) throw std::invalid_argument("run_flow: tau must be positive");

    FlowHistory hist;
    DensityField rho = rho0;

    FlowRecord initial;
    initial.step = 0;
    initial.total_mass = total_mass(smoother_.mass(), rho.values);
    auto [mn, mx] = std::minmax_element(rho.values.begin(), rho.values.end());
    initial.min_rho = *mn;
    initial.max_rho = *mx;
    {
        DensityField rho_tilde{smoother_.heat_smooth(rho.values, params.smoothing.delta)};
        StateSolution st = solve_state(rho_tilde);
        initial.objective = st.objective;
        initial.state_iterations = st.solve_report.iterations;
    }
    hist.records.push_back(initial);
    hist.checkpoints.emplace_back(0, rho);

    for (int i = 1; i <= params.steps; ++i) {
        FlowRecord rec;
        rec.step = i;
        try {
            rho = step(rho, params, rec);
        } catch (const std::exception& e) {
            hist.completed = false;
            hist.error = e.what();
            hist.records.push_back(rec);
            break;
        }
        hist.records.push_back(rec);
        if (params.checkpoint_every > 0 && i % params.checkpoint_every == 0)
            hist.checkpoints.emplace_back(i, rho);
    }
    if (final_rho) *final_rho = rho;
    return hist;
}

EtaOrderResult verify_eta_order(const Problem& prob, const DensityField& rho0,
                                const FlowParams& params_base, std::vector<double> etas,
                                double eta_ref, int coarsen_cells) {
    if (etas.size() < 3) throw std::invalid_argument("verify_eta_order: need at least 3 eta values");
    std::sort(etas.begin(), etas.end(), std::greater<>());

    const Mesh& mesh = problem_mesh(prob);
    FlowEngine engine(prob);

    auto run_with_eta = [&](double eta) {
        FlowParams p = params_base;
        p.smoothing.eta = eta;
        FlowHistory h = engine.run(rho0, p);
        if (!h.completed) throw std::runtime_error("verify_eta_order: flow failed: " + h.error);
        return h;
    };

    FlowHistory ref = run_with_eta(eta_ref);

    auto measure_at = [&](const FlowHistory& h, std::size_t k) {
        DiscreteMeasure m = nodal_measure(mesh, h.checkpoints[k].second);
        if (coarsen_cells > 0 &&
            static_cast<int>(m.points.size()) > coarsen_cells * coarsen_cells)
            m = coarsen_measure(m, mesh.lx, mesh.ly, coarsen_cells);
        return m;
    };

    EtaOrderResult res;
    for (double eta : etas) {
        FlowHistory h = run_with_eta(eta);
        double err = 0;
        // skip k = 0: identical initial states
        for (std::size_t k = 1; k < h.checkpoints.size() && k < ref.checkpoints.size(); ++k)
            err = std::max(err, w2_exact(measure_at(h, k), measure_at(ref, k)).distance);
        res.etas.push_back(eta);
        res.errors.push_back(err);
    }

    // least-squares slope of log E vs log eta, excluding exact-zero points
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < res.etas.size(); ++i) {
        if (res.errors[i] <= 0 || res.etas[i] == eta_ref) continue;
        double x = std::log(res.etas[i]), y = std::log(res.errors[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 3) throw std::invalid_argument("verify_eta_order: fewer than 3 usable points for the fit");
    res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return res;
}

}  // namespace topt
