// Acceptance suite: one criterion per invocation, selected by argv[1] (1-8).
// Prints a single [PASS]/[FAIL] line per criterion and exits nonzero on fail.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dense_ref.hpp"
#include "topt/config.hpp"
#include "topt/flow.hpp"
#include "topt/io.hpp"
#include "topt/runner.hpp"
#include "topt/transport.hpp"

using namespace topt;
namespace fs = std::filesystem;

#ifndef TOPT_CONFIG_DIR
#define TOPT_CONFIG_DIR "configs"
#endif

namespace {

std::string config_path(const std::string& name) {
    return std::string(TOPT_CONFIG_DIR) + "/" + name;
}

FlowHistory run_preset_history(const std::string& name, int steps_override = -1) {
    RunConfig cfg = load_config(config_path(name));
    if (steps_override >= 0) cfg.flow.steps = steps_override;
    Problem prob = cfg.make_problem();
    FlowEngine engine(prob);
    DensityField rho0 = cfg.make_rho0(problem_mesh(prob));
    return engine.run(rho0, cfg.flow);
}

// ---- criterion 1: exact mass conservation on the 64x64 heat preset --------

bool criterion_mass(std::string& detail) {
    FlowHistory h = run_preset_history("heat_d2_e2.json", 500);
    if (!h.completed) {
        detail = "flow aborted: " + h.error;
        return false;
    }
    double m0 = h.records.front().total_mass;
    double worst = 0;
    for (const auto& r : h.records) worst = std::max(worst, std::abs(std::log(r.total_mass / m0)));
    std::ostringstream ss;
    ss << "max |log(m_i/m_0)| = " << worst << " over " << h.records.size() - 1 << " steps";
    detail = ss.str();
    return worst < 1e-8;
}

// ---- criterion 2: objective decrease on delta = eta = 1e-2 ----------------

bool criterion_objective(std::string& detail) {
    FlowHistory h = run_preset_history("heat_d2_e2.json", 200);
    if (!h.completed) {
        detail = "flow aborted: " + h.error;
        return false;
    }
    double j0 = h.records.front().objective;
    int violations = 0;
    double worst = 0;
    for (std::size_t i = 1; i < h.records.size(); ++i) {
        double rise = h.records[i].objective - h.records[i - 1].objective;
        if (rise > 1e-6 * j0) {
            ++violations;
            worst = std::max(worst, rise);
        }
    }
    double jf = h.records.back().objective;
    std::ostringstream ss;
    ss << "J0 = " << j0 << ", J_final = " << jf << ", rises above tol: " << violations;
    detail = ss.str();
    return violations == 0 && jf < j0;
}

// ---- criterion 3: FD sensitivity check (heat 8x8, elastic 8x4) ------------

template <typename Prob>
bool fd_check(const Prob& prob, double delta, double& worst) {
    const Mesh& mesh = prob.mesh;
    SmoothingOperator smoother(mesh);
    auto j_delta = [&](const std::vector<double>& rho) {
        DensityField rt{smoother.heat_smooth(rho, delta)};
        if constexpr (std::is_same_v<Prob, HeatProblem>)
            return solve_state_heat(prob, rt).objective;
        else
            return solve_state_elastic(prob, rt).objective;
    };
    auto sens = [&](const DensityField& rt, const StateSolution& st) {
        if constexpr (std::is_same_v<Prob, HeatProblem>)
            return sensitivity_heat(prob, rt, st);
        else
            return sensitivity_elastic(prob, rt, st);
    };

    testref::Rng rng(99);
    std::vector<double> base(mesh.node_count());
    for (auto& v : base) v = 1.0 + 0.1 * rng.uniform(-1, 1);

    DensityField rho_tilde{smoother.heat_smooth(base, delta)};
    StateSolution st = [&] {
        if constexpr (std::is_same_v<Prob, HeatProblem>)
            return solve_state_heat(prob, rho_tilde);
        else
            return solve_state_elastic(prob, rho_tilde);
    }();
    NodalField s = sens(rho_tilde, st);
    auto lumped = lumped_areas(mesh);

    const double tau_fd = 1e-4;
    for (int dir = 0; dir < 5; ++dir) {
        std::vector<double> psi(mesh.node_count());
        for (auto& v : psi) v = rng.uniform(-1, 1);
        std::vector<double> up = base, dn = base;
        for (int i = 0; i < mesh.node_count(); ++i) {
            up[i] += tau_fd * psi[i];
            dn[i] -= tau_fd * psi[i];
        }
        double fd = (j_delta(up) - j_delta(dn)) / (2 * tau_fd);
        // the smoothing is L2 self-adjoint: int S_delta psi is evaluated by
        // moving the smoothing onto the direction psi
        auto psi_delta = smoother.heat_smooth(psi, delta);
        double assembled = 0;
        for (int i = 0; i < mesh.node_count(); ++i)
            assembled += lumped[i] * s.values[i] * psi_delta[i];
        double rel = std::abs(fd - assembled) / std::max(1e-14, std::abs(fd));
        worst = std::max(worst, rel);
        if (rel >= 1e-3) return false;
    }
    return true;
}

bool criterion_sensitivity(std::string& detail) {
    HeatProblem heat;
    BoundarySpec hspec;
    hspec.segments.push_back({Edge::Left, 0.25, 0.75, BoundaryTag::Gamma0});
    heat.mesh = tag_boundary(build_rect_mesh(1, 1, 8, 8), hspec);
    heat.kappa.a = 1.3;
    heat.kappa.p = 3;
    heat.f = 0.5;

    ElasticProblem el;
    BoundarySpec espec;
    espec.segments.push_back({Edge::Left, 0.0, 1.0, BoundaryTag::Gamma0});
    espec.segments.push_back({Edge::Right, 0.25, 0.75, BoundaryTag::Gamma1});
    el.mesh = tag_boundary(build_rect_mesh(2, 1, 8, 4), espec);
    el.kappa.a = 2.0;
    el.kappa.p = 3;
    el.lambda1 = 15.0 / 26.0;
    el.lambda2 = 5.0 / 13.0;
    el.g = {0.0, -1.0};

    double worst = 0;
    bool ok = fd_check(heat, 1e-2, worst) && fd_check(el, 1e-2, worst);
    std::ostringstream ss;
    ss << "worst relative FD error = " << worst << " (tol 1e-3)";
    detail = ss.str();
    return ok;
}

// ---- criterion 4: manufactured strip solution -----------------------------

bool criterion_manufactured(std::string& detail) {
    // kappa == 1 is pinned with a huge density; exact solution u = x - x^2/2,
    // J = 1/2 int f u = 1/6 on the unit square with f = 1, u = 0 on x = 0
    auto strip = [&](int n) {
        HeatProblem p;
        BoundarySpec spec;
        spec.segments.push_back({Edge::Left, 0.0, 1.0, BoundaryTag::Gamma0});
        p.mesh = tag_boundary(build_rect_mesh(1, 1, n, n), spec);
        p.f = 1.0;
        DensityField rho{std::vector<double>(p.mesh.node_count(), 1e6)};
        StateSolution st = solve_state_heat(p, rho);
        double err2 = 0;
        for (int t = 0; t < p.mesh.tri_count(); ++t) {
            const auto& tri = p.mesh.triangles[t];
            double e2 = 0;
            for (int v : tri) {
                double x = p.mesh.nodes[v][0];
                double diff = st.u.values[v] - (x - x * x / 2);
                e2 += diff * diff;
            }
            err2 += p.mesh.tri_area(t) * e2 / 3.0;
        }
        return std::make_pair(std::sqrt(err2), st.objective);
    };

    double e8 = strip(8).first, e16 = strip(16).first, e32 = strip(32).first;
    double r1 = e8 / e16, r2 = e16 / e32;
    double j64 = strip(64).second;
    std::ostringstream ss;
    ss << "L2 ratios " << r1 << ", " << r2 << "; J(64) = " << j64;
    detail = ss.str();
    bool rates = r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5;
    return rates && std::abs(j64 - 1.0 / 6.0) < 1e-3;
}

// ---- criterion 5: smoothing/filter dense oracles + maximum principle ------

bool criterion_smoothing(std::string& detail) {
    auto mesh = build_rect_mesh(1, 1, 8, 8);
    SmoothingOperator op(mesh);
    testref::Rng rng(7);

    double worst_oracle = 0;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> f(mesh.node_count());
        for (auto& v : f) v = rng.uniform(-1, 2);
        double t = rng.uniform(1e-4, 1e-1);

        auto sm = op.heat_smooth(f, t);
        auto sys = SparseMatrix::axpy(op.mass(), t, op.unit_stiffness());
        auto ref = testref::dense_solve(sys, matvec(op.mass(), f));
        for (int i = 0; i < mesh.node_count(); ++i)
            worst_oracle = std::max(worst_oracle, std::abs(sm[i] - ref[i]));

        std::vector<double> rho_bar(mesh.node_count());
        for (auto& v : rho_bar) v = rng.uniform(0.2, 2.0);
        auto filt = op.filter_sensitivity(f, rho_bar, t);
        auto kbar = assemble_stiffness(mesh, nodal_to_element(mesh, rho_bar));
        auto fsys = SparseMatrix::axpy(op.mass(), t, kbar);
        auto fref = testref::dense_solve(fsys, matvec(op.mass(), f));
        for (int i = 0; i < mesh.node_count(); ++i)
            worst_oracle = std::max(worst_oracle, std::abs(filt[i] - fref[i]));
    }

    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> f(mesh.node_count());
        for (auto& v : f) v = rng.uniform(-1, 2);
        double lo = *std::min_element(f.begin(), f.end());
        double hi = *std::max_element(f.begin(), f.end());
        auto out = op.heat_smooth(f, rng.uniform(1e-5, 1e-1));
        for (double v : out)
            if (v < lo - 1e-11 || v > hi + 1e-11) ++violations;
    }

    std::ostringstream ss;
    ss << "worst oracle gap = " << worst_oracle << " (tol 1e-10), max-principle violations: "
       << violations;
    detail = ss.str();
    return worst_oracle < 1e-10 && violations == 0;
}

// ---- criterion 6: eta-order measurement on 16x16 --------------------------

bool criterion_eta_order(std::string& detail) {
    RunConfig cfg = load_config(config_path("verify_order.json"));
    Problem prob = cfg.make_problem();
    DensityField rho0 = cfg.make_rho0(problem_mesh(prob));
    EtaOrderResult res =
        verify_eta_order(prob, rho0, cfg.flow, {1e-2, 1e-3, 1e-4}, 1e-6, cfg.coarsen);
    bool monotone = res.errors[0] > res.errors[1] && res.errors[1] > res.errors[2];
    std::ostringstream ss;
    ss << "E = {" << res.errors[0] << ", " << res.errors[1] << ", " << res.errors[2]
       << "}, slope = " << res.slope;
    detail = ss.str();
    return monotone && res.slope >= 0.3 && res.slope <= 1.2;
}

// ---- criterion 7: entropic vs exact OT + metric checks --------------------

bool criterion_transport(std::string& detail) {
    testref::Rng rng(21);
    auto random_measure = [&](int n) {
        DiscreteMeasure m;
        double total = 0;
        for (int i = 0; i < n; ++i) {
            m.points.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
            m.weights.push_back(rng.uniform(0.1, 1.0));
            total += m.weights.back();
        }
        for (auto& w : m.weights) w /= total;
        return m;
    };

    double worst_rel = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto mu = random_measure(2 + trial % 15);
        auto nu = random_measure(2 + (trial * 5) % 15);
        double exact = w2_exact(mu, nu).distance;
        double ent = w2_entropic(mu, nu);
        double rel = std::abs(ent - exact) / std::max(1e-14, exact);
        worst_rel = std::max(worst_rel, rel);
    }

    double worst_metric = 0;
    for (int trial = 0; trial < 10; ++trial) {
        auto a = random_measure(6);
        auto b = random_measure(7);
        auto c = random_measure(5);
        double dab = w2_exact(a, b).distance;
        double dba = w2_exact(b, a).distance;
        double dac = w2_exact(a, c).distance;
        double dcb = w2_exact(c, b).distance;
        worst_metric = std::max(worst_metric, std::abs(dab - dba));
        worst_metric = std::max(worst_metric, std::max(0.0, dab - dac - dcb));
    }

    std::ostringstream ss;
    ss << "worst entropic relative error = " << worst_rel
       << " (tol 1e-2), worst metric violation = " << worst_metric << " (tol 1e-9)";
    detail = ss.str();
    return worst_rel < 1e-2 && worst_metric < 1e-9;
}

// ---- criterion 8: full preset reproduction surface ------------------------

bool criterion_presets(std::string& detail) {
    fs::path out_root = fs::temp_directory_path() / "topt_acceptance_presets";
    fs::remove_all(out_root);

    std::vector<std::string> names;
    for (const char* fam : {"heat", "elastic"})
        for (int d : {2, 3, 4})
            for (int e : {2, 3, 4})
                names.push_back(std::string(fam) + "_d" + std::to_string(d) + "_e" +
                                std::to_string(e));

    double worst_ratio = 1e300;
    std::string failed;
    for (const auto& name : names) {
        std::string dir = (out_root / name).string();
        if (cmd_run(config_path(name + ".json"), dir) != 0) {
            failed = name + ": run failed";
            break;
        }
        for (const char* f : {"history.csv", "final.vtk", "objective.svg", "mass_error.svg"}) {
            if (!fs::exists(fs::path(dir) / f)) {
                failed = name + ": missing " + f;
                break;
            }
        }
        if (!failed.empty()) break;
        VtkDensity fin = read_vtk_density(dir + "/final.vtk");
        double mn = *std::min_element(fin.rho.begin(), fin.rho.end());
        double mx = *std::max_element(fin.rho.begin(), fin.rho.end());
        double ratio = mn <= 0 ? 1e300 : mx / mn;
        worst_ratio = std::min(worst_ratio, ratio);
        if (ratio <= 10) {
            failed = name + ": max/min ratio " + std::to_string(ratio);
            break;
        }
    }
    fs::remove_all(out_root);

    std::ostringstream ss;
    if (!failed.empty()) {
        ss << failed;
    } else {
        ss << names.size() << " presets completed, smallest max/min nodal ratio ";
        if (worst_ratio >= 1e299)
            ss << "unbounded (voids reach non-positive density)";
        else
            ss << "= " << worst_ratio;
    }
    detail = ss.str();
    return failed.empty();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <criterion 1-8>\n";
        return 2;
    }
    int crit = std::atoi(argv[1]);

    struct Entry {
        const char* label;
        std::function<bool(std::string&)> fn;
    };
    const Entry table[] = {
        {"mass conservation on the 64x64 heat preset", criterion_mass},
        {"objective decrease (delta = eta = 1e-2)", criterion_objective},
        {"finite-difference sensitivity agreement", criterion_sensitivity},
        {"manufactured strip solution convergence", criterion_manufactured},
        {"smoothing/filter dense oracles and maximum principle", criterion_smoothing},
        {"filtering error order in eta", criterion_eta_order},
        {"entropic vs exact transport and metric checks", criterion_transport},
        {"full preset reproduction surface", criterion_presets},
    };
    if (crit < 1 || crit > 8) {
        std::cerr << "usage: acceptance <criterion 1-8>\n";
        return 2;
    }

    const Entry& e = table[crit - 1];
    std::string detail;
    bool ok = false;
    try {
        ok = e.fn(detail);
    } catch (const std::exception& ex) {
        detail = std::string("exception: ") + ex.what();
    }
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << crit << ": " << e.label << " — "
              << detail << "\n";
    return ok ? 0 : 1;
}
