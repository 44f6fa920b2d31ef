#include "topt/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "topt/io.hpp"
#include "topt/transport.hpp"

namespace topt {

namespace fs = std::filesystem;

namespace {

int worker_limit(int jobs) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    int limit = jobs > 0 ? jobs : hw;
    if (const char* env = std::getenv("TOPT_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) limit = std::min(limit, cap);
    }
    return std::max(1, limit);
}

struct RunOutputs {
    FlowHistory history;
    DensityField final_rho;
    StateSolution final_state;
};

RunOutputs execute_flow(const RunConfig& cfg) {
    Problem prob = cfg.make_problem();
    FlowEngine engine(prob);
    DensityField rho0 = cfg.make_rho0(problem_mesh(prob));
    RunOutputs out;
    out.history = engine.run(rho0, cfg.flow, &out.final_rho);
    try {
        DensityField rho_tilde{engine.smoother().heat_smooth(out.final_rho.values,
                                                             cfg.flow.smoothing.delta)};
        out.final_state = engine.solve_state(rho_tilde);
    } catch (const std::exception& e) {
        // keep the artifacts writable; the run is reported as aborted
        out.history.completed = false;
        if (out.history.error.empty()) out.history.error = e.what();
    }
    return out;
}

void write_run_artifacts(const RunConfig& cfg, const RunOutputs& out, const std::string& dir) {
    fs::create_directories(dir);
    RunConfig resolved = cfg;
    resolved.output_dir = dir;
    save_config(resolved, dir + "/resolved-config.json");
    write_history_csv(dir + "/history.csv", out.history);

    Problem prob = cfg.make_problem();
    const Mesh& mesh = problem_mesh(prob);
    const NodalField* u = out.final_state.u.values.empty() ? nullptr : &out.final_state.u;
    write_vtk(dir + "/final.vtk", mesh, out.final_rho.values, u);

    SvgSeries obj, mass;
    double m0 = out.history.records.front().total_mass;
    for (const auto& r : out.history.records) {
        obj.x.push_back(r.step);
        obj.y.push_back(r.objective);
        mass.x.push_back(r.step);
        mass.y.push_back(std::log(r.total_mass / m0));
    }
    obj.label = "objective";
    mass.label = "log relative mass error";
    write_svg_plot(dir + "/objective.svg", {obj}, "step", "objective");
    write_svg_plot(dir + "/mass_error.svg", {mass}, "step", "log(m/m0)");
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_override) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (!out_override.empty()) cfg.output_dir = out_override;
    try {
        RunOutputs out = execute_flow(cfg);
        write_run_artifacts(cfg, out, cfg.output_dir);
        if (!out.history.completed) {
            std::cerr << "error: flow aborted: " << out.history.error << "\n";
            return 1;
        }
        std::cout << "run complete: " << cfg.output_dir << " (J_final = "
                  << out.history.records.back().objective << ")\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_sweep(const std::string& config_path, int jobs) {
    RunConfig base;
    try {
        base = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<double> deltas = base.sweep_deltas.empty()
                                     ? std::vector<double>{base.flow.smoothing.delta}
                                     : base.sweep_deltas;
    std::vector<double> etas =
        base.sweep_etas.empty() ? std::vector<double>{base.flow.smoothing.eta} : base.sweep_etas;

    struct Entry {
        double delta, eta;
        std::string dir;
        bool ok = false;
        std::string error;
        double final_j = 0, mass_drift = 0;
    };
    std::vector<Entry> entries;
    for (double d : deltas)
        for (double e : etas) {
            std::ostringstream name;
            name << base.output_dir << "/d" << std::scientific << std::setprecision(0) << d
                 << "_e" << e;
            entries.push_back({d, e, name.str()});
        }

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= entries.size()) return;
            Entry& en = entries[k];
            RunConfig cfg = base;
            cfg.sweep_deltas.clear();
            cfg.sweep_etas.clear();
            cfg.flow.smoothing.delta = en.delta;
            cfg.flow.smoothing.eta = en.eta;
            cfg.flow.tau = base.tau_for(en.delta, en.eta);
            cfg.output_dir = en.dir;
            try {
                RunOutputs out = execute_flow(cfg);
                write_run_artifacts(cfg, out, en.dir);
                if (!out.history.completed) {
                    en.error = out.history.error;
                    continue;
                }
                en.ok = true;
                en.final_j = out.history.records.back().objective;
                double m0 = out.history.records.front().total_mass;
                for (const auto& r : out.history.records)
                    en.mass_drift = std::max(en.mass_drift, std::abs(std::log(r.total_mass / m0)));
            } catch (const std::exception& ex) {
                en.error = ex.what();
            }
        }
    };

    int nworkers = std::min<int>(worker_limit(jobs), static_cast<int>(entries.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < nworkers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    fs::create_directories(base.output_dir);
    std::ofstream summary(base.output_dir + "/summary.csv");
    summary << std::setprecision(17) << "delta,eta,tau,status,final_objective,max_abs_log_mass_drift,dir\n";
    bool any_fail = false;
    for (const auto& en : entries) {
        summary << en.delta << "," << en.eta << "," << base.tau_for(en.delta, en.eta) << ","
                << (en.ok ? "ok" : "failed") << "," << en.final_j << "," << en.mass_drift << ","
                << en.dir << "\n";
        if (!en.ok) {
            any_fail = true;
            std::cerr << "sweep entry failed (delta=" << en.delta << ", eta=" << en.eta
                      << "): " << en.error << "\n";
        }
    }
    std::cout << "sweep complete: " << entries.size() << " entries, summary at "
              << base.output_dir << "/summary.csv\n";
    return any_fail ? 1 : 0;
}

int cmd_verify_order(const std::string& config_path) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        if (cfg.order_etas.size() < 3) {
            std::cerr << "error: verify-order needs at least 3 eta values\n";
            return 2;
        }
        Problem prob = cfg.make_problem();
        DensityField rho0 = cfg.make_rho0(problem_mesh(prob));
        EtaOrderResult res =
            verify_eta_order(prob, rho0, cfg.flow, cfg.order_etas, cfg.eta_ref, cfg.coarsen);

        fs::create_directories(cfg.output_dir);
        std::ofstream csv(cfg.output_dir + "/eta_order.csv");
        csv << std::setprecision(17) << "eta,E\n";
        SvgSeries s;
        for (std::size_t i = 0; i < res.etas.size(); ++i) {
            csv << res.etas[i] << "," << res.errors[i] << "\n";
            if (res.errors[i] > 0) {
                s.x.push_back(res.etas[i]);
                s.y.push_back(res.errors[i]);
            }
        }
        std::ostringstream label;
        label << "fitted slope = " << std::setprecision(4) << res.slope;
        s.label = label.str();
        write_svg_plot(cfg.output_dir + "/eta_order.svg", {s}, "eta", "E(eta)", true, true);
        save_config(cfg, cfg.output_dir + "/resolved-config.json");
        std::cout << "eta-order slope: " << res.slope << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_w2(const std::string& file_a, const std::string& file_b, int coarsen,
           const std::string& method) {
    try {
        VtkDensity a = read_vtk_density(file_a);
        VtkDensity b = read_vtk_density(file_b);
        if (a.mesh.nodes.size() != b.mesh.nodes.size() ||
            a.mesh.triangles.size() != b.mesh.triangles.size())
            throw std::runtime_error("w2: meshes do not match");
        for (std::size_t i = 0; i < a.mesh.nodes.size(); ++i)
            if (std::abs(a.mesh.nodes[i][0] - b.mesh.nodes[i][0]) > 1e-12 ||
                std::abs(a.mesh.nodes[i][1] - b.mesh.nodes[i][1]) > 1e-12)
                throw std::runtime_error("w2: meshes do not match");

        DiscreteMeasure ma = nodal_measure(a.mesh, DensityField{a.rho});
        DiscreteMeasure mb = nodal_measure(b.mesh, DensityField{b.rho});
        if (coarsen > 0) {
            ma = coarsen_measure(ma, a.mesh.lx, a.mesh.ly, coarsen);
            mb = coarsen_measure(mb, b.mesh.lx, b.mesh.ly, coarsen);
        }
        bool small = ma.points.size() <= 512 && mb.points.size() <= 512;
        double dist;
        std::string used;
        if (method == "exact" || (method == "auto" && small)) {
            dist = w2_exact(ma, mb).distance;
            used = "exact";
        } else {
            dist = w2_entropic(ma, mb);
            used = "entropic";
        }
        std::cout << std::setprecision(12) << dist << " (" << used << ")\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace topt
