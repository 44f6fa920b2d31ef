#include "topt/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "topt/io.hpp"

namespace topt {

namespace {

using nlohmann::json;

Edge parse_edge(const std::string& s) {
    if (s == "left") return Edge::Left;
    if (s == "right") return Edge::Right;
    if (s == "bottom") return Edge::Bottom;
    if (s == "top") return Edge::Top;
    throw std::invalid_argument("config: unknown edge '" + s + "'");
}

std::string edge_name(Edge e) {
    switch (e) {
        case Edge::Left: return "left";
        case Edge::Right: return "right";
        case Edge::Bottom: return "bottom";
        default: return "top";
    }
}

BoundaryTag parse_tag(const std::string& s) {
    if (s == "gamma0") return BoundaryTag::Gamma0;
    if (s == "gamma1") return BoundaryTag::Gamma1;
    throw std::invalid_argument("config: boundary tag must be gamma0 or gamma1");
}

}  // namespace

double RunConfig::tau_for(double delta, double eta) const {
    for (const auto& o : tau_map)
        if (o.delta == delta && o.eta == eta) return o.tau;
    return flow.tau;
}

Problem RunConfig::make_problem() const {
    Mesh mesh = tag_boundary(build_rect_mesh(lx, ly, nx, ny), boundary);
    if (problem == "heat") {
        HeatProblem p;
        p.mesh = std::move(mesh);
        p.kappa = material;
        p.f = f_scalar;
        p.g = g_scalar;
        return p;
    }
    if (problem == "elastic") {
        ElasticProblem p;
        p.mesh = std::move(mesh);
        p.kappa = material;
        p.lambda1 = lambda1;
        p.lambda2 = lambda2;
        p.f = f_vec;
        p.g = g_vec;
        return p;
    }
    throw std::invalid_argument("config: problem must be 'heat' or 'elastic'");
}

DensityField RunConfig::make_rho0(const Mesh& mesh) const {
    if (!rho0_file.empty()) {
        VtkDensity d = read_vtk_density(rho0_file);
        if (static_cast<int>(d.rho.size()) != mesh.node_count())
            throw std::invalid_argument("config: initial density file does not match the mesh");
        return DensityField{d.rho};
    }
    return DensityField{std::vector<double>(mesh.node_count(), rho0)};
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }

    RunConfig c;
    c.problem = j.value("problem", c.problem);
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        c.lx = d.value("lx", c.lx);
        c.ly = d.value("ly", c.ly);
        c.nx = d.value("nx", c.nx);
        c.ny = d.value("ny", c.ny);
    }
    if (j.contains("boundary")) {
        for (const auto& s : j["boundary"]) {
            BoundarySegment seg;
            seg.edge = parse_edge(s.at("edge").get<std::string>());
            seg.s0 = s.at("from").get<double>();
            seg.s1 = s.at("to").get<double>();
            seg.tag = parse_tag(s.at("tag").get<std::string>());
            c.boundary.segments.push_back(seg);
        }
    }
    if (j.contains("material")) {
        const auto& m = j["material"];
        c.material.a = m.value("a", c.material.a);
        c.material.p = m.value("p", c.material.p);
        std::string variant = m.value("variant", std::string("penalized"));
        if (variant == "penalized")
            c.material.variant = KappaVariant::Penalized;
        else if (variant == "saturating")
            c.material.variant = KappaVariant::Saturating;
        else
            throw std::invalid_argument("config: material.variant must be penalized or saturating");
        c.material.sensitivity_scale = m.value("sensitivity_scale", c.material.sensitivity_scale);
        c.material.density_floor = m.value("density_floor", c.material.density_floor);
    }
    if (j.contains("lame")) {
        c.lambda1 = j["lame"].value("lambda1", c.lambda1);
        c.lambda2 = j["lame"].value("lambda2", c.lambda2);
    }
    if (j.contains("sources")) {
        const auto& s = j["sources"];
        if (s.contains("f")) {
            if (s["f"].is_array())
                c.f_vec = {s["f"][0].get<double>(), s["f"][1].get<double>()};
            else
                c.f_scalar = s["f"].get<double>();
        }
        if (s.contains("g")) {
            if (s["g"].is_array())
                c.g_vec = {s["g"][0].get<double>(), s["g"][1].get<double>()};
            else
                c.g_scalar = s["g"].get<double>();
        }
    }
    if (j.contains("flow")) {
        const auto& fl = j["flow"];
        auto scalar_or_list = [&](const char* key, double fallback, std::vector<double>& list) {
            if (!fl.contains(key)) return fallback;
            if (fl[key].is_array()) {
                list = fl[key].get<std::vector<double>>();
                return list.empty() ? fallback : list.front();
            }
            return fl[key].get<double>();
        };
        c.flow.smoothing.delta = scalar_or_list("delta", c.flow.smoothing.delta, c.sweep_deltas);
        c.flow.smoothing.eta = scalar_or_list("eta", c.flow.smoothing.eta, c.sweep_etas);
        c.flow.smoothing.epsilon = fl.value("epsilon", c.flow.smoothing.epsilon);
        c.flow.tau = fl.value("tau", c.flow.tau);
        c.flow.steps = fl.value("steps", c.flow.steps);
        c.flow.checkpoint_every = fl.value("checkpoint_every", c.flow.checkpoint_every);
        if (fl.contains("tau_map"))
            for (const auto& o : fl["tau_map"])
                c.tau_map.push_back({o.at("delta").get<double>(), o.at("eta").get<double>(),
                                     o.at("tau").get<double>()});
    }
    if (j.contains("initial_density")) {
        if (j["initial_density"].is_object())
            c.rho0_file = j["initial_density"].value("file", std::string());
        else
            c.rho0 = j["initial_density"].get<double>();
    }
    c.output_dir = j.value("output", c.output_dir);
    c.seed = j.value("seed", c.seed);
    if (j.contains("order")) {
        const auto& o = j["order"];
        if (o.contains("etas")) c.order_etas = o["etas"].get<std::vector<double>>();
        c.eta_ref = o.value("eta_ref", c.eta_ref);
        c.coarsen = o.value("coarsen", c.coarsen);
    }
    return c;
}

void save_config(const RunConfig& c, const std::string& path) {
    json j;
    j["problem"] = c.problem;
    j["domain"] = {{"lx", c.lx}, {"ly", c.ly}, {"nx", c.nx}, {"ny", c.ny}};
    j["boundary"] = json::array();
    for (const auto& s : c.boundary.segments)
        j["boundary"].push_back({{"edge", edge_name(s.edge)},
                                 {"from", s.s0},
                                 {"to", s.s1},
                                 {"tag", s.tag == BoundaryTag::Gamma0 ? "gamma0" : "gamma1"}});
    j["material"] = {{"a", c.material.a},
                     {"p", c.material.p},
                     {"variant", c.material.variant == KappaVariant::Penalized ? "penalized" : "saturating"},
                     {"sensitivity_scale", c.material.sensitivity_scale},
                     {"density_floor", c.material.density_floor}};
    if (c.problem == "elastic") {
        j["lame"] = {{"lambda1", c.lambda1}, {"lambda2", c.lambda2}};
        j["sources"] = {{"f", {c.f_vec[0], c.f_vec[1]}}, {"g", {c.g_vec[0], c.g_vec[1]}}};
    } else {
        j["sources"] = {{"f", c.f_scalar}, {"g", c.g_scalar}};
    }
    json fl;
    if (c.sweep_deltas.size() > 1)
        fl["delta"] = c.sweep_deltas;
    else
        fl["delta"] = c.flow.smoothing.delta;
    if (c.sweep_etas.size() > 1)
        fl["eta"] = c.sweep_etas;
    else
        fl["eta"] = c.flow.smoothing.eta;
    fl["epsilon"] = c.flow.smoothing.epsilon;
    fl["tau"] = c.flow.tau;
    fl["steps"] = c.flow.steps;
    fl["checkpoint_every"] = c.flow.checkpoint_every;
    if (!c.tau_map.empty()) {
        fl["tau_map"] = json::array();
        for (const auto& o : c.tau_map)
            fl["tau_map"].push_back({{"delta", o.delta}, {"eta", o.eta}, {"tau", o.tau}});
    }
    j["flow"] = fl;
    if (!c.rho0_file.empty())
        j["initial_density"] = {{"file", c.rho0_file}};
    else
        j["initial_density"] = c.rho0;
    j["output"] = c.output_dir;
    j["seed"] = c.seed;
    if (!c.order_etas.empty())
        j["order"] = {{"etas", c.order_etas}, {"eta_ref", c.eta_ref}, {"coarsen", c.coarsen}};
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write config: " + path);
    f << j.dump(2) << "\n";
}

}  // namespace topt
