#include "topt/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace topt {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << std::setprecision(17);
    return f;
}

}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<double>& rho,
               const NodalField* u) {
    auto f = open_out(path);
    f << "# vtk DataFile Version 3.0\n";
    f << "density field\n";
    f << "ASCII\n";
    f << "DATASET UNSTRUCTURED_GRID\n";
    f << "POINTS " << mesh.node_count() << " double\n";
    for (const auto& p : mesh.nodes) f << p[0] << " " << p[1] << " 0\n";
    f << "CELLS " << mesh.tri_count() << " " << 4 * mesh.tri_count() << "\n";
    for (const auto& t : mesh.triangles) f << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    f << "CELL_TYPES " << mesh.tri_count() << "\n";
    for (int t = 0; t < mesh.tri_count(); ++t) f << "5\n";
    f << "POINT_DATA " << mesh.node_count() << "\n";
    f << "SCALARS rho double 1\n";
    f << "LOOKUP_TABLE default\n";
    for (double v : rho) f << v << "\n";
    if (u) {
        f << "VECTORS u double\n";
        if (u->components == 1) {
            for (double v : u->values) f << v << " 0 0\n";
        } else {
            for (int i = 0; i < mesh.node_count(); ++i)
                f << u->values[2 * i] << " " << u->values[2 * i + 1] << " 0\n";
        }
    }
}

VtkDensity read_vtk_density(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    VtkDensity out;
    std::string tok;
    int npoints = -1, ncells = -1;
    while (f >> tok) {
        if (tok == "POINTS") {
            f >> npoints >> tok;
            out.mesh.nodes.resize(npoints);
            for (int i = 0; i < npoints; ++i) {
                double x, y, z;
                f >> x >> y >> z;
                out.mesh.nodes[i] = {x, y};
            }
        } else if (tok == "CELLS") {
            int total;
            f >> ncells >> total;
            out.mesh.triangles.resize(ncells);
            for (int c = 0; c < ncells; ++c) {
                int k, a, b, d;
                f >> k >> a >> b >> d;
                if (k != 3) throw std::runtime_error("read_vtk_density: non-triangle cell");
                out.mesh.triangles[c] = {a, b, d};
            }
        } else if (tok == "SCALARS") {
            std::string name, type;
            f >> name >> type;
            std::getline(f, tok);  // rest of line (component count)
            f >> tok;              // LOOKUP_TABLE
            f >> tok;              // default
            if (npoints < 0) throw std::runtime_error("read_vtk_density: SCALARS before POINTS");
            out.rho.resize(npoints);
            for (int i = 0; i < npoints; ++i) f >> out.rho[i];
            if (name == "rho") break;
        }
    }
    if (out.rho.empty()) throw std::runtime_error("read_vtk_density: no scalar field found");
    double maxx = 0, maxy = 0;
    for (const auto& p : out.mesh.nodes) {
        maxx = std::max(maxx, p[0]);
        maxy = std::max(maxy, p[1]);
    }
    out.mesh.lx = maxx;
    out.mesh.ly = maxy;
    return out;
}

void write_history_csv(const std::string& path, const FlowHistory& hist) {
    auto f = open_out(path);
    f << "step,objective,total_mass,log_rel_mass_error,min_rho,max_rho,cg_iters_state,"
         "negativity_events\n";
    double m0 = hist.records.empty() ? 1.0 : hist.records.front().total_mass;
    for (const auto& r : hist.records) {
        double log_rel = std::log(r.total_mass / m0);
        f << r.step << "," << r.objective << "," << r.total_mass << "," << log_rel << ","
          << r.min_rho << "," << r.max_rho << "," << r.state_iterations << ","
          << r.negativity_events << "\n";
    }
}

void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& x_label, const std::string& y_label, bool logx,
                    bool logy) {
    const int W = 720, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    auto f = open_out(path);

    auto tx = [&](double v) { return logx ? std::log10(std::max(v, 1e-300)) : v; };
    auto ty = [&](double v) { return logy ? std::log10(std::max(v, 1e-300)) : v; };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            xmin = std::min(xmin, tx(s.x[k]));
            xmax = std::max(xmax, tx(s.x[k]));
            ymin = std::min(ymin, ty(s.y[k]));
            ymax = std::max(ymax, ty(s.y[k]));
        }
    if (!(xmax > xmin)) { xmax = xmin + 1; xmin -= 1; }
    if (!(ymax > ymin)) { ymax = ymin + 1; ymin -= 1; }

    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double v) { return H - mb - (ty(v) - ymin) / (ymax - ymin) * (H - mt - mb); };

    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    f << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
      << "\" stroke=\"black\"/>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    int ci = 0;
    for (const auto& s : series) {
        f << "<polyline fill=\"none\" stroke=\"" << colors[ci % 6] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k)
            f << px(s.x[k]) << "," << py(s.y[k]) << " ";
        f << "\"/>\n";
        if (!s.label.empty())
            f << "<text x=\"" << W - mr - 200 << "\" y=\"" << mt + 18 * (ci + 1) << "\" fill=\""
              << colors[ci % 6] << "\" font-size=\"13\">" << s.label << "</text>\n";
        ++ci;
    }
    f << "<text x=\"" << (W / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"14\">"
      << x_label << (logx ? " (log10)" : "") << "</text>\n";
    f << "<text x=\"18\" y=\"" << (H / 2) << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
      << (H / 2) << ")\">" << y_label << (logy ? " (log10)" : "") << "</text>\n";
    f << "</svg>\n";
}

}  // namespace topt
