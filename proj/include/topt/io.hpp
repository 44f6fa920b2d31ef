#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topt/fem.hpp"
#include "topt/flow.hpp"
#include "topt/mesh.hpp"

namespace topt {

/// Legacy ASCII VTK unstructured grid with the density as POINT_DATA SCALARS
/// "rho" and, when present, the state as VECTORS "u".
void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<double>& rho,
               const NodalField* u = nullptr);

struct VtkDensity {
    Mesh mesh;  // nodes/triangles only; no boundary tags
    std::vector<double> rho;
};

/// Reads back the files written by write_vtk (points, cells, SCALARS rho).
VtkDensity read_vtk_density(const std::string& path);

/// history.csv: step, objective, total_mass, log_rel_mass_error, min_rho,
/// max_rho, cg_iters_state, negativity_events.
void write_history_csv(const std::string& path, const FlowHistory& hist);

struct SvgSeries {
    std::vector<double> x, y;
    std::string label;
};

/// Minimal polyline line chart, optionally log-scaled per axis.
void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& x_label, const std::string& y_label,
                    bool logx = false, bool logy = false);

}  // namespace topt
