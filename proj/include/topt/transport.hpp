#pragma once

#include <array>
#include <vector>

#include "topt/mesh.hpp"
#include "topt/smoothing.hpp"

namespace topt {

struct DiscreteMeasure {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;  // nonnegative, summing to 1
};

struct PlanEntry {
    int i = 0, j = 0;
    double mass = 0;
};

struct TransportPlan {
    std::vector<PlanEntry> entries;
};

struct ExactW2Result {
    double distance = 0;
    TransportPlan plan;
};

/// Exact 2-Wasserstein distance by network simplex on the dense bipartite
/// transportation problem. Supports up to 512 points per side.
ExactW2Result w2_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Debiased entropic estimate: Sinkhorn with an epsilon-scaling schedule on
/// the squared-distance cost, returning sqrt of the Sinkhorn divergence.
double w2_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   double reg = -1, int max_iter = 500);

/// Nodal measure of a density: support = mesh nodes, weights = consistent
/// nodal masses (M rho), negatives clamped to 0, normalized to unit mass.
DiscreteMeasure nodal_measure(const Mesh& mesh, const DensityField& rho);

/// Aggregates a nodal measure onto a cells x cells grid of cell centers
/// covering [0,lx]x[0,ly]; empty cells are dropped.
DiscreteMeasure coarsen_measure(const DiscreteMeasure& m, double lx, double ly, int cells);

}  // namespace topt
