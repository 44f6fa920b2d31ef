#pragma once

#include <string>

#include "topt/config.hpp"

namespace topt {

/// Executes a single flow run: history.csv, final VTK, objective/mass SVG
/// plots, and resolved-config.json in the output directory.
int cmd_run(const std::string& config_path, const std::string& out_override = "");

/// Cartesian (delta, eta) sweep with per-pair tau overrides; one subdirectory
/// per pair plus summary.csv. Pairs run concurrently up to `jobs` workers
/// (0 = hardware default, capped by TOPT_THREADS).
int cmd_sweep(const std::string& config_path, int jobs = 0);

/// Runs the eta-order measurement and writes (eta, E) CSV + log-log SVG.
int cmd_verify_order(const std::string& config_path);

/// Prints the W2 distance between two stored density fields.
int cmd_w2(const std::string& file_a, const std::string& file_b, int coarsen = 0,
           const std::string& method = "auto");

}  // namespace topt
