#include <string>

#include "CLI11.hpp"
#include "topt/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"topt - density-based mass optimization by filtered Wasserstein gradient flow"};
    app.require_subcommand(1);

    std::string config, out_dir, file_a, file_b, method = "auto";
    int jobs = 0, coarsen = 0;

    auto* run = app.add_subcommand("run", "run one optimization flow from a config file");
    run->add_option("config", config, "JSON config")->required();
    run->add_option("--out", out_dir, "override output directory");

    auto* sweep = app.add_subcommand("sweep", "run the (delta, eta) parameter sweep");
    sweep->add_option("config", config, "JSON config with delta/eta lists")->required();
    sweep->add_option("--jobs", jobs, "concurrent workers (default: hardware)");

    auto* order = app.add_subcommand("verify-order", "measure the filtering error order in eta");
    order->add_option("config", config, "JSON config with order.etas")->required();

    auto* w2 = app.add_subcommand("w2", "W2 distance between two stored densities");
    w2->add_option("fileA", file_a, "density VTK file")->required();
    w2->add_option("fileB", file_b, "density VTK file")->required();
    w2->add_option("--coarsen", coarsen, "aggregate onto a KxK grid first");
    w2->add_option("--method", method, "exact | entropic | auto")
        ->check(CLI::IsMember({"exact", "entropic", "auto"}));

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return topt::cmd_run(config, out_dir);
    if (sweep->parsed()) return topt::cmd_sweep(config, jobs);
    if (order->parsed()) return topt::cmd_verify_order(config);
    return topt::cmd_w2(file_a, file_b, coarsen, method);
}
