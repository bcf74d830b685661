#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qgraph/cli.hpp"

int main(int argc, char** argv)
{
    qgraph::RunConfig config;
    std::string positional;
    std::string out = ".";
    std::string input;
    double x_max = 0.0;

    CLI::App app{"Spectral and kernel computations for Laplacians on metric graphs"};
    app.add_option("cmd", positional, "validate | spectrum | green | walks | heat | oracle | verify");
    app.add_option("--command", config.command, "same as the positional command");
    app.add_option("-i,--input", input, "graph and boundary-condition JSON")->required();
    app.add_option("-o,--out", out, "output directory")->capture_default_str();
    app.add_option("--kmax", config.k_max, "upper end of the positive spectrum scan (in k)")->capture_default_str();
    app.add_option("--kappa-grid", config.kappa_grid, "kappa values for green, walks and verify")->delimiter(',');
    app.add_option("--tol", config.tol, "tolerance for verify checks")->capture_default_str();
    app.add_option("--mesh-h", config.mesh_h, "finite element mesh size")->capture_default_str();
    app.add_option("--xmax", x_max, "truncation of external edges");
    app.add_option("--cutoff", config.cutoff, "walk metric-length cutoff")->capture_default_str();
    app.add_option("--times", config.times, "heat kernel times")->delimiter(',');
    app.add_option("--count", config.count, "number of oracle eigenvalues")->capture_default_str();
    app.add_option("--grid", config.grid, "sample points per edge")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qgraph::EXIT_INPUT;
    }

    if (!positional.empty()) {
        if (!config.command.empty() && config.command != positional) {
            std::cerr << "error: command given twice (" << positional << ", " << config.command << ")\n";
            return qgraph::EXIT_INPUT;
        }
        config.command = positional;
    }
    if (config.command.empty()) {
        std::cerr << "error: no command given\n" << app.help();
        return qgraph::EXIT_INPUT;
    }
    config.input = input;
    config.out = out;
    if (app.count("--xmax") > 0) {
        config.x_max = x_max;
    }
    const int status = qgraph::run(config, std::cout);
    return status;
}
