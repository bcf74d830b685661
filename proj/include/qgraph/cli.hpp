#ifndef QGRAPH_CLI_HPP
#define QGRAPH_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qgraph {

enum ExitCode : int {
    EXIT_OK = 0,
    EXIT_VIOLATION = 1,
    EXIT_INPUT = 2,
    EXIT_GUARD = 3,
};

struct RunConfig {
    std::string command;                 // validate, spectrum, green, walks, heat, oracle, verify
    std::filesystem::path input;
    std::filesystem::path out = ".";
    double k_max = 20.0;
    std::vector<double> kappa_grid;      // empty: command default
    double tol = 1e-8;
    double mesh_h = 0.01;
    std::optional<double> x_max;         // external-edge truncation
    double cutoff = 10.0;                // walk metric cutoff
    std::vector<double> times = {0.1, 1.0};
    std::size_t count = 10;              // oracle eigenvalues
    std::size_t grid = 11;               // sample points per edge
};

const std::vector<std::string>& commands();

// Throws std::invalid_argument on an unusable configuration.
void check_config(const RunConfig& config);

// Runs one command, writing artifacts under config.out and a one-line
// summary to `log`. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& log);

} // namespace qgraph

#endif
