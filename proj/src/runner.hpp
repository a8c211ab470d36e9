#pragma once

#include "params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace critnls {

/// One reproducible batch run: command, problem data, grid and output
/// options. Parseable from flags (CLI) or a JSON config file; every run
/// echoes the fully resolved config into its manifest.
struct RunConfig {
    std::string command = "constants";
    ProblemParams params;
    std::size_t grid_nodes = 4096;
    double r_max = 50.0;
    std::vector<double> eps_list = {0.2, 0.1, 0.05, 0.025, 0.0125};
    std::vector<double> mu_list;
    double dt = 5e-4;
    double t_end = 1.0;
    double dilation_s = 2.0;
    std::string probe_mode = "scaled";  // blowup: scaled | below-level
    std::string out_dir = ".";
    std::uint64_t seed = 0;

    static RunConfig from_json(const std::string& json_text);
    std::string to_json() const;
};

/// Dispatches to the owning module and writes JSON/CSV artifacts plus
/// manifest.json under out_dir. Returns the process exit status: 0 success,
/// 1 numeric/solver error, 2 structural error (a predicted invariant violated),
/// 64 usage error. The manifest JSON is also handed back when requested.
int run(const RunConfig& config, std::string* manifest_out = nullptr);

} // namespace critnls
