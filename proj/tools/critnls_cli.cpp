// Command-line front end. Links only the C API; every computation runs
// through critnls_run_json so that batch runs, artifacts and exit codes
// behave identically from the shell and from the library.

#include <critnls.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
    int N = 3;
    double q = 4.0;
    double a = 1.0;
    double mu = 1.0;
    std::size_t grid_nodes = 4096;
    double r_max = 50.0;
    std::vector<double> eps_list;
    std::vector<double> mu_list;
    double dt = 5e-4;
    double t_end = 1.0;
    double dilation_s = 2.0;
    std::string probe_mode = "scaled";
    std::string out = "critnls-out";
    std::string config_path;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--N", f.N, "space dimension (>= 3)");
    cmd->add_option("--q", f.q, "perturbation exponent, 2 < q < 2N/(N-2)");
    cmd->add_option("--a", f.a, "prescribed L2 mass");
    cmd->add_option("--mu", f.mu, "coupling of the |u|^{q-2}u term");
    cmd->add_option("--grid-nodes", f.grid_nodes, "radial grid nodes");
    cmd->add_option("--r-max", f.r_max, "radial truncation radius");
    cmd->add_option("--eps-list", f.eps_list, "bubble concentration parameters");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--config", f.config_path, "JSON config file (flags override)");
    cmd->add_option("--seed", f.seed, "seed for randomized test profiles");
}

std::string build_config(const std::string& command, const CommonFlags& f) {
    nlohmann::ordered_json j;
    if (!f.config_path.empty()) {
        std::ifstream is(f.config_path);
        if (!is) {
            std::cerr << "cannot open config file: " << f.config_path << "\n";
            std::exit(64);
        }
        std::stringstream ss;
        ss << is.rdbuf();
        try {
            j = nlohmann::ordered_json::parse(ss.str());
        } catch (const std::exception& e) {
            std::cerr << "config parse error: " << e.what() << "\n";
            std::exit(64);
        }
    }
    j["command"] = command;
    j["N"] = f.N;
    j["q"] = f.q;
    j["a"] = f.a;
    j["mu"] = f.mu;
    j["grid_nodes"] = f.grid_nodes;
    j["r_max"] = f.r_max;
    if (!f.eps_list.empty()) j["eps_list"] = f.eps_list;
    if (!f.mu_list.empty()) j["mu_list"] = f.mu_list;
    j["dt"] = f.dt;
    j["t_end"] = f.t_end;
    j["dilation_s"] = f.dilation_s;
    j["probe_mode"] = f.probe_mode;
    j["out"] = f.out;
    j["seed"] = f.seed;
    return j.dump();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"critnls: normalized ground states of the Sobolev-critical NLS "
                 "with combined nonlinearities"};
    app.set_version_flag("--version", critnls_version());
    app.require_subcommand(1);

    CommonFlags f;
    std::string command;

    auto* constants = app.add_subcommand("constants", "exponents, S, C_{N,q}, thresholds");
    auto* fiber = app.add_subcommand("fiber", "fiber-map critical points of a test profile");
    auto* bubbles = app.add_subcommand("bubbles", "bubble asymptotics and mountain-pass bound");
    auto* ground = app.add_subcommand("ground-state", "compute and certify the ground state");
    auto* sweep = app.add_subcommand("mu-sweep", "ground-state levels along a mu grid");
    auto* defoc = app.add_subcommand("defocusing", "mu < 0 non-existence scan");
    auto* dynamics = app.add_subcommand("dynamics", "propagate the ground state, track conservation");
    auto* blowup = app.add_subcommand("blowup", "blow-up probe for a scaled/below-level state");

    for (auto* cmd : {constants, fiber, bubbles, ground, sweep, defoc, dynamics, blowup})
        add_common(cmd, f);
    sweep->add_option("--mu-list", f.mu_list, "mu values to sweep")->required();
    dynamics->add_option("--dt", f.dt, "time step");
    dynamics->add_option("--T", f.t_end, "propagation horizon");
    blowup->add_option("--dt", f.dt, "time step");
    blowup->add_option("--T", f.t_end, "propagation horizon");
    blowup->add_option("--s", f.dilation_s, "dilation parameter for scaled mode");
    blowup->add_option("--mode", f.probe_mode, "scaled | below-level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    command = app.get_subcommands().front()->get_name();
    const std::string config = build_config(command, f);

    char* manifest = nullptr;
    const int status = critnls_run_json(config.c_str(), nullptr, &manifest);
    if (manifest) {
        std::cout << manifest << "\n";
        critnls_free_string(manifest);
    }
    if (status != 0)
        std::cerr << "error (" << status << "): " << critnls_last_error() << "\n";
    return status;
}
