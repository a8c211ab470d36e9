#include "runner.hpp"

#include "bubbles.hpp"
#include "constants.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "fiber.hpp"
#include "ground_state.hpp"
#include "version.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace critnls {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw NumericError("cannot open output file " + path.string());
    os << text;
}

std::shared_ptr<const RadialGrid> make_grid(const RunConfig& cfg) {
    return RadialGrid::graded(cfg.params.dim, cfg.r_max, cfg.grid_nodes, 6.0);
}

// Seeded test profile: seed 0 is a plain unit-width Gaussian, anything else
// a random mixture of positive Gaussian bumps. Mass-normalized to a.
RadialProfile seeded_profile(const RunConfig& cfg) {
    auto grid = make_grid(cfg);
    if (cfg.seed == 0) {
        return normalize_mass(RadialProfile::sample(grid, [](double r) {
            return std::exp(-r * r);
        }), cfg.params.mass);
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> amp(0.2, 1.0), width(0.5, 3.0), center(0.0, 4.0);
    const int bumps = 3;
    std::vector<double> a(bumps), w(bumps), c(bumps);
    for (int k = 0; k < bumps; ++k) {
        a[k] = amp(rng);
        w[k] = width(rng);
        c[k] = center(rng);
    }
    return normalize_mass(RadialProfile::sample(grid, [&](double r) {
        double v = 0.0;
        for (int k = 0; k < bumps; ++k)
            v += a[k] * std::exp(-(r - c[k]) * (r - c[k]) / (w[k] * w[k]));
        return v;
    }), cfg.params.mass);
}

std::string profile_csv(const RadialProfile& u) {
    std::ostringstream os;
    write_csv(os, u);
    return os.str();
}

struct Artifacts {
    std::vector<std::string> files;
    void add(const fs::path& dir, const std::string& name, const std::string& text) {
        write_file(dir / name, text.ends_with('\n') ? text : text + '\n');
        files.push_back(name);
    }
};

void dispatch(const RunConfig& cfg, const fs::path& dir, Artifacts& art) {
    const ProblemParams& p = cfg.params;

    if (cfg.command == "constants") {
        const ConstantsTable t = constants_for(p);
        art.add(dir, "constants-N" + std::to_string(p.dim) + ".json", t.to_json());
        return;
    }
    if (cfg.command == "fiber") {
        const RadialProfile u = seeded_profile(cfg);
        const FiberReport rep = fiber_critical_points(u, p);
        art.add(dir, "fiber-report.json", rep.to_json());
        art.add(dir, "profile.csv", profile_csv(u));
        return;
    }
    if (cfg.command == "bubbles") {
        BubbleReport rep = appendix_asymptotics(p.dim, p.q, cfg.eps_list);
        if (p.mu > 0.0 && p.regime() != Regime::Subcritical && admissible(p)) {
            const MountainPassBound mp = mountain_pass_bound(p, cfg.eps_list);
            rep.mp_bound = mp.bound;
            rep.mp_best_eps = mp.best_eps;
            rep.bound_certified = mp.certified;
            for (std::size_t i = 0; i < rep.rows.size(); ++i)
                rep.rows[i].fiber_max = mp.per_eps[i];
        }
        art.add(dir, "bubble-report.json", rep.to_json());
        art.add(dir, "bubble-table.csv", rep.to_csv());
        return;
    }
    if (cfg.command == "ground-state") {
        if (p.mu < 0.0) {
            // Defocusing: no positive ground state is expected; emit the scan.
            const DefocusingReport rep = defocusing_check(p);
            art.add(dir, "defocusing-report.json", rep.to_json());
            return;
        }
        if (p.mu == 0.0 && p.dim <= 4) {
            ordered_json j;
            j["exists"] = false;
            j["reason"] = "homogeneous critical problem has no positive normalized "
                          "solution in dimension 3 or 4";
            art.add(dir, "ground-state.json", j.dump(2));
            return;
        }
        GroundStateResult primary =
            p.mu == 0.0 ? match_mass(p)
            : p.regime() == Regime::Subcritical ? local_minimize_subcritical(p, make_grid(cfg))
                                                : match_mass(p, -1e3, -1e-3, make_grid(cfg));
        ordered_json j = ordered_json::parse(primary.to_json(p));
        if (p.mu > 0.0) {
            // Cross-validate with the other solver family; a failed cross
            // check is recorded, not fatal.
            try {
                const GroundStateResult other =
                    p.regime() == Regime::Subcritical
                        ? match_mass(p, -1e3, -1e-3, make_grid(cfg))
                        : descend_ground_state(p, make_grid(cfg));
                j["cross_check"]["solver"] = other.solver;
                j["cross_check"]["energy_level"] = other.energy_level;
                j["cross_check"]["relative_gap"] =
                    std::abs(other.energy_level - primary.energy_level) /
                    std::max(std::abs(primary.energy_level), 1e-300);
            } catch (const std::exception& e) {
                j["cross_check"]["error"] = e.what();
            }
        }
        art.add(dir, "ground-state.json", j.dump(2));
        art.add(dir, "profile.csv", profile_csv(primary.profile));
        return;
    }
    if (cfg.command == "mu-sweep") {
        if (cfg.mu_list.empty())
            throw DomainError("mu-sweep: provide --mu-list");
        const SweepResult rep = mu_sweep(p, cfg.mu_list);
        art.add(dir, "mu-sweep.csv", rep.to_csv());
        art.add(dir, "mu-sweep.json", rep.to_json());
        return;
    }
    if (cfg.command == "defocusing") {
        const DefocusingReport rep = defocusing_check(p);
        art.add(dir, "defocusing-report.json", rep.to_json());
        return;
    }
    if (cfg.command == "dynamics") {
        const GroundStateResult gs = descend_ground_state(p, make_grid(cfg));
        const WaveState psi0 = WaveState::from_profile(gs.profile);
        PropagateOptions opts;
        opts.dt = cfg.dt;
        opts.record_dt = cfg.t_end / 200.0;
        const Trajectory tr = propagate(psi0, cfg.dt, cfg.t_end, p, opts);
        art.add(dir, "trajectory.csv", tr.to_csv());
        const auto& first = tr.series.front();
        const auto& last = tr.series.back();
        ordered_json j;
        j["t_end"] = last.t;
        j["mass_drift_per_unit_time"] =
            std::abs(last.mass - first.mass) / first.mass / std::max(last.t, 1e-300);
        j["energy_drift_per_unit_time"] =
            std::abs(last.energy - first.energy) /
            std::max(std::abs(first.energy), 1e-300) / std::max(last.t, 1e-300);
        j["halted"] = tr.halted;
        j["halt_reason"] = tr.halt_reason;
        art.add(dir, "dynamics-summary.json", j.dump(2));
        return;
    }
    if (cfg.command == "blowup") {
        const GroundStateResult gs = descend_ground_state(p, make_grid(cfg));
        const ProbeMode mode =
            cfg.probe_mode == "below-level" ? ProbeMode::BelowLevel : ProbeMode::Scaled;
        // Collapse runs need room to refine dt well below the dynamics default.
        PropagateOptions opts;
        opts.dt = std::min(cfg.dt, 2e-5);
        opts.max_dt_halvings = 24;
        opts.growth_trigger = 0.35;
        const BlowupProbeReport rep =
            blowup_probe(gs.profile, p, mode, cfg.dilation_s, gs.energy_level,
                         cfg.t_end, opts);
        art.add(dir, "blowup-probe.json", rep.to_json());
        Trajectory tr{rep.series, WaveState{}, rep.halted, rep.halt_reason};
        art.add(dir, "blowup-trajectory.csv", tr.to_csv());
        return;
    }
    throw DomainError("unknown command: " + cfg.command);
}

} // namespace

RunConfig RunConfig::from_json(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw DomainError(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    cfg.command = j.value("command", cfg.command);
    cfg.params.dim = j.value("N", cfg.params.dim);
    cfg.params.q = j.value("q", cfg.params.q);
    cfg.params.mass = j.value("a", cfg.params.mass);
    cfg.params.mu = j.value("mu", cfg.params.mu);
    cfg.grid_nodes = j.value("grid_nodes", cfg.grid_nodes);
    cfg.r_max = j.value("r_max", cfg.r_max);
    if (j.contains("eps_list")) cfg.eps_list = j["eps_list"].get<std::vector<double>>();
    if (j.contains("mu_list")) cfg.mu_list = j["mu_list"].get<std::vector<double>>();
    cfg.dt = j.value("dt", cfg.dt);
    cfg.t_end = j.value("t_end", cfg.t_end);
    cfg.dilation_s = j.value("dilation_s", cfg.dilation_s);
    cfg.probe_mode = j.value("probe_mode", cfg.probe_mode);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

std::string RunConfig::to_json() const {
    ordered_json j;
    j["command"] = command;
    j["N"] = params.dim;
    j["q"] = params.q;
    j["a"] = params.mass;
    j["mu"] = params.mu;
    j["grid_nodes"] = grid_nodes;
    j["r_max"] = r_max;
    j["eps_list"] = eps_list;
    j["mu_list"] = mu_list;
    j["dt"] = dt;
    j["t_end"] = t_end;
    j["dilation_s"] = dilation_s;
    j["probe_mode"] = probe_mode;
    j["out"] = out_dir;
    j["seed"] = seed;
    return j.dump(2);
}

int run(const RunConfig& config, std::string* manifest_out) {
    const auto start = std::chrono::steady_clock::now();
    int status = 0;
    std::string error;
    Artifacts art;
    fs::path dir(config.out_dir);

    try {
        validate(config.params);
        fs::create_directories(dir);
        dispatch(config, dir, art);
    } catch (const StructuralError& e) {
        status = 2;
        error = e.what();
    } catch (const DomainError& e) {
        status = 64;
        error = e.what();
    } catch (const NumericError& e) {
        status = 1;
        error = e.what();
    } catch (const SolverError& e) {
        status = 1;
        error = e.what();
    } catch (const std::exception& e) {
        status = 1;
        error = e.what();
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ordered_json m;
    m["version"] = CRITNLS_VERSION;
    m["config"] = ordered_json::parse(config.to_json());
    m["tolerances"]["fiber_root_ds"] = 1e-10;
    m["tolerances"]["pohozaev_membership_rel"] = 1e-6;
    m["tolerances"]["pohozaev_zero_band_rel"] = 1e-8;
    m["tolerances"]["descent_grad"] = 1e-8;
    m["tolerances"]["mass_rel"] = 1e-6;
    m["timing_seconds"] = seconds;
    m["exit_status"] = status;
    m["artifacts"] = art.files;
    if (!error.empty()) m["error"] = error;
    const std::string manifest = m.dump(2);
    if (manifest_out) *manifest_out = manifest;
    try {
        if (fs::exists(dir)) write_file(dir / "manifest.json", manifest + "\n");
    } catch (...) {
        if (status == 0) status = 1;
    }
    return status;
}

} // namespace critnls
