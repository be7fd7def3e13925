// Batch front-end: JSON configs in, CSV/JSON results out.
//
// Subcommands: steady | sweep | evolve | orbit | recover | identity-check.
// Exit codes: 0 success, 2 input/module error, 3 non-convergence,
// 4 precondition violation (antisymmetry gate of `recover`).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "ratchet/errors.hpp"
#include "ratchet/evolve.hpp"
#include "ratchet/io.hpp"
#include "ratchet/particles.hpp"
#include "ratchet/potential.hpp"
#include "ratchet/response.hpp"
#include "ratchet/steady.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ratchet;

namespace {

constexpr int kExitError = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitPrecondition = 4;

std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%#.12g", v);
    return buf;
}

json load_config(const std::string& path, const std::set<std::string>& allowed_keys) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open config file " + path);
    json cfg = json::parse(in);
    if (!cfg.is_object()) throw InvalidInputError("config must be a JSON object");
    for (const auto& [key, val] : cfg.items())
        if (!allowed_keys.count(key)) throw InvalidInputError("config: unknown key `" + key + "`");
    if (!cfg.contains("potential")) throw InvalidInputError("config: missing `potential`");
    return cfg;
}

double finite_number(const json& j, const std::string& what) {
    if (!j.is_number()) throw InvalidInputError("config: `" + what + "` must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw InvalidInputError("config: `" + what + "` must be finite");
    return v;
}

// Scalar -> one value; {min, max, count} -> geometric (sigma) or linear (v) grid.
std::vector<double> scalar_or_range(const json& j, const std::string& what, bool geometric) {
    if (j.is_number()) return {finite_number(j, what)};
    if (!j.is_object()) throw InvalidInputError("config: `" + what + "` must be number or range");
    for (const auto& [key, val] : j.items())
        if (key != "min" && key != "max" && key != "count")
            throw InvalidInputError("config: `" + what + "` range: unknown key `" + key + "`");
    const double lo = finite_number(j.at("min"), what + ".min");
    const double hi = finite_number(j.at("max"), what + ".max");
    const int count = j.at("count").get<int>();
    if (count < 1) throw InvalidInputError("config: `" + what + "` range must be non-empty");
    if (geometric && !(lo > 0.0 && hi > 0.0))
        throw InvalidInputError("config: geometric `" + what + "` range needs positive bounds");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
        const double t = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
        out[i] = geometric ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    return out;
}

double get_or(const json& cfg, const std::string& key, double fallback) {
    return cfg.contains(key) ? finite_number(cfg.at(key), key) : fallback;
}

int get_or_int(const json& cfg, const std::string& key, int fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg.at(key).is_number_integer())
        throw InvalidInputError("config: `" + key + "` must be an integer");
    return cfg.at(key).get<int>();
}

// Index-ordered parallel map; output slots are preassigned, so the result
// is byte-identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t count, int threads, const Fn& fn) {
    const int nt = std::clamp<int>(threads, 1, static_cast<int>(count) + 1);
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;  // 0: fall back to RT_THREADS, then 1
};

int effective_threads(const CommonOpts& opts) {
    if (opts.threads > 0) return opts.threads;
    if (const char* env = std::getenv("RT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads (default: RT_THREADS or 1)");
}

int run_steady(const CommonOpts& opts) {
    const json cfg = load_config(opts.config_path, {"potential", "sigma", "v", "n_points"});
    const PeriodicPotential p = potential_from_json(cfg.at("potential"));
    const ChannelParams c{get_or(cfg, "sigma", 1.0), get_or(cfg, "v", 0.0)};
    const QuadratureSpec q{get_or_int(cfg, "n_points", 1024)};

    const SteadyState ss = steady_density(p, c, q);
    fs::create_directories(opts.out_dir);
    write_text_file(fs::path(opts.out_dir) / "steady.json", steady_state_to_json(ss).dump(2) + "\n");
    std::vector<std::vector<std::string>> rows;
    rows.reserve(ss.n);
    for (int i = 0; i < ss.n; ++i) rows.push_back({csv_number(ss.grid[i]), csv_number(ss.rho[i])});
    write_csv(fs::path(opts.out_dir) / "rho.csv", "z,rho", rows);
    std::cout << "I=" << num12(ss.current) << " kappa=" << num12(ss.kappa) << "\n";
    return 0;
}

int run_sweep(const CommonOpts& opts) {
    const json cfg = load_config(opts.config_path, {"potential", "sigma", "v", "n_points"});
    const PeriodicPotential p = potential_from_json(cfg.at("potential"));
    if (!cfg.contains("sigma") || !cfg.contains("v"))
        throw InvalidInputError("sweep: config needs `sigma` and `v`");
    const std::vector<double> sigmas = scalar_or_range(cfg.at("sigma"), "sigma", true);
    const std::vector<double> vs = scalar_or_range(cfg.at("v"), "v", false);
    if (sigmas.size() == 1 && vs.size() == 1 && !cfg.at("sigma").is_object() &&
        !cfg.at("v").is_object())
        throw InvalidInputError("sweep: at least one of sigma/v must be a range");
    const QuadratureSpec q{get_or_int(cfg, "n_points", 1024)};

    // sigma-major, then v
    const std::size_t count = sigmas.size() * vs.size();
    std::vector<std::vector<std::string>> rows(count);
    parallel_for(count, effective_threads(opts), [&](std::size_t idx) {
        const double sigma = sigmas[idx / vs.size()];
        const double v = vs[idx % vs.size()];
        const double current = steady_current(p, ChannelParams{sigma, v}, q);
        rows[idx] = {csv_number(sigma), csv_number(v), csv_number(current),
                     csv_number(v - current)};
    });
    fs::create_directories(opts.out_dir);
    write_csv(fs::path(opts.out_dir) / "response.csv", "sigma,v,I,kappa", rows);
    std::cout << "rows=" << count << "\n";
    return 0;
}

int run_evolve(const CommonOpts& opts) {
    const json cfg = load_config(opts.config_path,
                                 {"potential", "sigma", "v", "n_points", "n_grid", "dt", "theta",
                                  "tol", "max_steps", "initial", "snapshot_dt"});
    const PeriodicPotential p = potential_from_json(cfg.at("potential"));
    const ChannelParams c{get_or(cfg, "sigma", 1.0), get_or(cfg, "v", 0.0)};
    const int n_grid = get_or_int(cfg, "n_grid", 256);
    EvolveConfig ecfg;
    ecfg.dt = get_or(cfg, "dt", 1e-3);
    ecfg.theta = get_or(cfg, "theta", 1.0);
    ecfg.frame = Frame::moving;
    const double tol = get_or(cfg, "tol", 1e-8);
    const int max_steps = get_or_int(cfg, "max_steps", 100000);
    const double snapshot_dt = get_or(cfg, "snapshot_dt", 0.0);

    DensityField field = DensityField::uniform(n_grid);
    if (cfg.contains("initial")) {
        const json& ini = cfg.at("initial");
        if (ini.is_string() && ini.get<std::string>() == "uniform") {
            // keep the default
        } else if (ini.is_object() && ini.contains("bump")) {
            const json& b = ini.at("bump");
            field = DensityField::bump(n_grid, get_or(b, "center", 0.5), get_or(b, "width", 0.05));
        } else if (ini.is_object() && ini.contains("values")) {
            field = DensityField::from_values(ini.at("values").get<std::vector<double>>());
        } else {
            throw InvalidInputError("evolve: `initial` must be \"uniform\", {bump:{center,width}} "
                                    "or {values:[...]}");
        }
    }
    const bool renormalized = field.renormalized;

    std::vector<std::vector<std::string>> rows;
    auto snapshot = [&](const DensityField& f) {
        for (int i = 0; i < f.grid_n; ++i)
            rows.push_back({csv_number(f.time), csv_number((i + 0.5) / f.grid_n),
                            csv_number(f.values[i])});
    };
    snapshot(field);

    const int chunk = (snapshot_dt > 0.0)
                          ? std::max(1, static_cast<int>(std::lround(snapshot_dt / ecfg.dt)))
                          : max_steps;
    RelaxResult result;
    int done = 0;
    while (true) {
        result = relax_to_steady(field, p, c, ecfg, tol, std::min(chunk, max_steps - done));
        field = result.field;
        done += result.steps;
        if (snapshot_dt > 0.0 && !result.converged && done < max_steps) snapshot(field);
        if (result.converged || done >= max_steps) break;
    }
    snapshot(field);

    fs::create_directories(opts.out_dir);
    write_csv(fs::path(opts.out_dir) / "snapshots.csv", "t,x,rho", rows);
    const json report{{"l1_gap", result.l1_gap},
                      {"steps", done},
                      {"converged", result.converged},
                      {"renormalized", renormalized}};
    write_text_file(fs::path(opts.out_dir) / "report.json", report.dump(2) + "\n");
    std::cout << "l1_gap=" << num12(result.l1_gap) << " steps=" << done << " converged="
              << (result.converged ? "yes" : "no") << "\n";
    return result.converged ? 0 : kExitNoConvergence;
}

int run_orbit(const CommonOpts& opts) {
    const json cfg = load_config(
        opts.config_path, {"potential", "sigma", "v", "n_points", "x0", "t_end", "dt", "burn_in",
                           "seed"});
    const PeriodicPotential p = potential_from_json(cfg.at("potential"));
    const ChannelParams c{get_or(cfg, "sigma", 1.0), get_or(cfg, "v", 0.0)};
    const QuadratureSpec q{get_or_int(cfg, "n_points", 1024)};
    const double t_end = get_or(cfg, "t_end", 500.0);
    const double dt = get_or(cfg, "dt", 1e-2);
    const double burn_in = get_or(cfg, "burn_in", 0.1);
    double x0 = get_or(cfg, "x0", 0.0);
    if (!cfg.contains("x0") && cfg.contains("seed")) {
        std::mt19937 rng(static_cast<unsigned>(get_or_int(cfg, "seed", 0)));
        x0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }

    const SteadyState ss = steady_density(p, c, q);
    const OrbitPath path = integrate_orbit(ss, p, x0, t_end, dt);
    const double kappa_hat = empirical_mean_velocity(path, burn_in);

    fs::create_directories(opts.out_dir);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(path.times.size());
    for (std::size_t i = 0; i < path.times.size(); ++i)
        rows.push_back({csv_number(path.times[i]), csv_number(path.positions[i])});
    write_csv(fs::path(opts.out_dir) / "orbit.csv", "t,x", rows);
    std::cout << "kappa_hat=" << num12(kappa_hat) << " kappa=" << num12(ss.kappa) << "\n";
    return 0;
}

int run_recover(const CommonOpts& opts, bool force) {
    const json cfg = load_config(opts.config_path, {"potential", "sigma", "n_points", "K"});
    const PeriodicPotential p = potential_from_json(cfg.at("potential"));
    const QuadratureSpec q{get_or_int(cfg, "n_points", 1024)};
    const int K = get_or_int(cfg, "K", 4);
    std::vector<double> sigmas;
    if (cfg.contains("sigma")) {
        sigmas = scalar_or_range(cfg.at("sigma"), "sigma", true);
    } else {
        sigmas = scalar_or_range(json{{"min", 8.0}, {"max", 512.0}, {"count", 12}}, "sigma", true);
    }

    const bool antisym = p.is_antisymmetric(1e-12);
    if (!antisym && !force) {
        std::cerr << "recover: potential is not antisymmetric about the origin; pass --force to "
                     "skip the check\n";
        return kExitPrecondition;
    }

    const ResistanceCurve curve = sample_resistance(p, sigmas, q, effective_threads(opts));
    const MomentRecovery rec = make_moment_recovery(curve, K);

    fs::create_directories(opts.out_dir);
    write_csv(fs::path(opts.out_dir) / "resistance.csv", "sigma,R", resistance_csv_rows(curve));
    json out = moment_recovery_to_json(rec);
    if (!antisym)
        out["warning"] = "antisymmetry check skipped via --force; odd moments are not zero and "
                         "the recovered even moments are unreliable";
    write_text_file(fs::path(opts.out_dir) / "recovery.json", out.dump(2) + "\n");
    std::cout << "M2=" << num12(rec.even_moments.empty() ? 0.0 : rec.even_moments[0]);
    if (rec.even_moments.size() > 1) std::cout << " M4=" << num12(rec.even_moments[1]);
    std::cout << "\n";
    return 0;
}

int run_identity_check(const CommonOpts& opts) {
    const json cfg = load_config(opts.config_path, {"potential", "sigma", "v", "n_points"});
    const PeriodicPotential p = potential_from_json(cfg.at("potential"));
    if (!cfg.contains("sigma") || !cfg.contains("v"))
        throw InvalidInputError("identity-check: config needs `sigma` and `v`");
    const std::vector<double> sigmas = scalar_or_range(cfg.at("sigma"), "sigma", true);
    const std::vector<double> vs = scalar_or_range(cfg.at("v"), "v", false);
    const QuadratureSpec q{get_or_int(cfg, "n_points", 2048)};

    const std::size_t count = sigmas.size() * vs.size();
    std::vector<std::vector<std::string>> rows(count);
    std::vector<double> residuals(count);
    parallel_for(count, effective_threads(opts), [&](std::size_t idx) {
        const double sigma = sigmas[idx / vs.size()];
        const double v = vs[idx % vs.size()];
        residuals[idx] = transform_identity_residual(p, sigma, v, q);
        rows[idx] = {csv_number(sigma), csv_number(v), csv_number(residuals[idx])};
    });
    fs::create_directories(opts.out_dir);
    write_csv(fs::path(opts.out_dir) / "residuals.csv", "sigma,v,residual", rows);
    double worst = 0.0;
    for (double r : residuals) worst = std::max(worst, r);
    std::cout << "max_residual=" << num12(worst) << "\n";
    return 0;
}

}  // namespace

namespace {

int run_app(int argc, char** argv) {
    CLI::App app{"diffusion-induced transport in periodic channels: steady states, evolution, "
                 "orbits and response inversion"};
    app.require_subcommand(1);

    CommonOpts steady_o, sweep_o, evolve_o, orbit_o, recover_o, identity_o;
    bool force = false;

    add_common(app.add_subcommand("steady", "steady state at one (sigma, v)"), steady_o);
    add_common(app.add_subcommand("sweep", "response surface I(sigma, v)"), sweep_o);
    add_common(app.add_subcommand("evolve", "relax an initial density to the steady state"),
               evolve_o);
    add_common(app.add_subcommand("orbit", "deterministic particle orbit and empirical kappa"),
               orbit_o);
    CLI::App* rec = app.add_subcommand("recover", "even-moment recovery from the resistance curve");
    add_common(rec, recover_o);
    rec->add_flag("--force", force, "skip the antisymmetry precondition");
    add_common(app.add_subcommand("identity-check", "forward Laplace-identity residual grid"),
               identity_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    if (app.got_subcommand("steady")) return run_steady(steady_o);
    if (app.got_subcommand("sweep")) return run_sweep(sweep_o);
    if (app.got_subcommand("evolve")) return run_evolve(evolve_o);
    if (app.got_subcommand("orbit")) return run_orbit(orbit_o);
    if (app.got_subcommand("recover")) return run_recover(recover_o, force);
    if (app.got_subcommand("identity-check")) return run_identity_check(identity_o);
    return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "ratchetlab: " << e.what() << "\n";
        return kExitError;
    }
}
