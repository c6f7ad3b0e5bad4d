// openbath.cpp — scenario CLI: coeffs | simulate | compare | thermalize |
// classical | validate.  Exit codes: 0 ok, 2 config, 3 numerical invariant,
// 4 I/O.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "openbath/classical.hpp"
#include "openbath/compare.hpp"
#include "openbath/serialize.hpp"

namespace fs = std::filesystem;
using namespace openbath;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

struct ScenarioResult {
    Json summary;
    std::vector<std::string> outputs;
    std::string invariant_error;  // nonempty → exit 3 after writing the summary
};

struct TimeGrid {
    double t_end{0.0};
    int n_steps{0};
};

TimeGrid parse_times(ConfigReader r) {
    TimeGrid g;
    g.t_end = r.require<double>("t_end");
    g.n_steps = r.require<int>("n_steps");
    r.done();
    if (!(g.t_end > 0.0) || g.n_steps < 1)
        throw ConfigError("times: t_end must be > 0 and n_steps >= 1");
    return g;
}

// Initial mode state: {"type": "coherent", "alpha": [re, im]},
// {"type": "thermal", "beta_h_omega": x}, or {"type": "ground"}.
Mat parse_initial(ConfigReader r, int d) {
    const std::string type = r.require<std::string>("type");
    Mat rho;
    if (type == "coherent") {
        const auto a = r.require<std::vector<double>>("alpha");
        if (a.size() != 2) throw ConfigError(r.path() + ".alpha: expected [re, im]");
        const Vec psi = coherent_state(d, Complex(a[0], a[1]));
        rho = psi * psi.adjoint();
    } else if (type == "thermal") {
        rho = thermal_state(d, r.require<double>("beta_h_omega"));
    } else if (type == "ground") {
        rho = Mat::Zero(d, d);
        rho(0, 0) = 1.0;
    } else {
        throw ConfigError(r.path() + ".type: unknown initial state '" + type + "'");
    }
    r.done();
    return rho;
}

MomentState measured_moments(const Mat& rho, const FockOperators& f) {
    MomentState ms;
    ms.mean_q = (f.q * rho).trace().real();
    ms.mean_p = (f.p * rho).trace().real();
    ms.qq = (f.q * f.q * rho).trace().real();
    ms.pp = (f.p * f.p * rho).trace().real();
    ms.s_pq = (0.5 * (f.p * f.q + f.q * f.p) * rho).trace().real();
    return ms;
}

// --- coeffs -----------------------------------------------------------------

ScenarioResult run_coeffs(const Json& cfg, const fs::path& out) {
    ConfigReader r(cfg, "config");
    const OscillatorParams bath = parse_oscillator(r.child("bath"));
    ConfigReader gr = r.child("grid");
    const double dw_min = gr.require<double>("min");
    const double dw_max = gr.require<double>("max");
    const double dw_step = gr.require<double>("step");
    gr.done();
    const double quad_tol = r.optional<double>("quad_rel_tol", 1e-10);
    const double rel_err_max = r.optional<double>("rel_err_max", 1e-6);
    r.done();
    if (!(dw_step > 0.0) || dw_max < dw_min)
        throw ConfigError("config.grid: requires step > 0 and max >= min");

    ScenarioResult res;
    CsvWriter csv((out / "coeffs.csv").string());
    csv.header({"delta_omega", "h_closed", "S_closed", "h_quad", "S_quad", "rel_err"});
    double worst = 0.0;
    const int n = static_cast<int>(std::floor((dw_max - dw_min) / dw_step + 0.5)) + 1;
    for (int k = 0; k < n; ++k) {
        const double dw = dw_min + k * dw_step;
        const SpectralPair c = spectral_pair_closed(bath, dw);
        const SpectralPair q = spectral_pair_quadrature(bath, dw, quad_tol).pair;
        const double scale = std::max({std::abs(c.h), std::abs(c.S), 1e-300});
        const double rel = std::max(std::abs(c.h - q.h), std::abs(c.S - q.S)) / scale;
        worst = std::max(worst, rel);
        csv.row({dw, c.h, c.S, q.h, q.S, rel});
    }
    csv.close();
    res.outputs.push_back("coeffs.csv");
    res.summary["bath"] = to_json(bath);
    res.summary["grid_points"] = n;
    res.summary["max_rel_err"] = worst;
    if (worst > rel_err_max)
        res.invariant_error = "coeffs: max_rel_err " + fmt(worst) + " exceeds " + fmt(rel_err_max);
    return res;
}

// --- validate ---------------------------------------------------------------

ScenarioResult run_validate(const Json& cfg) {
    ConfigReader r(cfg, "config");
    const OscillatorParams bath = parse_oscillator(r.child("bath"), {}, /*enforce=*/false);
    r.done();

    ScenarioResult res;
    const ValidationReport rep = validate_params(bath);
    res.summary["bath"] = to_json(bath);
    res.summary["valid"] = rep.valid();
    res.summary["violations"] = rep.violations;
    if (rep.valid()) {
        const MomentState m = asymptotic_moments(bath);
        res.summary["Omega"] = bath.Omega();
        res.summary["asymptotic_moments"] =
            Json{{"qq", m.qq}, {"pp", m.pp}, {"s_pq", m.s_pq}};
        res.summary["uncertainty_product"] = m.qq * m.pp - m.s_pq * m.s_pq;
    } else {
        std::string labels;
        for (const auto& v : rep.violations) labels += " " + v;
        res.invariant_error = "validate: parameter constraints violated:" + labels;
    }
    return res;
}

// --- simulate ---------------------------------------------------------------

ScenarioResult run_simulate(const Json& cfg, const fs::path& out) {
    ConfigReader r(cfg, "config");
    const OscillatorParams bath = parse_oscillator(r.child("bath"));
    const int d = r.require<int>("d");
    if (d < 2 || d > 128) throw ConfigError("config.d: must be in [2, 128]");
    const Mat rho0 = parse_initial(r.child("initial"), d);
    const TimeGrid tg = parse_times(r.child("times"));
    r.done();

    const FockOperators f = fock_operators(d, bath.m, bath.omega, bath.constants);
    const Mat M = sns_generator(bath, f);
    const double dt = tg.t_end / tg.n_steps;
    const Mat E = (M * dt).exp();
    const MomentState m0 = measured_moments(rho0, f);

    ScenarioResult res;
    CsvWriter csv((out / "simulate.csv").string());
    csv.header({"t", "mean_q", "mean_p", "qq", "pp", "s_pq", "mean_q_ref", "mean_p_ref",
                "qq_ref", "pp_ref", "s_pq_ref", "purity"});
    Vec v = vec(rho0);
    double max_err = 0.0;
    for (int k = 0; k <= tg.n_steps; ++k) {
        const double t = k * dt;
        const DensityMatrix rho = DensityMatrix::checked(unvec(v, d), 1e-9, 1e-8);
        const MomentState mm = measured_moments(rho.rho, f);
        const MomentState mr = evolve_moments(bath, m0, t);
        max_err = std::max({max_err, std::abs(mm.mean_q - mr.mean_q),
                            std::abs(mm.mean_p - mr.mean_p), std::abs(mm.qq - mr.qq),
                            std::abs(mm.pp - mr.pp), std::abs(mm.s_pq - mr.s_pq)});
        csv.row({t, mm.mean_q, mm.mean_p, mm.qq, mm.pp, mm.s_pq, mr.mean_q, mr.mean_p,
                 mr.qq, mr.pp, mr.s_pq, purity(rho.rho)});
        if (k < tg.n_steps) v = E * v;
    }
    csv.close();
    res.outputs.push_back("simulate.csv");

    const DensityMatrix ss = stationary_state(M);
    res.summary["bath"] = to_json(bath);
    res.summary["d"] = d;
    res.summary["max_moment_error"] = max_err;
    res.summary["final_trace_distance_to_stationary"] =
        trace_distance(unvec(v, d), ss.rho);
    const MomentState ma = asymptotic_moments(bath);
    res.summary["asymptotic_moments"] = Json{{"qq", ma.qq}, {"pp", ma.pp}, {"s_pq", ma.s_pq}};
    return res;
}

// --- thermalize -------------------------------------------------------------

ScenarioResult run_thermalize(const Json& cfg, const fs::path& out) {
    ConfigReader r(cfg, "config");
    ConfigReader sr = r.child("system");
    LinearModelSpec spec;
    spec.m_S = sr.require<double>("m");
    spec.omega_S = sr.require<double>("omega");
    sr.done();
    double T = 0.0;
    for (const Json& entry : r.child_array("bath")) {
        ConfigReader er(entry, "config.bath[]");
        const double C = er.require<double>("C");
        ConfigReader mr = er.child("mode");
        if (!mr.has("temperature"))
            throw ConfigError("config.bath[].mode: thermalize requires Gibbs-form modes "
                              "(temperature key)");
        const double T_mode = [&] {  // peek before parse_oscillator consumes it
            return entry.at("mode").at("temperature").get<double>();
        }();
        if (T == 0.0) T = T_mode;
        if (T_mode != T)
            throw ConfigError("config.bath[].mode.temperature: all modes must share one T");
        spec.bath.push_back({C, parse_oscillator(std::move(mr))});
        er.done();
    }
    const int d = r.require<int>("d");
    if (d < 2 || d > 128) throw ConfigError("config.d: must be in [2, 128]");
    const Mat rho0 = parse_initial(r.child("initial"), d);
    const TimeGrid tg = parse_times(r.child("times"));
    const double occ_tol = r.optional<double>("occupancy_tol", 0.0);
    r.done();

    const FockOperators f = fock_operators(d, spec.m_S, spec.omega_S, spec.constants);
    const auto [me, M] = rwa_master_equation(f.H0, linear_model_couplings(spec, d));
    const double hbar = spec.constants.hbar, kB = spec.constants.k_B;
    const Mat gibbs = thermal_state(d, hbar * spec.omega_S / (kB * T));
    const double dt = tg.t_end / tg.n_steps;
    const Mat E = (M * dt).exp();

    ScenarioResult res;
    CsvWriter csv((out / "thermalize.csv").string());
    csv.header({"t", "occupancy", "purity", "trace_distance_to_gibbs"});
    Vec v = vec(rho0);
    for (int k = 0; k <= tg.n_steps; ++k) {
        const DensityMatrix rho = DensityMatrix::checked(unvec(v, d), 1e-9, 1e-8);
        csv.row({k * dt, (f.number * rho.rho).trace().real(), purity(rho.rho),
                 trace_distance(rho.rho, gibbs)});
        if (k < tg.n_steps) v = E * v;
    }
    csv.close();
    res.outputs.push_back("thermalize.csv");

    const EffectiveCoefficients eff = effective_coefficients(spec);
    const DensityMatrix ss = stationary_state(M);
    const double n_steady = (f.number * ss.rho).trace().real();
    const double w_shifted = spec.omega_S + eff.delta_omega_S;
    const double n_be = 1.0 / (std::exp(hbar * w_shifted / (kB * T)) - 1.0);
    res.summary["temperature"] = T;
    res.summary["effective_coefficients"] = to_json(eff);
    res.summary["steady_state_occupancy"] = n_steady;
    res.summary["bose_einstein_occupancy_shifted"] = n_be;
    const double rel = std::abs(n_steady - n_be) / n_be;
    res.summary["occupancy_rel_deviation"] = rel;
    if (occ_tol > 0.0 && rel > occ_tol)
        res.invariant_error = "thermalize: occupancy deviation " + fmt(rel) +
                              " exceeds " + fmt(occ_tol);
    return res;
}

// --- compare ----------------------------------------------------------------

ScenarioResult run_compare(const Json& cfg, const fs::path& out,
                           std::optional<std::uint64_t> seed_override) {
    ConfigReader r(cfg, "config");
    CompareSetup setup;
    ConfigReader sr = r.child("system");
    setup.m_S = sr.require<double>("m");
    setup.omega_S = sr.require<double>("omega");
    sr.done();
    setup.bath = parse_oscillator(r.child("bath"));
    setup.d_S = r.require<int>("d_S");
    setup.d_E = r.require<int>("d_E");
    setup.epsilon = r.require<double>("epsilon");
    const int halvings = r.require<int>("halvings");
    setup.n_steps = r.optional<int>("n_steps", 200);
    setup.horizon = r.optional<double>("horizon", 5.0);
    setup.seed = r.optional<std::uint64_t>("seed", 1);
    const auto bounds = r.optional<std::vector<double>>("ratio_bounds", {});
    r.done();
    if (seed_override) setup.seed = *seed_override;
    if (!bounds.empty() && bounds.size() != 2)
        throw ConfigError("config.ratio_bounds: expected [low, high]");

    const ConvergenceTable tab = convergence_experiment(setup, halvings);

    ScenarioResult res;
    Json runs = Json::array();
    for (std::size_t k = 0; k < tab.runs.size(); ++k) {
        const ComparisonReport& rep = tab.runs[k];
        const std::string name = "compare_" + std::to_string(k) + ".csv";
        CsvWriter csv((out / name).string());
        csv.header({"t", "trace_distance", "correlated_vs_product"});
        for (std::size_t i = 0; i < rep.times.size(); ++i)
            csv.row({rep.times[i], rep.trace_distance[i], rep.correlated_vs_product[i]});
        csv.close();
        res.outputs.push_back(name);
        runs.push_back(Json{{"epsilon", rep.epsilon},
                            {"lambda_eff", rep.lambda_eff},
                            {"max_trace_distance", rep.max_trace_distance},
                            {"file", name}});
    }
    res.summary["seed"] = setup.seed;
    res.summary["runs"] = std::move(runs);
    res.summary["halving_ratios"] = tab.ratios;

    const FockOperators fS =
        fock_operators(setup.d_S, setup.m_S, setup.omega_S, setup.bath.constants);
    const auto [me, M_rwa] =
        rwa_master_equation(fS.H0, {{setup.epsilon * fS.q, setup.bath}});
    (void)M_rwa;
    res.summary["master_equation"] = to_json(me);

    if (!bounds.empty())
        for (double ratio : tab.ratios)
            if (ratio < bounds[0] || ratio > bounds[1]) {
                res.invariant_error = "compare: halving ratio " + fmt(ratio) +
                                      " outside [" + fmt(bounds[0]) + ", " + fmt(bounds[1]) + "]";
                break;
            }
    return res;
}

// --- classical --------------------------------------------------------------

ScenarioResult run_classical(const Json& cfg, const fs::path& out,
                             std::optional<std::uint64_t> seed_override) {
    ConfigReader r(cfg, "config");
    ConfigReader sr = r.child("system");
    const double m = sr.require<double>("m");
    const double omega0 = sr.require<double>("omega0");
    const double x0 = sr.optional<double>("x0", 0.0);
    const double v0 = sr.optional<double>("v0", 0.0);
    sr.done();
    const ClassicalSystemSpec sys = harmonic_system(m, omega0, x0, v0);

    std::vector<ClassicalBathMode> bath;
    for (const Json& entry : r.child_array("bath")) {
        ConfigReader br(entry, "config.bath[]");
        try {
            bath.push_back(linear_mode(br.require<double>("m"), br.require<double>("omega"),
                                       br.require<double>("gamma"), br.require<double>("c"),
                                       br.optional<double>("q0", 0.0),
                                       br.optional<double>("v0", 0.0)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(br.path() + ": " + e.what());
        }
        br.done();
    }
    const std::string mode = r.optional<std::string>("mode", "composite");
    const double T = r.require<double>("temperature");
    const double dt = r.require<double>("dt");
    const double t_end = r.require<double>("t_end");
    const int n_traj = r.require<int>("n_traj");
    std::uint64_t seed = r.require<std::uint64_t>("seed");
    const double discard_time = r.optional<double>("discard_time", 0.0);
    const int max_lag = r.optional<int>("max_lag", 0);
    LangevinOptions opt;
    opt.record_stride = r.optional<int>("record_stride", 1);
    opt.clamp_system = r.optional<bool>("clamp_system", false);
    r.done();
    if (seed_override) seed = *seed_override;
    if (n_traj < 1 || opt.record_stride < 1 || max_lag < 0)
        throw ConfigError("config: n_traj/record_stride/max_lag out of range");
    if (max_lag > 0 && mode != "composite")
        throw ConfigError("config.max_lag: force correlations require mode = composite");

    TrajectoryEnsemble ens;
    try {
        if (mode == "composite") {
            ens = simulate_composite_langevin(sys, bath, T, dt, t_end, n_traj, seed, {}, opt);
        } else if (mode == "markov") {
            ens = markov_langevin(sys, markov_kernel(bath, x0, x0), T, dt, t_end, n_traj,
                                  seed, {}, opt);
        } else {
            throw ConfigError("config.mode: expected 'composite' or 'markov'");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    ScenarioResult res;
    const bool has_force = !ens.trajectories[0].noise_force.empty();
    {
        CsvWriter csv((out / "trajectory.csv").string());
        if (has_force)
            csv.header({"t", "x", "v", "noise_force"});
        else
            csv.header({"t", "x", "v"});
        const Trajectory& tr = ens.trajectories[0];
        for (std::size_t i = 0; i < ens.times.size(); ++i) {
            if (has_force)
                csv.row({ens.times[i], tr.x[i], tr.v[i], tr.noise_force[i]});
            else
                csv.row({ens.times[i], tr.x[i], tr.v[i]});
        }
        csv.close();
        res.outputs.push_back("trajectory.csv");
    }
    const EnsembleStatistics st = ensemble_statistics(ens, discard_time, max_lag);
    {
        CsvWriter csv((out / "statistics.csv").string());
        csv.header({"quantity", "value", "error"});
        auto put = [&](const char* name, const Estimate& e) {
            csv.text_row({name, fmt(e.value), fmt(e.error)});
        };
        put("mean_x", st.mean_x);
        put("mean_v", st.mean_v);
        put("var_x", st.var_x);
        put("var_v", st.var_v);
        csv.close();
        res.outputs.push_back("statistics.csv");
    }
    if (max_lag > 0) {
        CsvWriter csv((out / "force_correlation.csv").string());
        csv.header({"lag_time", "value", "error"});
        for (std::size_t k = 0; k < st.force_corr.size(); ++k)
            csv.row({st.lags[k], st.force_corr[k].value, st.force_corr[k].error});
        csv.close();
        res.outputs.push_back("force_correlation.csv");
    }
    res.summary["seed"] = seed;
    res.summary["mode"] = mode;
    res.summary["n_traj"] = n_traj;
    res.summary["equipartition_kT_over_m"] = T / m;
    res.summary["var_v"] = Json{{"value", st.var_v.value}, {"error", st.var_v.error}};
    res.summary["var_x"] = Json{{"value", st.var_x.value}, {"error", st.var_x.error}};
    return res;
}

ScenarioResult dispatch(const std::string& scenario, const Json& cfg, const fs::path& out,
                        std::optional<std::uint64_t> seed_override) {
    if (scenario == "coeffs") return run_coeffs(cfg, out);
    if (scenario == "validate") return run_validate(cfg);
    if (scenario == "simulate") return run_simulate(cfg, out);
    if (scenario == "thermalize") return run_thermalize(cfg, out);
    if (scenario == "compare") return run_compare(cfg, out, seed_override);
    if (scenario == "classical") return run_classical(cfg, out, seed_override);
    throw ConfigError("unknown scenario " + scenario);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"openbath: damped-environment master-equation scenarios"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    std::string scenario;
    for (const char* name :
         {"coeffs", "simulate", "compare", "thermalize", "classical", "validate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_given = true;
        });
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->callback([&, name] { scenario = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Eigen::setNbThreads(threads);
    try {
        const Json cfg = load_config(config_path);
        const fs::path out(out_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw std::ios_base::failure("cannot create output directory " + out_dir);

        const std::optional<std::uint64_t> seed_override =
            seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt;
        ScenarioResult res = dispatch(scenario, cfg, out, seed_override);
        // config echo re-validates: the echoed document must round-trip
        if (Json::parse(cfg.dump()) != cfg)
            throw std::runtime_error("config echo does not round-trip");

        Json summary;
        summary["tool"] = "openbath";
        summary["version"] = kVersion;
        summary["scenario"] = scenario;
        summary["config"] = cfg;
        summary["outputs"] = res.outputs;
        summary["results"] = res.summary;
        std::ofstream sf(out / "summary.json");
        if (!sf) throw std::ios_base::failure("cannot write summary.json");
        sf << summary.dump(2) << "\n";
        sf.close();
        if (!sf) throw std::ios_base::failure("summary.json write failed");

        if (!res.invariant_error.empty()) {
            std::cerr << "openbath: " << res.invariant_error << "\n";
            return 3;
        }
    } catch (const ConfigError& e) {
        std::cerr << "openbath: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "openbath: I/O error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "openbath: numerical invariant violated: " << e.what() << "\n";
        return 3;
    }
    std::cout << "openbath: " << scenario << " done, outputs in " << out_dir << "\n";
    return 0;
}
