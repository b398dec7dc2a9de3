#include "kslab/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "kslab/inequalities.hpp"
#include "kslab/kernels.hpp"

namespace kslab {

namespace {

using json = nlohmann::ordered_json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_number(const std::string& raw) {
    std::string s = raw;
    double scale = 1.0;
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
        scale = M_PI;
        s = s.substr(0, s.size() - 2);
        if (s.empty()) return M_PI;
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("config: malformed number '" + raw + "'");
    return v * scale;
}

std::vector<double> parse_number_list(const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(parse_number(item));
    }
    return out;
}

std::vector<std::string> parse_string_list(const std::string& raw) {
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

ModelVariant parse_variant(const std::string& v) {
    if (v == "pp" || v == "parabolic_parabolic") return ModelVariant::ParabolicParabolic;
    if (v == "pe" || v == "parabolic_elliptic") return ModelVariant::ParabolicElliptic;
    if (v == "corrected") return ModelVariant::CorrectedParabolicParabolic;
    throw std::invalid_argument("config: unknown model.variant '" + v + "'");
}

InitPreset::Kind parse_preset(const std::string& v) {
    if (v == "gaussian") return InitPreset::Kind::Gaussian;
    if (v == "two_bumps") return InitPreset::Kind::TwoBumps;
    if (v == "h_family") return InitPreset::Kind::HFamily;
    if (v == "spiky") return InitPreset::Kind::SpikyL1;
    throw std::invalid_argument("config: unknown init.preset '" + v + "'");
}

ExperimentConfig::Kind parse_kind(const std::string& v) {
    if (v == "single") return ExperimentConfig::Kind::Single;
    if (v == "mass_sweep") return ExperimentConfig::Kind::MassSweep;
    if (v == "inequality_suite") return ExperimentConfig::Kind::InequalitySuite;
    if (v == "virial_check") return ExperimentConfig::Kind::VirialCheck;
    if (v == "hypercontractivity") return ExperimentConfig::Kind::Hypercontractivity;
    throw std::invalid_argument("config: unknown experiment.kind '" + v + "'");
}

const char* variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::ParabolicParabolic: return "pp";
        case ModelVariant::ParabolicElliptic: return "pe";
        case ModelVariant::CorrectedParabolicParabolic: return "corrected";
    }
    return "?";
}

const char* preset_name(InitPreset::Kind k) {
    switch (k) {
        case InitPreset::Kind::Gaussian: return "gaussian";
        case InitPreset::Kind::TwoBumps: return "two_bumps";
        case InitPreset::Kind::HFamily: return "h_family";
        case InitPreset::Kind::SpikyL1: return "spiky";
    }
    return "?";
}

const char* kind_name(ExperimentConfig::Kind k) {
    switch (k) {
        case ExperimentConfig::Kind::Single: return "single";
        case ExperimentConfig::Kind::MassSweep: return "mass_sweep";
        case ExperimentConfig::Kind::InequalitySuite: return "inequality_suite";
        case ExperimentConfig::Kind::VirialCheck: return "virial_check";
        case ExperimentConfig::Kind::Hypercontractivity: return "hypercontractivity";
    }
    return "?";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) + " has no '='");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        val.erase(0, val.find_first_not_of(" \t"));
        if (key.empty() || val.empty())
            throw std::invalid_argument("config: line " + std::to_string(lineno) + " is malformed");
        kv[key] = val;
    }

    ExperimentConfig c;
    for (const auto& [key, val] : kv) {
        if (key == "experiment.kind") c.kind = parse_kind(val);
        else if (key == "model.variant") c.model.variant = parse_variant(val);
        else if (key == "model.epsilon") c.model.epsilon = parse_number(val);
        else if (key == "model.alpha") c.model.alpha = parse_number(val);
        else if (key == "model.mass") c.model.mass = parse_number(val);
        else if (key == "model.sigma_mollify") c.model.sigma_mollify = parse_number(val);
        else if (key == "grid.L") c.grid_half_width = parse_number(val);
        else if (key == "grid.N") c.grid_points = static_cast<int>(parse_number(val));
        else if (key == "init.preset") c.init.kind = parse_preset(val);
        else if (key == "init.mass") c.init.mass = parse_number(val);
        else if (key == "init.sigma") c.init.sigma = parse_number(val);
        else if (key == "init.lambda") c.init.lambda = parse_number(val);
        else if (key == "init.center_x") c.init.center_x = parse_number(val);
        else if (key == "init.center_y") c.init.center_y = parse_number(val);
        else if (key == "init.separation") c.init.separation = parse_number(val);
        else if (key == "init.width") c.init.width = parse_number(val);
        else if (key == "control.dt_init") c.control.dt_init = parse_number(val);
        else if (key == "control.dt_min") c.control.dt_min = parse_number(val);
        else if (key == "control.dt_max") c.control.dt_max = parse_number(val);
        else if (key == "control.cfl_safety") c.control.cfl_safety = parse_number(val);
        else if (key == "control.t_end") c.control.t_end = parse_number(val);
        else if (key == "control.record_every") c.control.record_every = static_cast<int>(parse_number(val));
        else if (key == "control.equi_k1") c.control.equi_k1 = parse_number(val);
        else if (key == "control.equi_k2") c.control.equi_k2 = parse_number(val);
        else if (key == "control.drift_off") c.control.drift_off = (val == "true" || val == "1");
        else if (key == "experiment.masses") c.sweep_masses = parse_number_list(val);
        else if (key == "suite.onofri_seeds") c.onofri_seeds = static_cast<int>(parse_number(val));
        else if (key == "suite.log_hls_seeds") c.log_hls_seeds = static_cast<int>(parse_number(val));
        else if (key == "suite.minimization_seeds") c.minimization_seeds = static_cast<int>(parse_number(val));
        else if (key == "output_dir") c.output_dir = val;
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_number(val));
        else if (key == "threads") c.threads = static_cast<int>(parse_number(val));
        else if (key == "check.slope_rtol") c.check_slope_rtol = parse_number(val);
        else if (key == "check.mass_rtol") c.check_mass_rtol = parse_number(val);
        else if (key == "check.expected_classes") c.expected_classes = parse_string_list(val);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    // the preset mass defaults to the model mass unless given explicitly
    if (kv.count("model.mass") && !kv.count("init.mass")) c.init.mass = c.model.mass;
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string ExperimentConfig::resolved() const {
    std::map<std::string, std::string> kv;
    kv["experiment.kind"] = kind_name(kind);
    kv["model.variant"] = variant_name(model.variant);
    kv["model.epsilon"] = fmt17(model.epsilon);
    kv["model.alpha"] = fmt17(model.alpha);
    kv["model.mass"] = fmt17(model.mass);
    kv["model.sigma_mollify"] = fmt17(model.sigma_mollify);
    kv["grid.L"] = fmt17(grid_half_width);
    kv["grid.N"] = std::to_string(grid_points);
    kv["init.preset"] = preset_name(init.kind);
    kv["init.mass"] = fmt17(init.mass);
    kv["init.sigma"] = fmt17(init.sigma);
    kv["init.lambda"] = fmt17(init.lambda);
    kv["init.center_x"] = fmt17(init.center_x);
    kv["init.center_y"] = fmt17(init.center_y);
    kv["init.separation"] = fmt17(init.separation);
    kv["init.width"] = fmt17(init.width);
    kv["control.dt_init"] = fmt17(control.dt_init);
    kv["control.dt_min"] = fmt17(control.dt_min);
    kv["control.dt_max"] = fmt17(control.dt_max);
    kv["control.cfl_safety"] = fmt17(control.cfl_safety);
    kv["control.t_end"] = fmt17(control.t_end);
    kv["control.record_every"] = std::to_string(control.record_every);
    kv["control.equi_k1"] = fmt17(control.equi_k1);
    kv["control.equi_k2"] = fmt17(control.equi_k2);
    kv["control.drift_off"] = control.drift_off ? "true" : "false";
    if (!sweep_masses.empty()) {
        std::string list;
        for (std::size_t i = 0; i < sweep_masses.size(); ++i)
            list += (i ? "," : "") + fmt17(sweep_masses[i]);
        kv["experiment.masses"] = list;
    }
    kv["suite.onofri_seeds"] = std::to_string(onofri_seeds);
    kv["suite.log_hls_seeds"] = std::to_string(log_hls_seeds);
    kv["suite.minimization_seeds"] = std::to_string(minimization_seeds);
    kv["output_dir"] = output_dir;
    kv["seed"] = std::to_string(seed);
    kv["threads"] = std::to_string(threads);
    kv["check.slope_rtol"] = fmt17(check_slope_rtol);
    kv["check.mass_rtol"] = fmt17(check_mass_rtol);
    if (!expected_classes.empty()) {
        std::string list;
        for (std::size_t i = 0; i < expected_classes.size(); ++i)
            list += (i ? "," : "") + expected_classes[i];
        kv["check.expected_classes"] = list;
    }

    std::string out = "# kslab resolved config schema_version=1\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

const char* const kTrajectoryCsvHeader =
    "t,mass,moment_log,moment_1,moment_2,phys_entropy,coupling,grad_c_sq,c_sq,free_energy,"
    "modified_free_energy,entropy_production,dt_c_sq,lp2,lp3,lp4,equi_k1,equi_k2,dt_used";

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);  // LF line endings on every platform
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# kslab trajectory schema_version=1\n" << kTrajectoryCsvHeader << "\n";
    for (const DiagnosticsRecord& r : traj.records) {
        const double cols[19] = {r.t, r.mass, r.moment_log, r.moment_1, r.moment_2,
                                 r.phys_entropy, r.coupling, r.grad_c_sq, r.c_sq, r.free_energy,
                                 r.modified_free_energy, r.entropy_production, r.dt_c_sq, r.lp2,
                                 r.lp3, r.lp4, r.equi_k1, r.equi_k2, r.dt_used};
        for (int k = 0; k < 19; ++k) out << (k ? "," : "") << fmt17(cols[k]);
        out << "\n";
    }
}

namespace {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
};

json check_json(const Check& c) {
    json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["value"] = c.value;
    j["threshold"] = c.threshold;
    return j;
}

double max_mass_drift(const Trajectory& traj) {
    double drift = 0.0;
    for (const DiagnosticsRecord& r : traj.records)
        drift = std::max(drift, std::abs(r.mass - traj.mass0) / traj.mass0);
    return drift;
}

json member_json(const std::string& label, const Trajectory& traj, const BlowupVerdict& verdict,
                 double theory_slope) {
    json j;
    j["label"] = label;
    j["termination"] = to_string(traj.termination);
    j["records"] = traj.records.size();
    j["mass0"] = traj.mass0;
    j["I0"] = traj.records.front().moment_2;
    j["mass_drift"] = max_mass_drift(traj);
    j["clip_events"] = traj.clip_events;
    j["classification"] = to_string(verdict.classification);
    j["virial_slope_fit"] = verdict.virial_slope_fit;
    j["theory_slope"] = theory_slope;
    if (verdict.t_detect) j["t_detect"] = *verdict.t_detect;
    if (verdict.bound_Tstar) j["bound_Tstar"] = *verdict.bound_Tstar;
    j["threshold_ok"] = verdict.threshold_ok;
    return j;
}

json report_json(const InequalityReport& r) {
    json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["residual"] = r.residual;
    j["satisfied"] = r.satisfied;
    j["tol"] = r.tol;
    if (r.calibration) j["calibration"] = *r.calibration;
    return j;
}

void run_members_parallel(std::vector<std::function<void()>>& tasks, int threads) {
    if (threads <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int count = std::min<int>(threads, static_cast<int>(tasks.size()));
    for (int k = 0; k < count; ++k)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                tasks[i]();
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace

int run_experiment(const ExperimentConfig& config, bool check_mode) {
    namespace fs = std::filesystem;
    const Grid2D grid = make_grid(config.grid_half_width, config.grid_points);
    fs::create_directories(config.output_dir);
    {
        std::ofstream out(fs::path(config.output_dir) / "config_resolved.txt", std::ios::binary);
        out << config.resolved();
    }

    json summary;
    summary["schema_version"] = 1;
    summary["experiment"] = std::string(kind_name(config.kind));
    std::vector<Check> checks;
    bool nan_abort = false;

    auto run_one = [&](const ExperimentConfig& c, const std::string& label) {
        ModelParams model = c.model;
        InitPreset preset = c.init;
        Trajectory traj = run(model, preset, grid, c.control);
        const BlowupVerdict verdict = classify(traj, model, grid);
        const double theory = 4.0 * traj.mass0 * (1.0 - traj.mass0 / (8.0 * M_PI));
        write_trajectory_csv(
            (fs::path(c.output_dir) / ("trajectory" + (label.empty() ? "" : "_" + label) + ".csv"))
                .string(),
            traj);
        summary["members"].push_back(member_json(label.empty() ? "run" : label, traj, verdict, theory));
        if (traj.termination == Termination::NanAbort) nan_abort = true;

        checks.push_back({"mass_conservation" + (label.empty() ? "" : "_" + label),
                          max_mass_drift(traj) <= config.check_mass_rtol, max_mass_drift(traj),
                          config.check_mass_rtol});
        checks.push_back({"positivity" + (label.empty() ? "" : "_" + label),
                          traj.clip_events == 0, static_cast<double>(traj.clip_events), 0.0});
        return std::make_pair(std::move(traj), verdict);
    };

    switch (config.kind) {
        case ExperimentConfig::Kind::Single: {
            run_one(config, "");
            break;
        }
        case ExperimentConfig::Kind::VirialCheck: {
            auto [traj, verdict] = run_one(config, "");
            const double theory = 4.0 * traj.mass0 * (1.0 - traj.mass0 / (8.0 * M_PI));
            const double rel = std::abs(verdict.virial_slope_fit - theory) / std::abs(theory);
            checks.push_back({"virial_slope_match", rel <= config.check_slope_rtol, rel,
                              config.check_slope_rtol});
            break;
        }
        case ExperimentConfig::Kind::MassSweep: {
            if (config.sweep_masses.empty())
                throw std::invalid_argument("mass_sweep: experiment.masses is required");
            std::vector<Trajectory> trajs(config.sweep_masses.size());
            std::vector<std::function<void()>> tasks;
            for (std::size_t k = 0; k < config.sweep_masses.size(); ++k)
                tasks.push_back([&, k] {
                    ModelParams model = config.model;
                    model.mass = config.sweep_masses[k];
                    InitPreset preset = config.init;
                    preset.mass = config.sweep_masses[k];
                    trajs[k] = run(model, preset, grid, config.control);
                });
            run_members_parallel(tasks, config.threads);

            // single-threaded finalizer
            for (std::size_t k = 0; k < config.sweep_masses.size(); ++k) {
                ModelParams model = config.model;
                model.mass = config.sweep_masses[k];
                const std::string label = "m" + std::to_string(k);
                const Trajectory& traj = trajs[k];
                const BlowupVerdict verdict = classify(traj, model, grid);
                const double theory = 4.0 * traj.mass0 * (1.0 - traj.mass0 / (8.0 * M_PI));
                write_trajectory_csv(
                    (fs::path(config.output_dir) / ("trajectory_" + label + ".csv")).string(), traj);
                summary["members"].push_back(member_json(label, traj, verdict, theory));
                if (traj.termination == Termination::NanAbort) nan_abort = true;
                checks.push_back({"mass_conservation_" + label,
                                  max_mass_drift(traj) <= config.check_mass_rtol,
                                  max_mass_drift(traj), config.check_mass_rtol});
                checks.push_back({"positivity_" + label, traj.clip_events == 0,
                                  static_cast<double>(traj.clip_events), 0.0});
                if (k < config.expected_classes.size()) {
                    const bool ok =
                        config.expected_classes[k] == to_string(verdict.classification);
                    checks.push_back({"classification_" + label, ok, ok ? 1.0 : 0.0, 1.0});
                }
                if (traj.mass0 > 8.0 * M_PI) {
                    const double rel =
                        std::abs(verdict.virial_slope_fit - theory) / std::abs(theory);
                    checks.push_back({"virial_slope_match_" + label, rel <= 0.10, rel, 0.10});
                }
            }
            break;
        }
        case ExperimentConfig::Kind::InequalitySuite: {
            // Onofri sweep
            int onofri_ok = 0;
            double onofri_min = std::numeric_limits<double>::infinity();
            for (int k = 0; k < config.onofri_seeds; ++k) {
                const ScalarField u = seeded_band_limited(grid, config.seed + k, 6, 3.0, 0.75);
                const InequalityReport rep = check_onofri(u, 1e-8);
                onofri_min = std::min(onofri_min, rep.residual);
                if (rep.satisfied) ++onofri_ok;
            }
            json onofri;
            onofri["count"] = config.onofri_seeds;
            onofri["satisfied"] = onofri_ok;
            onofri["min_residual"] = onofri_min;
            summary["onofri"] = onofri;
            checks.push_back({"onofri_all_satisfied", onofri_ok == config.onofri_seeds,
                              static_cast<double>(onofri_ok),
                              static_cast<double>(config.onofri_seeds)});

            // logarithmic HLS sweep at the configured mass
            int hls_ok = 0;
            double hls_min = std::numeric_limits<double>::infinity();
            const double cm = calibrate_log_hls_constant(config.model.mass);
            for (int k = 0; k < config.log_hls_seeds; ++k) {
                const ScalarField f =
                    seeded_density(grid, config.seed + 1000 + k, config.model.mass);
                const InequalityReport rep = check_log_hls(f, 1e-5, cm);
                hls_min = std::min(hls_min, rep.residual);
                if (rep.satisfied) ++hls_ok;
            }
            json hls;
            hls["count"] = config.log_hls_seeds;
            hls["satisfied"] = hls_ok;
            hls["min_residual"] = hls_min;
            hls["constant"] = cm;
            summary["log_hls"] = hls;
            checks.push_back({"log_hls_all_satisfied", hls_ok == config.log_hls_seeds,
                              static_cast<double>(hls_ok),
                              static_cast<double>(config.log_hls_seeds)});

            // minimization identities
            double worst_entropy = 0.0, worst_chemical = 0.0;
            for (int k = 0; k < config.minimization_seeds; ++k) {
                const ScalarField n = seeded_density(grid, config.seed + 2000 + k, config.model.mass);
                const ScalarField psi = seeded_band_limited(grid, config.seed + 3000 + k, 5, 2.0, 0.7);
                worst_entropy = std::max(worst_entropy, entropy_min_identity(n, psi).identity_residual);

                ScalarField f = seeded_density(grid, config.seed + 4000 + k, config.model.mass);
                const double mean = integrate(f) / (4.0 * grid.half_width * grid.half_width);
                for (std::size_t q = 0; q < f.size(); ++q) f[q] -= mean;  // mean-zero source
                const ScalarField c = seeded_band_limited(grid, config.seed + 5000 + k, 5, 1.0, 0.7);
                worst_chemical =
                    std::max(worst_chemical, chemical_min_identity(c, f, 0.0).identity_residual);
            }
            summary["entropy_min_worst_residual"] = worst_entropy;
            summary["chemical_min_worst_residual"] = worst_chemical;
            checks.push_back({"entropy_min_identity", worst_entropy <= 1e-10, worst_entropy, 1e-10});
            checks.push_back({"chemical_min_identity", worst_chemical <= 1e-8, worst_chemical, 1e-8});
            break;
        }
        case ExperimentConfig::Kind::Hypercontractivity: {
            auto [traj, verdict] = run_one(config, "");
            (void)verdict;
            double sup_p2 = 0.0, sup_p3 = 0.0;
            double dt_head = traj.records.size() > 1 ? traj.records[1].dt_used : config.control.dt_max;
            const double t_from = 5.0 * dt_head;
            for (const DiagnosticsRecord& r : traj.records) {
                if (r.t < t_from) continue;
                sup_p2 = std::max(sup_p2, r.t * r.lp2 * r.lp2);
                sup_p3 = std::max(sup_p3, r.t * r.t * r.lp3 * r.lp3 * r.lp3);
            }
            summary["hyper_p2_bound"] = sup_p2;
            summary["hyper_p3_bound"] = sup_p3;
            checks.push_back({"hyper_p2_finite", std::isfinite(sup_p2) && sup_p2 > 0.0, sup_p2, 0.0});
            checks.push_back({"hyper_p3_finite", std::isfinite(sup_p3) && sup_p3 > 0.0, sup_p3, 0.0});
            break;
        }
    }

    json jchecks = json::array();
    bool all_pass = true;
    for (const Check& c : checks) {
        jchecks.push_back(check_json(c));
        all_pass = all_pass && c.pass;
    }
    summary["checks"] = jchecks;
    summary["all_pass"] = all_pass;

    {
        std::ofstream out(fs::path(config.output_dir) / "summary.json", std::ios::binary);
        out << summary.dump(2) << "\n";
    }

    if (nan_abort) return kExitNumericalAbort;
    if (check_mode && !all_pass) return kExitCheckFailure;
    return kExitOk;
}

int emit_report(const std::string& summary_path, bool check_mode) {
    std::ifstream in(summary_path);
    if (!in) {
        std::fprintf(stderr, "report: cannot open '%s'\n", summary_path.c_str());
        return kExitConfigError;
    }
    json summary;
    try {
        in >> summary;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "report: malformed summary: %s\n", e.what());
        return kExitConfigError;
    }
    if (!summary.contains("checks") || summary["checks"].empty()) {
        std::fprintf(stderr, "report: summary has no checks\n");
        return kExitConfigError;
    }
    std::printf("%-40s %-6s %-14s %-14s\n", "check", "status", "value", "threshold");
    bool all_pass = true;
    for (const auto& c : summary["checks"]) {
        const bool pass = c.value("pass", false);
        all_pass = all_pass && pass;
        std::printf("%-40s %-6s %-14.6g %-14.6g\n", c.value("name", "?").c_str(),
                    pass ? "PASS" : "FAIL", c.value("value", 0.0), c.value("threshold", 0.0));
    }
    std::printf("overall: %s\n", all_pass ? "PASS" : "FAIL");
    if (check_mode && !all_pass) return kExitCheckFailure;
    return kExitOk;
}

}  // namespace kslab
