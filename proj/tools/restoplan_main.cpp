// Copyright 2026 The restoplan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// restoplan: blackstart and load-restoration planning for switched feeders
// powered by battery grid-forming inverters.
//
// Exit codes: 0 success, 1 error, 2 infeasible model.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "restoplan/milp/emit.hpp"
#include "restoplan/planner.hpp"
#include "restoplan/validator.hpp"

namespace fs = std::filesystem;
using namespace restoplan;

namespace {

struct GlobalArgs {
    std::string feeder_path;
    std::string config_path;
    std::string out_dir = ".";
    std::string backend = "exhaustive";
    std::string mode = "optimal";
    int max_binaries = 24;
    int tg_recovery_step = 0;
    std::string tg_recovery_sweep;
    unsigned seed = 0;
};

milp::Backend make_backend(const GlobalArgs& a) {
    if (a.backend == "exhaustive") return milp::Backend::make_exhaustive(a.max_binaries);
    const std::string prefix = "external:";
    if (a.backend.rfind(prefix, 0) == 0) {
        return milp::Backend::make_external(a.backend.substr(prefix.size()));
    }
    throw PlanningError("unknown backend '" + a.backend + "' (use exhaustive or external:<cmd>)");
}

PlanningConfig make_config(const GlobalArgs& a) {
    PlanningConfig cfg;
    if (!a.config_path.empty()) cfg = load_config_file(a.config_path);
    if (a.mode == "optimal") cfg.sync_mode = SyncMode::optimal;
    else if (a.mode == "rule-based" || a.mode == "rule_based") cfg.sync_mode = SyncMode::rule_based;
    else throw PlanningError("unknown mode '" + a.mode + "'");
    if (a.tg_recovery_step > 0) cfg.tg_recovery_step = a.tg_recovery_step;
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

int run_one_plan(const FeederModel& feeder, PlanningConfig cfg, const milp::Backend& backend,
                 const fs::path& out_dir) {
    try {
        const RestorationPlan plan = solve_plan(feeder, cfg, backend);
        write_file(out_dir / "plan.json", plan_to_json(plan));
        write_file(out_dir / "plan_steps.csv", plan_to_csv(feeder, cfg, plan));
        std::ostringstream m;
        m << "customer_hours_mwh," << plan.metrics.customer_hours_mwh << "\n"
          << "diversified_mwh," << plan.metrics.diversified_mwh << "\n"
          << "restoration_time_min," << plan.metrics.restoration_time_min << "\n"
          << "objective," << plan.objective << "\n";
        write_file(out_dir / "metrics.csv", m.str());
        std::cout << "plan written to " << (out_dir / "plan.json").string()
                  << " (customer-hours " << plan.metrics.customer_hours_mwh << " MWh, restoration "
                  << plan.metrics.restoration_time_min << " min)\n";
        return 0;
    } catch (const PlanningError& e) {
        if (!e.violations().empty()) {
            std::cerr << "infeasible: " << e.what() << "\n";
            for (const auto& v : e.violations()) {
                std::cerr << "  violated family " << v.tag << " by " << v.amount << "\n";
            }
            return 2;
        }
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        return what.find("infeasible") != std::string::npos ? 2 : 1;
    }
}

int cmd_plan(const GlobalArgs& a) {
    const FeederModel feeder = load_feeder_file(a.feeder_path);
    const milp::Backend backend = make_backend(a);
    const PlanningConfig cfg = make_config(a);
    if (a.tg_recovery_sweep.empty()) {
        return run_one_plan(feeder, cfg, backend, a.out_dir);
    }
    // scenario sweep: independent plans fan out concurrently
    std::vector<int> steps;
    std::stringstream ss(a.tg_recovery_sweep);
    for (std::string tok; std::getline(ss, tok, ',');) steps.push_back(std::stoi(tok));
    std::vector<std::future<std::pair<int, int>>> jobs;
    for (int s : steps) {
        jobs.push_back(std::async(std::launch::async, [&, s]() {
            PlanningConfig c = cfg;
            c.tg_recovery_step = s;
            const fs::path dir = fs::path(a.out_dir) / ("tg_" + std::to_string(s));
            return std::make_pair(s, run_one_plan(feeder, c, backend, dir));
        }));
    }
    int rc = 0;
    std::ostringstream summary;
    summary << "tg_recovery_step,exit\n";
    for (auto& j : jobs) {
        const auto [s, code] = j.get();
        summary << s << "," << code << "\n";
        rc = std::max(rc, code);
    }
    write_file(fs::path(a.out_dir) / "sweep.csv", summary.str());
    return rc;
}

int cmd_validate(const GlobalArgs& a, const std::string& plan_path) {
    const FeederModel feeder = load_feeder_file(a.feeder_path);
    PlanningConfig cfg = make_config(a);
    std::ifstream in(plan_path);
    if (!in) {
        std::cerr << "error: cannot open plan '" << plan_path << "'\n";
        return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const RestorationPlan plan = plan_from_json(ss.str());
    const ValidationReport report = validate_plan(feeder, plan, cfg);
    write_file(fs::path(a.out_dir) / "validation.json", report_to_json(report));
    write_file(fs::path(a.out_dir) / "validation.txt", report_to_text(report));
    std::cout << report_to_text(report);
    return report.passed() ? 0 : 2;
}

int cmd_freq_verify(const GlobalArgs& a, const std::string& pickups_csv, double duration,
                    double dt_sim) {
    GfmiParams params;
    if (!a.feeder_path.empty()) {
        const FeederModel feeder = load_feeder_file(a.feeder_path);
        if (feeder.gfmis.empty()) {
            std::cerr << "error: feeder carries no GFMI\n";
            return 1;
        }
        params = feeder.gfmis.front().params;
    } else {
        std::cerr << "error: --feeder required (GFMI parameters come from the first unit)\n";
        return 1;
    }
    std::vector<double> pickups;
    if (!pickups_csv.empty()) {
        std::stringstream ss(pickups_csv);
        for (std::string tok; std::getline(ss, tok, ',');) pickups.push_back(std::stod(tok));
    }
    if (!params.t_lp) {
        const GammaResult probe = gamma_compute(params.h, params.d, params.kf, 1.0);
        (void)probe;
        if (params.gamma <= 0.0) {
            std::cout << "note: gamma = 0 (overdamped convention); nadir equals the QSS point\n";
        }
    }
    try {
        const auto rows = verify_frequency_estimates(params, pickups, duration, dt_sim);
        std::ostringstream csv, txt;
        csv << "pickup_kw,est_rocof_hzps,meas_rocof_hzps,acc_rocof_pct,"
               "est_nadir_hz,meas_nadir_hz,acc_nadir_pct,"
               "est_qss_hz,meas_qss_hz,acc_qss_pct\n";
        txt << "pickup(kW)  rocof est/meas (acc%)   nadir est/meas (acc%)   qss est/meas (acc%)\n";
        for (const auto& r : rows) {
            csv << r.pickup_kw << "," << r.estimated.rocof << "," << r.measured.rocof << ","
                << r.acc_rocof_pct << "," << r.estimated.f_nadir << "," << r.measured.f_nadir
                << "," << r.acc_nadir_pct << "," << r.estimated.f_qss << "," << r.measured.f_qss
                << "," << r.acc_qss_pct << "\n";
            char line[256];
            std::snprintf(line, sizeof(line),
                          "%10.1f  %+.4f/%+.4f (%.2f)  %.4f/%.4f (%.2f)  %.4f/%.4f (%.2f)\n",
                          r.pickup_kw, r.estimated.rocof, r.measured.rocof, r.acc_rocof_pct,
                          r.estimated.f_nadir, r.measured.f_nadir, r.acc_nadir_pct,
                          r.estimated.f_qss, r.measured.f_qss, r.acc_qss_pct);
            txt << line;
        }
        write_file(fs::path(a.out_dir) / "freq_verify.csv", csv.str());
        write_file(fs::path(a.out_dir) / "freq_verify.txt", txt.str());
        std::cout << txt.str();
        // trajectory exports, one per pickup
        GfmiParams p = params;
        if (!p.t_lp) p.t_lp = recover_t_lp(p.h, p.d, p.kf, p.gamma);
        for (const auto& r : rows) {
            if (r.pickup_kw == 0.0) continue;
            const auto traj = simulate_vsg_step(p, 0.0, r.pickup_kw, duration, dt_sim);
            std::ostringstream tcsv;
            tcsv << "t_s,f_hz\n";
            for (const auto& s : traj) tcsv << s.t_s << "," << s.f_hz << "\n";
            write_file(fs::path(a.out_dir) /
                           ("trajectory_" + std::to_string(static_cast<long long>(r.pickup_kw)) +
                            "kw.csv"),
                       tcsv.str());
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_emit_model(const GlobalArgs& a) {
    const FeederModel feeder = load_feeder_file(a.feeder_path);
    const PlanningConfig cfg = make_config(a);
    const BuiltModel built = build_model(feeder, cfg);
    write_file(fs::path(a.out_dir) / "model.lp", milp::emit_lp(built.ir));
    if (!built.ir.has_quadratic()) {
        write_file(fs::path(a.out_dir) / "model.mps", milp::emit_mps(built.ir));
    } else {
        std::cout << "model carries quadratic capability rows; MPS emission refused "
                     "(LP written; switch thermal_mode to polygon for MPS)\n";
    }
    std::ostringstream census;
    census << "family,constraints\n";
    for (const auto& [fam, n] : built.ir.census()) census << fam << "," << n << "\n";
    write_file(fs::path(a.out_dir) / "census.csv", census.str());
    std::cout << "variables " << built.ir.vars().size() << ", constraints "
              << built.ir.constraints().size() << ", binaries " << built.ir.num_binaries() << "\n";
    std::cout << census.str();
    return 0;
}

int cmd_report(const GlobalArgs& a, const std::string& plan_path) {
    const FeederModel feeder = load_feeder_file(a.feeder_path);
    const PlanningConfig cfg = make_config(a);
    std::ifstream in(plan_path);
    if (!in) {
        std::cerr << "error: cannot open plan '" << plan_path << "'\n";
        return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    RestorationPlan plan = plan_from_json(ss.str());
    plan.metrics = compute_metrics(feeder, cfg, plan);
    write_file(fs::path(a.out_dir) / "plan_steps.csv", plan_to_csv(feeder, cfg, plan));
    std::ostringstream m;
    m << "customer_hours_mwh," << plan.metrics.customer_hours_mwh << "\n"
      << "diversified_mwh," << plan.metrics.diversified_mwh << "\n"
      << "restoration_time_min," << plan.metrics.restoration_time_min << "\n";
    write_file(fs::path(a.out_dir) / "metrics.csv", m.str());
    std::cout << m.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blackstart and load-restoration planner for GFMI-powered feeders"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    GlobalArgs a;
    app.add_option("--feeder", a.feeder_path, "feeder description (JSON)");
    app.add_option("--config", a.config_path, "planning config (JSON)");
    app.add_option("--out", a.out_dir, "output directory");
    app.add_option("--backend", a.backend, "exhaustive | external:<cmd with {model} {solution}>");
    app.add_option("--max-binaries", a.max_binaries,
                   "binary budget of the exhaustive backend (default 24)");
    app.add_option("--mode", a.mode, "optimal | rule-based");
    app.add_option("--tg-recovery-step", a.tg_recovery_step, "override the TG recovery step");
    app.add_option("--seed", a.seed, "seed recorded for reproducibility");

    auto* plan = app.add_subcommand("plan", "compute a restoration plan");
    plan->add_option("--tg-recovery-sweep", a.tg_recovery_sweep,
                     "comma list of recovery steps; plans run concurrently");

    std::string plan_path;
    auto* validate = app.add_subcommand("validate", "replay and verify a plan");
    validate->add_option("--plan", plan_path, "plan JSON to validate")->required();

    std::string pickups = "1000,2000,10000";
    double duration = 8.0, dt_sim = 1e-3;
    auto* fv = app.add_subcommand("freq-verify", "verify frequency-response estimates via the ODE");
    fv->add_option("--pickups", pickups, "comma list of pickup sizes (kW)");
    fv->add_option("--duration", duration, "simulated seconds per pickup");
    fv->add_option("--dt-sim", dt_sim, "integrator step (s)");

    auto* emit = app.add_subcommand("emit-model", "write LP/MPS text and the constraint census");
    auto* report = app.add_subcommand("report", "recompute metrics and CSV summaries from a plan");
    report->add_option("--plan", plan_path, "plan JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(plan)) return cmd_plan(a);
        if (app.got_subcommand(validate)) return cmd_validate(a, plan_path);
        if (app.got_subcommand(fv)) return cmd_freq_verify(a, pickups, duration, dt_sim);
        if (app.got_subcommand(emit)) return cmd_emit_model(a);
        if (app.got_subcommand(report)) return cmd_report(a, plan_path);
    } catch (const FeederError& e) {
        std::cerr << "feeder error: " << e.what() << "\n";
        return 1;
    } catch (const PlanningError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return std::string(e.what()).find("infeasible") != std::string::npos ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
