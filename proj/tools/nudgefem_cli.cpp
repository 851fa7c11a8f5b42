#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "nudgefem/config.hpp"
#include "nudgefem/delaunay.hpp"
#include "nudgefem/io.hpp"
#include "nudgefem/solver.hpp"

namespace fs = std::filesystem;
using namespace nudgefem;

namespace {

TriMesh base_mesh(const SimConfig& cfg) {
    if (cfg.domain == DomainKind::annulus) {
        return generate_annulus(cfg.n_outer, cfg.n_inner, cfg.r_outer, cfg.r_inner);
    }
    return generate_offset_disk(cfg.n_outer, cfg.n_inner);
}

MeshHierarchy hierarchy_for(const SimConfig& cfg) {
    return build_hierarchy(base_mesh(cfg), cfg.dns_index() + 1);
}

std::function<std::array<double, 2>(Vec2, double)> body_force_fn() {
    return [](Vec2 p, double) { return preset_body_force(p); };
}

// the annulus is driven tangentially at the outer circle; the offset disk is
// no-slip everywhere and driven by the body force instead
void set_bcs(RunParams& pr, const SimConfig& cfg) {
    if (cfg.domain == DomainKind::annulus) {
        const double r = cfg.r_outer;
        pr.bc_outer = [r](Vec2 p, double) -> std::array<double, 2> {
            return {-p.y / r, p.x / r};
        };
    }
    pr.bc_static = true;
}

RunParams base_params(const SimConfig& cfg) {
    RunParams pr;
    pr.dt = cfg.dt;
    pr.nu = cfg.nu;
    pr.linear_tol = cfg.linear_tol;
    pr.sync_threshold = cfg.sync_threshold;
    pr.obs_stride = cfg.obs_stride;
    pr.fingerprint = config_fingerprint(cfg);
    if (cfg.body_force) {
        pr.force = body_force_fn();
        pr.force_static = true;
    }
    set_bcs(pr, cfg);
    return pr;
}

void add_snapshots(RunParams& pr, const SimConfig& cfg, const TriMesh& mesh, const char* prefix) {
    if (cfg.snapshot_stride <= 0) return;
    const std::string dir = cfg.out_dir;
    const long stride = cfg.snapshot_stride;
    const std::string name(prefix);
    pr.on_step = [&mesh, dir, stride, name](const EvolutionState& s) {
        if (s.n % stride != 0) return;
        char fname[64];
        std::snprintf(fname, sizeof fname, "%s_%06ld.vtk", name.c_str(), s.n);
        write_vtk(dir + "/" + fname, mesh, s.velocity, s.pressure);
    };
}

long steps_between(double t0, double t1, double dt) { return std::lround((t1 - t0) / dt); }

std::string traj_path(const SimConfig& cfg) { return cfg.out_dir + "/reference.traj"; }

int cmd_mesh(const SimConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const MeshHierarchy hier = hierarchy_for(cfg);

    std::ostringstream table;
    table << "level vertices triangles h_max\n";
    char row[96];
    for (std::size_t i = 0; i < hier.levels.size(); ++i) {
        const int name = 1 << i;
        const TriMesh& m = hier.levels[i];
        save_mesh(m, cfg.out_dir + "/mesh_level_" + std::to_string(name) + ".txt");
        const MeshStats st = mesh_stats(m);
        std::snprintf(row, sizeof row, "%d %d %d %.3f\n", name, st.V, st.T, st.h_max);
        table << row;
    }
    std::ofstream out(cfg.out_dir + "/mesh_stats.txt");
    out << table.str();
    std::cout << table.str();
    std::cout << "wrote " << hier.levels.size() << " mesh files to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_dns(const SimConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const MeshHierarchy hier = hierarchy_for(cfg);
    const TriMesh& fine = hier.levels[static_cast<std::size_t>(cfg.dns_index())];
    const FeSpace vel = build_space(fine, 2, 2);
    const FeSpace prs = build_space(fine, 1, 1);

    RunParams pr = base_params(cfg);
    pr.t0 = cfg.t_start;
    pr.n_steps = steps_between(cfg.t_start, cfg.t_end, cfg.dt);
    pr.mu = 0.0;
    add_snapshots(pr, cfg, fine, "dns");

    // body-forced runs start from the steady Stokes flow, driven runs from rest
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(vel.n_total());
    if (cfg.body_force) {
        auto f = body_force_fn();
        const StokesResult st = solve_stokes(
            vel, prs, cfg.nu, [&](Vec2 x) { return f(x, 0.0); }, nullptr, nullptr);
        v0 = st.velocity.coeffs;
    }

    const DnsResult r = run_dns(vel, prs, pr, v0);
    save_trajectory(r.trajectory, traj_path(cfg));
    write_record_csv(r.record, cfg.out_dir + "/dns_record.csv");
    std::cout << "dns: " << pr.n_steps << " steps on level " << cfg.dns_level << ", final ke "
              << r.record.kinetic_energy.back() << "\n";
    std::cout << "wrote " << traj_path(cfg) << "\n";
    return 0;
}

// shared by nudge and compare; returns the record and prints a summary line
RunRecord run_nudge_job(const SimConfig& cfg, const ReferenceTrajectory& traj, bool restart) {
    if (cfg.mu == 0.0) {
        std::cerr << "warning: mu = 0 disables nudging; errors will not decay\n";
    }
    const MeshHierarchy hier = hierarchy_for(cfg);
    const TriMesh& fine = hier.levels[static_cast<std::size_t>(cfg.dns_index())];
    const FeSpace vel = build_space(fine, 2, 2);
    const FeSpace prs = build_space(fine, 1, 1);
    if (!traj.velocity.empty() && traj.velocity.front().size() != vel.n_total()) {
        throw std::runtime_error("nudge: reference trajectory does not match the configured mesh");
    }

    const InterpOperator interp =
        build_interp(hier, cfg.data_index(), cfg.dns_index(), cfg.interp_k, cfg.variant);

    RunParams pr = base_params(cfg);
    pr.t0 = cfg.t_start + cfg.spinup;  // nudging starts after the reference spin-up
    pr.n_steps = steps_between(pr.t0, cfg.t_end, cfg.dt);
    pr.mu = cfg.mu;
    add_snapshots(pr, cfg, fine, "nudge");

    const std::string ckpt = cfg.out_dir + "/nudge.ckpt";
    EvolutionState resume;
    const EvolutionState* resume_ptr = nullptr;
    if (restart) {
        const CheckpointData ck = read_checkpoint(ckpt);
        if (ck.fingerprint != config_fingerprint(cfg)) {
            throw std::runtime_error("nudge: checkpoint fingerprint does not match this config");
        }
        if (ck.velocity.size() != vel.n_total() || ck.pressure.size() != prs.n_scalar) {
            throw std::runtime_error("nudge: checkpoint dimensions do not match this config");
        }
        resume.n = ck.n;
        resume.t = ck.t;
        resume.velocity = FeField(vel);
        resume.velocity.coeffs = ck.velocity;
        resume.pressure = FeField(prs);
        resume.pressure.coeffs = ck.pressure;
        resume_ptr = &resume;
        std::cout << "resuming from step " << ck.n << " (t = " << ck.t << ")\n";
    }

    const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(vel.n_total());
    const RunRecord rec = run_nudged(vel, prs, pr, traj, interp, v0, nullptr, ckpt,
                                     cfg.checkpoint_stride, resume_ptr);
    write_record_csv(rec, cfg.out_dir + "/nudge_record.csv");
    if (rec.sync_time) {
        std::cout << "nudge: synchronized at t = " << *rec.sync_time << "\n";
    } else {
        std::cout << "nudge: no sync by t = " << rec.times.back() << ", final l2 error "
                  << rec.l2_error.back() << "\n";
    }
    return rec;
}

int cmd_nudge(const SimConfig& cfg, bool restart) {
    fs::create_directories(cfg.out_dir);
    const std::string tp = traj_path(cfg);
    if (!fs::exists(tp)) {
        throw std::runtime_error("nudge: missing reference trajectory " + tp +
                                 "; run the dns command first");
    }
    const ReferenceTrajectory traj = load_trajectory(tp);
    run_nudge_job(cfg, traj, restart);
    return 0;
}

const char* variant_name(InterpVariant v) {
    return v == InterpVariant::quadratic_on_coarse ? "quadratic_on_coarse" : "linear_on_refined";
}

int cmd_compare(const SimConfig& cfg_a, const SimConfig& cfg_b) {
    fs::create_directories(cfg_a.out_dir);
    fs::create_directories(cfg_b.out_dir);

    // make sure each side has a reference, reusing files from earlier runs
    auto ensure_reference = [](const SimConfig& cfg) -> ReferenceTrajectory {
        const std::string tp = traj_path(cfg);
        if (fs::exists(tp)) return load_trajectory(tp);
        std::cout << "no reference at " << tp << ", running dns first\n";
        SimConfig dns_cfg = cfg;
        cmd_dns(dns_cfg);
        return load_trajectory(tp);
    };
    const ReferenceTrajectory traj_a = ensure_reference(cfg_a);
    const ReferenceTrajectory traj_b = ensure_reference(cfg_b);

    SimConfig a = cfg_a;
    SimConfig b = cfg_b;
    a.out_dir = cfg_a.out_dir + "/run_a";
    b.out_dir = cfg_b.out_dir + "/run_b";
    fs::create_directories(a.out_dir);
    fs::create_directories(b.out_dir);
    const RunRecord rec_a = run_nudge_job(a, traj_a, false);
    const RunRecord rec_b = run_nudge_job(b, traj_b, false);
    const CompareReport cr = compare_runs(rec_a, rec_b);

    std::ostringstream rep;
    rep << "run_a: " << variant_name(cfg_a.variant) << " data_level " << cfg_a.data_level << "\n";
    rep << "run_b: " << variant_name(cfg_b.variant) << " data_level " << cfg_b.data_level << "\n";
    rep << "sync_time_a: " << (rec_a.sync_time ? std::to_string(*rec_a.sync_time) : "none") << "\n";
    rep << "sync_time_b: " << (rec_b.sync_time ? std::to_string(*rec_b.sync_time) : "none") << "\n";
    if (cr.sync_ratio) rep << "sync_ratio: " << *cr.sync_ratio << "\n";
    rep << "rate_a: " << cr.rate_a << "\n";
    rep << "rate_b: " << cr.rate_b << "\n";
    rep << "rate_ratio: " << cr.rate_ratio << "\n";
    rep << "final_l2_a: " << cr.final_l2_a << "\n";
    rep << "final_l2_b: " << cr.final_l2_b << "\n";

    // declare the winner: sync time when both reached the threshold, then
    // one-sided sync, then the fitted decay rate
    std::string faster = "tie";
    if (rec_a.sync_time && rec_b.sync_time) {
        if (*rec_a.sync_time < *rec_b.sync_time) faster = "run_a";
        if (*rec_b.sync_time < *rec_a.sync_time) faster = "run_b";
    } else if (rec_a.sync_time) {
        faster = "run_a";
    } else if (rec_b.sync_time) {
        faster = "run_b";
    } else if (cr.rate_a != cr.rate_b) {
        faster = cr.rate_a > cr.rate_b ? "run_a" : "run_b";
    }
    rep << "faster_to_threshold: " << faster << "\n";

    std::ofstream out(cfg_a.out_dir + "/compare_report.txt");
    out << rep.str();
    std::cout << rep.str();
    return 0;
}

int cmd_analyze(const SimConfig& cfg, const std::string& record_path, double t_lo, double t_hi,
                bool have_window) {
    std::ostringstream rep;
    if (!record_path.empty()) {
        const RunRecord rec = read_record_csv(record_path);
        if (rec.times.empty()) throw std::runtime_error("analyze: empty record " + record_path);
        const double lo = have_window ? t_lo : rec.times.front();
        const double hi = have_window ? t_hi : rec.times.back();
        const DecayFit fit = fit_decay_rate(rec, lo, hi);
        rep << "record: " << record_path << "\n";
        rep << "window: [" << lo << ", " << hi << "]\n";
        rep << "sigma: " << fit.sigma << "\n";
        rep << "fit_residual: " << fit.residual << "\n";
        rep << "n_used: " << fit.n_used << "\n";
        rep << "n_excluded: " << fit.n_excluded << "\n";
    }

    const MeshHierarchy hier = hierarchy_for(cfg);
    const TriMesh& fine = hier.levels[static_cast<std::size_t>(cfg.dns_index())];
    // the data mesh is where the interpolant lives: the coarse level itself
    // for the quadratic variant, its once-refined copy for the linear one
    const int data_idx = cfg.data_index() +
                         (cfg.variant == InterpVariant::linear_on_refined ? 1 : 0);
    const TriMesh& data_mesh = hier.levels[static_cast<std::size_t>(data_idx)];

    const FeSpace vel = build_space(fine, 2, 2);
    const FeSpace prs = build_space(fine, 1, 1);
    const Lambda1Result lam = estimate_lambda1(vel, prs);

    double G = 0.0;
    if (cfg.body_force) {
        auto f = body_force_fn();
        G = grashof(fine, [&](Vec2 x) { return f(x, 0.0); }, cfg.nu, lam.lambda1);
    }
    const double H = mesh_stats(data_mesh).h_max;
    const double h = mesh_stats(fine).h_max;
    const MuRangeReport mr = mu_range(cfg.interp_k, H, h, cfg.nu, lam.lambda1, G,
                                      MuRangeConstants{});
    rep << "lambda1: " << lam.lambda1 << "\n";
    rep << "grashof: " << G << "\n";
    rep << "H: " << mr.H << "\n";
    rep << "h: " << mr.h << "\n";
    rep << "mu_lower: " << mr.lower_bound << "\n";
    rep << "mu_upper: " << mr.upper_bound << "\n";
    rep << "feasible: " << (mr.feasible ? "true" : "false") << "\n";
    rep << "alt_mu_lower: " << mr.alt_lower_bound << "\n";
    rep << "alt_feasible: " << (mr.alt_feasible ? "true" : "false") << "\n";
    rep << "mu_configured: " << cfg.mu << "\n";
    std::cout << rep.str();
    return 0;
}

struct CommonOpts {
    std::string config;
    std::vector<std::string> sets;
    bool deterministic = false;
    std::string out;
};

void add_common(CLI::App* sub, CommonOpts& c, bool config_required) {
    auto* opt = sub->add_option("--config", c.config, "configuration file");
    if (config_required) opt->required();
    sub->add_option("--set", c.sets, "override a config key, e.g. --set mu=50");
    sub->add_flag("--deterministic", c.deterministic, "force deterministic mode");
    sub->add_option("--out", c.out, "output directory (overrides out_dir)");
}

SimConfig resolve(const CommonOpts& c) {
    std::vector<std::string> sets = c.sets;
    if (c.deterministic) sets.push_back("deterministic=true");
    SimConfig cfg = c.config.empty() ? parse_config_text("", sets, "<defaults>")
                                     : parse_config_file(c.config, sets);
    if (!c.out.empty()) cfg.out_dir = c.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nudged Navier-Stokes experiments on nested triangle meshes"};
    app.require_subcommand(1);

    CommonOpts mesh_o, dns_o, nudge_o, analyze_o, compare_o;
    bool restart = false;
    std::string config_b, record_path;
    double t_lo = 0.0, t_hi = 0.0;

    auto* mesh_cmd = app.add_subcommand("mesh", "generate the mesh hierarchy and a stats table");
    add_common(mesh_cmd, mesh_o, true);

    auto* dns_cmd = app.add_subcommand("dns", "run the reference solution and store it");
    add_common(dns_cmd, dns_o, true);

    auto* nudge_cmd = app.add_subcommand("nudge", "run a nudged solution against the reference");
    add_common(nudge_cmd, nudge_o, true);
    nudge_cmd->add_flag("--restart", restart, "resume from the saved checkpoint");

    auto* compare_cmd =
        app.add_subcommand("compare", "run two nudged configurations and compare them");
    add_common(compare_cmd, compare_o, true);
    compare_cmd->add_option("--config-b", config_b, "second configuration file")->required();

    auto* analyze_cmd =
        app.add_subcommand("analyze", "decay-rate fit and feedback-range report");
    add_common(analyze_cmd, analyze_o, true);
    analyze_cmd->add_option("--record", record_path, "run record CSV to fit");
    auto* lo_opt = analyze_cmd->add_option("--t-lo", t_lo, "fit window start");
    auto* hi_opt = analyze_cmd->add_option("--t-hi", t_hi, "fit window end");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mesh_cmd) return cmd_mesh(resolve(mesh_o));
        if (*dns_cmd) return cmd_dns(resolve(dns_o));
        if (*nudge_cmd) return cmd_nudge(resolve(nudge_o), restart);
        if (*compare_cmd) {
            const SimConfig a = resolve(compare_o);
            CommonOpts b_opts = compare_o;
            b_opts.config = config_b;
            return cmd_compare(a, resolve(b_opts));
        }
        if (*analyze_cmd) {
            const bool have_window = lo_opt->count() > 0 && hi_opt->count() > 0;
            return cmd_analyze(resolve(analyze_o), record_path, t_lo, t_hi, have_window);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
