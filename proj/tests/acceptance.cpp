// Acceptance harness: one self-contained check per numbered criterion. Each
// criterion prints exactly one PASS/FAIL line with a short measured detail.
// Run all of them, or a single one with --only N.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nudgefem/analysis.hpp"
#include "nudgefem/config.hpp"
#include "nudgefem/delaunay.hpp"
#include "nudgefem/interp.hpp"
#include "nudgefem/io.hpp"
#include "nudgefem/mesh.hpp"
#include "nudgefem/operators.hpp"
#include "nudgefem/solver.hpp"
#include "nudgefem/space.hpp"

#ifndef NUDGEFEM_CLI_PATH
#error "NUDGEFEM_CLI_PATH must point at the command line binary"
#endif

namespace fs = std::filesystem;
using namespace nudgefem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome ok(std::string detail) { return {true, std::move(detail)}; }
Outcome bad(std::string detail) { return {false, std::move(detail)}; }

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nudgefem_accept_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::vector<std::string>& args, std::string* output) {
    std::string cmd = std::string("'") + NUDGEFEM_CLI_PATH + "'";
    for (const std::string& a : args) cmd += " '" + a + "'";
    cmd += " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return -1;
    std::string text;
    char buf[4096];
    for (;;) {
        const size_t got = fread(buf, 1, sizeof buf, pipe);
        if (got == 0) break;
        text.append(buf, got);
    }
    const int rc = pclose(pipe);
    if (output != nullptr) *output = text;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Eigen::VectorXd random_probe(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(gen);
    return v;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

std::array<double, 2> spin_bc(Vec2 p) { return {-p.y, p.x}; }

// manufactured velocity (a stream-function field, divergence free), its
// gradient, and the forcing that makes it solve the momentum equation with
// amplitude g(t)
std::array<double, 2> mms_velocity(Vec2 p, double g) {
    const double sx = std::sin(M_PI * p.x), cx = std::cos(M_PI * p.x);
    const double sy = std::sin(M_PI * p.y), cy = std::cos(M_PI * p.y);
    return {g * M_PI * sx * cy, -g * M_PI * cx * sy};
}

std::array<double, 4> mms_velocity_grad(Vec2 p, double g) {
    const double sx = std::sin(M_PI * p.x), cx = std::cos(M_PI * p.x);
    const double sy = std::sin(M_PI * p.y), cy = std::cos(M_PI * p.y);
    const double a = g * M_PI * M_PI;
    return {a * cx * cy, -a * sx * sy, a * sx * sy, -a * cx * cy};
}

std::array<double, 2> mms_forcing(Vec2 p, double g, double gdot, double nu) {
    const double sx = std::sin(M_PI * p.x), cx = std::cos(M_PI * p.x);
    const double sy = std::sin(M_PI * p.y), cy = std::cos(M_PI * p.y);
    const std::array<double, 2> u = mms_velocity(p, g);
    const std::array<double, 2> ut = mms_velocity(p, gdot);
    const double pi3 = M_PI * M_PI * M_PI;
    return {ut[0] + 2.0 * M_PI * M_PI * nu * u[0] + g * g * pi3 * sx * cx + g * M_PI * cx * sy,
            ut[1] + 2.0 * M_PI * M_PI * nu * u[1] + g * g * pi3 * sy * cy + g * M_PI * sx * cy};
}

// 1. four-level hierarchy of the (20, 18) annulus through the command line
// tool: triangle counts exact, the seed vertex count, and the vertex
// doubling law V' = 2V + T (midpoint refinement adds one vertex per edge,
// E = V + T on a two-loop domain)
Outcome criterion_mesh_counts() {
    const fs::path dir = scratch("c1");
    const fs::path cfg = dir / "mesh.cfg";
    {
        std::ofstream out(cfg);
        out << "preset = custom\nnu = 1\ndns_level = 8\ndata_level = 1\n"
            << "out_dir = " << (dir / "out").string() << "\n";
    }
    std::string log;
    if (run_cli({"mesh", "--config", cfg.string()}, &log) != 0) {
        return bad("mesh command failed: " + log);
    }
    std::ifstream stats(dir / "out" / "mesh_stats.txt");
    if (!stats) return bad("mesh_stats.txt missing");

    std::vector<long> level, verts, tris;
    std::string line;
    while (std::getline(stats, line)) {
        std::istringstream row(line);
        long l = 0, v = 0, t = 0;
        double h = 0.0;
        if (row >> l >> v >> t >> h) {
            level.push_back(l);
            verts.push_back(v);
            tris.push_back(t);
        }
    }
    if (level.size() != 4 || level != std::vector<long>{1, 2, 4, 8}) {
        return bad(fmt("expected levels 1 2 4 8, got %zu rows", level.size()));
    }
    const long want_tris[4] = {290, 1160, 4640, 18560};
    for (int i = 0; i < 4; ++i) {
        if (tris[i] != want_tris[i]) {
            return bad(fmt("level %ld has %ld triangles, want %ld", level[i], tris[i],
                           want_tris[i]));
        }
    }
    if (std::labs(verts[0] - 164) > 8) {
        return bad(fmt("seed level has %ld vertices, want 164 within 5%%", verts[0]));
    }
    for (int i = 0; i < 3; ++i) {
        const long want = 2 * verts[i] + tris[i];
        if (verts[i + 1] != want) {
            return bad(fmt("level %ld has %ld vertices, refinement law gives %ld",
                           level[i + 1], verts[i + 1], want));
        }
    }
    return ok(fmt("V = %ld/%ld/%ld/%ld, T = %ld/%ld/%ld/%ld", verts[0], verts[1], verts[2],
                  verts[3], tris[0], tris[1], tris[2], tris[3]));
}

// 2. interpolation convergence on sin(pi x) sin(pi y) over three nested
// coarse levels: L2 rates near k + 1, H1 rates near k
Outcome criterion_interp_rates() {
    const MeshHierarchy hier = build_hierarchy(generate_annulus(20, 18, 1.0, 0.1), 4);
    const auto phi = [](Vec2 p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
    const auto grad = [](Vec2 p) -> std::array<double, 2> {
        return {M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y),
                M_PI * std::sin(M_PI * p.x) * std::cos(M_PI * p.y)};
    };

    double rate[2][2];
    for (int k = 1; k <= 2; ++k) {
        for (int m = 0; m <= 1; ++m) {
            const InterpRateReport rep = measure_interp_rate(hier, k, phi, grad, m);
            if (rep.errors.size() != 3) return bad("expected three nested coarse levels");
            rate[k - 1][m] = rep.rate;
        }
    }
    const double want[2][2] = {{2.0, 1.0}, {3.0, 2.0}};
    for (int k = 1; k <= 2; ++k) {
        for (int m = 0; m <= 1; ++m) {
            if (std::abs(rate[k - 1][m] - want[k - 1][m]) > 0.3) {
                return bad(fmt("degree %d %s rate %.3f, want %.1f +- 0.3", k,
                               m == 0 ? "L2" : "H1", rate[k - 1][m], want[k - 1][m]));
            }
        }
    }
    return ok(fmt("L2 rates %.3f/%.3f, H1 rates %.3f/%.3f", rate[0][0], rate[1][0],
                  rate[0][1], rate[1][1]));
}

// 3. algebraic properties of the assembled operators under random probes:
// mass/stiffness symmetric, convection exactly skew, rigid rotation
// divergence free
Outcome criterion_operator_properties() {
    const MeshHierarchy hier = build_hierarchy(generate_annulus(20, 18, 1.0, 0.1), 2);
    const TriMesh& mesh = hier.levels[1];
    const FeSpace vel = build_space(mesh, 2, 2);
    const FeSpace pres = build_space(mesh, 1, 1);
    const int n = vel.n_total();

    const SpMat M = assemble_mass(vel);
    const SpMat K = assemble_stiffness(vel);
    const SpMat B = assemble_divergence(vel, pres);
    const double norm_m = M.norm();
    const double norm_k = K.norm();

    double worst_sym = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
        const Eigen::VectorXd v = random_probe(n, 1000 + probe);
        const Eigen::VectorXd w = random_probe(n, 2000 + probe);
        const double scale = v.norm() * w.norm();
        const double gap_m = std::abs(v.dot(M * w) - w.dot(M * v)) / (norm_m * scale);
        const double gap_k = std::abs(v.dot(K * w) - w.dot(K * v)) / (norm_k * scale);
        worst_sym = std::max({worst_sym, gap_m, gap_k});
        if (gap_m > 1e-12 || gap_k > 1e-12) {
            return bad(fmt("symmetry gap %.2e at probe %d", std::max(gap_m, gap_k), probe));
        }
    }

    double worst_skew = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
        FeField wind(vel);
        wind.coeffs = random_probe(n, 3000 + probe);
        const SpMat N = assemble_convection(vel, wind);
        const Eigen::VectorXd v = random_probe(n, 4000 + probe);
        const double gap = std::abs(v.dot(N * v)) / (N.norm() * v.squaredNorm());
        worst_skew = std::max(worst_skew, gap);
        if (gap > 1e-12) return bad(fmt("skew gap %.2e at probe %d", gap, probe));
    }

    const FeField spin = interpolate_vector(vel, spin_bc);
    const Eigen::VectorXd div = B * spin.coeffs;
    const double div_inf = div.lpNorm<Eigen::Infinity>();
    if (div_inf > 1e-10) return bad(fmt("rigid rotation divergence %.2e", div_inf));
    for (int probe = 0; probe < 100; ++probe) {
        const Eigen::VectorXd q = random_probe(pres.n_total(), 5000 + probe);
        if (std::abs(q.dot(div)) > 1e-10 * q.lpNorm<1>()) {
            return bad(fmt("divergence probe %d exceeds 1e-10", probe));
        }
    }
    return ok(fmt("symmetry %.1e, skew %.1e, divergence %.1e", worst_sym, worst_skew,
                  div_inf));
}

// 4. manufactured solution orders: spatial L2 rate of the velocity under
// mesh halving with a steady field, temporal rate under time step halving
// against a fine reference with a pulsating amplitude
Outcome criterion_mms_orders() {
    const MeshHierarchy hier = build_hierarchy(generate_annulus(20, 18, 1.0, 0.1), 3);

    const auto exact = [](Vec2 p) { return mms_velocity(p, 1.0); };
    const auto exact_grad = [](Vec2 p) { return mms_velocity_grad(p, 1.0); };

    std::vector<double> log_h, log_err;
    for (int lvl = 0; lvl < 3; ++lvl) {
        const TriMesh& mesh = hier.levels[lvl];
        const FeSpace vel = build_space(mesh, 2, 2);
        const FeSpace pres = build_space(mesh, 1, 1);

        RunParams prm;
        prm.t0 = 0.0;
        prm.dt = 0.05;
        prm.n_steps = 60;
        prm.nu = 1.0;
        prm.force = [](Vec2 p, double) { return mms_forcing(p, 1.0, 0.0, 1.0); };
        prm.force_static = true;
        prm.bc_outer = [](Vec2 p, double) { return mms_velocity(p, 1.0); };
        prm.bc_inner = prm.bc_outer;
        prm.bc_static = true;

        const FeField v0 = interpolate_vector(vel, exact);
        const DnsResult res = run_dns(vel, pres, prm, v0.coeffs);
        FeField final_v(vel);
        final_v.coeffs = res.trajectory.velocity.back();
        const NormReport err = error_against(final_v, exact, exact_grad);
        log_h.push_back(std::log(mesh_stats(mesh).h_max));
        log_err.push_back(std::log(err.l2));
    }
    const double spatial_rate = ls_slope(log_h, log_err);
    if (spatial_rate < 2.5) return bad(fmt("spatial L2 rate %.3f, want >= 2.5", spatial_rate));

    const TriMesh& fine = hier.levels[2];
    const FeSpace vel = build_space(fine, 2, 2);
    const FeSpace pres = build_space(fine, 1, 1);
    const SpMat M = assemble_mass(vel);
    const auto amplitude = [](double t) { return std::cos(2.0 * t); };
    const auto amplitude_dot = [](double t) { return -2.0 * std::sin(2.0 * t); };

    const auto run_to_final = [&](long n_steps) -> Eigen::VectorXd {
        RunParams prm;
        prm.t0 = 0.0;
        prm.dt = 1.0 / static_cast<double>(n_steps);
        prm.n_steps = n_steps;
        prm.nu = 1.0;
        prm.force = [&](Vec2 p, double t) {
            return mms_forcing(p, amplitude(t), amplitude_dot(t), 1.0);
        };
        prm.force_static = false;
        prm.bc_outer = [&](Vec2 p, double t) { return mms_velocity(p, amplitude(t)); };
        prm.bc_inner = prm.bc_outer;
        prm.bc_static = false;
        const FeField v0 = interpolate_vector(vel, exact);
        return run_dns(vel, pres, prm, v0.coeffs).trajectory.velocity.back();
    };

    const Eigen::VectorXd ref = run_to_final(320);
    std::vector<double> log_dt, log_terr;
    for (long n : {10L, 20L, 40L}) {
        const Eigen::VectorXd d = run_to_final(n) - ref;
        log_dt.push_back(std::log(1.0 / static_cast<double>(n)));
        log_terr.push_back(std::log(std::sqrt(d.dot(M * d))));
    }
    const double temporal_rate = ls_slope(log_dt, log_terr);
    if (std::abs(temporal_rate - 1.0) > 0.2) {
        return bad(fmt("temporal rate %.3f, want 1.0 +- 0.2", temporal_rate));
    }
    return ok(fmt("spatial L2 rate %.3f, temporal rate %.3f", spatial_rate, temporal_rate));
}

// 5. unforced flow with homogeneous walls: the velocity norm never grows,
// five random starts, two hundred steps each
Outcome criterion_energy_decay() {
    const MeshHierarchy hier = build_hierarchy(generate_annulus(20, 18, 1.0, 0.1), 2);
    const TriMesh& mesh = hier.levels[1];
    const FeSpace vel = build_space(mesh, 2, 2);
    const FeSpace pres = build_space(mesh, 1, 1);
    const DirichletBC walls = velocity_bc(
        vel, [](Vec2) -> std::array<double, 2> { return {0.0, 0.0}; },
        [](Vec2) -> std::array<double, 2> { return {0.0, 0.0}; });

    RunParams prm;
    prm.t0 = 0.0;
    prm.dt = 0.01;
    prm.n_steps = 200;
    prm.nu = 0.1;

    double worst_uptick = 0.0;
    for (int field = 0; field < 5; ++field) {
        Eigen::VectorXd v0 = random_probe(vel.n_total(), 60 + field);
        for (const int dof : walls.dofs) v0[dof] = 0.0;
        const DnsResult res = run_dns(vel, pres, prm, v0);
        const std::vector<double>& ke = res.record.kinetic_energy;
        if (ke.size() != 201) return bad(fmt("field %d recorded %zu samples", field, ke.size()));
        for (size_t i = 0; i + 1 < ke.size(); ++i) {
            worst_uptick = std::max(worst_uptick, ke[i + 1] - ke[i]);
            if (ke[i + 1] > ke[i]) {
                return bad(fmt("field %d energy rose by %.2e at step %zu", field,
                               ke[i + 1] - ke[i], i + 1));
            }
        }
    }
    return ok(fmt("5 fields x 200 steps, largest energy increment %.1e", worst_uptick));
}

// 6. a feedback run started on the reference stays on it: relative L2 gap
// below 1e-9 over one hundred steps with mu = 100
Outcome criterion_sync_manifold() {
    const MeshHierarchy hier = build_hierarchy(generate_annulus(20, 18, 1.0, 0.1), 3);
    const TriMesh& fine = hier.levels[2];
    const FeSpace vel = build_space(fine, 2, 2);
    const FeSpace pres = build_space(fine, 1, 1);
    const SpMat M = assemble_mass(vel);

    RunParams prm;
    prm.t0 = -0.5;
    prm.dt = 0.01;
    prm.n_steps = 50;
    prm.nu = 1.0 / 600.0;
    prm.bc_outer = [](Vec2 p, double) { return spin_bc(p); };

    // spin up from rest so the shared start is a nontrivial flow state
    const Eigen::VectorXd rest = Eigen::VectorXd::Zero(vel.n_total());
    const Eigen::VectorXd shared = run_dns(vel, pres, prm, rest).trajectory.velocity.back();

    prm.t0 = 0.0;
    prm.n_steps = 100;
    const DnsResult ref = run_dns(vel, pres, prm, shared);

    const InterpOperator interp =
        build_interp(hier, 0, 2, 2, InterpVariant::quadratic_on_coarse);
    prm.mu = 100.0;
    prm.sync_threshold = 0.0;  // keep stepping, no early halt
    const RunRecord rec =
        run_nudged(vel, pres, prm, ref.trajectory, interp, shared);

    if (rec.times.size() != 101) return bad(fmt("recorded %zu samples", rec.times.size()));
    double worst = 0.0;
    for (size_t i = 0; i < rec.times.size(); ++i) {
        const Eigen::VectorXd& u = ref.trajectory.velocity[i];
        const double ref_norm = std::sqrt(u.dot(M * u));
        worst = std::max(worst, rec.l2_error[i] / ref_norm);
    }
    if (worst > 1e-9) return bad(fmt("relative gap reached %.2e", worst));
    return ok(fmt("largest relative gap %.1e over 100 steps", worst));
}

// 7. rotational shear flow, equal data budget: quadratic reconstruction on
// the coarse mesh against linear on its refinement, mu = 100 over [0, 10].
// Both gaps must shrink, the quadratic fitted rate must not be smaller, and
// a threshold hit must come earlier for the quadratic variant.
Outcome criterion_shear_ordering() {
    const SimConfig cfg = parse_config_text("preset = shear_annulus\n");
    const MeshHierarchy hier =
        build_hierarchy(generate_annulus(cfg.n_outer, cfg.n_inner, cfg.r_outer, cfg.r_inner),
                        cfg.dns_index() + 1);
    const TriMesh& fine = hier.levels[cfg.dns_index()];
    const FeSpace vel = build_space(fine, 2, 2);
    const FeSpace pres = build_space(fine, 1, 1);

    RunParams prm;
    prm.t0 = cfg.t_start;
    prm.dt = cfg.dt;
    prm.n_steps = std::lround((cfg.t_end - cfg.t_start) / cfg.dt);
    prm.nu = cfg.nu;
    prm.bc_outer = [](Vec2 p, double) { return spin_bc(p); };

    const Eigen::VectorXd rest = Eigen::VectorXd::Zero(vel.n_total());
    const DnsResult ref = run_dns(vel, pres, prm, rest);

    const int data = cfg.data_index();
    const InterpOperator quad =
        build_interp(hier, data, cfg.dns_index(), 2, InterpVariant::quadratic_on_coarse);
    const InterpOperator lin =
        build_interp(hier, data, cfg.dns_index(), 1, InterpVariant::linear_on_refined);

    prm.t0 = cfg.t_start + cfg.spinup;
    prm.n_steps = std::lround((cfg.t_end - prm.t0) / cfg.dt);
    prm.mu = cfg.mu;
    prm.sync_threshold = cfg.sync_threshold;
    const RunRecord rec2 = run_nudged(vel, pres, prm, ref.trajectory, quad, rest);
    const RunRecord rec1 = run_nudged(vel, pres, prm, ref.trajectory, lin, rest);

    if (!(rec2.l2_error.back() < rec2.l2_error.front())) {
        return bad(fmt("quadratic gap did not shrink: %.3e -> %.3e", rec2.l2_error.front(),
                       rec2.l2_error.back()));
    }
    if (!(rec1.l2_error.back() < rec1.l2_error.front())) {
        return bad(fmt("linear gap did not shrink: %.3e -> %.3e", rec1.l2_error.front(),
                       rec1.l2_error.back()));
    }
    const CompareReport cmp = compare_runs(rec2, rec1);
    if (!(cmp.rate_a > 0.0) || !(cmp.rate_b > 0.0)) {
        return bad(fmt("fitted rates %.3f (quadratic) and %.3f (linear) must be positive",
                       cmp.rate_a, cmp.rate_b));
    }
    if (cmp.rate_a < cmp.rate_b) {
        return bad(fmt("quadratic rate %.3f below linear rate %.3f", cmp.rate_a, cmp.rate_b));
    }
    std::string sync = "no threshold hit";
    if (rec2.sync_time && rec1.sync_time) {
        if (!(*rec2.sync_time < *rec1.sync_time)) {
            return bad(fmt("quadratic hit threshold at t = %.3f, linear at t = %.3f",
                           *rec2.sync_time, *rec1.sync_time));
        }
        sync = fmt("threshold at t = %.2f vs %.2f", *rec2.sync_time, *rec1.sync_time);
    } else if (rec2.sync_time) {
        sync = fmt("only quadratic hit threshold, t = %.2f", *rec2.sync_time);
    } else if (rec1.sync_time) {
        return bad(fmt("only the linear variant hit the threshold, t = %.2f",
                       *rec1.sync_time));
    }
    return ok(fmt("rates %.3f vs %.3f, %s", cmp.rate_a, cmp.rate_b, sync.c_str()));
}

// 8. body force flow between offset circles, mu = 10: the quadratic variant
// must end with a gap no larger than the linear one at t = 10
Outcome criterion_bodyforce_ordering() {
    const SimConfig cfg = parse_config_text("preset = bodyforce_offset_disk\n");
    const MeshHierarchy hier =
        build_hierarchy(generate_offset_disk(cfg.n_outer, cfg.n_inner), cfg.dns_index() + 1);
    const TriMesh& fine = hier.levels[cfg.dns_index()];
    const FeSpace vel = build_space(fine, 2, 2);
    const FeSpace pres = build_space(fine, 1, 1);

    const auto force = [](Vec2 p, double) { return preset_body_force(p); };
    const auto zero = [](Vec2) -> std::array<double, 2> { return {0.0, 0.0}; };

    // the reference starts from the steady creeping flow driven by the force
    const StokesResult stokes =
        solve_stokes(vel, pres, cfg.nu, [](Vec2 p) { return preset_body_force(p); }, zero, zero);

    RunParams prm;
    prm.t0 = cfg.t_start;
    prm.dt = cfg.dt;
    prm.n_steps = std::lround((cfg.t_end - cfg.t_start) / cfg.dt);
    prm.nu = cfg.nu;
    prm.force = force;
    prm.force_static = true;

    const DnsResult ref = run_dns(vel, pres, prm, stokes.velocity.coeffs);

    const int data = cfg.data_index();
    const InterpOperator quad =
        build_interp(hier, data, cfg.dns_index(), 2, InterpVariant::quadratic_on_coarse);
    const InterpOperator lin =
        build_interp(hier, data, cfg.dns_index(), 1, InterpVariant::linear_on_refined);

    prm.mu = cfg.mu;
    prm.sync_threshold = 0.0;  // measure the full window, no early halt
    const Eigen::VectorXd rest = Eigen::VectorXd::Zero(vel.n_total());
    const RunRecord rec2 = run_nudged(vel, pres, prm, ref.trajectory, quad, rest);
    const RunRecord rec1 = run_nudged(vel, pres, prm, ref.trajectory, lin, rest);

    const double final2 = rec2.l2_error.back();
    const double final1 = rec1.l2_error.back();
    if (!(final2 <= final1)) {
        return bad(fmt("quadratic final gap %.3e exceeds linear %.3e", final2, final1));
    }
    return ok(fmt("final gaps %.3e (quadratic) vs %.3e (linear), start %.3e", final2, final1,
                  rec2.l2_error.front()));
}

// 9. feedback range calculator: two hand-solved parameter sets to 1e-9
// relative, then monotonicity of the bounds across a 5 x 5 grid in the data
// resolution H and the forcing ratio G
Outcome criterion_mu_calculator() {
    const MuRangeConstants ones;
    const double want_lower = 2.0 * (std::exp(1.0) + 1.0);

    const MuRangeReport a = mu_range(1, 1.0 / 64.0, 1.0 / 512.0, 1.0, 1.0, 1.0, ones);
    if (std::abs(a.lower_bound - want_lower) > 1e-9 * want_lower) {
        return bad(fmt("feasible case lower bound %.12f, want %.12f", a.lower_bound,
                       want_lower));
    }
    if (std::abs(a.upper_bound - 64.0) > 1e-9 * 64.0) {
        return bad(fmt("feasible case upper bound %.12f, want 64", a.upper_bound));
    }
    if (!a.feasible) return bad("feasible case reported infeasible");

    const MuRangeReport b = mu_range(1, 1.0 / 8.0, 1.0 / 64.0, 1.0, 1.0, 1.0, ones);
    if (std::abs(b.lower_bound - want_lower) > 1e-9 * want_lower) {
        return bad(fmt("infeasible case lower bound %.12f, want %.12f", b.lower_bound,
                       want_lower));
    }
    if (std::abs(b.upper_bound - 1.0) > 1e-9) {
        return bad(fmt("infeasible case upper bound %.12f, want 1", b.upper_bound));
    }
    if (b.feasible) return bad("infeasible case reported feasible");

    const double gs[5] = {0.5, 1.0, 1.5, 2.0, 2.5};
    for (int p = 2; p <= 6; ++p) {
        const double H = std::pow(2.0, -p);
        double prev = 0.0;
        bool was_infeasible = false;
        for (const double g : gs) {
            const MuRangeReport r = mu_range(1, H, H / 8.0, 1.0, 1.0, g, ones);
            if (!(r.lower_bound > prev)) {
                return bad(fmt("lower bound not increasing in G at H = 2^-%d", p));
            }
            prev = r.lower_bound;
            if (was_infeasible && r.feasible) {
                return bad(fmt("feasibility recovered under larger G at H = 2^-%d", p));
            }
            was_infeasible = !r.feasible;
        }
    }
    for (const double g : gs) {
        double prev = 0.0;
        for (int p = 2; p <= 6; ++p) {
            const double H = std::pow(2.0, -p);
            const MuRangeReport r = mu_range(1, H, H / 8.0, 1.0, 1.0, g, ones);
            if (!(r.upper_bound > prev)) {
                return bad(fmt("upper bound not increasing as H shrinks at G = %.1f", g));
            }
            prev = r.upper_bound;
        }
    }
    return ok(fmt("bounds %.9g <= 64 and 1 < %.9g, grid monotone", a.lower_bound,
                  b.lower_bound));
}

// 10. bitwise determinism: the command line tool rewrites identical output
// files on a rerun, and a checkpointed feedback run continues exactly like
// an uninterrupted one for fifty further steps
Outcome criterion_restart() {
    const fs::path dir = scratch("c10");
    const fs::path out = dir / "out";
    const fs::path cfg = dir / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "preset = custom\nnu = 0.05\ndns_level = 2\ndata_level = 1\n"
          << "t_end = 0.5\ndt = 0.01\nmu = 50\nout_dir = " << out.string() << "\n";
    }
    std::string log;
    if (run_cli({"dns", "--config", cfg.string()}, &log) != 0) {
        return bad("dns command failed: " + log);
    }
    const std::string csv_first = read_bytes(out / "dns_record.csv");
    const std::string traj_first = read_bytes(out / "reference.traj");
    fs::remove_all(out);
    if (run_cli({"dns", "--config", cfg.string()}, &log) != 0) {
        return bad("dns rerun failed: " + log);
    }
    if (read_bytes(out / "dns_record.csv") != csv_first) {
        return bad("dns_record.csv differs between identical runs");
    }
    if (read_bytes(out / "reference.traj") != traj_first) {
        return bad("reference.traj differs between identical runs");
    }

    const MeshHierarchy hier = build_hierarchy(generate_annulus(20, 18, 1.0, 0.1), 2);
    const TriMesh& fine = hier.levels[1];
    const FeSpace vel = build_space(fine, 2, 2);
    const FeSpace pres = build_space(fine, 1, 1);

    RunParams prm;
    prm.t0 = 0.0;
    prm.dt = 0.01;
    prm.n_steps = 150;
    prm.nu = 0.05;
    prm.bc_outer = [](Vec2 p, double) { return spin_bc(p); };
    prm.fingerprint = 11;

    const Eigen::VectorXd rest = Eigen::VectorXd::Zero(vel.n_total());
    const DnsResult ref = run_dns(vel, pres, prm, rest);
    const InterpOperator interp =
        build_interp(hier, 0, 1, 2, InterpVariant::quadratic_on_coarse);

    prm.mu = 50.0;
    prm.sync_threshold = 0.0;
    prm.n_steps = 100;
    EvolutionState full_final;
    const RunRecord full = run_nudged(vel, pres, prm, ref.trajectory, interp, rest,
                                      &full_final);

    const std::string ckpt = (dir / "nudge.ckpt").string();
    RunParams half = prm;
    half.n_steps = 50;
    run_nudged(vel, pres, half, ref.trajectory, interp, rest, nullptr, ckpt, 50);

    const CheckpointData cd = read_checkpoint(ckpt);
    if (cd.n != 50) return bad(fmt("checkpoint stored step %ld, want 50", cd.n));
    EvolutionState resume;
    resume.n = cd.n;
    resume.t = cd.t;
    resume.velocity = FeField(vel);
    resume.velocity.coeffs = cd.velocity;
    resume.pressure = FeField(pres);
    resume.pressure.coeffs = cd.pressure;

    EvolutionState tail_final;
    const RunRecord tail = run_nudged(vel, pres, prm, ref.trajectory, interp, rest,
                                      &tail_final, "", 0, &resume);

    if (!(full_final.velocity.coeffs.array() == tail_final.velocity.coeffs.array()).all()) {
        return bad("resumed velocity differs from the uninterrupted run");
    }
    if (!(full_final.pressure.coeffs.array() == tail_final.pressure.coeffs.array()).all()) {
        return bad("resumed pressure differs from the uninterrupted run");
    }
    if (tail.times.size() != 51) return bad(fmt("tail recorded %zu samples", tail.times.size()));
    for (size_t i = 0; i < tail.times.size(); ++i) {
        const size_t j = full.times.size() - tail.times.size() + i;
        if (tail.times[i] != full.times[j] || tail.kinetic_energy[i] != full.kinetic_energy[j] ||
            tail.l2_error[i] != full.l2_error[j] || tail.h1_error[i] != full.h1_error[j]) {
            return bad(fmt("tail sample %zu differs from the uninterrupted run", i));
        }
    }
    return ok("identical output bytes on rerun, bitwise continuation for 50 steps");
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "mesh hierarchy counts", criterion_mesh_counts},
    {2, "interpolation convergence rates", criterion_interp_rates},
    {3, "operator algebraic properties", criterion_operator_properties},
    {4, "manufactured solution orders", criterion_mms_orders},
    {5, "unforced energy decay", criterion_energy_decay},
    {6, "synchronized manifold invariance", criterion_sync_manifold},
    {7, "shear flow synchronization ordering", criterion_shear_ordering},
    {8, "body force synchronization ordering", criterion_bodyforce_ordering},
    {9, "feedback range calculator", criterion_mu_calculator},
    {10, "determinism and restart", criterion_restart},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--only" && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
            ++i;
        }
    }
    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = bad(std::string("exception: ") + e.what());
        }
        std::printf("%s criterion %d: %s (%s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
