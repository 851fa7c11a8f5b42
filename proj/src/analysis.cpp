#include "nudgefem/analysis.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nudgefem/space.hpp"

namespace nudgefem {

double kinetic_energy(const SpMat& mass, const Eigen::VectorXd& v) {
    if (mass.rows() != v.size()) {
        throw std::invalid_argument("kinetic_energy: dimension mismatch");
    }
    return 0.5 * v.dot(mass * v);
}

double grashof(const TriMesh& mesh, const std::function<std::array<double, 2>(Vec2)>& f,
               double nu, double lambda1) {
    if (nu <= 0.0) throw std::invalid_argument("grashof: nu must be positive");
    if (lambda1 <= 0.0) throw std::invalid_argument("grashof: lambda1 must be positive");
    return l2_norm_of(mesh, f) / (nu * nu * lambda1);
}

Lambda1Result estimate_lambda1(const FeSpace& vel_space, const FeSpace& p_space) {
    if (vel_space.components != 2 || vel_space.degree != 2)
        throw std::invalid_argument("estimate_lambda1: velocity space must be vector quadratic");
    if (p_space.components != 1 || p_space.degree != 1)
        throw std::invalid_argument("estimate_lambda1: pressure space must be scalar linear");

    const int n_v = vel_space.n_total();
    const int n_p = p_space.n_scalar;
    const int n = n_v + n_p + 1;

    const SpMat M = assemble_mass(vel_space);
    const SpMat K = assemble_stiffness(vel_space);
    const SpMat B = assemble_divergence(vel_space, p_space);
    const Eigen::VectorXd g = pressure_mean_vector(p_space);

    // saddle system [K B^T; B 0] plus the pressure-mean multiplier row,
    // homogeneous Dirichlet on every boundary velocity dof
    std::vector<Triplet> trips;
    for (int k = 0; k < K.outerSize(); ++k) {
        for (SpMat::InnerIterator it(K, k); it; ++it) {
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    for (int k = 0; k < B.outerSize(); ++k) {
        for (SpMat::InnerIterator it(B, k); it; ++it) {
            const int r = n_v + static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            trips.emplace_back(r, c, it.value());
            trips.emplace_back(c, r, it.value());
        }
    }
    for (int i = 0; i < n_p; ++i) {
        trips.emplace_back(n_v + i, n_v + n_p, g[i]);
        trips.emplace_back(n_v + n_p, n_v + i, g[i]);
    }
    SpMat A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd dummy = Eigen::VectorXd::Zero(n);
    auto zero_bc = [](Vec2) -> std::array<double, 2> { return {0.0, 0.0}; };
    DirichletBC bc = velocity_bc(vel_space, zero_bc, zero_bc);
    apply_dirichlet(A, dummy, bc);

    std::vector<char> fixed(static_cast<std::size_t>(n_v), 0);
    for (const int d : bc.dofs) fixed[static_cast<std::size_t>(d)] = 1;

    Eigen::SparseLU<SpMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("estimate_lambda1: saddle factorization failed");
    }

    // deterministic start, zeroed on the boundary, with no symmetry alignment
    Eigen::VectorXd x(n_v);
    for (int i = 0; i < n_v; ++i) {
        x[i] = fixed[static_cast<std::size_t>(i)] ? 0.0 : 1.0 + std::sin(0.7 * i);
    }
    x /= std::sqrt(x.dot(M * x));

    const int max_iters = 500;
    const double tol = 1e-8;
    double lambda = 0.0;
    double rel_change = 1.0;
    int it = 0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (it = 1; it <= max_iters; ++it) {
        rhs.head(n_v) = M * x;
        for (const int d : bc.dofs) rhs[d] = 0.0;
        rhs.tail(n_p + 1).setZero();
        const Eigen::VectorXd z = lu.solve(rhs);
        Eigen::VectorXd y = z.head(n_v);
        const double yn = std::sqrt(y.dot(M * y));
        if (!(yn > 0.0) || !y.allFinite()) {
            throw std::runtime_error("estimate_lambda1: inverse iteration broke down");
        }
        y /= yn;
        const double next = y.dot(K * y);  // Rayleigh quotient, y normalized in M
        rel_change = std::abs(next - lambda) / std::abs(next);
        lambda = next;
        x = y;
        if (rel_change <= tol) break;
    }
    if (rel_change > tol) {
        throw std::runtime_error("estimate_lambda1: no convergence after " +
                                 std::to_string(max_iters) + " iterations");
    }

    Lambda1Result r;
    r.lambda1 = lambda;
    r.rayleigh_residual = rel_change;
    r.iterations = it;
    r.eigenfield = FeField(vel_space);
    r.eigenfield.coeffs = x;
    return r;
}

DecayFit fit_decay_rate(const RunRecord& record, double t_lo, double t_hi) {
    if (record.times.size() != record.l2_error.size()) {
        throw std::invalid_argument("fit_decay_rate: record sequences differ in length");
    }
    if (!(t_lo < t_hi)) {
        throw std::invalid_argument("fit_decay_rate: need t_lo < t_hi");
    }
    // round-off floor grows with the step count; samples at or below it carry
    // no slope information and would corrupt the fit
    std::vector<double> ts, ls;
    int excluded = 0;
    for (std::size_t i = 0; i < record.times.size(); ++i) {
        const double t = record.times[i];
        if (t < t_lo || t > t_hi) continue;
        const double floor_i = 100.0 * 1e-14 * static_cast<double>(i);
        const double e = record.l2_error[i];
        if (e <= floor_i || e <= 0.0) {
            ++excluded;
            continue;
        }
        ts.push_back(t);
        ls.push_back(std::log(e));
    }
    if (ts.size() < 10) {
        throw std::runtime_error("fit_decay_rate: fewer than 10 usable samples in the window");
    }

    const auto m = static_cast<double>(ts.size());
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += ls[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * ls[i];
    }
    const double denom = m * stt - st * st;
    if (std::abs(denom) < 1e-300) {
        throw std::runtime_error("fit_decay_rate: degenerate time window");
    }
    const double slope = (m * stl - st * sl) / denom;
    const double intercept = (sl - slope * st) / m;

    double rss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ls[i] - (slope * ts[i] + intercept);
        rss += r * r;
    }

    DecayFit fit;
    fit.sigma = -slope;
    fit.residual = std::sqrt(rss / m);
    fit.n_used = static_cast<int>(ts.size());
    fit.n_excluded = excluded;
    return fit;
}

MuRangeReport mu_range(int k, double H, double h, double nu, double lambda1, double G,
                       const MuRangeConstants& constants) {
    if (k < 1 || k > 2) throw std::invalid_argument("mu_range: k must be 1 or 2");
    if (!(H > 0.0) || !(h > 0.0) || H < h) {
        throw std::invalid_argument("mu_range: need H >= h > 0");
    }
    if (!(nu > 0.0) || !(lambda1 > 0.0) || G < 0.0) {
        throw std::invalid_argument("mu_range: need nu, lambda1 > 0 and G >= 0");
    }
    if (!(constants.c0 > 0.0) || !(constants.Ck1_0 > 0.0) || !(constants.Ck1_1 > 0.0) ||
        !(constants.C_gen > 0.0) || !(constants.Ct21 > 0.0)) {
        throw std::invalid_argument("mu_range: constants must be positive");
    }

    MuRangeReport r;
    r.k = k;
    r.H = H;
    r.h = h;
    r.nu = nu;
    r.lambda1 = lambda1;
    r.G = G;
    r.constants = constants;

    const double G2 = G * G;
    r.lower_bound = 2.0 * (constants.c0 * std::exp(G2 * G2) + 1.0) * G2 * nu * lambda1;
    r.upper_bound = nu / (constants.Ck1_0 * constants.Ck1_0) / (constants.Ck1_1 * constants.Ck1_1) *
                    std::pow(h / H, 2.0 * k) / (H * H);
    r.feasible = r.lower_bound <= r.upper_bound;

    r.alt_lower_bound =
        4.0 * constants.C_gen * constants.Ct21 * constants.Ct21 / (h * h) * nu * G2;
    r.alt_feasible = r.alt_lower_bound <= r.upper_bound;
    return r;
}

CompareReport compare_runs(const RunRecord& a, const RunRecord& b) {
    if (a.times.empty() || b.times.empty()) {
        throw std::invalid_argument("compare_runs: empty record");
    }
    const std::size_t m = std::min(a.times.size(), b.times.size());
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(a.times[i] - b.times[i]) > 1e-12) {
            throw std::invalid_argument("compare_runs: time grids differ at sample " +
                                        std::to_string(i));
        }
    }

    CompareReport r;
    if (a.sync_time && b.sync_time) r.sync_ratio = *a.sync_time / *b.sync_time;

    // decay rates are fit over the common window, ending where the earlier
    // run saturates (its sync time, or its last sample when it never synced)
    const double end_a = a.sync_time ? *a.sync_time : a.times.back();
    const double end_b = b.sync_time ? *b.sync_time : b.times.back();
    const double t_lo = a.times.front();
    const double t_hi = std::min(end_a, end_b);
    const DecayFit fa = fit_decay_rate(a, t_lo, t_hi);
    const DecayFit fb = fit_decay_rate(b, t_lo, t_hi);
    r.rate_a = fa.sigma;
    r.rate_b = fb.sigma;
    r.rate_ratio = fa.sigma / fb.sigma;
    r.final_l2_a = a.l2_error.back();
    r.final_l2_b = b.l2_error.back();
    return r;
}

void write_record_csv(const RunRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_record_csv: cannot open " + path);
    out << "t,ke,l2_err,h1_err\n";
    char buf[160];
    for (std::size_t i = 0; i < record.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", record.times[i],
                      record.kinetic_energy[i], record.l2_error[i], record.h1_error[i]);
        out << buf;
    }
    if (!out) throw std::runtime_error("write_record_csv: write failed for " + path);
}

RunRecord read_record_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_record_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,ke,l2_err,h1_err") {
        throw std::runtime_error("read_record_csv: bad header in " + path);
    }
    RunRecord rec;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double v[4];
        char comma;
        ss >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
        if (!ss) throw std::runtime_error("read_record_csv: bad row in " + path);
        rec.times.push_back(v[0]);
        rec.kinetic_energy.push_back(v[1]);
        rec.l2_error.push_back(v[2]);
        rec.h1_error.push_back(v[3]);
    }
    return rec;
}

}  // namespace nudgefem
