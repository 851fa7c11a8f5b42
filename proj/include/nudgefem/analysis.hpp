#pragma once

#include <cstdint>
#include <optional>

#include "nudgefem/operators.hpp"

namespace nudgefem {

/** Time series of one evolution run: kinetic energy always, error norms
 *  against a reference when one was supplied. */
struct RunRecord {
    std::vector<double> times;
    std::vector<double> kinetic_energy;  // 1/2 ||v||_0^2
    std::vector<double> l2_error;        // ||v - u||_0, zeros for plain DNS
    std::vector<double> h1_error;        // ||v - u||_1
    std::optional<double> sync_time;     // first time below the sync threshold
    std::uint64_t fingerprint = 0;
};

struct MuRangeConstants {
    double c0 = 1.0;        // constant in the exponential Grashof factor
    double Ck1_0 = 1.0;     // interpolation constant C_{k+1,0}
    double Ck1_1 = 1.0;     // inverse-inequality constant paired with it
    double C_gen = 1.0;     // unnamed generic constant of the alternative route
    double Ct21 = 1.0;      // inverse-inequality constant of the alternative route
};

struct MuRangeReport {
    int k = 1;
    double H = 0.0, h = 0.0;
    double nu = 0.0, lambda1 = 0.0, G = 0.0;
    MuRangeConstants constants;
    double lower_bound = 0.0;      // feedback strong enough for contraction
    double upper_bound = 0.0;      // feedback small enough for the h-resolution
    bool feasible = false;         // lower_bound <= upper_bound
    double alt_lower_bound = 0.0;  // the h^-2 route
    bool alt_feasible = false;     // alt route inside the admissible window
};

struct DecayFit {
    double sigma = 0.0;     // exponential rate, > 0 means decay
    double residual = 0.0;  // rms residual of the log-linear fit
    int n_used = 0;
    int n_excluded = 0;     // samples at or below the round-off floor
};

struct CompareReport {
    std::optional<double> sync_ratio;  // sync_time a / sync_time b when both synced
    double rate_a = 0.0;
    double rate_b = 0.0;
    double rate_ratio = 0.0;           // sigma_a / sigma_b over the common window
    double final_l2_a = 0.0;
    double final_l2_b = 0.0;
};

double kinetic_energy(const SpMat& mass, const Eigen::VectorXd& v);

// G = ||f||_0 / (nu^2 lambda1), the force norm by quadrature over the mesh
double grashof(const TriMesh& mesh, const std::function<std::array<double, 2>(Vec2)>& f,
               double nu, double lambda1);

struct Lambda1Result {
    double lambda1 = 0.0;
    double rayleigh_residual = 0.0;  // relative change at the accepted iterate
    int iterations = 0;
    FeField eigenfield;
};

// smallest eigenvalue of the discrete Stokes operator (Dirichlet on both
// loops, divergence-free subspace) by inverse iteration on the saddle system
Lambda1Result estimate_lambda1(const FeSpace& vel_space, const FeSpace& p_space);

// least-squares slope of log(l2_error) vs t over [t_lo, t_hi]; samples at or
// below 100x the accumulated round-off floor (1e-14 per step) are excluded
DecayFit fit_decay_rate(const RunRecord& record, double t_lo, double t_hi);

MuRangeReport mu_range(int k, double H, double h, double nu, double lambda1, double G,
                       const MuRangeConstants& constants);

CompareReport compare_runs(const RunRecord& a, const RunRecord& b);

// CSV persistence, header "t,ke,l2_err,h1_err", 17 significant digits
void write_record_csv(const RunRecord& record, const std::string& path);
RunRecord read_record_csv(const std::string& path);

}  // namespace nudgefem
