#pragma once

#include <memory>

#include "nudgefem/analysis.hpp"
#include "nudgefem/interp.hpp"

namespace nudgefem {

struct EvolutionState {
    long n = 0;      // step index; time is derived, t = t0 + n * dt
    double t = 0.0;
    FeField velocity;
    FeField pressure;
};

struct RunParams {
    double t0 = 0.0;
    double dt = 0.01;
    long n_steps = 0;
    double nu = 1.0;
    double mu = 0.0;

    // body force f(x, t); empty means zero; force_static skips reassembly
    std::function<std::array<double, 2>(Vec2, double)> force;
    bool force_static = true;

    // boundary values per tag, evaluated at dof coordinates; empty means zero
    std::function<std::array<double, 2>(Vec2, double)> bc_outer;
    std::function<std::array<double, 2>(Vec2, double)> bc_inner;
    bool bc_static = true;

    double linear_tol = 1e-9;
    double sync_threshold = 1e-11;  // relative L2 error declaring synchronization
    long obs_stride = 1;            // steps between stored/used observations

    // stamped into records, trajectories and checkpoints produced by the run
    std::uint64_t fingerprint = 0;

    // observer called on the initial state and after every accepted step
    std::function<void(const EvolutionState&)> on_step;
};

/** One IMEX step: viscosity, pressure and the feedback term implicit, the
 *  convection wind frozen at the previous step. The saddle matrix keeps a
 *  fixed sparsity pattern (eliminated entries stay as explicit zeros), so the
 *  symbolic factorization is done once and only numeric refactorization runs
 *  per step. Everything is sequential and deterministic. */
class ImexStepper {
public:
    // interp may be null (plain DNS); when mu > 0 it must be present
    ImexStepper(const FeSpace& vel_space, const FeSpace& p_space, const RunParams& params,
                const InterpOperator* interp);
    ~ImexStepper();

    ImexStepper(const ImexStepper&) = delete;
    ImexStepper& operator=(const ImexStepper&) = delete;

    // advance one step; data = reference velocity coefficients at t_{n+1},
    // required when mu > 0
    EvolutionState step(const EvolutionState& state, const Eigen::VectorXd* data);

    EvolutionState initial_state(const Eigen::VectorXd& v0) const;

    const SpMat& mass() const;
    const SpMat& stiffness() const;
    const SpMat& divergence() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// steady Stokes: nu K u + B^T p = F, B u = 0, mean-zero pressure
struct StokesResult {
    FeField velocity;
    FeField pressure;
    double residual = 0.0;  // relative linear residual
};

StokesResult solve_stokes(const FeSpace& vel_space, const FeSpace& p_space, double nu,
                          const std::function<std::array<double, 2>(Vec2)>& force,
                          const std::function<std::array<double, 2>(Vec2)>& bc_outer,
                          const std::function<std::array<double, 2>(Vec2)>& bc_inner);

/** Reference run output: velocity coefficients stored every obs_stride steps
 *  (index i holds step i * obs_stride), dense enough for any nudged run with
 *  the same stride. */
struct ReferenceTrajectory {
    double t0 = 0.0;
    double dt = 0.0;
    long stride = 1;
    std::vector<Eigen::VectorXd> velocity;
    std::uint64_t fingerprint = 0;

    // stored sample with the largest step index <= n (zero-order hold)
    const Eigen::VectorXd& at_or_before(long n) const;
    long last_step() const { return (static_cast<long>(velocity.size()) - 1) * stride; }
};

struct DnsResult {
    ReferenceTrajectory trajectory;
    RunRecord record;  // kinetic energy series; error columns stay zero
};

// reference evolution; mu is forced to 0 whatever params says
DnsResult run_dns(const FeSpace& vel_space, const FeSpace& p_space, const RunParams& params,
                  const Eigen::VectorXd& v0);

// nudged evolution against a stored reference; halts early at the sync
// threshold and records the hit time
RunRecord run_nudged(const FeSpace& vel_space, const FeSpace& p_space, const RunParams& params,
                     const ReferenceTrajectory& reference, const InterpOperator& interp,
                     const Eigen::VectorXd& v0,
                     EvolutionState* final_state = nullptr,
                     const std::string& checkpoint_path = "", long checkpoint_stride = 0,
                     const EvolutionState* resume_from = nullptr);

}  // namespace nudgefem
