#include "nudgefem/solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

#include "nudgefem/io.hpp"

namespace nudgefem {

namespace {

// full saddle layout: [velocity block | pressure block]. The constant
// pressure mode is fixed by pinning one pressure dof; a dense mean-constraint
// row would poison the factorization with fill, so the zero-mean convention
// is restored by shifting the solved pressure instead.
struct SaddleLayout {
    int n_v = 0;
    int n_p = 0;
    int n_total() const { return n_v + n_p; }
};

void append_coupling(std::vector<Triplet>& trips, const SpMat& B, const SaddleLayout& lay) {
    for (int k = 0; k < B.outerSize(); ++k) {
        for (SpMat::InnerIterator it(B, k); it; ++it) {
            const int r = lay.n_v + static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            trips.emplace_back(r, c, it.value());
            trips.emplace_back(c, r, it.value());
        }
    }
}

double relative_residual(const SpMat& A, const Eigen::VectorXd& z, const Eigen::VectorXd& b) {
    const double bn = b.norm();
    return (A * z - b).norm() / (bn > 1e-300 ? bn : 1.0);
}

}  // namespace

struct ImexStepper::Impl {
    const FeSpace* vel;
    const FeSpace* p;
    RunParams params;
    SaddleLayout lay;

    SpMat M, K, B;       // unconstrained building blocks
    Eigen::VectorXd g;   // pressure integrals, for the zero-mean shift
    double g_area = 0.0; // their sum, the domain area
    SpMat MP;            // mass times interpolation, only when nudging
    bool has_nudge = false;

    Eigen::VectorXd F_static;  // static load vector (may be zero)

    // constrained dof bookkeeping over the full system
    std::vector<char> constrained;
    std::vector<int> bc_dofs;              // velocity space bc dofs (full indices)
    Eigen::VectorXd bc_values;             // refreshed per step when time-dependent
    FeField wind;                          // scratch field for convection assembly

    // fixed-pattern matrix plus streaming maps: for every triplet of the
    // static and convection lists, the target slot in A's value array
    SpMat A;
    std::vector<Triplet> static_trips;
    std::vector<Triplet> conv_trips;
    std::vector<int> static_slot, conv_slot;
    std::vector<int> diag_slot;            // slot of (d, d) for constrained d
    int pin_dof = -1;                      // pinned pressure dof (full index)
    int pin_slot = -1;                     // its diagonal slot in the pattern

    Eigen::SparseLU<SpMat> lu;
    bool analyzed = false;

    int slot_of(int row, int col) const {
        const int* outer = A.outerIndexPtr();
        const int* inner = A.innerIndexPtr();
        int lo = outer[col], hi = outer[col + 1];
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (inner[mid] < row) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if (lo >= outer[col + 1] || inner[lo] != row) {
            throw std::logic_error("step system: missing slot in the sparsity pattern");
        }
        return lo;
    }

    void refresh_bc_values(double t) {
        auto zero = [](Vec2, double) -> std::array<double, 2> { return {0.0, 0.0}; };
        const auto& fo = params.bc_outer ? params.bc_outer : zero;
        const auto& fi = params.bc_inner ? params.bc_inner : zero;
        const int nvs = vel->n_scalar;
        Eigen::Index k = 0;
        for (int d = 0; d < nvs; ++d) {
            const BoundaryTag tag = vel->dof_tag[static_cast<std::size_t>(d)];
            if (tag == BoundaryTag::none) continue;
            const Vec2 x = vel->dof_coords[static_cast<std::size_t>(d)];
            const auto v = (tag == BoundaryTag::outer) ? fo(x, t) : fi(x, t);
            bc_values[k++] = v[0];
            bc_values[k++] = v[1];
        }
    }
};

ImexStepper::ImexStepper(const FeSpace& vel_space, const FeSpace& p_space,
                         const RunParams& params, const InterpOperator* interp)
    : impl_(std::make_unique<Impl>()) {
    Impl& im = *impl_;
    im.vel = &vel_space;
    im.p = &p_space;
    im.params = params;
    im.lay.n_v = vel_space.n_total();
    im.lay.n_p = p_space.n_scalar;

    im.M = assemble_mass(vel_space);
    im.K = assemble_stiffness(vel_space);
    im.B = assemble_divergence(vel_space, p_space);
    im.g = pressure_mean_vector(p_space);

    im.has_nudge = params.mu > 0.0;
    if (im.has_nudge) {
        if (!interp) throw std::invalid_argument("stepper: mu > 0 requires an interp operator");
        im.MP = (im.M * interp->matrix).pruned();
    }

    if (params.force && params.force_static) {
        im.F_static = assemble_load(vel_space, [&](Vec2 x) { return params.force(x, params.t0); });
    } else {
        im.F_static = Eigen::VectorXd::Zero(im.lay.n_v);
    }

    // constrained set: all boundary velocity dofs, both components, plus one
    // pinned pressure dof fixing the constant mode
    im.constrained.assign(static_cast<std::size_t>(im.lay.n_total()), 0);
    const int nvs = vel_space.n_scalar;
    for (int d = 0; d < nvs; ++d) {
        if (vel_space.dof_tag[static_cast<std::size_t>(d)] == BoundaryTag::none) continue;
        im.bc_dofs.push_back(d);
        im.bc_dofs.push_back(d + nvs);
        im.constrained[static_cast<std::size_t>(d)] = 1;
        im.constrained[static_cast<std::size_t>(d + nvs)] = 1;
    }
    im.pin_dof = im.lay.n_v;
    im.constrained[static_cast<std::size_t>(im.pin_dof)] = 1;
    im.bc_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(im.bc_dofs.size()));
    im.refresh_bc_values(params.t0);

    // static part of the velocity block: M/dt + nu K (+ mu M P)
    auto push_block = [&](const SpMat& S, double scale) {
        for (int k = 0; k < S.outerSize(); ++k) {
            for (SpMat::InnerIterator it(S, k); it; ++it) {
                im.static_trips.emplace_back(static_cast<int>(it.row()),
                                             static_cast<int>(it.col()), scale * it.value());
            }
        }
    };
    push_block(im.M, 1.0 / params.dt);
    push_block(im.K, params.nu);
    if (im.has_nudge) push_block(im.MP, params.mu);
    append_coupling(im.static_trips, im.B, im.lay);
    im.static_trips.emplace_back(im.pin_dof, im.pin_dof, 0.0);  // keep the pinned diagonal in the pattern

    // convection triplet positions (values refreshed every step)
    im.wind = FeField(vel_space);
    convection_triplets(vel_space, im.wind, im.conv_trips);

    // union pattern, fixed for the whole run
    std::vector<Triplet> all = im.static_trips;
    all.insert(all.end(), im.conv_trips.begin(), im.conv_trips.end());
    im.A = SpMat(im.lay.n_total(), im.lay.n_total());
    im.A.setFromTriplets(all.begin(), all.end());
    im.A.makeCompressed();

    im.static_slot.reserve(im.static_trips.size());
    for (const auto& tr : im.static_trips) im.static_slot.push_back(im.slot_of(tr.row(), tr.col()));
    im.conv_slot.reserve(im.conv_trips.size());
    for (const auto& tr : im.conv_trips) im.conv_slot.push_back(im.slot_of(tr.row(), tr.col()));
    im.diag_slot.reserve(im.bc_dofs.size());
    for (const int d : im.bc_dofs) im.diag_slot.push_back(im.slot_of(d, d));
    im.pin_slot = im.slot_of(im.pin_dof, im.pin_dof);
    im.g_area = im.g.sum();
}

ImexStepper::~ImexStepper() = default;

const SpMat& ImexStepper::mass() const { return impl_->M; }
const SpMat& ImexStepper::stiffness() const { return impl_->K; }
const SpMat& ImexStepper::divergence() const { return impl_->B; }

EvolutionState ImexStepper::initial_state(const Eigen::VectorXd& v0) const {
    const Impl& im = *impl_;
    if (v0.size() != im.lay.n_v) {
        throw std::invalid_argument("stepper: initial velocity has the wrong length");
    }
    EvolutionState s;
    s.n = 0;
    s.t = im.params.t0;
    s.velocity = FeField(*im.vel);
    s.velocity.coeffs = v0;
    s.pressure = FeField(*im.p);
    return s;
}

EvolutionState ImexStepper::step(const EvolutionState& state, const Eigen::VectorXd* data) {
    Impl& im = *impl_;
    const RunParams& pr = im.params;
    if (im.has_nudge && !data) {
        throw std::invalid_argument("stepper: nudged step needs reference data");
    }
    const double t_next = pr.t0 + static_cast<double>(state.n + 1) * pr.dt;

    // right-hand side before constraints
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(im.lay.n_total());
    rhs.head(im.lay.n_v) = (1.0 / pr.dt) * (im.M * state.velocity.coeffs);
    if (pr.force) {
        if (pr.force_static) {
            rhs.head(im.lay.n_v) += im.F_static;
        } else {
            rhs.head(im.lay.n_v) +=
                assemble_load(*im.vel, [&](Vec2 x) { return pr.force(x, t_next); });
        }
    }
    if (im.has_nudge) {
        rhs.head(im.lay.n_v) += pr.mu * (im.MP * (*data));
    }

    if (!pr.bc_static) im.refresh_bc_values(t_next);
    std::vector<double> bcval(static_cast<std::size_t>(im.lay.n_total()), 0.0);
    for (std::size_t k = 0; k < im.bc_dofs.size(); ++k) {
        bcval[static_cast<std::size_t>(im.bc_dofs[k])] = im.bc_values[static_cast<Eigen::Index>(k)];
    }

    // refresh convection values for the current wind
    im.wind.coeffs = state.velocity.coeffs;
    im.conv_trips.clear();
    convection_triplets(*im.vel, im.wind, im.conv_trips);

    // stream values into the fixed pattern, filtering constrained rows and
    // moving constrained columns to the right-hand side
    double* val = im.A.valuePtr();
    const Eigen::Index nnz = im.A.nonZeros();
    for (Eigen::Index i = 0; i < nnz; ++i) val[i] = 0.0;
    auto stream = [&](const std::vector<Triplet>& trips, const std::vector<int>& slots) {
        for (std::size_t i = 0; i < trips.size(); ++i) {
            const auto& tr = trips[i];
            const bool row_fixed = im.constrained[static_cast<std::size_t>(tr.row())] != 0;
            const bool col_fixed = im.constrained[static_cast<std::size_t>(tr.col())] != 0;
            if (row_fixed) continue;
            if (col_fixed) {
                rhs[tr.row()] -= tr.value() * bcval[static_cast<std::size_t>(tr.col())];
                continue;
            }
            val[slots[i]] += tr.value();
        }
    };
    stream(im.static_trips, im.static_slot);
    stream(im.conv_trips, im.conv_slot);
    for (std::size_t k = 0; k < im.bc_dofs.size(); ++k) {
        val[im.diag_slot[k]] = 1.0;
        rhs[im.bc_dofs[k]] = im.bc_values[static_cast<Eigen::Index>(k)];
    }
    val[im.pin_slot] = 1.0;
    rhs[im.pin_dof] = 0.0;

    if (!im.analyzed) {
        im.lu.analyzePattern(im.A);
        im.analyzed = true;
    }
    im.lu.factorize(im.A);
    if (im.lu.info() != Eigen::Success) {
        throw std::runtime_error("stepper: factorization failed at step " +
                                 std::to_string(state.n + 1));
    }
    const Eigen::VectorXd z = im.lu.solve(rhs);
    if (!z.allFinite()) {
        throw std::runtime_error("stepper: non-finite solution at step " +
                                 std::to_string(state.n + 1));
    }
    const double res = relative_residual(im.A, z, rhs);
    if (res > pr.linear_tol) {
        throw std::runtime_error("stepper: linear residual " + std::to_string(res) +
                                 " above tolerance at step " + std::to_string(state.n + 1));
    }

    EvolutionState out;
    out.n = state.n + 1;
    out.t = t_next;
    out.velocity = FeField(*im.vel);
    out.velocity.coeffs = z.head(im.lay.n_v);
    out.pressure = FeField(*im.p);
    out.pressure.coeffs = z.segment(im.lay.n_v, im.lay.n_p);
    out.pressure.coeffs.array() -= im.g.dot(out.pressure.coeffs) / im.g_area;
    return out;
}

StokesResult solve_stokes(const FeSpace& vel_space, const FeSpace& p_space, double nu,
                          const std::function<std::array<double, 2>(Vec2)>& force,
                          const std::function<std::array<double, 2>(Vec2)>& bc_outer,
                          const std::function<std::array<double, 2>(Vec2)>& bc_inner) {
    SaddleLayout lay{vel_space.n_total(), p_space.n_scalar};
    const SpMat K = assemble_stiffness(vel_space);
    const SpMat B = assemble_divergence(vel_space, p_space);
    const Eigen::VectorXd g = pressure_mean_vector(p_space);

    std::vector<Triplet> trips;
    for (int k = 0; k < K.outerSize(); ++k) {
        for (SpMat::InnerIterator it(K, k); it; ++it) {
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                               nu * it.value());
        }
    }
    append_coupling(trips, B, lay);
    const int pin = lay.n_v;  // first pressure dof, pinned to fix the constant mode
    trips.emplace_back(pin, pin, 0.0);
    SpMat A(lay.n_total(), lay.n_total());
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lay.n_total());
    if (force) rhs.head(lay.n_v) = assemble_load(vel_space, force);

    auto zero = [](Vec2) -> std::array<double, 2> { return {0.0, 0.0}; };
    DirichletBC bc = velocity_bc(vel_space, bc_outer ? bc_outer : zero, bc_inner ? bc_inner : zero);
    bc.dofs.push_back(pin);
    bc.values.conservativeResize(bc.values.size() + 1);
    bc.values[bc.values.size() - 1] = 0.0;
    apply_dirichlet(A, rhs, bc);

    Eigen::SparseLU<SpMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("solve_stokes: singular system (check the boundary data)");
    }
    const Eigen::VectorXd z = lu.solve(rhs);

    StokesResult r;
    r.residual = relative_residual(A, z, rhs);
    if (r.residual > 1e-10) {
        throw std::runtime_error("solve_stokes: relative residual above 1e-10");
    }
    r.velocity = FeField(vel_space);
    r.velocity.coeffs = z.head(lay.n_v);
    r.pressure = FeField(p_space);
    r.pressure.coeffs = z.segment(lay.n_v, lay.n_p);
    r.pressure.coeffs.array() -= g.dot(r.pressure.coeffs) / g.sum();
    return r;
}

const Eigen::VectorXd& ReferenceTrajectory::at_or_before(long n) const {
    long idx = n / stride;
    const long last = static_cast<long>(velocity.size()) - 1;
    if (idx < 0) idx = 0;
    if (idx > last) {
        throw std::out_of_range("trajectory: no stored sample at or before step " +
                                std::to_string(n));
    }
    return velocity[static_cast<std::size_t>(idx)];
}

DnsResult run_dns(const FeSpace& vel_space, const FeSpace& p_space, const RunParams& params,
                  const Eigen::VectorXd& v0) {
    RunParams pr = params;
    pr.mu = 0.0;  // reference runs never nudge
    ImexStepper stepper(vel_space, p_space, pr, nullptr);

    DnsResult out;
    out.trajectory.t0 = pr.t0;
    out.trajectory.dt = pr.dt;
    out.trajectory.stride = pr.obs_stride;
    out.trajectory.fingerprint = pr.fingerprint;
    out.record.fingerprint = pr.fingerprint;

    EvolutionState s = stepper.initial_state(v0);
    const SpMat& M = stepper.mass();
    auto push = [&](const EvolutionState& st) {
        out.record.times.push_back(st.t);
        out.record.kinetic_energy.push_back(kinetic_energy(M, st.velocity.coeffs));
        out.record.l2_error.push_back(0.0);
        out.record.h1_error.push_back(0.0);
    };
    out.trajectory.velocity.push_back(s.velocity.coeffs);
    push(s);
    if (pr.on_step) pr.on_step(s);
    for (long n = 0; n < pr.n_steps; ++n) {
        s = stepper.step(s, nullptr);
        if (s.n % pr.obs_stride == 0) out.trajectory.velocity.push_back(s.velocity.coeffs);
        push(s);
        if (pr.on_step) pr.on_step(s);
    }
    return out;
}

RunRecord run_nudged(const FeSpace& vel_space, const FeSpace& p_space, const RunParams& params,
                     const ReferenceTrajectory& reference, const InterpOperator& interp,
                     const Eigen::VectorXd& v0, EvolutionState* final_state,
                     const std::string& checkpoint_path, long checkpoint_stride,
                     const EvolutionState* resume_from) {
    if (std::abs(reference.dt - params.dt) > 1e-15) {
        throw std::invalid_argument("run_nudged: reference time step differs");
    }
    // the nudged window must sit inside the reference coverage
    const long offset = std::lround((params.t0 - reference.t0) / params.dt);
    if (offset < 0 || offset + params.n_steps > reference.last_step()) {
        throw std::invalid_argument("run_nudged: reference does not cover the requested window");
    }

    ImexStepper stepper(vel_space, p_space, params, &interp);
    const SpMat& M = stepper.mass();
    const SpMat& K = stepper.stiffness();

    RunRecord rec;
    rec.fingerprint = params.fingerprint;
    EvolutionState s = resume_from ? *resume_from : stepper.initial_state(v0);

    auto record_state = [&](const EvolutionState& st) {
        const Eigen::VectorXd& u = reference.at_or_before(offset + st.n);
        const Eigen::VectorXd d = st.velocity.coeffs - u;
        const double l2 = std::sqrt(d.dot(M * d));
        const double h1s = d.dot(K * d);
        rec.times.push_back(st.t);
        rec.kinetic_energy.push_back(kinetic_energy(M, st.velocity.coeffs));
        rec.l2_error.push_back(l2);
        rec.h1_error.push_back(std::sqrt(l2 * l2 + h1s));
        const double un = std::sqrt(u.dot(M * u));
        if (!rec.sync_time && un > 0.0 && l2 / un < params.sync_threshold) {
            rec.sync_time = st.t;
        }
    };

    record_state(s);
    if (params.on_step) params.on_step(s);
    while (s.n < params.n_steps) {
        const Eigen::VectorXd& data = reference.at_or_before(offset + s.n + 1);
        s = stepper.step(s, &data);
        record_state(s);
        if (params.on_step) params.on_step(s);
        if (checkpoint_stride > 0 && !checkpoint_path.empty() && s.n % checkpoint_stride == 0) {
            write_checkpoint(checkpoint_path, s, rec.fingerprint);
        }
        if (rec.sync_time) break;  // synchronized to threshold, stop early
    }
    if (final_state) *final_state = s;
    return rec;
}

}  // namespace nudgefem
