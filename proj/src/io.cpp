#include "nudgefem/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "nudgefem/solver.hpp"

namespace nudgefem {

namespace {

void write_raw(std::ofstream& out, const void* p, std::size_t bytes) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* p, std::size_t bytes) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("io: truncated file");
}

void write_u64(std::ofstream& out, std::uint64_t v) { write_raw(out, &v, 8); }
void write_i64(std::ofstream& out, std::int64_t v) { write_raw(out, &v, 8); }
void write_f64(std::ofstream& out, double v) { write_raw(out, &v, 8); }

std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    read_raw(in, &v, 8);
    return v;
}
std::int64_t read_i64(std::ifstream& in) {
    std::int64_t v = 0;
    read_raw(in, &v, 8);
    return v;
}
double read_f64(std::ifstream& in) {
    double v = 0;
    read_raw(in, &v, 8);
    return v;
}

void check_magic(std::ifstream& in, const char* magic8, const char* what) {
    char buf[8];
    read_raw(in, buf, 8);
    for (int i = 0; i < 8; ++i)
        if (buf[i] != magic8[i]) throw std::runtime_error(std::string("io: bad magic in ") + what);
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_vtk(const std::string& path, const TriMesh& mesh, const FeField& velocity,
               const FeField& pressure) {
    if (velocity.space->components != 2 || velocity.space->degree != 2)
        throw std::invalid_argument("write_vtk: velocity must be a vector quadratic field");
    if (pressure.space->components != 1 || pressure.space->degree != 1)
        throw std::invalid_argument("write_vtk: pressure must be a scalar linear field");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_vtk: cannot open " + path);

    const std::size_t nv = mesh.vertices.size();
    const Eigen::Index ns = velocity.space->n_scalar;
    char buf[64];

    out << "# vtk DataFile Version 3.0\n";
    out << "nudgefem snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (std::size_t i = 0; i < nv; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", mesh.vertices[i].x, mesh.vertices[i].y);
        out << buf;
    }
    out << "CELLS " << mesh.triangles.size() << " " << 4 * mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "CELL_TYPES " << mesh.triangles.size() << "\n";
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) out << "5\n";

    out << "POINT_DATA " << nv << "\n";
    out << "VECTORS velocity double\n";
    for (std::size_t i = 0; i < nv; ++i) {
        const double ux = velocity.coeffs[static_cast<Eigen::Index>(i)];
        const double uy = velocity.coeffs[static_cast<Eigen::Index>(i) + ns];
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", ux, uy);
        out << buf;
    }
    out << "SCALARS pressure double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < nv; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", pressure.coeffs[static_cast<Eigen::Index>(i)]);
        out << buf;
    }
    if (!out) throw std::runtime_error("write_vtk: write failed for " + path);
}

void save_trajectory(const ReferenceTrajectory& traj, const std::string& path) {
    if (traj.velocity.empty()) throw std::invalid_argument("save_trajectory: empty trajectory");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_trajectory: cannot open " + path);

    const char magic[8] = {'N', 'F', 'T', 'R', 'A', 'J', '1', '\0'};
    write_raw(out, magic, 8);
    write_u64(out, traj.fingerprint);
    write_f64(out, traj.t0);
    write_f64(out, traj.dt);
    write_i64(out, traj.stride);
    write_i64(out, static_cast<std::int64_t>(traj.velocity.size()));
    write_i64(out, static_cast<std::int64_t>(traj.velocity.front().size()));
    for (const auto& v : traj.velocity)
        write_raw(out, v.data(), static_cast<std::size_t>(v.size()) * 8);
    if (!out) throw std::runtime_error("save_trajectory: write failed for " + path);
}

ReferenceTrajectory load_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_trajectory: cannot open " + path);

    check_magic(in, "NFTRAJ1", path.c_str());
    ReferenceTrajectory traj;
    traj.fingerprint = read_u64(in);
    traj.t0 = read_f64(in);
    traj.dt = read_f64(in);
    traj.stride = read_i64(in);
    const std::int64_t count = read_i64(in);
    const std::int64_t nv = read_i64(in);
    if (traj.stride <= 0 || count <= 0 || nv <= 0)
        throw std::runtime_error("load_trajectory: corrupt header in " + path);
    traj.velocity.resize(static_cast<std::size_t>(count));
    for (auto& v : traj.velocity) {
        v.resize(nv);
        read_raw(in, v.data(), static_cast<std::size_t>(nv) * 8);
    }
    return traj;
}

void write_checkpoint(const std::string& path, const EvolutionState& state,
                      std::uint64_t fingerprint) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_checkpoint: cannot open " + path);

    const Eigen::VectorXd& v = state.velocity.coeffs;
    const Eigen::VectorXd& q = state.pressure.coeffs;
    const char magic[8] = {'N', 'F', 'C', 'K', 'P', 'T', '1', '\0'};
    write_raw(out, magic, 8);
    write_u64(out, fingerprint);
    write_i64(out, state.n);
    write_f64(out, state.t);
    write_i64(out, static_cast<std::int64_t>(v.size()));
    write_i64(out, static_cast<std::int64_t>(q.size()));
    write_raw(out, v.data(), static_cast<std::size_t>(v.size()) * 8);
    write_raw(out, q.data(), static_cast<std::size_t>(q.size()) * 8);
    if (!out) throw std::runtime_error("write_checkpoint: write failed for " + path);
}

CheckpointData read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_checkpoint: cannot open " + path);

    check_magic(in, "NFCKPT1", path.c_str());
    CheckpointData ck;
    ck.fingerprint = read_u64(in);
    ck.n = static_cast<long>(read_i64(in));
    ck.t = read_f64(in);
    const std::int64_t nv = read_i64(in);
    const std::int64_t np = read_i64(in);
    if (nv <= 0 || np < 0) throw std::runtime_error("read_checkpoint: corrupt header in " + path);
    ck.velocity.resize(nv);
    ck.pressure.resize(np);
    read_raw(in, ck.velocity.data(), static_cast<std::size_t>(nv) * 8);
    read_raw(in, ck.pressure.data(), static_cast<std::size_t>(np) * 8);
    return ck;
}

}  // namespace nudgefem
