#pragma once

#include <cstdint>
#include <string>

#include "nudgefem/mesh.hpp"
#include "nudgefem/space.hpp"

namespace nudgefem {

struct EvolutionState;
struct ReferenceTrajectory;

// FNV-1a 64-bit over a byte string; used for config fingerprints
std::uint64_t fnv1a64(const std::string& bytes);

// legacy VTK unstructured-grid text snapshot: mesh points, triangle cells,
// point-data velocity vectors and pressure scalars. The velocity field is a
// vector P2 field (vertex values are used), pressure is scalar P1.
void write_vtk(const std::string& path, const TriMesh& mesh, const FeField& velocity,
               const FeField& pressure);

// binary trajectory layout: magic "NFTRAJ1\0", u64 fingerprint, f64 t0,
// f64 dt, i64 stride, i64 sample count, i64 coefficient length, then raw
// little-endian doubles per sample
void save_trajectory(const ReferenceTrajectory& traj, const std::string& path);
ReferenceTrajectory load_trajectory(const std::string& path);

// binary checkpoint layout: magic "NFCKPT1\0", u64 fingerprint, i64 step,
// f64 time, i64 velocity length, i64 pressure length, raw doubles
void write_checkpoint(const std::string& path, const EvolutionState& state,
                      std::uint64_t fingerprint);

struct CheckpointData {
    long n = 0;
    double t = 0.0;
    Eigen::VectorXd velocity;
    Eigen::VectorXd pressure;
    std::uint64_t fingerprint = 0;
};

CheckpointData read_checkpoint(const std::string& path);

}  // namespace nudgefem
