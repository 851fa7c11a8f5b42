#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nudgefem/interp.hpp"

namespace nudgefem {

enum class DomainKind { annulus, offset_disk };

/** Resolved run configuration. Parsed from `key = value` text with preset
 *  defaults filled first; every numeric below is the effective value after
 *  preset, file and command-line overrides. Mesh levels use the doubling
 *  names 1, 2, 4, 8 (level L lives at hierarchy index log2 L). */
struct SimConfig {
    std::string preset = "custom";
    std::string scale = "desk";

    DomainKind domain = DomainKind::annulus;
    int n_outer = 20;
    int n_inner = 18;
    double r_outer = 1.0;
    double r_inner = 0.1;
    int dns_level = 4;
    int data_level = 1;

    double nu = 0.0;   // resolved viscosity, always positive after validation
    double re = 0.0;   // the Reynolds number when given, else 0
    bool body_force = false;

    double t_start = 0.0;
    double t_end = 1.0;
    double dt = 0.01;
    double spinup = 0.0;  // reference lead time before nudging starts

    double mu = 0.0;
    int interp_k = 2;
    InterpVariant variant = InterpVariant::quadratic_on_coarse;
    long obs_stride = 1;
    double sync_threshold = 1e-11;

    std::string out_dir = "out";
    long snapshot_stride = 0;     // 0 disables snapshots
    long checkpoint_stride = 100; // 0 disables checkpoints

    double linear_tol = 1e-9;
    bool deterministic = true;
    int workers = 1;

    int dns_index() const;   // hierarchy index of the DNS mesh
    int data_index() const;  // hierarchy index of the data mesh
};

// rotational body force of the driven-disk preset: the curl of the stream
// function (1 - r^2)^2, vanishing on the unit circle
std::array<double, 2> preset_body_force(Vec2 p);

// canonical sorted key=value dump; equal configs produce equal text
std::string canonical_text(const SimConfig& cfg);

// FNV-1a over canonical_text; stamped into records and checkpoints
std::uint64_t config_fingerprint(const SimConfig& cfg);

/** Parse `key = value` lines ('#' comments, blank lines ignored). Pass one
 *  runs preset and scale to pick the defaults, pass two applies the rest.
 *  Unknown and duplicate keys are rejected with their line number; overrides
 *  ("key=value" strings, e.g. from --set flags) are applied after the file
 *  and may replace file values. Constraint violations name the invariant. */
SimConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides = {},
                            const std::string& origin = "config");
SimConfig parse_config_file(const std::string& path,
                            const std::vector<std::string>& overrides = {});

}  // namespace nudgefem
