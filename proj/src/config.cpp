#include "nudgefem/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nudgefem/io.hpp"

namespace nudgefem {

namespace {

struct Entry {
    std::string key;
    std::string value;
    std::string where;  // "origin:line" or "--set N", for error messages
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw std::runtime_error(where + ": " + msg);
}

[[noreturn]] void violated(const std::string& invariant, const std::string& detail) {
    throw std::invalid_argument("config: invariant " + invariant + " violated (" + detail + ")");
}

double parse_double(const Entry& e) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
        fail(e.where, "expected a number for '" + e.key + "', got '" + e.value + "'");
    }
    if (pos != e.value.size())
        fail(e.where, "trailing characters after number in '" + e.value + "'");
    return v;
}

long parse_long(const Entry& e) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(e.value, &pos);
    } catch (const std::exception&) {
        fail(e.where, "expected an integer for '" + e.key + "', got '" + e.value + "'");
    }
    if (pos != e.value.size())
        fail(e.where, "trailing characters after integer in '" + e.value + "'");
    return v;
}

int parse_int(const Entry& e) {
    const long v = parse_long(e);
    if (v < -1000000000L || v > 1000000000L) fail(e.where, "integer out of range for '" + e.key + "'");
    return static_cast<int>(v);
}

bool parse_bool(const Entry& e) {
    if (e.value == "true" || e.value == "on" || e.value == "1") return true;
    if (e.value == "false" || e.value == "off" || e.value == "0") return false;
    fail(e.where, "expected true/false for '" + e.key + "', got '" + e.value + "'");
}

bool is_power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

void apply_preset(SimConfig& cfg) {
    // numerics and output defaults are shared by every preset
    cfg.obs_stride = 1;
    cfg.sync_threshold = 1e-11;
    cfg.linear_tol = 1e-9;
    cfg.deterministic = true;
    cfg.workers = 1;
    cfg.snapshot_stride = 0;
    cfg.checkpoint_stride = 100;

    const bool full = cfg.scale == "full";
    if (cfg.preset == "shear_annulus") {
        // annulus driven tangentially at the outer circle, no body force
        cfg.domain = DomainKind::annulus;
        cfg.n_outer = 20;
        cfg.n_inner = 18;
        cfg.r_outer = 1.0;
        cfg.r_inner = 0.1;
        cfg.re = 600.0;
        cfg.nu = 1.0 / 600.0;
        cfg.body_force = false;
        cfg.t_start = -5.0;
        cfg.spinup = 5.0;
        cfg.t_end = full ? 100.0 : 10.0;
        cfg.dt = 0.01;
        cfg.dns_level = full ? 8 : 4;
        cfg.data_level = 1;
        cfg.mu = 100.0;
        cfg.interp_k = 2;
        cfg.variant = InterpVariant::quadratic_on_coarse;
    } else if (cfg.preset == "bodyforce_offset_disk") {
        // unit disk with a small hole at (0.5, 0), rotational driving force
        cfg.domain = DomainKind::offset_disk;
        cfg.n_outer = 20;
        cfg.n_inner = 18;
        cfg.r_outer = 1.0;
        cfg.r_inner = 0.1;
        cfg.re = 600.0;
        cfg.nu = 1.0 / 600.0;
        cfg.body_force = true;
        cfg.t_start = 0.0;
        cfg.spinup = 0.0;
        cfg.t_end = full ? 40.0 : 10.0;
        cfg.dt = 0.01;
        cfg.dns_level = full ? 8 : 4;
        cfg.data_level = 1;
        cfg.mu = 10.0;
        cfg.interp_k = 2;
        cfg.variant = InterpVariant::quadratic_on_coarse;
    } else {
        // custom: struct defaults stand, viscosity must be given explicitly
        cfg.re = 0.0;
        cfg.nu = 0.0;
    }
}

void validate(const SimConfig& cfg) {
    char buf[96];
    if (!(cfg.dt > 0.0)) {
        std::snprintf(buf, sizeof buf, "dt = %g", cfg.dt);
        violated("dt_positive", buf);
    }
    if (!(cfg.t_end > cfg.t_start)) {
        std::snprintf(buf, sizeof buf, "t_start = %g, t_end = %g", cfg.t_start, cfg.t_end);
        violated("time_window_nonempty", buf);
    }
    if (cfg.spinup < 0.0) {
        std::snprintf(buf, sizeof buf, "spinup = %g", cfg.spinup);
        violated("spinup_nonnegative", buf);
    }
    if (!(cfg.t_start + cfg.spinup < cfg.t_end)) {
        std::snprintf(buf, sizeof buf, "spinup = %g leaves no time to nudge", cfg.spinup);
        violated("spinup_inside_window", buf);
    }
    if (!is_power_of_two(cfg.dns_level) || !is_power_of_two(cfg.data_level)) {
        std::snprintf(buf, sizeof buf, "dns_level = %d, data_level = %d", cfg.dns_level,
                      cfg.data_level);
        violated("level_power_of_two", buf);
    }
    if (cfg.data_level >= cfg.dns_level) {
        std::snprintf(buf, sizeof buf, "data_level = %d, dns_level = %d", cfg.data_level,
                      cfg.dns_level);
        violated("data_level_below_dns_level", buf);
    }
    if (cfg.mu < 0.0) {
        std::snprintf(buf, sizeof buf, "mu = %g", cfg.mu);
        violated("mu_nonnegative", buf);
    }
    if (!(cfg.nu > 0.0)) {
        std::snprintf(buf, sizeof buf, "resolved nu = %g", cfg.nu);
        violated("nu_positive", buf);
    }
    if (cfg.interp_k != 1 && cfg.interp_k != 2) {
        std::snprintf(buf, sizeof buf, "interp_k = %d", cfg.interp_k);
        violated("interp_k_in_range", buf);
    }
    const bool k_quad = cfg.interp_k == 2;
    if (k_quad != (cfg.variant == InterpVariant::quadratic_on_coarse)) {
        std::snprintf(buf, sizeof buf, "interp_k = %d", cfg.interp_k);
        violated("variant_matches_k", buf);
    }
    if (cfg.obs_stride < 1) {
        std::snprintf(buf, sizeof buf, "obs_stride = %ld", cfg.obs_stride);
        violated("obs_stride_positive", buf);
    }
    if (!(cfg.sync_threshold > 0.0)) {
        std::snprintf(buf, sizeof buf, "sync_threshold = %g", cfg.sync_threshold);
        violated("sync_threshold_positive", buf);
    }
    if (!(cfg.linear_tol > 0.0)) {
        std::snprintf(buf, sizeof buf, "linear_tol = %g", cfg.linear_tol);
        violated("linear_tol_positive", buf);
    }
    if (cfg.workers < 1) {
        std::snprintf(buf, sizeof buf, "workers = %d", cfg.workers);
        violated("workers_positive", buf);
    }
    if (cfg.n_outer < 8 || cfg.n_inner < 6) {
        std::snprintf(buf, sizeof buf, "n_outer = %d, n_inner = %d", cfg.n_outer, cfg.n_inner);
        violated("ring_counts_valid", buf);
    }
    if (!(cfg.r_inner > 0.0) || !(cfg.r_inner < cfg.r_outer)) {
        std::snprintf(buf, sizeof buf, "r_inner = %g, r_outer = %g", cfg.r_inner, cfg.r_outer);
        violated("radii_valid", buf);
    }
    if (cfg.snapshot_stride < 0 || cfg.checkpoint_stride < 0) {
        std::snprintf(buf, sizeof buf, "snapshot_stride = %ld, checkpoint_stride = %ld",
                      cfg.snapshot_stride, cfg.checkpoint_stride);
        violated("strides_nonnegative", buf);
    }
}

std::vector<Entry> tokenize(const std::string& text, const std::string& origin) {
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) fail(where, "expected key = value");
        Entry e;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.where = where;
        if (e.key.empty()) fail(where, "empty key");
        if (e.value.empty()) fail(where, "empty value for '" + e.key + "'");
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace

std::array<double, 2> preset_body_force(Vec2 p) {
    const double w = 1.0 - p.x * p.x - p.y * p.y;
    return {-4.0 * p.y * w, 4.0 * p.x * w};
}

int SimConfig::dns_index() const { return static_cast<int>(std::lround(std::log2(dns_level))); }
int SimConfig::data_index() const { return static_cast<int>(std::lround(std::log2(data_level))); }

std::string canonical_text(const SimConfig& cfg) {
    std::map<std::string, std::string> kv;
    char buf[64];
    auto put_d = [&](const char* k, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        kv[k] = buf;
    };
    auto put_i = [&](const char* k, long v) { kv[k] = std::to_string(v); };
    auto put_b = [&](const char* k, bool v) { kv[k] = v ? "true" : "false"; };

    kv["preset"] = cfg.preset;
    kv["scale"] = cfg.scale;
    kv["domain"] = cfg.domain == DomainKind::annulus ? "annulus" : "offset_disk";
    put_i("n_outer", cfg.n_outer);
    put_i("n_inner", cfg.n_inner);
    put_d("r_outer", cfg.r_outer);
    put_d("r_inner", cfg.r_inner);
    put_i("dns_level", cfg.dns_level);
    put_i("data_level", cfg.data_level);
    put_d("nu", cfg.nu);
    put_d("re", cfg.re);
    put_b("body_force", cfg.body_force);
    put_d("t_start", cfg.t_start);
    put_d("t_end", cfg.t_end);
    put_d("dt", cfg.dt);
    put_d("spinup", cfg.spinup);
    put_d("mu", cfg.mu);
    put_i("interp_k", cfg.interp_k);
    kv["variant"] = cfg.variant == InterpVariant::quadratic_on_coarse ? "quadratic_on_coarse"
                                                                      : "linear_on_refined";
    put_i("obs_stride", cfg.obs_stride);
    put_d("sync_threshold", cfg.sync_threshold);
    kv["out_dir"] = cfg.out_dir;
    put_i("snapshot_stride", cfg.snapshot_stride);
    put_i("checkpoint_stride", cfg.checkpoint_stride);
    put_d("linear_tol", cfg.linear_tol);
    put_b("deterministic", cfg.deterministic);
    put_i("workers", cfg.workers);

    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t config_fingerprint(const SimConfig& cfg) { return fnv1a64(canonical_text(cfg)); }

SimConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides,
                            const std::string& origin) {
    std::vector<Entry> entries = tokenize(text, origin);

    // duplicate keys in one file are almost always an editing mistake
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[i].key == entries[j].key) {
                fail(entries[j].where, "duplicate key '" + entries[j].key + "' (first at " +
                                           entries[i].where + ")");
            }
        }
    }

    // command-line overrides are appended and replace file values of the key
    int setno = 0;
    for (const std::string& ov : overrides) {
        ++setno;
        const std::string where = "--set " + std::to_string(setno);
        const std::size_t eq = ov.find('=');
        if (eq == std::string::npos) fail(where, "expected key=value, got '" + ov + "'");
        Entry e;
        e.key = trim(ov.substr(0, eq));
        e.value = trim(ov.substr(eq + 1));
        e.where = where;
        if (e.key.empty() || e.value.empty()) fail(where, "expected key=value, got '" + ov + "'");
        bool replaced = false;
        for (Entry& prior : entries) {
            if (prior.key == e.key) {
                prior = e;
                replaced = true;
                break;
            }
        }
        if (!replaced) entries.push_back(std::move(e));
    }

    // pass one: preset and scale decide the defaults everything else edits
    SimConfig cfg;
    for (const Entry& e : entries) {
        if (e.key == "preset") {
            if (e.value != "shear_annulus" && e.value != "bodyforce_offset_disk" &&
                e.value != "custom") {
                fail(e.where, "unknown preset '" + e.value + "'");
            }
            cfg.preset = e.value;
        } else if (e.key == "scale") {
            if (e.value != "desk" && e.value != "full") {
                fail(e.where, "unknown scale '" + e.value + "' (desk or full)");
            }
            cfg.scale = e.value;
        }
    }
    apply_preset(cfg);

    // pass two: everything else, in file order
    bool saw_re = false, saw_nu = false, saw_k = false, saw_variant = false;
    for (const Entry& e : entries) {
        const std::string& k = e.key;
        if (k == "preset" || k == "scale") {
            continue;
        } else if (k == "domain") {
            if (e.value == "annulus") {
                cfg.domain = DomainKind::annulus;
            } else if (e.value == "offset_disk") {
                cfg.domain = DomainKind::offset_disk;
            } else {
                fail(e.where, "unknown domain '" + e.value + "'");
            }
        } else if (k == "n_outer") {
            cfg.n_outer = parse_int(e);
        } else if (k == "n_inner") {
            cfg.n_inner = parse_int(e);
        } else if (k == "r_outer") {
            cfg.r_outer = parse_double(e);
        } else if (k == "r_inner") {
            cfg.r_inner = parse_double(e);
        } else if (k == "dns_level") {
            cfg.dns_level = parse_int(e);
        } else if (k == "data_level") {
            cfg.data_level = parse_int(e);
        } else if (k == "re") {
            saw_re = true;
            cfg.re = parse_double(e);
            if (!(cfg.re > 0.0)) violated("nu_positive", "re = " + e.value);
            cfg.nu = 1.0 / cfg.re;
        } else if (k == "nu") {
            saw_nu = true;
            cfg.nu = parse_double(e);
            cfg.re = 0.0;
        } else if (k == "body_force") {
            cfg.body_force = parse_bool(e);
        } else if (k == "t_start") {
            cfg.t_start = parse_double(e);
        } else if (k == "t_end") {
            cfg.t_end = parse_double(e);
        } else if (k == "dt") {
            cfg.dt = parse_double(e);
        } else if (k == "spinup") {
            cfg.spinup = parse_double(e);
        } else if (k == "mu") {
            cfg.mu = parse_double(e);
        } else if (k == "interp_k") {
            saw_k = true;
            cfg.interp_k = parse_int(e);
        } else if (k == "variant") {
            saw_variant = true;
            if (e.value == "quadratic_on_coarse") {
                cfg.variant = InterpVariant::quadratic_on_coarse;
            } else if (e.value == "linear_on_refined") {
                cfg.variant = InterpVariant::linear_on_refined;
            } else {
                fail(e.where, "unknown variant '" + e.value + "'");
            }
        } else if (k == "obs_stride") {
            cfg.obs_stride = parse_long(e);
        } else if (k == "sync_threshold") {
            cfg.sync_threshold = parse_double(e);
        } else if (k == "out_dir") {
            cfg.out_dir = e.value;
        } else if (k == "snapshot_stride") {
            cfg.snapshot_stride = parse_long(e);
        } else if (k == "checkpoint_stride") {
            cfg.checkpoint_stride = parse_long(e);
        } else if (k == "linear_tol") {
            cfg.linear_tol = parse_double(e);
        } else if (k == "deterministic") {
            cfg.deterministic = parse_bool(e);
        } else if (k == "workers") {
            cfg.workers = parse_int(e);
        } else {
            fail(e.where, "unknown key '" + k + "'");
        }
    }

    if (saw_re && saw_nu) violated("re_nu_exclusive", "both re and nu given");
    if (cfg.preset == "custom" && !saw_re && !saw_nu) {
        violated("re_nu_exclusive", "custom preset needs re or nu");
    }

    // one of interp_k and variant may be derived from the other
    if (saw_k && !saw_variant) {
        cfg.variant = cfg.interp_k == 2 ? InterpVariant::quadratic_on_coarse
                                        : InterpVariant::linear_on_refined;
    } else if (saw_variant && !saw_k) {
        cfg.interp_k = cfg.variant == InterpVariant::quadratic_on_coarse ? 2 : 1;
    }

    validate(cfg);
    return cfg;
}

SimConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides, path);
}

}  // namespace nudgefem
