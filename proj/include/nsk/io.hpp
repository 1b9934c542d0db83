/// @file io.hpp
/// @brief Run configuration, NSKSNAP1 snapshots and report writers.
///
/// Snapshot layout (all little-endian):
///   "NSKSNAP1" | u32 version | u32 d | u32 N | f64 L, t, ε, ν, κ, γ |
///   u32 field count | per field: u32 name length, ASCII name |
///   payload: per field N^d f64 values, x fastest.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsk/acoustic.hpp"
#include "nsk/euler.hpp"
#include "nsk/harness.hpp"
#include "nsk/nsk.hpp"

namespace nsk {

struct RunConfig {
    int dim = 2;
    int n = 64;
    double length = 16.0;
    double gamma = 1.5;
    double kappa = 0.5;
    double epsilon = 0.1;
    std::vector<double> epsilon_list{0.2, 0.1, 0.05, 0.025};
    double nu_coeff = 1.0;  ///< ν = nu_coeff·ε^{nu_power}
    double nu_power = 1.0;
    double dt = 0.0;        ///< simulate/euler: 0 picks Δt from the Courant target
    double dt_factor = 0.04;
    double cfl = 0.4;
    double t_end = 1.0;
    int stride = 10;
    DataFamily family;
    std::string out = ".";
    double norm_p = 2.0;
    double norm_q = 2.0;
    double norm_s = 0.0;
    double window_fraction = 0.25;
    bool use_window = false;  ///< norms: restrict to the centered window
    double hs_index = 0.5;
    /// acoustic-decay pair; 0 picks (2, 6) in 3D and (5, 4) with θ = 0.4 in 2D.
    double decay_p = 0.0;
    double decay_q = 0.0;
    std::optional<double> theta;
    double horizon = 0.0;   ///< acoustic-decay: 0 picks the escape window of the smallest ε
    int time_samples = 41;
    double euler_spacing = 1e-2;
    std::string snapshot;   ///< norms: input file

    void validate() const;
    PhysParams params(double eps) const;
    SweepConfig sweep() const;
};

/// Set one key from its text value. Throws ConfigError naming the key on an
/// unknown key or a malformed value.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
/// "key=value" form of set_config_value.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// key=value lines, '#' comments, blank lines ignored. Throws IoError when
/// the file cannot be read and ConfigError on bad content. Validates.
RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});

struct SnapshotHeader {
    std::uint32_t version = 1;
    std::uint32_t dim = 0;
    std::uint32_t n = 0;
    double length = 0.0;
    double t = 0.0;
    double epsilon = 0.0;
    double nu = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    std::vector<std::string> names;
};

struct SnapshotFile {
    SnapshotHeader header;
    std::vector<ScalarField> fields;

    const ScalarField& field(const std::string& name) const;
};

struct SnapshotExpect {
    std::optional<std::uint32_t> dim;
    std::optional<std::uint32_t> n;
};

void write_snapshot(const std::filesystem::path& path, const SnapshotFile& snap);
/// Throws IoError on a bad magic, truncation or a grid mismatch against
/// `expect` (the message carries expected and actual values).
SnapshotFile read_snapshot(const std::filesystem::path& path, const SnapshotExpect& expect = {});

/// Fields rho, m_x, m_y[, m_z].
SnapshotFile to_snapshot(const FluidState& state);
FluidState fluid_from_snapshot(const SnapshotFile& snap);
/// Fields u_x, u_y[, u_z], pi.
SnapshotFile to_snapshot(const EulerState& state);

/// Sweep CSV with the stable columns
/// epsilon,nu,sup_rel_energy,l2loc_vel_err,strichartz_q6,rho_h_s_err,rei_slack.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// Initial-data table of the sweep members.
void write_lemma_csv(std::ostream& os, const SweepResult& result);
/// Budget checkpoints of every member.
void write_budget_csv(std::ostream& os, const SweepResult& result);
/// [{metric, slope, residual, points}, ...]
void write_fits_json(std::ostream& os, const std::vector<MetricFit>& fits);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Open for writing or throw IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace nsk
