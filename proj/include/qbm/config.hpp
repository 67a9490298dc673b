#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbm/bath.hpp"
#include "qbm/mat2.hpp"
#include "qbm/master.hpp"

namespace qbm {

// Declarative form of a ForcingSpec (constant coefficients only), so runs
// are fully described by the config file.
struct ForcingConfig {
    std::string kind = "none";  // none|external|linear|quadratic|cubic|general
    Vec2 force{};               // external
    Mat2 kmat = Mat2::zero();   // linear
    double k1 = 0.0;            // quadratic
    double k2 = 0.0;            // cubic
    struct GeneralTerm {
        int d = 0;
        int b = 0;
        double coeff = 0.0;
    };
    std::vector<GeneralTerm> general;
    bool classical_characteristics_only = false;

    bool enabled() const { return kind != "none"; }
    ForcingSpec to_spec() const;
};

struct WignerConfig {
    double x_min = -6.0, x_max = 6.0;
    double p_min = -6.0, p_max = 6.0;
    std::size_t nx = 121, np = 121;
    Vec2 mean{};
    Mat2 covariance{0.5, 0.0, 0.0, 0.5};
};

struct OracleConfig {
    std::size_t n = 10000;
    std::uint64_t seed = 1;
};

struct OutputConfig {
    std::string directory = "out";
    std::size_t snapshot_stride = 20;  // evolve snapshots every N steps
    bool binary_snapshots = false;
};

struct RunConfig {
    SpectralModel model;
    double t_max = 1.0;
    double dt = 0.01;
    double master_dt = 0.05;
    ForcingConfig forcing;
    WignerConfig wigner;
    OracleConfig oracle;
    OutputConfig outputs;
    int degree_cap = 8;
};

struct Diagnostic {
    std::string path;     // e.g. "model.temperature"
    std::string message;
    bool warning = false;
};

// Parse a JSON config file. Throws std::runtime_error on unreadable or
// malformed input; unknown keys are reported through validate().
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

// Static checks only; aggregates every problem instead of failing fast.
std::vector<Diagnostic> validate(const RunConfig& config);

// Canonical JSON echo (round-trips through parse_config) and its FNV-1a
// hash, stamped into every output file header.
std::string config_echo(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

}  // namespace qbm
