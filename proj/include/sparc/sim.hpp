#pragma once
// Experiment harness: Monte Carlo decoding runs, rate sweeps, and
// reproducibility manifests.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sparc/amp.hpp"
#include "sparc/core.hpp"
#include "sparc/operators.hpp"

namespace sparc {

enum class OperatorKind { Gaussian, Hadamard, Coupled };

const char* operator_kind_name(OperatorKind k);
OperatorKind operator_kind_from_name(const std::string& name);

struct ExperimentConfig {
    int B = 0;
    std::size_t L = 0;
    double R = 0;
    double snr = 0;
    OperatorKind op_kind = OperatorKind::Gaussian;
    CoupledEnsembleParams ensemble; // used by Coupled (and Hadamard's Lc=Lr=1)
    std::size_t G = 0;              // power-allocation groups; 0 = constant power
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    std::size_t t_max = 500;
    double eps = 1e-8;
    std::size_t workers = 1; // SPARC_WORKERS env var overrides
    std::string out;         // output path prefix; empty = no files
};

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double ser = 0;
    double mse = 0;
    std::size_t iterations = 0;
    bool converged = false;
    double wall_ms = 0; // informational; excluded from determinism comparisons
};

struct SimulationSummary {
    ExperimentConfig config;
    CodeParams params;
    std::vector<TrialRecord> records;
    double block_error_rate = 0; // fraction of trials with ser > 0
    double mean_ser = 0;
};

void validate_config(const ExperimentConfig& cfg);

// Operator master seed and per-trial seeds, all derived from cfg.seed by
// counter so serial and parallel schedules agree.
std::uint64_t operator_seed(const ExperimentConfig& cfg);
std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t trial);

std::unique_ptr<Operator> build_operator(const ExperimentConfig& cfg,
                                         const CodeParams& params,
                                         const PowerAllocation& alloc);

// Runs cfg.trials independent encode -> transmit -> decode cycles against one
// operator realization. With cfg.out set, writes <out>.csv (per-trial rows)
// and <out>.json (summary).
SimulationSummary run_simulation(const ExperimentConfig& cfg);

struct RateSweepRow {
    double R = 0;
    double mean_ser = 0;
    double block_error_rate = 0;
};

// One run_simulation per rate; with cfg.out set, writes <out>_sweep.csv.
std::vector<RateSweepRow> run_rate_sweep(const ExperimentConfig& cfg,
                                         const std::vector<double>& R_list);

// Writes every parameter and seed needed to reproduce a run bit-exactly,
// including the per-block mode-selection seeds of a coupled operator.
void emit_manifest(const ExperimentConfig& cfg, const Operator& op,
                   const std::string& path);

// Parses and validates a manifest: dimensions must be consistent with
// (B, L, R) and the stored operator fingerprint must match a rebuild.
ExperimentConfig load_manifest(const std::string& path);

} // namespace sparc
