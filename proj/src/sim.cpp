#include "sparc/sim.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sparc/rng.hpp"

namespace sparc {

const char* operator_kind_name(OperatorKind k) {
    switch (k) {
        case OperatorKind::Gaussian: return "gaussian";
        case OperatorKind::Hadamard: return "hadamard";
        case OperatorKind::Coupled: return "coupled";
    }
    return "?";
}

OperatorKind operator_kind_from_name(const std::string& name) {
    if (name == "gaussian") return OperatorKind::Gaussian;
    if (name == "hadamard") return OperatorKind::Hadamard;
    if (name == "coupled") return OperatorKind::Coupled;
    throw std::invalid_argument("unknown operator kind: " + name);
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (cfg.t_max < 1) throw std::invalid_argument("config: t_max must be >= 1");
    if (cfg.eps < 0) throw std::invalid_argument("config: eps must be >= 0");
    if (cfg.G != 0 && (cfg.L % cfg.G) != 0)
        throw std::invalid_argument("config: G must divide L");
    derive_dimensions(cfg.B, cfg.L, cfg.R, cfg.snr); // validates B, L, R, snr
}

std::uint64_t operator_seed(const ExperimentConfig& cfg) {
    return derive_seed(cfg.seed, 0, 1);
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t trial) {
    return derive_seed(cfg.seed, trial + 1, 2);
}

std::unique_ptr<Operator> build_operator(const ExperimentConfig& cfg,
                                         const CodeParams& params,
                                         const PowerAllocation& alloc) {
    const PowerAllocation* ap = cfg.G != 0 ? &alloc : nullptr;
    switch (cfg.op_kind) {
        case OperatorKind::Gaussian:
            return build_dense_gaussian(params, operator_seed(cfg), {}, ap);
        case OperatorKind::Hadamard:
            return build_coupled_hadamard({}, params, operator_seed(cfg), ap);
        case OperatorKind::Coupled:
            return build_coupled_hadamard(cfg.ensemble, params, operator_seed(cfg), ap);
    }
    throw std::logic_error("build_operator: unreachable");
}

namespace {

std::size_t worker_count(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("SPARC_WORKERS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, cfg.workers);
}

TrialRecord run_trial(const ExperimentConfig& cfg, const CodeParams& params,
                      const PowerAllocation& alloc, const Operator& op,
                      std::size_t trial) {
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = trial_seed(cfg, trial);
    const auto t0 = std::chrono::steady_clock::now();

    Xoshiro256 rng(rec.seed);
    const SparseMessage msg = random_message(params, alloc, rng);
    const std::vector<double> codeword = apply_forward(op, msg.dense);
    const ChannelRealization chan = transmit(codeword, params.snr, rng);

    DecodeOptions opts;
    opts.t_max = cfg.t_max;
    opts.eps = cfg.eps;
    const DecodeReport rep = amp_decode_simplified(chan.received, op, params, alloc,
                                                   opts, &msg);
    rec.ser = section_error_rate(msg, rep.estimate);
    rec.mse = mse_per_section(msg.dense, rep.a, params.L);
    rec.iterations = rep.iterations;
    rec.converged = rep.converged;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return rec;
}

void write_csv(const SimulationSummary& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "trial,seed,ser,mse,iterations,converged,wall_ms\n";
    f.precision(17);
    for (const auto& r : s.records)
        f << r.trial << ',' << r.seed << ',' << r.ser << ',' << r.mse << ','
          << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.wall_ms << '\n';
}

void write_json_summary(const SimulationSummary& s, const std::string& path) {
    nlohmann::json j;
    j["B"] = s.config.B;
    j["L"] = s.config.L;
    j["R"] = s.config.R;
    j["snr"] = s.config.snr;
    j["operator"] = operator_kind_name(s.config.op_kind);
    j["G"] = s.config.G;
    j["trials"] = s.config.trials;
    j["seed"] = s.config.seed;
    j["t_max"] = s.config.t_max;
    j["eps"] = s.config.eps;
    j["M"] = s.params.M;
    j["N"] = s.params.N;
    j["realized_rate"] = s.params.realized_rate;
    j["block_error_rate"] = s.block_error_rate;
    j["mean_ser"] = s.mean_ser;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << '\n';
}

} // namespace

SimulationSummary run_simulation(const ExperimentConfig& cfg) {
    validate_config(cfg);
    SimulationSummary s;
    s.config = cfg;
    s.params = derive_dimensions(cfg.B, cfg.L, cfg.R, cfg.snr);
    const PowerAllocation alloc = cfg.G != 0
                                      ? exponential_power_allocation(cfg.G, cfg.L, cfg.snr)
                                      : constant_allocation(cfg.L);
    const auto op = build_operator(cfg, s.params, alloc);

    s.records.resize(cfg.trials);
    const std::size_t workers = std::min(worker_count(cfg), cfg.trials);
    if (workers <= 1) {
        for (std::size_t t = 0; t < cfg.trials; ++t)
            s.records[t] = run_trial(cfg, s.params, alloc, *op, t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t wkr = 0; wkr < workers; ++wkr)
            pool.emplace_back([&] {
                for (std::size_t t = next.fetch_add(1); t < cfg.trials;
                     t = next.fetch_add(1))
                    s.records[t] = run_trial(cfg, s.params, alloc, *op, t);
            });
        for (auto& th : pool) th.join();
    }

    std::size_t blocks = 0;
    double ser_sum = 0;
    for (const auto& r : s.records) {
        if (r.ser > 0) ++blocks;
        ser_sum += r.ser;
    }
    s.block_error_rate = static_cast<double>(blocks) / static_cast<double>(cfg.trials);
    s.mean_ser = ser_sum / static_cast<double>(cfg.trials);

    if (!cfg.out.empty()) {
        write_csv(s, cfg.out + ".csv");
        write_json_summary(s, cfg.out + ".json");
    }
    return s;
}

std::vector<RateSweepRow> run_rate_sweep(const ExperimentConfig& cfg,
                                         const std::vector<double>& R_list) {
    if (R_list.empty()) throw std::invalid_argument("run_rate_sweep: empty rate list");
    std::vector<RateSweepRow> rows;
    rows.reserve(R_list.size());
    for (double R : R_list) {
        ExperimentConfig c = cfg;
        c.R = R;
        c.out.clear();
        const auto s = run_simulation(c);
        rows.push_back({R, s.mean_ser, s.block_error_rate});
    }
    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out + "_sweep.csv");
        if (!f) throw std::runtime_error("cannot write " + cfg.out + "_sweep.csv");
        f << "R,mean_ser,block_error_rate\n";
        f.precision(17);
        for (const auto& r : rows)
            f << r.R << ',' << r.mean_ser << ',' << r.block_error_rate << '\n';
    }
    return rows;
}

void emit_manifest(const ExperimentConfig& cfg, const Operator& op,
                   const std::string& path) {
    nlohmann::json j;
    j["format"] = "sparc-manifest-v1";
    j["B"] = cfg.B;
    j["L"] = cfg.L;
    j["R"] = cfg.R;
    j["snr"] = cfg.snr;
    j["operator"] = operator_kind_name(cfg.op_kind);
    j["ensemble"] = {{"Lc", cfg.ensemble.Lc},
                     {"Lr", cfg.ensemble.Lr},
                     {"w", cfg.ensemble.w},
                     {"sqrtJ", cfg.ensemble.sqrtJ},
                     {"beta_seed", cfg.ensemble.beta_seed}};
    j["G"] = cfg.G;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["t_max"] = cfg.t_max;
    j["eps"] = cfg.eps;
    j["rows"] = op.rows();
    j["cols"] = op.cols();
    j["operator_seed"] = op.seed();
    j["omega_seeds"] = op.omega_seeds();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << '\n';
}

ExperimentConfig load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    f >> j;
    if (j.value("format", "") != std::string("sparc-manifest-v1"))
        throw std::runtime_error("manifest: unknown format");

    ExperimentConfig cfg;
    cfg.B = j.at("B").get<int>();
    cfg.L = j.at("L").get<std::size_t>();
    cfg.R = j.at("R").get<double>();
    cfg.snr = j.at("snr").get<double>();
    cfg.op_kind = operator_kind_from_name(j.at("operator").get<std::string>());
    const auto& e = j.at("ensemble");
    cfg.ensemble.Lc = e.at("Lc").get<std::size_t>();
    cfg.ensemble.Lr = e.at("Lr").get<std::size_t>();
    cfg.ensemble.w = e.at("w").get<std::size_t>();
    cfg.ensemble.sqrtJ = e.at("sqrtJ").get<double>();
    cfg.ensemble.beta_seed = e.at("beta_seed").get<double>();
    cfg.G = j.at("G").get<std::size_t>();
    cfg.trials = j.at("trials").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.t_max = j.at("t_max").get<std::size_t>();
    cfg.eps = j.at("eps").get<double>();
    validate_config(cfg);

    const CodeParams params = derive_dimensions(cfg.B, cfg.L, cfg.R, cfg.snr);
    if (j.at("rows").get<std::size_t>() != params.M ||
        j.at("cols").get<std::size_t>() != params.N)
        throw std::runtime_error("manifest: dimensions inconsistent with (B, L, R)");
    if (j.at("operator_seed").get<std::uint64_t>() != operator_seed(cfg))
        throw std::runtime_error("manifest: operator seed inconsistent with master seed");
    const PowerAllocation alloc = cfg.G != 0
                                      ? exponential_power_allocation(cfg.G, cfg.L, cfg.snr)
                                      : constant_allocation(cfg.L);
    const auto op = build_operator(cfg, params, alloc);
    if (j.at("omega_seeds").get<std::vector<std::uint64_t>>() != op->omega_seeds())
        throw std::runtime_error("manifest: mode-selection seeds do not match rebuild");
    return cfg;
}

} // namespace sparc
