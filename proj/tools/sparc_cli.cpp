// Command-line front end: encoding, Monte Carlo decoding experiments, state
// evolution, potential scans, thresholds and power-allocation design.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparc/amp.hpp"
#include "sparc/core.hpp"
#include "sparc/operators.hpp"
#include "sparc/replica.hpp"
#include "sparc/rng.hpp"
#include "sparc/sim.hpp"
#include "sparc/state_evolution.hpp"

namespace {

struct CommonOpts {
    sparc::ExperimentConfig cfg;
    std::string op_name = "gaussian";
};

void add_code_flags(CLI::App* app, CommonOpts& o, bool require_code = true) {
    auto* b = app->add_option("--B", o.cfg.B, "section size");
    auto* l = app->add_option("--L", o.cfg.L, "number of sections");
    auto* r = app->add_option("--R", o.cfg.R, "rate (bits per channel use)");
    auto* s = app->add_option("--snr", o.cfg.snr, "signal-to-noise ratio");
    if (require_code) {
        b->required();
        l->required();
        r->required();
        s->required();
    }
}

void add_operator_flags(CLI::App* app, CommonOpts& o) {
    app->add_option("--operator", o.op_name, "gaussian | hadamard | coupled")
        ->check(CLI::IsMember({"gaussian", "hadamard", "coupled"}));
    app->add_option("--Lc", o.cfg.ensemble.Lc, "column blocks");
    app->add_option("--Lr", o.cfg.ensemble.Lr, "row blocks");
    app->add_option("--w", o.cfg.ensemble.w, "coupling window");
    app->add_option("--sqrtJ", o.cfg.ensemble.sqrtJ, "coupling strength sqrt(J)");
    app->add_option("--beta-seed", o.cfg.ensemble.beta_seed, "seed block over-measurement");
    app->add_option("--G", o.cfg.G, "power-allocation groups (0 = constant power)");
}

void add_run_flags(CLI::App* app, CommonOpts& o) {
    app->add_option("--trials", o.cfg.trials, "number of decoding trials");
    app->add_option("--seed", o.cfg.seed, "master seed");
    app->add_option("--t-max", o.cfg.t_max, "maximum decoder iterations");
    app->add_option("--eps", o.cfg.eps, "convergence threshold on mean |da|^2");
    app->add_option("--workers", o.cfg.workers,
                    "trial worker threads (SPARC_WORKERS env overrides)");
    app->add_option("--out", o.cfg.out, "output path prefix");
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

int cmd_encode(const CommonOpts& o) {
    sparc::ExperimentConfig cfg = o.cfg;
    cfg.op_kind = sparc::operator_kind_from_name(o.op_name);
    sparc::validate_config(cfg);
    const auto params = sparc::derive_dimensions(cfg.B, cfg.L, cfg.R, cfg.snr);
    const auto alloc = cfg.G != 0
                           ? sparc::exponential_power_allocation(cfg.G, cfg.L, cfg.snr)
                           : sparc::constant_allocation(cfg.L);
    const auto op = sparc::build_operator(cfg, params, alloc);
    sparc::Xoshiro256 rng(sparc::trial_seed(cfg, 0));
    const auto msg = sparc::random_message(params, alloc, rng);
    const auto codeword = sparc::apply_forward(*op, msg.dense);

    std::ofstream file;
    std::ostream& os = open_out(cfg.out.empty() ? "" : cfg.out + ".csv", file);
    os.precision(17);
    os << "# B=" << cfg.B << " L=" << cfg.L << " R=" << cfg.R << " snr=" << cfg.snr
       << " M=" << params.M << " N=" << params.N
       << " realized_rate=" << params.realized_rate << "\n";
    os << "section,symbol\n";
    for (std::size_t l = 0; l < cfg.L; ++l) os << l << ',' << msg.symbols[l] << '\n';
    os << "codeword\n";
    for (double y : codeword) os << y << '\n';
    if (!cfg.out.empty()) sparc::emit_manifest(cfg, *op, cfg.out + ".manifest.json");
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    sparc::ExperimentConfig cfg = o.cfg;
    cfg.op_kind = sparc::operator_kind_from_name(o.op_name);
    const auto s = sparc::run_simulation(cfg);
    std::cout.precision(10);
    std::cout << "trials=" << s.records.size() << " block_error_rate=" << s.block_error_rate
              << " mean_ser=" << s.mean_ser << "\n";
    if (!cfg.out.empty()) {
        const auto params = sparc::derive_dimensions(cfg.B, cfg.L, cfg.R, cfg.snr);
        const auto alloc =
            cfg.G != 0 ? sparc::exponential_power_allocation(cfg.G, cfg.L, cfg.snr)
                       : sparc::constant_allocation(cfg.L);
        const auto op = sparc::build_operator(cfg, params, alloc);
        sparc::emit_manifest(cfg, *op, cfg.out + ".manifest.json");
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& rates) {
    sparc::ExperimentConfig cfg = o.cfg;
    cfg.op_kind = sparc::operator_kind_from_name(o.op_name);
    std::vector<double> R_list;
    std::stringstream ss(rates);
    std::string tok;
    while (std::getline(ss, tok, ',')) R_list.push_back(std::stod(tok));
    const auto rows = sparc::run_rate_sweep(cfg, R_list);
    std::cout.precision(10);
    std::cout << "R,mean_ser,block_error_rate\n";
    for (const auto& r : rows)
        std::cout << r.R << ',' << r.mean_ser << ',' << r.block_error_rate << "\n";
    return 0;
}

int cmd_se(const CommonOpts& o, std::size_t mc_samples, const std::string& mode_name) {
    sparc::SEParams p{o.cfg.B, o.cfg.R, o.cfg.snr, mc_samples, o.cfg.seed};
    sparc::SEMode mode;
    const auto params = sparc::derive_dimensions(o.cfg.B, o.cfg.L ? o.cfg.L : 1024,
                                                 o.cfg.R, o.cfg.snr);
    if (mode_name == "coupled") {
        mode.kind = sparc::SEMode::Coupled;
        mode.profile = sparc::make_banded_profile(o.cfg.ensemble, params);
    } else if (mode_name == "powalloc") {
        mode.kind = sparc::SEMode::Powalloc;
        mode.c_g = sparc::exponential_group_amplitudes(o.cfg.G ? o.cfg.G : 1, o.cfg.snr);
    }
    const auto traj = sparc::se_run(p, mode, o.cfg.t_max, 1e-9);

    std::ofstream file;
    std::ostream& os = open_out(o.cfg.out, file);
    os.precision(12);
    os << "t";
    const std::size_t width = traj.E.empty() ? 1 : traj.E[0].size();
    for (std::size_t c = 0; c < width; ++c) os << " E_" << c;
    for (std::size_t c = 0; c < width; ++c) os << " Sigma_" << c;
    for (std::size_t c = 0; c < width; ++c) os << " SER_" << c;
    os << "\n";
    for (std::size_t t = 0; t < traj.E.size(); ++t) {
        os << t;
        for (double e : traj.E[t]) os << ' ' << e;
        for (double s2 : traj.sigma2[t]) os << ' ' << std::sqrt(s2);
        for (double s : traj.ser[t]) os << ' ' << s;
        os << "\n";
    }
    os << "# iterations=" << traj.iterations << " converged=" << traj.converged << "\n";
    return 0;
}

int cmd_potential(const CommonOpts& o, std::size_t mc_samples) {
    const auto curve = sparc::potential_curve(o.cfg.B, o.cfg.R, o.cfg.snr, mc_samples,
                                              o.cfg.seed);
    std::ofstream file;
    std::ostream& os = open_out(o.cfg.out, file);
    os.precision(12);
    os << "E phi stderr\n";
    for (std::size_t i = 0; i < curve.E_grid.size(); ++i)
        os << curve.E_grid[i] << ' ' << curve.phi[i] << ' ' << curve.std_err[i] << "\n";
    for (const auto& [E, phi] : curve.maxima)
        os << "# maximum E=" << E << " phi=" << phi << "\n";
    return 0;
}

int cmd_thresholds(const CommonOpts& o, std::size_t mc_samples) {
    std::cout.precision(10);
    const auto rbp = sparc::find_r_bp(o.cfg.B, o.cfg.snr, 1e-3, mc_samples, o.cfg.seed);
    const auto ropt = sparc::find_r_opt(o.cfg.B, o.cfg.snr, 1e-3, mc_samples, o.cfg.seed);
    const auto rbp_se = sparc::find_r_bp_se(o.cfg.B, o.cfg.snr);
    std::cout << "capacity=" << sparc::capacity(o.cfg.snr) << "\n";
    std::cout << "r_bp=" << (rbp.found ? rbp.R : -1) << "\n";
    std::cout << "r_opt=" << (ropt.found ? ropt.R : -1) << "\n";
    std::cout << "r_bp_se=" << (rbp_se.found ? rbp_se.R : -1) << "\n";
    return 0;
}

int cmd_phase_diagram(const CommonOpts& o, std::size_t mc_samples) {
    const auto pt = sparc::phase_diagram_point(o.cfg.B, o.cfg.snr, mc_samples, o.cfg.seed);
    std::ofstream file;
    std::ostream& os = open_out(o.cfg.out, file);
    os.precision(10);
    os << "B snr capacity r_bp r_opt ser_low\n";
    os << pt.B << ' ' << pt.snr << ' ' << pt.capacity << ' '
       << (pt.r_bp.found ? pt.r_bp.R : -1) << ' ' << (pt.r_opt.found ? pt.r_opt.R : -1)
       << ' ' << pt.ser_at_low_maximum << "\n";
    return 0;
}

int cmd_powalloc(const CommonOpts& o) {
    const std::size_t G = o.cfg.G ? o.cfg.G : 200;
    const auto c = sparc::exponential_group_amplitudes(G, o.cfg.snr);
    const auto ok = sparc::decodability_condition(c, o.cfg.R, o.cfg.snr);
    std::ofstream file;
    std::ostream& os = open_out(o.cfg.out, file);
    os.precision(12);
    os << "g c_g decodable\n";
    bool all = true;
    for (std::size_t g = 0; g < G; ++g) {
        os << g + 1 << ' ' << c[g] << ' ' << (ok[g] ? 1 : 0) << "\n";
        all = all && ok[g];
    }
    os << "# all_decodable=" << (all ? 1 : 0) << " capacity=" << sparc::capacity(o.cfg.snr)
       << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse superposition codes: AMP decoding, state evolution and "
                 "potential analysis"};
    app.require_subcommand(1);

    CommonOpts enc, sim, swp, se, pot, thr, phd, pow;
    std::string swp_rates;
    std::string se_mode = "homogeneous";
    std::size_t se_mc = 100'000, pot_mc = 1'000'000, thr_mc = 1'000'000,
                phd_mc = 1'000'000;

    auto* c_enc = app.add_subcommand("encode", "draw a message and emit its codeword");
    add_code_flags(c_enc, enc);
    add_operator_flags(c_enc, enc);
    add_run_flags(c_enc, enc);

    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo encode/decode trials");
    add_code_flags(c_sim, sim);
    add_operator_flags(c_sim, sim);
    add_run_flags(c_sim, sim);

    auto* c_swp = app.add_subcommand("sweep", "simulate over a list of rates");
    add_code_flags(c_swp, swp);
    add_operator_flags(c_swp, swp);
    add_run_flags(c_swp, swp);
    c_swp->add_option("--rates", swp_rates, "comma-separated rate list")->required();

    auto* c_se = app.add_subcommand("se", "state evolution trajectory");
    c_se->add_option("--B", se.cfg.B)->required();
    c_se->add_option("--L", se.cfg.L);
    c_se->add_option("--R", se.cfg.R)->required();
    c_se->add_option("--snr", se.cfg.snr)->required();
    c_se->add_option("--mode", se_mode, "homogeneous | coupled | powalloc")
        ->check(CLI::IsMember({"homogeneous", "coupled", "powalloc"}));
    add_operator_flags(c_se, se);
    c_se->add_option("--mc-samples", se_mc);
    c_se->add_option("--seed", se.cfg.seed);
    c_se->add_option("--t-max", se.cfg.t_max);
    c_se->add_option("--out", se.cfg.out);

    auto* c_pot = app.add_subcommand("potential", "replica potential scan over E");
    c_pot->add_option("--B", pot.cfg.B)->required();
    c_pot->add_option("--R", pot.cfg.R)->required();
    c_pot->add_option("--snr", pot.cfg.snr)->required();
    c_pot->add_option("--mc-samples", pot_mc);
    c_pot->add_option("--seed", pot.cfg.seed);
    c_pot->add_option("--out", pot.cfg.out);

    auto* c_thr = app.add_subcommand("thresholds", "R_BP and R_opt for (B, snr)");
    c_thr->add_option("--B", thr.cfg.B)->required();
    c_thr->add_option("--snr", thr.cfg.snr)->required();
    c_thr->add_option("--mc-samples", thr_mc);
    c_thr->add_option("--seed", thr.cfg.seed);

    auto* c_phd = app.add_subcommand("phase-diagram", "one (B, snr) phase-diagram point");
    c_phd->add_option("--B", phd.cfg.B)->required();
    c_phd->add_option("--snr", phd.cfg.snr)->required();
    c_phd->add_option("--mc-samples", phd_mc);
    c_phd->add_option("--seed", phd.cfg.seed);
    c_phd->add_option("--out", phd.cfg.out);

    auto* c_pow = app.add_subcommand("powalloc", "exponential allocation + decodability");
    c_pow->add_option("--G", pow.cfg.G);
    c_pow->add_option("--R", pow.cfg.R)->required();
    c_pow->add_option("--snr", pow.cfg.snr)->required();
    c_pow->add_option("--out", pow.cfg.out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_enc->parsed()) return cmd_encode(enc);
        if (c_sim->parsed()) return cmd_simulate(sim);
        if (c_swp->parsed()) return cmd_sweep(swp, swp_rates);
        if (c_se->parsed()) return cmd_se(se, se_mc, se_mode);
        if (c_pot->parsed()) return cmd_potential(pot, pot_mc);
        if (c_thr->parsed()) return cmd_thresholds(thr, thr_mc);
        if (c_phd->parsed()) return cmd_phase_diagram(phd, phd_mc);
        if (c_pow->parsed()) return cmd_powalloc(pow);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
