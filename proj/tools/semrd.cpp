/***************************************************************
 *  semrd.cpp  --  command-line front end
 *
 *  Subcommands: core, distortion, capacity, invariants, rd,
 *  rate-delay, overlap, broadcast, simulate, experiment.
 *  Exit codes: 0 on success, 2 on configuration/usage errors.
 ***************************************************************/

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semrd/channel.hpp"
#include "semrd/core.hpp"
#include "semrd/datalog.hpp"
#include "semrd/distortion.hpp"
#include "semrd/harness.hpp"
#include "semrd/multiagent.hpp"
#include "semrd/ratedist.hpp"

namespace {

using namespace semrd;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SemrdError(SemrdError::Kind::Config, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

KnowledgeBase load_kb(const std::string& path) {
    return make_kb(parse_program(slurp(path)), path);
}

std::pair<KnowledgeBase, FactSet> load_pair(const std::string& sender_path,
                                            const std::string& receiver_path) {
    KnowledgeBase sender = load_kb(sender_path);
    ParsedProgram receiver = parse_program(slurp(receiver_path));
    return align_receiver(sender, receiver);
}

std::ostream& out_stream(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw SemrdError(SemrdError::Kind::Config, "cannot open output file: " + path);
    return file;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        grid.push_back(std::stod(item));
    }
    if (grid.empty())
        throw SemrdError(SemrdError::Kind::Config, "empty grid");
    return grid;
}

int cmd_core(const std::string& kb_path) {
    KnowledgeBase kb = load_kb(kb_path);
    CoreProfile profile = irredundant_core(kb);
    CoreFiltration filt = delta_core_filtration(kb);
    std::cout << "facts " << kb.facts.size() << "\n"
              << "atomicity " << profile.atomicity << "\n"
              << "depth_radius " << profile.max_depth << "\n";
    std::cout << "core";
    for (const auto& a : profile.core) std::cout << ' ' << kb.program->render(a);
    std::cout << "\nshortcuts";
    for (const auto& a : profile.shortcuts) std::cout << ' ' << kb.program->render(a);
    std::cout << "\nfiltration_sizes";
    for (const auto& s : filt.cores_by_delta) std::cout << ' ' << s.size();
    std::cout << "\n";
    return 0;
}

int cmd_distortion(const std::string& kb_path, const std::string& kind, int delta,
                   const std::string& out_path) {
    KnowledgeBase kb = load_kb(kb_path);
    DistortionSpec spec = [&] {
        if (kind == "hamming") return DistortionSpec::hamming(kb);
        if (kind == "closure") return DistortionSpec::closure(kb);
        if (kind == "depth") return DistortionSpec::depth(kb);
        if (kind == "delta") return DistortionSpec::delta_closure(kb, delta);
        throw SemrdError(SemrdError::Kind::Config, "unknown distortion kind: " + kind);
    }();
    DistortionMatrix m = distortion_matrix(spec, kb.facts, kb.facts);
    std::ofstream file;
    std::ostream& os = out_stream(file, out_path);
    os << "s";
    for (const auto& a : m.recon_alphabet) os << ',' << kb.program->render(a);
    os << "\n";
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        os << kb.program->render(m.source_alphabet[i]);
        for (double v : m.entries[i]) os << ',' << v;
        os << "\n";
    }
    return 0;
}

int cmd_capacity(int q, double p, double tol) {
    CapacityResult cap = capacity_ba(qsc_kernel(q, p), tol);
    std::cout << "capacity_bits " << cap.bits << "\n"
              << "iterations " << cap.iterations << "\n"
              << "converged " << (cap.converged ? "yes" : "no") << "\n";
    return cap.converged ? 0 : 2;
}

int cmd_invariants(const std::string& sender_path, const std::string& receiver_path, int q,
                   double p, bool no_channel) {
    auto [sender, receiver] = load_pair(sender_path, receiver_path);
    std::optional<ChannelContext> ctx;
    if (!no_channel) {
        Kernel w = qsc_kernel(q, p);
        ctx = ChannelContext{identity_injection_encoder(sender.facts.size(), w.inputs()), w};
    }
    InvariantReport rep = invariant_report(sender, receiver, ctx);
    std::cout << "I.atomicity " << rep.atomicity << "\n"
              << "I.depth_radius " << rep.max_depth << "\n"
              << "II.rho_atom " << rep.rho_atom.numerator() << "/" << rep.rho_atom.denominator()
              << "\n"
              << "II.f_cn " << rep.f_cn.numerator() << "/" << rep.f_cn.denominator() << "\n"
              << "V.delta_atomicity " << rep.delta_atomicity << "\n"
              << "V.delta_depth_radius " << rep.delta_max_depth << "\n";
    if (rep.noise) {
        std::cout << "III.phi_atom " << rep.noise->phi_atom << "\n"
                  << "III.psi_plus " << rep.noise->psi_plus << "\n"
                  << "IV.fidelity_index " << rep.quality->fidelity_index << "\n"
                  << "IV.depth_expansion " << rep.quality->depth_expansion << "\n"
                  << "VI.i_sem " << *rep.i_sem << "\n"
                  << "VI.c_sem_estimate " << *rep.c_sem_estimate << "\n"
                  << "VI.carrier_capacity " << *rep.carrier_capacity << "\n";
    } else {
        std::cout << "III. absent (no channel)\nIV. absent (no channel)\nVI. absent (no channel)\n";
    }
    return 0;
}

int cmd_rd(const std::string& kb_path, const std::string& kind, const std::string& grid_csv,
           double tol, const std::string& out_path) {
    KnowledgeBase kb = load_kb(kb_path);
    DistortionSpec spec = (kind == "hamming")   ? DistortionSpec::hamming(kb)
                          : (kind == "depth")   ? DistortionSpec::depth(kb)
                          : (kind == "closure") ? DistortionSpec::closure(kb)
                                                : throw SemrdError(SemrdError::Kind::Config,
                                                                   "unknown distortion kind: " +
                                                                       kind);
    DistortionMatrix m = distortion_matrix(spec, kb.facts, kb.facts);
    Distribution uniform = uniform_distribution(kb.facts.size());
    RDCurve curve = rd_curve_ba(uniform, m, parse_grid(grid_csv), tol);
    std::ofstream file;
    std::ostream& os = out_stream(file, out_path);
    os << "D,R,achieved,converged\n";
    for (const auto& pt : curve.points)
        os << pt.distortion << ',' << pt.rate << ',' << pt.achieved << ','
           << (pt.converged ? 1 : 0) << "\n";
    return 0;
}

int cmd_rate_delay(const std::string& kb_path, const std::string& out_path) {
    KnowledgeBase kb = load_kb(kb_path);
    CoreProfile profile = irredundant_core(kb);
    CoreFiltration filt = delta_core_filtration(kb);
    Distribution uniform = uniform_distribution(kb.facts.size());
    RateDelayProfile rd = rate_delay_profile(profile, filt, uniform);
    std::ofstream file;
    std::ostream& os = out_stream(file, out_path);
    os << "delta,atom_delta_size,p_delta,rate_bits,marginal_bits\n";
    for (std::size_t d = 0; d < rd.rates_by_delta.size(); ++d)
        os << d << ',' << rd.filtration_sizes[d] << ',' << rd.p_delta[d] << ','
           << rd.rates_by_delta[d] << ',' << (d == 0 ? 0.0 : rd.marginal[d - 1]) << "\n";
    return 0;
}

int cmd_overlap(const std::string& sender_path, const std::string& receiver_path) {
    auto [sender, receiver] = load_pair(sender_path, receiver_path);
    OverlapDecomposition dec = overlap_decompose(sender, receiver);
    FeasibilityVerdict v = fidelity_diagnosis(sender, receiver);
    auto print_set = [&](const char* name, const FactSet& s) {
        std::cout << name << " (" << s.size() << ")";
        for (const auto& a : s) std::cout << ' ' << sender.program->render(a);
        std::cout << "\n";
    };
    print_set("common", dec.common);
    print_set("lost", dec.lost);
    print_set("surplus", dec.surplus);
    print_set("core_preserved", dec.core_preserved);
    print_set("core_lost", dec.core_lost);
    print_set("surplus_derivable", dec.surplus_derivable);
    print_set("surplus_nonderivable", dec.surplus_nonderivable);
    std::cout << "f1_weak " << (v.f1_weak ? "pass" : "fail") << "\n"
              << "f1_strong " << (v.f1_strong ? "pass" : "fail") << "\n"
              << "f2 " << (v.f2 ? "pass" : "fail") << "\n"
              << "closure_fidelity " << v.closure_fidelity.numerator() << "/"
              << v.closure_fidelity.denominator() << "\n";
    return 0;
}

int cmd_broadcast(const std::string& sender_path, const std::vector<std::string>& receiver_paths,
                  int q, double p) {
    KnowledgeBase sender = load_kb(sender_path);
    // align all receivers onto one shared program
    std::vector<FactSet> receivers;
    KnowledgeBase aligned = sender;
    for (const auto& path : receiver_paths) {
        ParsedProgram rec = parse_program(slurp(path));
        auto [s2, r] = align_receiver(aligned, rec);
        // re-align any previously imported receivers onto the new program
        std::vector<FactSet> rebased;
        for (const auto& old : receivers) {
            std::vector<GroundAtom> atoms(old.begin(), old.end());
            rebased.emplace_back(s2.program, std::move(atoms));
        }
        receivers = std::move(rebased);
        receivers.push_back(r);
        aligned = s2;
    }
    double c = capacity_ba(qsc_kernel(q, p), 1e-12).bits;
    BroadcastReport rep = broadcast_diagnose(aligned, receivers, c);
    for (std::size_t i = 0; i < rep.per_receiver.size(); ++i) {
        const auto& v = rep.per_receiver[i];
        std::cout << "receiver " << receiver_paths[i] << " f1_weak "
                  << (v.f1_weak ? "pass" : "fail") << " f1_strong "
                  << (v.f1_strong ? "pass" : "fail") << " f2 " << (v.f2 ? "pass" : "fail")
                  << "\n";
    }
    std::cout << "bottlenecks " << rep.bottlenecks.size() << "\n"
              << "all_compliant " << (rep.all_compliant ? "yes" : "no") << "\n"
              << "blocklength " << rep.blocklength << "\n"
              << "blocklength_ceil " << rep.blocklength_ceil << "\n";
    return 0;
}

int cmd_simulate(const std::string& sender_path, const std::string& receiver_path, int q,
                 double p, int n, std::size_t trials, std::uint64_t seed) {
    auto [sender, receiver] = load_pair(sender_path, receiver_path);
    CodeTrialStats stats = two_layer_simulate(sender, receiver, qsc_kernel(q, p), n, trials, seed);
    std::cout << "trials " << stats.trials << "\n"
              << "core_error " << stats.core_error.rate << " +/- " << stats.core_error.half_width
              << "\n"
              << "closure_error " << stats.closure_error.rate << " +/- "
              << stats.closure_error.half_width << "\n"
              << "hamming_error " << stats.hamming_error.rate << " +/- "
              << stats.hamming_error.half_width << "\n"
              << "per_trial_dominance " << (stats.per_trial_dominance ? "yes" : "no") << "\n";
    return 0;
}

ScenarioConfig config_from_json(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(slurp(path));
    ScenarioConfig cfg;
    if (j.contains("selector")) cfg.selector = j["selector"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("max_locations")) cfg.max_locations = j["max_locations"].get<std::size_t>();
    if (j.contains("overlap_locations"))
        cfg.overlap_locations = j["overlap_locations"].get<std::size_t>();
    if (j.contains("agents")) cfg.agents = j["agents"].get<std::size_t>();
    if (j.contains("retention")) cfg.retention = j["retention"].get<double>();
    if (j.contains("fidelity_locations"))
        cfg.fidelity_locations = j["fidelity_locations"].get<std::size_t>();
    if (j.contains("rate_grid")) cfg.rate_grid = j["rate_grid"].get<std::vector<double>>();
    if (j.contains("mu_grid")) cfg.mu_grid = j["mu_grid"].get<std::vector<double>>();
    if (j.contains("fixed_core")) cfg.fixed_core = j["fixed_core"].get<std::size_t>();
    if (j.contains("fixed_closure")) cfg.fixed_closure = j["fixed_closure"].get<std::size_t>();
    if (j.contains("channel_q")) cfg.channel_q = j["channel_q"].get<int>();
    if (j.contains("channel_p")) cfg.channel_p = j["channel_p"].get<double>();
    if (j.contains("scale_configs")) {
        cfg.scale_configs.clear();
        for (const auto& row : j["scale_configs"])
            cfg.scale_configs.emplace_back(row[0].get<std::size_t>(), row[1].get<double>());
    }
    return cfg;
}

int cmd_experiment(const std::string& selector, const std::string& config_path,
                   const std::string& out_path) {
    ScenarioConfig cfg;
    if (!config_path.empty()) cfg = config_from_json(config_path);
    cfg.selector = selector;
    ExperimentResult res = run_experiment(cfg);
    if (out_path.empty())
        res.write_csv(std::cout);
    else
        res.write_csv_file(out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-base channel and rate-distortion analysis"};
    app.require_subcommand(1);

    std::string kb_path, sender_path, receiver_path, out_path, kind = "closure";
    std::string grid_csv = "0", selector, config_path;
    std::vector<std::string> receiver_paths;
    int q = 10, n = 4, delta = 0;
    double p = 0.1, tol = 1e-9;
    std::size_t trials = 100000;
    std::uint64_t seed = 7;
    bool no_channel = false;

    auto* core = app.add_subcommand("core", "Irredundant core and delta-filtration of a KB");
    core->add_option("kb", kb_path, "knowledge base (.dl)")->required();

    auto* dist = app.add_subcommand("distortion", "Pairwise distortion matrix over stored facts");
    dist->add_option("kb", kb_path)->required();
    dist->add_option("--kind", kind, "hamming|closure|depth|delta");
    dist->add_option("--delta", delta, "round budget for --kind delta");
    dist->add_option("--out", out_path, "output CSV (default stdout)");

    auto* cap = app.add_subcommand("capacity", "Symmetric-channel capacity via Blahut-Arimoto");
    cap->add_option("--q", q, "alphabet size");
    cap->add_option("--p", p, "symbol error probability");
    cap->add_option("--tol", tol, "convergence tolerance");

    auto* inv = app.add_subcommand("invariants", "Invariant families I-VI for a sender/receiver pair");
    inv->add_option("sender", sender_path)->required();
    inv->add_option("receiver", receiver_path)->required();
    inv->add_option("--q", q);
    inv->add_option("--p", p);
    inv->add_flag("--no-channel", no_channel, "families I, II, V only");

    auto* rd = app.add_subcommand("rd", "Rate-distortion curve under a uniform source");
    rd->add_option("kb", kb_path)->required();
    rd->add_option("--distortion", kind, "hamming|closure|depth");
    rd->add_option("--grid", grid_csv, "comma-separated distortion targets")->required();
    rd->add_option("--tol", tol);
    rd->add_option("--out", out_path);

    auto* rdelay = app.add_subcommand("rate-delay", "Zero-distortion rate-delay profile");
    rdelay->add_option("kb", kb_path)->required();
    std::string source_kind = "uniform";
    rdelay->add_option("--source", source_kind, "uniform (only supported kind)");
    rdelay->add_option("--out", out_path);

    auto* ovl = app.add_subcommand("overlap", "Overlap decomposition and feasibility verdicts");
    ovl->add_option("sender", sender_path)->required();
    ovl->add_option("receiver", receiver_path)->required();

    auto* bc = app.add_subcommand("broadcast", "Broadcast bottleneck diagnosis");
    bc->add_option("sender", sender_path)->required();
    bc->add_option("receivers", receiver_paths, "receiver KBs")->required();
    bc->add_option("--q", q);
    bc->add_option("--p", p);

    auto* sim = app.add_subcommand("simulate", "Two-layer code Monte-Carlo");
    sim->add_option("--sender", sender_path)->required();
    sim->add_option("--receiver", receiver_path)->required();
    sim->add_option("--q", q);
    sim->add_option("--p", p);
    sim->add_option("--n", n, "blocklength");
    sim->add_option("--trials", trials);
    sim->add_option("--seed", seed);

    auto* exp = app.add_subcommand("experiment", "Medium-scale experiments, CSV output");
    exp->add_option("selector", selector,
                    "amplification|overlap|fidelity|compression|smallinstance")
        ->required();
    exp->add_option("--config", config_path, "scenario JSON");
    exp->add_option("--out", out_path, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (core->parsed()) return cmd_core(kb_path);
        if (dist->parsed()) return cmd_distortion(kb_path, kind, delta, out_path);
        if (cap->parsed()) return cmd_capacity(q, p, tol);
        if (inv->parsed()) return cmd_invariants(sender_path, receiver_path, q, p, no_channel);
        if (rd->parsed()) return cmd_rd(kb_path, kind, grid_csv, tol, out_path);
        if (rdelay->parsed()) {
            if (source_kind != "uniform")
                throw SemrdError(SemrdError::Kind::Config, "unsupported source kind: " + source_kind);
            return cmd_rate_delay(kb_path, out_path);
        }
        if (ovl->parsed()) return cmd_overlap(sender_path, receiver_path);
        if (bc->parsed()) return cmd_broadcast(sender_path, receiver_paths, q, p);
        if (sim->parsed()) return cmd_simulate(sender_path, receiver_path, q, p, n, trials, seed);
        if (exp->parsed()) return cmd_experiment(selector, config_path, out_path);
    } catch (const SemrdError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
