/***************************************************************
 *  harness.hpp
 *
 *  Scenario plumbing: the supply-chain rule set and random
 *  instance generator, shortcut materialization, the medium-scale
 *  experiments (amplification, overlap, fidelity, compression,
 *  small-instance tables), and CSV emission.
 ***************************************************************/

#ifndef SEMRD_HARNESS_HPP
#define SEMRD_HARNESS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "semrd/channel.hpp"
#include "semrd/core.hpp"
#include "semrd/datalog.hpp"
#include "semrd/distortion.hpp"
#include "semrd/multiagent.hpp"
#include "semrd/ratedist.hpp"
#include "semrd/rng.hpp"

namespace semrd {

/*-----------------------------------------------------------
 * Supply-chain generator
 *---------------------------------------------------------*/
struct SupplyChainSpec {
    std::size_t locations = 0;
    double edge_probability = 0.0;
    double materialization_fraction = 0.0; // mu, applied by materialize_shortcuts

    void validate() const {
        if (edge_probability < 0.0 || edge_probability > 1.0)
            throw SemrdError(SemrdError::Kind::Config, "edge probability must be in [0,1]");
        if (materialization_fraction < 0.0 || materialization_fraction > 1.0)
            throw SemrdError(SemrdError::Kind::Config, "materialization fraction must be in [0,1]");
    }
};

inline const char* supply_chain_rules() {
    return "reachable(X,Y) :- connected(X,Y).\n"
           "reachable(X,Z) :- reachable(X,Y), connected(Y,Z).\n"
           "available(I,L) :- produces(S,I), supplies(S,L).\n"
           "available(I,L) :- produces(S,I), supplies(S,L0), reachable(L0,L).\n";
}

/// Random supply-chain base: directed location graph with iid edges,
/// suppliers = ceil(V/10) each producing 1-3 items (of ceil(V/5))
/// and supplying 1-3 locations.  Deterministic per (spec, seed).
inline KnowledgeBase generate_supply_chain(const SupplyChainSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::ostringstream text;
    text << supply_chain_rules();
    const std::size_t v = spec.locations;
    if (v > 0) {
        const std::size_t suppliers = (v + 9) / 10;
        const std::size_t items = (v + 4) / 5;
        Rng edge_rng(seed, 1), sup_rng(seed, 2);
        for (std::size_t i = 0; i < v; ++i)
            for (std::size_t j = 0; j < v; ++j) {
                if (i == j) continue;
                if (edge_rng.bernoulli(spec.edge_probability))
                    text << "connected(loc" << i << ",loc" << j << ").\n";
            }
        for (std::size_t s = 0; s < suppliers; ++s) {
            std::size_t n_items = 1 + sup_rng.below(3);
            auto produced = sup_rng.sample_without_replacement(items, std::min(n_items, items));
            for (std::size_t it : produced) text << "produces(sup" << s << ",item" << it << ").\n";
            std::size_t n_locs = 1 + sup_rng.below(3);
            auto served = sup_rng.sample_without_replacement(v, std::min(n_locs, v));
            for (std::size_t l : served) text << "supplies(sup" << s << ",loc" << l << ").\n";
        }
    }
    return make_kb(parse_program(text.str()), "supply-chain");
}

/// Adds a uniform random subset of (closure \ base), of size
/// floor(mu * |closure \ base|), as stored facts.
inline KnowledgeBase materialize_shortcuts(const KnowledgeBase& kb, double mu,
                                           std::uint64_t seed) {
    if (mu < 0.0 || mu > 1.0)
        throw SemrdError(SemrdError::Kind::Config, "materialization fraction must be in [0,1]");
    FactSet cl = closure(kb.program, kb.facts).closure;
    FactSet derived = cl.subtracted(kb.facts);
    std::size_t take = static_cast<std::size_t>(mu * static_cast<double>(derived.size()));
    Rng rng(seed, 3);
    auto picked = rng.sample_without_replacement(derived.size(), take);
    std::vector<GroundAtom> extra;
    extra.reserve(take);
    for (std::size_t i : picked) extra.push_back(derived[i]);
    FactSet facts = kb.facts;
    for (const auto& a : extra) facts = facts.with_added(a);
    return KnowledgeBase{kb.program, std::move(facts), kb.label + "+materialized"};
}

/*-----------------------------------------------------------
 * Cross-file alignment
 *---------------------------------------------------------*/
/// Re-interns the receiver's facts into (a copy of) the sender's
/// symbol tables so the two fact sets live on one shared program.
/// The sender's rules govern all derivations, per the shared-rules
/// assumption.
inline std::pair<KnowledgeBase, FactSet> align_receiver(const KnowledgeBase& sender,
                                                        const ParsedProgram& receiver) {
    auto prog = std::make_shared<Program>(*sender.program);
    std::vector<GroundAtom> ratoms;
    ratoms.reserve(receiver.facts.size());
    for (const auto& a : receiver.facts) {
        const auto& pred = receiver.program->predicate(a.pred);
        GroundAtom g;
        g.pred = prog->intern_predicate(pred.name, pred.arity);
        for (auto c : a.args)
            g.args.push_back(prog->intern_constant(receiver.program->constant_name(c)));
        ratoms.push_back(std::move(g));
    }
    ProgramPtr shared = prog;
    std::vector<GroundAtom> satoms(sender.facts.begin(), sender.facts.end());
    KnowledgeBase aligned{shared, FactSet(shared, std::move(satoms)), sender.label};
    return {std::move(aligned), FactSet(shared, std::move(ratoms))};
}

/*-----------------------------------------------------------
 * Experiments
 *---------------------------------------------------------*/
struct ScenarioConfig {
    std::string selector; // amplification | overlap | fidelity | compression | smallinstance
    std::uint64_t seed = 1;
    // amplification
    std::vector<std::pair<std::size_t, double>> scale_configs = {
        {50, 0.060}, {200, 0.040}, {500, 0.020}, {1000, 0.012}, {2000, 0.006}};
    std::size_t max_locations = 500; // runtime cap; larger configs are skipped
    // overlap
    std::size_t overlap_locations = 300;
    std::size_t agents = 8;
    double retention = 0.4;
    double overlap_edge_probability = 0.030;
    // fidelity
    std::size_t fidelity_locations = 200;
    double fidelity_edge_probability = 0.040;
    std::vector<double> rate_grid = {0.25, 0.50, 0.75, 1.00};
    // compression (fixed printed cardinalities by default)
    std::size_t fixed_core = 1705;
    std::size_t fixed_closure = 45105;
    std::vector<double> mu_grid = {0.0, 0.10, 0.20, 0.30, 0.50, 0.80, 1.00};
    // channel for the small-instance tables
    int channel_q = 10;
    double channel_p = 0.1;
};

struct ExperimentResult {
    std::string selector;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void write_csv(std::ostream& os) const {
        os << "# selector=" << selector << " seed=" << seed << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << columns[i];
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << row[i];
            os << "\n";
        }
    }

    void write_csv_file(const std::string& path) const {
        std::ofstream os(path);
        if (!os)
            throw SemrdError(SemrdError::Kind::Config, "cannot open output file: " + path);
        write_csv(os);
    }
};

namespace detail {

inline double exact_jaccard(const FactSet& a, const FactSet& b) {
    std::size_t inter = a.intersected(b).size();
    std::size_t uni = a.unioned(b).size();
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline ExperimentResult experiment_amplification(const ScenarioConfig& cfg) {
    ExperimentResult res;
    res.columns = {"locations", "edge_p", "facts", "closure", "gamma_amp", "max_depth"};
    for (const auto& [v, p] : cfg.scale_configs) {
        if (v > cfg.max_locations) continue;
        KnowledgeBase kb = generate_supply_chain({v, p, 0.0}, cfg.seed);
        ClosureResult cl = closure(kb.program, kb.facts);
        double gamma = kb.facts.empty()
                           ? 1.0
                           : static_cast<double>(cl.closure.size()) /
                                 static_cast<double>(kb.facts.size());
        res.rows.push_back({static_cast<double>(v), p, static_cast<double>(kb.facts.size()),
                            static_cast<double>(cl.closure.size()), gamma,
                            static_cast<double>(cl.stabilization_round)});
    }
    return res;
}

inline ExperimentResult experiment_overlap(const ScenarioConfig& cfg) {
    ExperimentResult res;
    res.columns = {"agent_i", "agent_j", "omega_syn", "omega_sem", "synergy_fraction"};
    KnowledgeBase kb =
        generate_supply_chain({cfg.overlap_locations, cfg.overlap_edge_probability, 0.0},
                              cfg.seed);
    Rng rng(cfg.seed, 10);
    std::vector<FactSet> bases;
    std::vector<FactSet> closures;
    for (std::size_t a = 0; a < cfg.agents; ++a) {
        std::vector<GroundAtom> kept;
        for (const auto& f : kb.facts)
            if (rng.bernoulli(cfg.retention)) kept.push_back(f);
        FactSet base(kb.program, std::move(kept));
        closures.push_back(closure(kb.program, base).closure);
        bases.push_back(std::move(base));
    }
    for (std::size_t i = 0; i < cfg.agents; ++i)
        for (std::size_t j = i + 1; j < cfg.agents; ++j) {
            double syn = exact_jaccard(bases[i], bases[j]);
            double sem = exact_jaccard(closures[i], closures[j]);
            FactSet combined_cl = closure(kb.program, bases[i].unioned(bases[j])).closure;
            std::size_t union_cl = closures[i].unioned(closures[j]).size();
            double synergy =
                combined_cl.empty()
                    ? 0.0
                    : static_cast<double>(combined_cl.size() - union_cl) /
                          static_cast<double>(combined_cl.size());
            res.rows.push_back({static_cast<double>(i), static_cast<double>(j), syn, sem,
                                synergy});
        }
    return res;
}

inline ExperimentResult experiment_fidelity(const ScenarioConfig& cfg) {
    ExperimentResult res;
    res.columns = {"rate", "phi_random", "phi_connectivity_first"};
    KnowledgeBase kb =
        generate_supply_chain({cfg.fidelity_locations, cfg.fidelity_edge_probability, 0.0},
                              cfg.seed);
    FactSet full_cl = closure(kb.program, kb.facts).closure;
    const double cl_size = static_cast<double>(full_cl.size());

    // one fixed random permutation of the base; prefixes give nested subsets
    Rng rng(cfg.seed, 11);
    std::vector<std::size_t> random_order(kb.facts.size());
    for (std::size_t i = 0; i < random_order.size(); ++i) random_order[i] = i;
    for (std::size_t i = random_order.size(); i > 1; --i)
        std::swap(random_order[i - 1], random_order[rng.below(i)]);

    // connectivity-first: all connected/3 edges first (graph structure),
    // then supplier facts, each group in canonical order
    std::vector<std::size_t> conn_order;
    auto conn_pred = kb.program->find_predicate("connected");
    for (std::size_t i = 0; i < kb.facts.size(); ++i)
        if (conn_pred && kb.facts[i].pred == *conn_pred) conn_order.push_back(i);
    for (std::size_t i = 0; i < kb.facts.size(); ++i)
        if (!conn_pred || kb.facts[i].pred != *conn_pred) conn_order.push_back(i);

    auto phi_at = [&](const std::vector<std::size_t>& order, double rate) {
        std::size_t take =
            static_cast<std::size_t>(rate * static_cast<double>(kb.facts.size()));
        std::vector<GroundAtom> sub;
        sub.reserve(take);
        for (std::size_t i = 0; i < take; ++i) sub.push_back(kb.facts[order[i]]);
        FactSet sub_cl = closure(kb.program, FactSet(kb.program, std::move(sub))).closure;
        return cl_size == 0.0 ? 1.0 : static_cast<double>(sub_cl.size()) / cl_size;
    };

    for (double r : cfg.rate_grid)
        res.rows.push_back({r, phi_at(random_order, r), phi_at(conn_order, r)});
    return res;
}

inline ExperimentResult experiment_compression(const ScenarioConfig& cfg) {
    ExperimentResult res;
    res.columns = {"mu", "shortcuts", "stored", "rho_comp", "rho_ent", "lambda_1"};
    const double k = static_cast<double>(cfg.fixed_core);
    const double derived = static_cast<double>(cfg.fixed_closure - cfg.fixed_core);
    for (double mu : cfg.mu_grid) {
        double j = std::floor(mu * derived);
        double n = k + j;
        double rho_comp = std::log2(k) / std::log2(n);
        double rho_ent = (k * std::log2(k)) / (n * std::log2(n));
        res.rows.push_back({mu, j, n, rho_comp, rho_ent, 1.0 / rho_comp});
    }
    return res;
}

} // namespace detail

/// The pinned four-node path example: sender and the three receivers.
inline const char* path_example_sender() {
    return "Path(X,Y) :- Edge(X,Y).\n"
           "Path(X,Z) :- Edge(X,Y), Path(Y,Z).\n"
           "Edge(a,b). Edge(a,c). Edge(b,c). Edge(c,d).\n"
           "Path(a,b). Path(b,c). Path(c,d). Path(b,d).\n";
}

inline const char* path_example_receiver2() {
    return "Path(X,Y) :- Edge(X,Y).\n"
           "Path(X,Z) :- Edge(X,Y), Path(Y,Z).\n"
           "Edge(a,b). Edge(b,c). Edge(c,d). Edge(d,a).\n"
           "Path(a,b). Path(b,c). Path(c,d). Path(b,d).\n";
}

inline const char* path_example_receiver2p() { return path_example_sender(); }

inline const char* path_example_receiver3() {
    return "Path(X,Y) :- Edge(X,Y).\n"
           "Path(X,Z) :- Edge(X,Y), Path(Y,Z).\n"
           "Edge(a,b). Edge(a,c). Edge(b,c). Edge(c,d).\n"
           "Path(a,d). Path(b,d).\n";
}

namespace detail {

inline ExperimentResult experiment_smallinstance(const ScenarioConfig& cfg) {
    ExperimentResult res;
    res.columns = {"row", "value"};
    auto sender = make_kb(parse_program(path_example_sender()), "sender");
    // receivers share the sender's program so sets are comparable
    auto atoms_of = [&](const char* text) {
        ParsedProgram p = parse_program(text);
        std::vector<GroundAtom> atoms;
        for (const auto& a : p.facts)
            atoms.push_back(parse_atom(*sender.program, p.program->render(a)));
        return FactSet(sender.program, std::move(atoms));
    };
    FactSet r2 = atoms_of(path_example_receiver2());
    FactSet r2p = atoms_of(path_example_receiver2p());
    FactSet r3 = atoms_of(path_example_receiver3());

    CoreProfile profile = irredundant_core(sender);
    SetFidelity f12 = set_fidelity(sender, r2);
    SetFidelity f12p = set_fidelity(sender, r2p);
    SetFidelity f13 = set_fidelity(sender, r3);

    double c = capacity_ba(qsc_kernel(cfg.channel_q, cfg.channel_p), 1e-12).bits;
    BlocklengthBounds bl =
        blocklength_bounds(profile.atomicity, sender.facts.size(), c, 0.0);

    res.rows = {
        {0, static_cast<double>(profile.atomicity)},       // atomicity
        {1, static_cast<double>(profile.max_depth)},       // depth radius
        {2, to_double(f12.core_preservation)},             // rho_Atom(1,2)
        {3, to_double(f12.closure_fidelity)},              // F_Cn(1,2)
        {4, to_double(f12p.closure_fidelity)},             // F_Cn(1,2')
        {5, to_double(f13.closure_fidelity)},              // F_Cn(1,3)
        {6, c},                                            // C(W)
        {7, bl.n_star_full},                               // n*_H
        {8, bl.n_star_closure},                            // n*_Cn
        {9, bl.ratio},                                     // log|A|/log|S_O|
    };
    return res;
}

} // namespace detail

inline ExperimentResult run_experiment(const ScenarioConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    ExperimentResult res;
    if (cfg.selector == "amplification")
        res = detail::experiment_amplification(cfg);
    else if (cfg.selector == "overlap")
        res = detail::experiment_overlap(cfg);
    else if (cfg.selector == "fidelity")
        res = detail::experiment_fidelity(cfg);
    else if (cfg.selector == "compression")
        res = detail::experiment_compression(cfg);
    else if (cfg.selector == "smallinstance")
        res = detail::experiment_smallinstance(cfg);
    else
        throw SemrdError(SemrdError::Kind::Config, "unknown experiment selector: " + cfg.selector);
    res.selector = cfg.selector;
    res.seed = cfg.seed;
    res.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

} // namespace semrd

#endif // SEMRD_HARNESS_HPP
