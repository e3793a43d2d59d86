/***************************************************************
 *  multiagent.hpp
 *
 *  Heterogeneous sender/receiver analysis: overlap decomposition,
 *  feasibility diagnosis, the six invariant families, minimum
 *  receiver vocabulary, broadcast bottleneck diagnosis, and a
 *  Monte-Carlo simulator for the two-layer (core code + redundant
 *  extension) coding scheme.
 ***************************************************************/

#ifndef SEMRD_MULTIAGENT_HPP
#define SEMRD_MULTIAGENT_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "semrd/channel.hpp"
#include "semrd/core.hpp"
#include "semrd/datalog.hpp"
#include "semrd/distortion.hpp"
#include "semrd/rng.hpp"

namespace semrd {

/*-----------------------------------------------------------
 * Overlap decomposition
 *---------------------------------------------------------*/
struct OverlapDecomposition {
    FactSet common;               // S ∩ R
    FactSet lost;                 // S \ R
    FactSet surplus;              // R \ S
    FactSet core_preserved;       // A ∩ R
    FactSet core_lost;            // A \ R
    FactSet surplus_derivable;    // surplus ∩ Cn(S)
    FactSet surplus_nonderivable; // surplus \ Cn(S)
};

inline OverlapDecomposition overlap_decompose(const KnowledgeBase& sender,
                                              const FactSet& receiver) {
    const FactSet& s = sender.facts;
    OverlapDecomposition out;
    out.common = s.intersected(receiver);
    out.lost = s.subtracted(receiver);
    out.surplus = receiver.subtracted(s);
    CoreProfile profile = irredundant_core(sender);
    out.core_preserved = profile.core.intersected(receiver);
    out.core_lost = profile.core.subtracted(receiver);
    FactSet sender_closure = closure(sender.program, s).closure;
    out.surplus_derivable = out.surplus.intersected(sender_closure);
    out.surplus_nonderivable = out.surplus.subtracted(sender_closure);
    return out;
}

/*-----------------------------------------------------------
 * Feasibility diagnosis
 *---------------------------------------------------------*/
struct FeasibilityVerdict {
    bool f1_weak = false;   // sender core derivable from the receiver's base
    bool f1_strong = false; // sender core stored by the receiver (H1)
    bool f2 = false;        // no non-derivable surplus
    Rational closure_fidelity{0};
};

inline FeasibilityVerdict fidelity_diagnosis(const KnowledgeBase& sender,
                                             const FactSet& receiver) {
    FeasibilityVerdict v;
    CoreProfile profile = irredundant_core(sender);
    FactSet receiver_closure = closure(sender.program, receiver).closure;
    v.f1_weak = profile.core.is_subset_of(receiver_closure);
    v.f1_strong = profile.core.is_subset_of(receiver);
    OverlapDecomposition dec = overlap_decompose(sender, receiver);
    v.f2 = dec.surplus_nonderivable.empty();
    v.closure_fidelity = set_fidelity(sender, receiver).closure_fidelity;
    return v;
}

/*-----------------------------------------------------------
 * Invariant report (families I - VI)
 *---------------------------------------------------------*/
struct ChannelContext {
    Kernel enc; // sender facts -> carrier inputs
    Kernel w;   // carrier
};

struct InvariantReport {
    // family I: sender structure
    std::size_t atomicity = 0;
    int max_depth = 0;
    // family II: set-level fidelity
    Rational rho_atom{0}; // core preservation
    Rational f_cn{0};     // closure fidelity
    // family V: receiver structure shifts
    long long delta_atomicity = 0;
    int delta_max_depth = 0;
    // families III/IV/VI (absent without a channel context)
    std::optional<NoisePairIndices> noise;      // family III
    std::optional<QualityIndices> quality;      // family IV
    std::optional<double> i_sem;                // family VI
    std::optional<double> c_sem_estimate;       // family VI
    std::optional<double> carrier_capacity;     // family VI
};

inline InvariantReport invariant_report(const KnowledgeBase& sender, const FactSet& receiver,
                                        const std::optional<ChannelContext>& ctx = std::nullopt,
                                        double tol = 1e-9) {
    InvariantReport rep;
    CoreProfile sender_profile = irredundant_core(sender);
    rep.atomicity = sender_profile.atomicity;
    rep.max_depth = sender_profile.max_depth;

    SetFidelity fid = set_fidelity(sender, receiver);
    rep.rho_atom = fid.core_preservation;
    rep.f_cn = fid.closure_fidelity;

    KnowledgeBase receiver_kb{sender.program, receiver, "receiver"};
    CoreProfile receiver_profile = irredundant_core(receiver_kb);
    rep.delta_atomicity = static_cast<long long>(receiver_profile.atomicity) -
                          static_cast<long long>(sender_profile.atomicity);
    // depth shift: worst receiver-fact depth from the receiver's core,
    // relative to the sender's depth radius
    rep.delta_max_depth = receiver_profile.max_depth - sender_profile.max_depth;

    if (ctx) {
        Kernel dec = pinned_decoder(sender.facts, receiver, ctx->w.outputs());
        Kernel k_sem = end_to_end(ctx->enc, ctx->w, dec);
        ChannelInvariants inv = channel_invariants(sender, receiver, k_sem);
        rep.noise = inv.noise;
        rep.quality = inv.quality;
        Distribution uniform = uniform_distribution(sender.facts.size());
        rep.i_sem = mutual_information(uniform, k_sem);
        rep.c_sem_estimate =
            semantic_capacity_estimate(sender, receiver, ctx->enc, ctx->w, tol).bits;
        rep.carrier_capacity = capacity_ba(ctx->w, tol).bits;
    }
    return rep;
}

/*-----------------------------------------------------------
 * Minimum vocabulary
 *---------------------------------------------------------*/
/// The smallest receiver base that preserves closure fidelity 1 with
/// the strong storage condition: the sender's irredundant core.
inline FactSet min_vocabulary(const KnowledgeBase& sender) {
    return irredundant_core(sender).core;
}

/*-----------------------------------------------------------
 * Broadcast diagnosis
 *---------------------------------------------------------*/
struct BroadcastReport {
    std::vector<FeasibilityVerdict> per_receiver;
    std::vector<std::size_t> bottlenecks; // indices of receivers failing weak core coverage
    bool all_compliant = false;
    double blocklength = 0.0;     // log2|A| / capacity, meaningful when all compliant
    int blocklength_ceil = 0;
};

inline BroadcastReport broadcast_diagnose(const KnowledgeBase& sender,
                                          const std::vector<FactSet>& receivers,
                                          double capacity) {
    if (capacity <= 0.0)
        throw SemrdError(SemrdError::Kind::Config, "broadcast_diagnose: capacity must be > 0");
    BroadcastReport rep;
    for (std::size_t i = 0; i < receivers.size(); ++i) {
        FeasibilityVerdict v = fidelity_diagnosis(sender, receivers[i]);
        if (!v.f1_weak) rep.bottlenecks.push_back(i);
        rep.per_receiver.push_back(std::move(v));
    }
    rep.all_compliant = rep.bottlenecks.empty();
    std::size_t core_size = irredundant_core(sender).atomicity;
    rep.blocklength = std::log2(static_cast<double>(std::max<std::size_t>(core_size, 1))) / capacity;
    rep.blocklength_ceil = static_cast<int>(std::ceil(rep.blocklength - 1e-12));
    if (rep.blocklength_ceil < 1 && core_size > 1) rep.blocklength_ceil = 1;
    return rep;
}

/*-----------------------------------------------------------
 * Two-layer code Monte-Carlo simulator
 *---------------------------------------------------------*/
struct RateEstimate {
    double rate = 0.0;
    double half_width = 0.0; // Wilson 95% interval half-width
};

struct CodeTrialStats {
    std::size_t trials = 0;
    RateEstimate core_error;
    RateEstimate closure_error;
    RateEstimate hamming_error;
    bool per_trial_dominance = true; // closure error implies core error, every trial
};

namespace detail {

inline RateEstimate wilson_estimate(std::size_t successes, std::size_t trials) {
    RateEstimate est;
    if (trials == 0) return est;
    const double z = 1.959963984540054; // 95%
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    est.rate = p;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    est.half_width = half;
    return est;
}

} // namespace detail

/// Random-codebook core code over n uses of w, maximum-likelihood
/// decoding with canonical tie-breaking; redundant messages ride on
/// the codeword of the canonical-first core element.  Deterministic
/// given (inputs, seed).
inline CodeTrialStats two_layer_simulate(const KnowledgeBase& sender, const FactSet& receiver,
                                         const Kernel& w, int n, std::size_t trials,
                                         std::uint64_t seed) {
    if (n < 1)
        throw SemrdError(SemrdError::Kind::Config, "two_layer_simulate: blocklength must be >= 1");
    if (trials < 1)
        throw SemrdError(SemrdError::Kind::Config, "two_layer_simulate: trials must be >= 1");
    w.validate();
    CoreProfile profile = irredundant_core(sender);
    if (!profile.core.is_subset_of(receiver))
        throw SemrdError(SemrdError::Kind::Config,
                         "two_layer_simulate: receiver must store the sender's core");

    const std::size_t m_count = profile.core.size();
    const std::size_t q_in = w.inputs();

    // BA-optimal input law for the carrier.
    CapacityResult cap = capacity_ba(w, 1e-9);
    const std::vector<double>& p_star = cap.optimal_input;

    // Codebook: one length-n codeword per core element, iid from the
    // BA-optimal law, redrawn on collision so codewords are distinct
    // (needed for exact zero-error behaviour on a noiseless carrier).
    Rng book_rng(seed, 0);
    std::vector<std::vector<std::size_t>> codebook;
    codebook.reserve(m_count);
    while (codebook.size() < m_count) {
        std::vector<std::size_t> cw(static_cast<std::size_t>(n));
        for (auto& sym : cw) sym = book_rng.categorical(p_star);
        bool dup = false;
        for (const auto& prev : codebook)
            if (prev == cw) { dup = true; break; }
        if (!dup) codebook.push_back(std::move(cw));
        if (q_in == 1 && m_count > 1)
            throw SemrdError(SemrdError::Kind::Config,
                             "two_layer_simulate: carrier too small for distinct codewords");
    }

    // Message map: fact index -> codeword index; redundant facts use
    // the canonical-first core element's codeword.
    const FactSet& facts = sender.facts;
    std::vector<std::size_t> msg_codeword(facts.size(), 0);
    std::vector<std::size_t> msg_intended(facts.size(), 0); // intended core index
    for (std::size_t i = 0; i < facts.size(); ++i) {
        bool in_core = false;
        for (std::size_t a = 0; a < m_count; ++a)
            if (profile.core[a] == facts[i]) {
                msg_codeword[i] = a;
                msg_intended[i] = a;
                in_core = true;
                break;
            }
        if (!in_core) {
            msg_codeword[i] = 0;
            msg_intended[i] = 0;
        }
    }

    // Closure-error table: is d_Cn(fact, decoded core element | S_O) nonzero?
    DistortionEvaluator eval(DistortionSpec::closure(sender));
    std::vector<std::vector<bool>> closure_err(facts.size(), std::vector<bool>(m_count, false));
    for (std::size_t i = 0; i < facts.size(); ++i)
        for (std::size_t a = 0; a < m_count; ++a)
            closure_err[i][a] = eval.closure_distortion(facts[i], profile.core[a]) != Rational(0);

    CodeTrialStats stats;
    stats.trials = trials;
    std::size_t core_errs = 0, closure_errs = 0, hamming_errs = 0;

    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed, t + 1);
        std::size_t msg = rng.below(facts.size());
        const auto& cw = codebook[msg_codeword[msg]];

        // transmit
        std::vector<std::size_t> received(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            received[static_cast<std::size_t>(i)] =
                rng.categorical(w.matrix[cw[static_cast<std::size_t>(i)]]);

        // ML decode (log-likelihood sums; ties to the canonical-least codeword)
        std::size_t best = 0;
        double best_ll = -1e300;
        for (std::size_t m = 0; m < m_count; ++m) {
            double ll = 0.0;
            for (int i = 0; i < n; ++i) {
                double v = w.matrix[codebook[m][static_cast<std::size_t>(i)]]
                                   [received[static_cast<std::size_t>(i)]];
                ll += (v > 0.0) ? std::log(v) : -1e9;
            }
            if (ll > best_ll + 1e-12) {
                best_ll = ll;
                best = m;
            }
        }

        bool core_err = (best != msg_intended[msg]);
        bool cl_err = closure_err[msg][best];
        bool ham_err = !(profile.core[best] == facts[msg]);
        if (cl_err && !core_err) stats.per_trial_dominance = false;
        core_errs += core_err;
        closure_errs += cl_err;
        hamming_errs += ham_err;
    }

    stats.core_error = detail::wilson_estimate(core_errs, trials);
    stats.closure_error = detail::wilson_estimate(closure_errs, trials);
    stats.hamming_error = detail::wilson_estimate(hamming_errs, trials);
    return stats;
}

} // namespace semrd

#endif // SEMRD_MULTIAGENT_HPP
