/***************************************************************
 *  channel.hpp
 *
 *  Finite-alphabet channel kernels and the information-theoretic
 *  toolkit: entropy, mutual information, Blahut-Arimoto channel
 *  capacity, end-to-end semantic channels, expected distortion,
 *  noise-pair / quality invariants, Fano-style converse bounds,
 *  and an experimental semantic-capacity estimate under a fixed
 *  identity-injection encoding and deterministic decoders.
 *
 *  Conventions: all rates are in bits (base-2 logs), 0*log 0 = 0,
 *  and rows of a kernel must sum to 1 within 1e-12.
 ***************************************************************/

#ifndef SEMRD_CHANNEL_HPP
#define SEMRD_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "semrd/core.hpp"
#include "semrd/datalog.hpp"
#include "semrd/distortion.hpp"

namespace semrd {

inline constexpr double kProbTolerance = 1e-12;

/*-----------------------------------------------------------
 * Kernels and distributions
 *---------------------------------------------------------*/
struct Kernel {
    std::vector<std::string> input_labels;  // may be empty (unlabeled)
    std::vector<std::string> output_labels; // may be empty (unlabeled)
    std::vector<std::vector<double>> matrix; // row-stochastic

    std::size_t inputs() const { return matrix.size(); }
    std::size_t outputs() const { return matrix.empty() ? 0 : matrix[0].size(); }

    void validate() const {
        for (const auto& row : matrix) {
            if (row.size() != outputs())
                throw SemrdError(SemrdError::Kind::Config, "ragged kernel matrix");
            double sum = 0.0;
            for (double v : row) {
                if (v < -kProbTolerance)
                    throw SemrdError(SemrdError::Kind::Config, "negative kernel entry");
                sum += v;
            }
            if (std::abs(sum - 1.0) > kProbTolerance)
                throw SemrdError(SemrdError::Kind::Config,
                                 "kernel row does not sum to 1 (got " + std::to_string(sum) + ")");
        }
    }
};

struct Distribution {
    std::vector<std::string> labels; // may be empty (unlabeled)
    std::vector<double> probabilities;

    std::size_t size() const { return probabilities.size(); }

    void validate() const {
        double sum = 0.0;
        for (double v : probabilities) {
            if (v < -kProbTolerance)
                throw SemrdError(SemrdError::Kind::Config, "negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            throw SemrdError(SemrdError::Kind::Config, "distribution does not sum to 1");
    }
};

inline Distribution uniform_distribution(std::size_t n, std::vector<std::string> labels = {}) {
    if (n == 0)
        throw SemrdError(SemrdError::Kind::Config, "empty distribution");
    Distribution d;
    d.labels = std::move(labels);
    d.probabilities.assign(n, 1.0 / static_cast<double>(n));
    return d;
}

/// q-ary symmetric channel: stays put with probability 1-p, otherwise
/// lands uniformly on one of the q-1 other symbols.
inline Kernel qsc_kernel(int q, double p) {
    if (q < 2)
        throw SemrdError(SemrdError::Kind::Config, "qsc requires q >= 2");
    if (p < 0.0 || p > 1.0)
        throw SemrdError(SemrdError::Kind::Config, "qsc requires 0 <= p <= 1");
    Kernel k;
    k.matrix.assign(static_cast<std::size_t>(q),
                    std::vector<double>(static_cast<std::size_t>(q), p / (q - 1)));
    for (int i = 0; i < q; ++i) k.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0 - p;
    for (int i = 0; i < q; ++i) {
        k.input_labels.push_back("c" + std::to_string(i));
        k.output_labels.push_back("c" + std::to_string(i));
    }
    return k;
}

inline Kernel identity_kernel(std::size_t n, std::vector<std::string> labels = {}) {
    Kernel k;
    k.matrix.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) k.matrix[i][i] = 1.0;
    k.input_labels = labels;
    k.output_labels = std::move(labels);
    return k;
}

/*-----------------------------------------------------------
 * Entropies and mutual information
 *---------------------------------------------------------*/
inline double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

inline double entropy_bits(const Distribution& d) { return entropy_bits(d.probabilities); }

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline std::vector<double> output_distribution(const std::vector<double>& p, const Kernel& k) {
    std::vector<double> q(k.outputs(), 0.0);
    for (std::size_t x = 0; x < k.inputs(); ++x) {
        if (p[x] <= 0.0) continue;
        for (std::size_t y = 0; y < k.outputs(); ++y) q[y] += p[x] * k.matrix[x][y];
    }
    return q;
}

inline double mutual_information(const Distribution& source, const Kernel& k) {
    if (source.size() != k.inputs())
        throw SemrdError(SemrdError::Kind::Config, "mutual_information: alphabet mismatch");
    std::vector<double> q = output_distribution(source.probabilities, k);
    double mi = 0.0;
    for (std::size_t x = 0; x < k.inputs(); ++x) {
        double px = source.probabilities[x];
        if (px <= 0.0) continue;
        for (std::size_t y = 0; y < k.outputs(); ++y) {
            double w = k.matrix[x][y];
            if (w > 0.0 && q[y] > 0.0) mi += px * w * std::log2(w / q[y]);
        }
    }
    return mi < 0.0 ? 0.0 : mi;
}

/*-----------------------------------------------------------
 * Blahut-Arimoto capacity
 *---------------------------------------------------------*/
struct CapacityResult {
    double bits = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> optimal_input;
    std::vector<double> lower_bound_trace; // per-iteration lower bounds (non-decreasing)
};

/// Capacity via alternating maximization.  Stops when the gap between
/// the per-iteration upper and lower capacity bounds drops below tol.
inline CapacityResult capacity_ba(const Kernel& k, double tol = 1e-9, int max_iters = 10000) {
    if (tol <= 0.0)
        throw SemrdError(SemrdError::Kind::Config, "capacity_ba: tol must be > 0");
    k.validate();
    const std::size_t n = k.inputs(), m = k.outputs();
    CapacityResult res;
    std::vector<double> p(n, 1.0 / static_cast<double>(n));
    std::vector<double> d(n, 0.0);
    for (int it = 1; it <= max_iters; ++it) {
        std::vector<double> q = output_distribution(p, k);
        double upper = -1e300;
        double lower = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            double dx = 0.0;
            for (std::size_t y = 0; y < m; ++y) {
                double w = k.matrix[x][y];
                if (w > 0.0 && q[y] > 0.0) dx += w * std::log2(w / q[y]);
            }
            d[x] = dx;
            if (dx > upper) upper = dx;
            lower += p[x] * dx;
        }
        res.iterations = it;
        res.lower_bound_trace.push_back(lower);
        if (upper - lower < tol) {
            res.bits = lower;
            res.converged = true;
            res.optimal_input = p;
            return res;
        }
        // p(x) <- p(x) * 2^D(x) / normalizer
        double norm = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            p[x] *= std::exp2(d[x]);
            norm += p[x];
        }
        for (std::size_t x = 0; x < n; ++x) p[x] /= norm;
        res.bits = lower;
        res.optimal_input = p;
    }
    res.converged = false;
    return res;
}

/*-----------------------------------------------------------
 * Composition and expected distortion
 *---------------------------------------------------------*/
inline Kernel compose(const Kernel& first, const Kernel& second) {
    if (first.outputs() != second.inputs())
        throw SemrdError(SemrdError::Kind::Config, "kernel composition: alphabet mismatch");
    Kernel out;
    out.input_labels = first.input_labels;
    out.output_labels = second.output_labels;
    out.matrix.assign(first.inputs(), std::vector<double>(second.outputs(), 0.0));
    for (std::size_t x = 0; x < first.inputs(); ++x)
        for (std::size_t y = 0; y < first.outputs(); ++y) {
            double v = first.matrix[x][y];
            if (v <= 0.0) continue;
            for (std::size_t z = 0; z < second.outputs(); ++z)
                out.matrix[x][z] += v * second.matrix[y][z];
        }
    return out;
}

/// End-to-end semantic kernel: decoder after carrier after encoder.
inline Kernel end_to_end(const Kernel& enc, const Kernel& w, const Kernel& dec) {
    return compose(compose(enc, w), dec);
}

struct ExpectedDistortion {
    double total = 0.0;
    std::vector<double> per_input;
};

inline ExpectedDistortion expected_distortion(const Distribution& source, const Kernel& k,
                                              const DistortionMatrix& d) {
    if (source.size() != k.inputs() || k.inputs() != d.entries.size() ||
        (k.inputs() > 0 && k.outputs() != d.entries[0].size()))
        throw SemrdError(SemrdError::Kind::Config, "expected_distortion: shape mismatch");
    ExpectedDistortion out;
    out.per_input.assign(k.inputs(), 0.0);
    for (std::size_t x = 0; x < k.inputs(); ++x) {
        double row = 0.0;
        for (std::size_t y = 0; y < k.outputs(); ++y) row += k.matrix[x][y] * d.entries[x][y];
        out.per_input[x] = row;
        out.total += source.probabilities[x] * row;
    }
    return out;
}

/*-----------------------------------------------------------
 * Identity-injection encoding and the pinned decoder
 *---------------------------------------------------------*/
/// Deterministic injection of n source states into the first n carrier
/// symbols (requires n <= carrier size).
inline Kernel identity_injection_encoder(std::size_t n_source, std::size_t carrier_size) {
    if (n_source > carrier_size)
        throw SemrdError(SemrdError::Kind::Config,
                         "identity-injection encoding needs at least as many carrier symbols "
                         "as source states");
    Kernel k;
    k.matrix.assign(n_source, std::vector<double>(carrier_size, 0.0));
    for (std::size_t i = 0; i < n_source; ++i) k.matrix[i][i] = 1.0;
    return k;
}

/// Deterministic decoder paired with the identity-injection encoding:
/// the image symbol of a sender fact maps to that fact when the
/// receiver stores it; every other carrier symbol (including the
/// unused ones) maps to the canonical-first reconstruction state.
inline Kernel pinned_decoder(const FactSet& sender_facts, const FactSet& recon,
                             std::size_t carrier_size) {
    if (recon.empty())
        throw SemrdError(SemrdError::Kind::Config, "pinned_decoder: empty reconstruction alphabet");
    Kernel k;
    k.matrix.assign(carrier_size, std::vector<double>(recon.size(), 0.0));
    for (std::size_t y = 0; y < carrier_size; ++y) {
        std::size_t target = 0; // canonical-first reconstruction state
        if (y < sender_facts.size()) {
            const GroundAtom& s = sender_facts[y];
            for (std::size_t r = 0; r < recon.size(); ++r)
                if (recon[r] == s) { target = r; break; }
        }
        k.matrix[y][target] = 1.0;
    }
    return k;
}

/*-----------------------------------------------------------
 * Noise-pair and quality invariants
 *---------------------------------------------------------*/
struct NoisePairIndices {
    double phi_atom = 0.0; // probabilistic core preservation
    double psi_plus = 0.0; // spurious (surplus-output) probability
};

struct QualityIndices {
    double fidelity_index = 0.0;  // 1 - worst per-input expected closure distortion
    double depth_expansion = 0.0; // worst per-input expected depth distortion
};

struct ChannelInvariants {
    NoisePairIndices noise;
    QualityIndices quality;
};

/// k_sem rows are indexed by kb.facts, columns by recon, both in
/// canonical order.
inline ChannelInvariants channel_invariants(const KnowledgeBase& kb, const FactSet& recon,
                                            const Kernel& k_sem) {
    if (k_sem.inputs() != kb.facts.size() || k_sem.outputs() != recon.size())
        throw SemrdError(SemrdError::Kind::Config, "channel_invariants: shape mismatch");
    ChannelInvariants out;

    CoreProfile profile = irredundant_core(kb);
    bool core_lost = false;
    double min_diag = 1.0;
    for (const auto& a : profile.core) {
        if (!recon.contains(a)) { core_lost = true; break; }
        // locate row and column of a
        std::size_t row = 0, col = 0;
        for (std::size_t i = 0; i < kb.facts.size(); ++i)
            if (kb.facts[i] == a) { row = i; break; }
        for (std::size_t j = 0; j < recon.size(); ++j)
            if (recon[j] == a) { col = j; break; }
        min_diag = std::min(min_diag, k_sem.matrix[row][col]);
    }
    out.noise.phi_atom = core_lost ? 0.0 : (profile.core.empty() ? 1.0 : min_diag);

    // Surplus columns: reconstruction states outside the sender's base.
    std::vector<std::size_t> surplus_cols;
    for (std::size_t j = 0; j < recon.size(); ++j)
        if (!kb.facts.contains(recon[j])) surplus_cols.push_back(j);
    double psi = 0.0;
    for (std::size_t x = 0; x < k_sem.inputs(); ++x) {
        double mass = 0.0;
        for (std::size_t j : surplus_cols) mass += k_sem.matrix[x][j];
        psi = std::max(psi, mass);
    }
    out.noise.psi_plus = psi;

    Distribution dummy = uniform_distribution(kb.facts.size());
    DistortionMatrix d_cn =
        DistortionEvaluator(DistortionSpec::closure(kb)).matrix(kb.facts, recon);
    DistortionMatrix d_dd =
        DistortionEvaluator(DistortionSpec::depth(kb)).matrix(kb.facts, recon);
    auto e_cn = expected_distortion(dummy, k_sem, d_cn);
    auto e_dd = expected_distortion(dummy, k_sem, d_dd);
    double worst_cn = 0.0, worst_dd = 0.0;
    for (double v : e_cn.per_input) worst_cn = std::max(worst_cn, v);
    for (double v : e_dd.per_input) worst_dd = std::max(worst_dd, v);
    out.quality.fidelity_index = 1.0 - worst_cn;
    out.quality.depth_expansion = worst_dd;
    return out;
}

/*-----------------------------------------------------------
 * Fano-style converse bounds
 *---------------------------------------------------------*/
struct FanoBounds {
    double classical_bits = 0.0;
    double semantic_bits = 0.0;
};

/// classical: H(P) - h(eps) - eps*log2(|S|-1)
/// semantic:  P_A H(pi_A) - h(eps_core) - eps_core*log2(|A|-1)
/// The log(|.|-1) terms are 0 when the respective alphabet has size 1.
inline FanoBounds fano_bounds(const Distribution& source, const std::vector<bool>& core_mask,
                              double eps, double eps_core) {
    if (core_mask.size() != source.size())
        throw SemrdError(SemrdError::Kind::Config, "fano_bounds: mask size mismatch");
    if (eps < 0 || eps > 1 || eps_core < 0 || eps_core > 1)
        throw SemrdError(SemrdError::Kind::Config, "fano_bounds: error rates must be in [0,1]");
    FanoBounds out;

    std::size_t n = source.size(), core_n = 0;
    double p_core = 0.0;
    std::vector<double> pi;
    for (std::size_t i = 0; i < n; ++i)
        if (core_mask[i]) {
            ++core_n;
            p_core += source.probabilities[i];
            pi.push_back(source.probabilities[i]);
        }
    if (p_core > 0.0)
        for (double& v : pi) v /= p_core;

    double log_s = (n > 1) ? std::log2(static_cast<double>(n - 1)) : 0.0;
    double log_a = (core_n > 1) ? std::log2(static_cast<double>(core_n - 1)) : 0.0;
    out.classical_bits = entropy_bits(source.probabilities) - binary_entropy(eps) - eps * log_s;
    out.semantic_bits = p_core * entropy_bits(pi) - binary_entropy(eps_core) - eps_core * log_a;
    return out;
}

/*-----------------------------------------------------------
 * Experimental semantic-capacity estimate
 *---------------------------------------------------------*/
struct SemanticCapacityEstimate {
    double bits = 0.0;
    Kernel decoder;      // deterministic carrier-output -> reconstruction map
    int alternations = 0;
    bool converged = false;
};

/// Alternating maximization over the source law (Blahut-Arimoto for a
/// fixed decoder) and over deterministic decoders (greedy per carrier
/// output, ties broken by canonical order of the reconstruction
/// alphabet).  The value is an estimate of the decoder-restricted
/// semantic capacity; it always satisfies the data-processing cap
/// (<= carrier capacity) and the output-entropy cap (<= log2 |recon|).
inline SemanticCapacityEstimate semantic_capacity_estimate(const KnowledgeBase& kb,
                                                           const FactSet& recon,
                                                           const Kernel& enc, const Kernel& w,
                                                           double tol = 1e-9,
                                                           int max_alternations = 100) {
    Kernel carrier = compose(enc, w); // facts -> carrier outputs
    SemanticCapacityEstimate est;
    est.decoder = pinned_decoder(kb.facts, recon, carrier.outputs());

    std::vector<std::size_t> assignment(carrier.outputs(), 0);
    for (std::size_t y = 0; y < carrier.outputs(); ++y)
        for (std::size_t r = 0; r < recon.size(); ++r)
            if (est.decoder.matrix[y][r] == 1.0) { assignment[y] = r; break; }

    auto mi_for = [&](const std::vector<double>& p, const std::vector<std::size_t>& assign) {
        // I(X; g(Y)) for deterministic column assignment.
        std::vector<std::vector<double>> joint(carrier.inputs(),
                                               std::vector<double>(recon.size(), 0.0));
        for (std::size_t x = 0; x < carrier.inputs(); ++x)
            for (std::size_t y = 0; y < carrier.outputs(); ++y)
                joint[x][assign[y]] += p[x] * carrier.matrix[x][y];
        std::vector<double> qr(recon.size(), 0.0);
        for (std::size_t x = 0; x < carrier.inputs(); ++x)
            for (std::size_t r = 0; r < recon.size(); ++r) qr[r] += joint[x][r];
        double mi = 0.0;
        for (std::size_t x = 0; x < carrier.inputs(); ++x) {
            double px = p[x];
            if (px <= 0.0) continue;
            for (std::size_t r = 0; r < recon.size(); ++r) {
                double j = joint[x][r];
                if (j > 0.0 && qr[r] > 0.0) mi += j * std::log2(j / (px * qr[r]));
            }
        }
        return mi;
    };

    auto decoder_kernel = [&](const std::vector<std::size_t>& assign) {
        Kernel d;
        d.matrix.assign(carrier.outputs(), std::vector<double>(recon.size(), 0.0));
        for (std::size_t y = 0; y < carrier.outputs(); ++y) d.matrix[y][assign[y]] = 1.0;
        return d;
    };

    double best = 0.0;
    for (int round = 1; round <= max_alternations; ++round) {
        est.alternations = round;
        Kernel k_sem = compose(carrier, decoder_kernel(assignment));
        CapacityResult cap = capacity_ba(k_sem, tol);
        best = std::max(best, cap.bits);

        // Greedy per-column decoder improvement at the BA-optimal source law.
        bool changed = false;
        for (std::size_t y = 0; y < carrier.outputs(); ++y) {
            std::size_t arg = assignment[y];
            double val = mi_for(cap.optimal_input, assignment);
            for (std::size_t r = 0; r < recon.size(); ++r) {
                if (r == arg) continue;
                std::vector<std::size_t> trial = assignment;
                trial[y] = r;
                double v = mi_for(cap.optimal_input, trial);
                if (v > val + 1e-12) { val = v; arg = r; }
            }
            if (arg != assignment[y]) { assignment[y] = arg; changed = true; }
        }
        if (!changed) {
            est.converged = true;
            break;
        }
    }
    Kernel final_dec = decoder_kernel(assignment);
    CapacityResult cap = capacity_ba(compose(carrier, final_dec), tol);
    est.bits = std::max(best, cap.bits);
    est.decoder = std::move(final_dec);
    return est;
}

} // namespace semrd

#endif // SEMRD_CHANNEL_HPP
