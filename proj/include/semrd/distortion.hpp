/***************************************************************
 *  distortion.hpp
 *
 *  Single-letter distortion functions between stored states and
 *  reconstruction states, and set-level fidelity measures.
 *
 *  Kinds:
 *      hamming        indicator of inequality
 *      closure        Jaccard distance between the closures of the
 *                     reference base with s kept vs. s replaced by
 *                     s_hat (0/0 := 0); zero exactly when the
 *                     substitution preserves deductive content
 *      depth          normalized derivation-depth gap from the
 *                     reference core; 1 when s_hat is underivable
 *      composite      alpha*hamming + beta*closure + gamma*depth
 *      delta_closure  0/1: can the reference base be recovered
 *                     within delta inference rounds after the
 *                     substitution?
 *
 *  Jaccard and fidelity values are computed in exact rational
 *  arithmetic (integer set cardinalities); conversion to double
 *  happens only at the reporting boundary.
 ***************************************************************/

#ifndef SEMRD_DISTORTION_HPP
#define SEMRD_DISTORTION_HPP

#include <boost/rational.hpp>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "semrd/core.hpp"
#include "semrd/datalog.hpp"

namespace semrd {

using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

enum class DistortionKind { hamming, closure, depth, composite, delta_closure };

inline const char* kind_name(DistortionKind k) {
    switch (k) {
        case DistortionKind::hamming: return "hamming";
        case DistortionKind::closure: return "closure";
        case DistortionKind::depth: return "depth";
        case DistortionKind::composite: return "composite";
        case DistortionKind::delta_closure: return "delta_closure";
    }
    return "?";
}

struct DistortionSpec {
    DistortionKind kind = DistortionKind::hamming;
    double alpha = 1.0, beta = 0.0, gamma = 0.0; // composite weights, sum 1
    int delta = 0;                               // delta_closure bound
    KnowledgeBase reference;

    static DistortionSpec hamming(KnowledgeBase kb) {
        return DistortionSpec{DistortionKind::hamming, 1, 0, 0, 0, std::move(kb)};
    }
    static DistortionSpec closure(KnowledgeBase kb) {
        return DistortionSpec{DistortionKind::closure, 0, 1, 0, 0, std::move(kb)};
    }
    static DistortionSpec depth(KnowledgeBase kb) {
        return DistortionSpec{DistortionKind::depth, 0, 0, 1, 0, std::move(kb)};
    }
    static DistortionSpec composite(KnowledgeBase kb, double a, double b, double g) {
        if (a < 0 || b < 0 || g < 0 || std::abs(a + b + g - 1.0) > 1e-12)
            throw SemrdError(SemrdError::Kind::Config,
                             "composite weights must be nonnegative and sum to 1");
        return DistortionSpec{DistortionKind::composite, a, b, g, 0, std::move(kb)};
    }
    static DistortionSpec delta_closure(KnowledgeBase kb, int delta) {
        if (delta < 0)
            throw SemrdError(SemrdError::Kind::Config, "delta must be >= 0");
        return DistortionSpec{DistortionKind::delta_closure, 0, 0, 0, delta, std::move(kb)};
    }
};

struct DistortionMatrix {
    FactSet source_alphabet;
    FactSet recon_alphabet;
    std::vector<std::vector<double>> entries; // rows = source, cols = recon
    bool has_unknown_recon = false;           // some s_hat outside the reference universe
    DistortionKind kind = DistortionKind::hamming;
};

struct SetFidelity {
    Rational closure_fidelity{1};  // F_Cn
    Rational core_preservation{1}; // rho_Atom
};

/*-----------------------------------------------------------
 * Evaluator with cached reference structure
 *---------------------------------------------------------*/
class DistortionEvaluator {
public:
    explicit DistortionEvaluator(DistortionSpec spec) : spec_(std::move(spec)) {
        const auto& kb = spec_.reference;
        reference_closure_ = closure(kb.program, kb.facts).closure;
        if (spec_.kind == DistortionKind::depth || spec_.kind == DistortionKind::composite) {
            profile_ = std::make_shared<CoreProfile>(irredundant_core(kb));
            core_rounds_ = closure_depths(kb.program, profile_->core);
        }
    }

    const DistortionSpec& spec() const { return spec_; }
    const FactSet& reference_closure() const { return reference_closure_; }

    /// True when s_hat lies outside the reference program's universe
    /// (unknown predicate or constant); closure-based kinds score such
    /// reconstructions as maximally distorted.
    bool atom_known(const GroundAtom& a) const {
        const auto& prog = *spec_.reference.program;
        if (a.pred < 0 || static_cast<std::size_t>(a.pred) >= prog.predicate_count()) return false;
        for (auto c : a.args)
            if (c < 0 || static_cast<std::size_t>(c) >= prog.constant_count()) return false;
        return true;
    }

    double pairwise(const GroundAtom& s, const GroundAtom& s_hat) const {
        switch (spec_.kind) {
            case DistortionKind::hamming:
                return s == s_hat ? 0.0 : 1.0;
            case DistortionKind::closure:
                return to_double(closure_distortion(s, s_hat));
            case DistortionKind::depth:
                return depth_distortion(s, s_hat);
            case DistortionKind::composite:
                return spec_.alpha * (s == s_hat ? 0.0 : 1.0) +
                       spec_.beta * to_double(closure_distortion(s, s_hat)) +
                       spec_.gamma * depth_distortion(s, s_hat);
            case DistortionKind::delta_closure:
                return delta_closure_distortion(s, s_hat) ? 1.0 : 0.0;
        }
        return 1.0;
    }

    /// d_Cn as an exact rational; requires s in the reference facts.
    Rational closure_distortion(const GroundAtom& s, const GroundAtom& s_hat) const {
        require_source(s);
        if (s == s_hat) return Rational(0);
        if (!atom_known(s_hat)) return Rational(1);
        // C_s = Cn((S \ {s}) u {s}) = Cn(S), cached.
        FactSet substituted = spec_.reference.facts.with_removed(s).with_added(s_hat);
        FactSet c_hat = closure(spec_.reference.program, substituted).closure;
        long long inter = 0;
        for (const auto& x : c_hat)
            if (reference_closure_.contains(x)) ++inter;
        long long uni = static_cast<long long>(reference_closure_.size()) +
                        static_cast<long long>(c_hat.size()) - inter;
        if (uni == 0) return Rational(0); // 0/0 := 0
        return Rational(1) - Rational(inter, uni);
    }

    /// d_Dd: normalized depth gap from the reference core;
    /// 1 when s_hat is not derivable from the core.
    double depth_distortion(const GroundAtom& s, const GroundAtom& s_hat) const {
        if (!profile_) {
            profile_ = std::make_shared<CoreProfile>(irredundant_core(spec_.reference));
            core_rounds_ = closure_depths(spec_.reference.program, profile_->core);
        }
        auto it_s = core_rounds_.find(s);
        if (it_s == core_rounds_.end())
            throw SemrdError(SemrdError::Kind::Config,
                             "depth distortion: source atom not derivable from the reference core");
        if (!atom_known(s_hat)) return 1.0;
        auto it_h = core_rounds_.find(s_hat);
        if (it_h == core_rounds_.end()) return 1.0; // s_hat outside Cn(A)
        double denom = std::max(profile_->max_depth, 1);
        double v = std::abs(it_s->second - it_h->second) / denom;
        return v > 1.0 ? 1.0 : v;
    }

    /// d_Cn^delta: 0 iff the reference base is contained in
    /// T^delta((S \ {s}) u {s_hat}); else 1.
    bool delta_closure_distortion(const GroundAtom& s, const GroundAtom& s_hat) const {
        return delta_closure_distortion(s, s_hat, spec_.delta);
    }

    bool delta_closure_distortion(const GroundAtom& s, const GroundAtom& s_hat, int delta) const {
        require_source(s);
        if (!atom_known(s_hat)) return true;
        FactSet substituted = spec_.reference.facts.with_removed(s).with_added(s_hat);
        FactSet reach = iterate_consequence(spec_.reference.program, substituted, delta);
        return !spec_.reference.facts.is_subset_of(reach);
    }

    DistortionMatrix matrix(const FactSet& source, const FactSet& recon) const {
        DistortionMatrix m;
        m.source_alphabet = source;
        m.recon_alphabet = recon;
        m.kind = spec_.kind;
        m.entries.assign(source.size(), std::vector<double>(recon.size(), 0.0));
        for (std::size_t i = 0; i < source.size(); ++i)
            for (std::size_t j = 0; j < recon.size(); ++j) {
                if (!atom_known(recon[j])) m.has_unknown_recon = true;
                m.entries[i][j] = pairwise(source[i], recon[j]);
            }
        return m;
    }

private:
    void require_source(const GroundAtom& s) const {
        if (!spec_.reference.facts.contains(s))
            throw SemrdError(SemrdError::Kind::Config,
                             "closure-based distortion requires the source atom to be a "
                             "stored fact of the reference knowledge base");
    }

    DistortionSpec spec_;
    FactSet reference_closure_;
    mutable std::shared_ptr<CoreProfile> profile_;
    mutable std::unordered_map<GroundAtom, int, AtomHash> core_rounds_;
};

inline double pairwise_distortion(const DistortionSpec& spec, const GroundAtom& s,
                                  const GroundAtom& s_hat) {
    return DistortionEvaluator(spec).pairwise(s, s_hat);
}

inline DistortionMatrix distortion_matrix(const DistortionSpec& spec, const FactSet& source,
                                          const FactSet& recon) {
    return DistortionEvaluator(spec).matrix(source, recon);
}

/*-----------------------------------------------------------
 * Set-level fidelity
 *---------------------------------------------------------*/
inline SetFidelity set_fidelity(const KnowledgeBase& kb_a, const FactSet& set_b) {
    kb_a.facts.require_same_program(set_b);
    SetFidelity out;

    FactSet ca = closure(kb_a.program, kb_a.facts).closure;
    FactSet cb = closure(kb_a.program, set_b).closure;
    long long inter = 0;
    for (const auto& x : cb)
        if (ca.contains(x)) ++inter;
    long long uni = static_cast<long long>(ca.size()) + static_cast<long long>(cb.size()) - inter;
    out.closure_fidelity = (uni == 0) ? Rational(1) : Rational(inter, uni); // 0/0 := 1

    CoreProfile profile = irredundant_core(kb_a);
    long long kept = 0;
    for (const auto& a : profile.core)
        if (set_b.contains(a)) ++kept;
    out.core_preservation = profile.core.empty()
                                ? Rational(1) // 0/0 := 1
                                : Rational(kept, static_cast<long long>(profile.core.size()));
    return out;
}

} // namespace semrd

#endif // SEMRD_DISTORTION_HPP
