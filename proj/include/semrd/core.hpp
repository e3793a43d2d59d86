/***************************************************************
 *  core.hpp
 *
 *  Irredundant cores, shortcuts, derivation-depth strata, and
 *  bounded-depth core filtrations of a knowledge base.
 *
 *  The core is the residue of a deterministic deletion scan in
 *  canonical order: an element is removed when it is derivable
 *  from the remaining facts.  The result generates the same
 *  closure as the original fact set, and no retained element is
 *  derivable from the others.  Redundancy tests run the closure
 *  with an early exit on the candidate atom, so extraction stays
 *  tractable when closures dwarf the stored base.
 ***************************************************************/

#ifndef SEMRD_CORE_HPP
#define SEMRD_CORE_HPP

#include <unordered_map>
#include <utility>
#include <vector>

#include "semrd/datalog.hpp"

namespace semrd {

struct KnowledgeBase {
    ProgramPtr program;
    FactSet facts; // this is S_O
    std::string label;
};

inline KnowledgeBase make_kb(const ParsedProgram& parsed, std::string label = "") {
    return KnowledgeBase{parsed.program, parsed.facts, std::move(label)};
}

struct CoreProfile {
    FactSet core;       // A
    FactSet shortcuts;  // J = facts \ A
    std::size_t atomicity = 0; // |A|
    int max_depth = 0;         // max over facts of depth from the core; max of empty set is 0
    std::unordered_map<GroundAtom, int, AtomHash> depth_of; // Dd(. | A) for every stored fact
    std::vector<FactSet> strata; // strata[m] = facts with depth <= m, m = 0..max_depth
};

struct CoreFiltration {
    std::vector<FactSet> cores_by_delta; // Atom_delta for delta = 0..max_depth
};

/// Canonical-order deletion scan; `order_override`, when nonempty,
/// replaces the canonical scan order (used by order-sensitivity tests).
inline CoreProfile irredundant_core(const KnowledgeBase& kb,
                                    const std::vector<GroundAtom>& order_override = {}) {
    const auto& program = kb.program;
    FactSet current = kb.facts;
    const std::vector<GroundAtom>& scan =
        order_override.empty() ? kb.facts.atoms() : order_override;
    for (const auto& s : scan) {
        if (!current.contains(s)) continue;
        FactSet rest = current.with_removed(s);
        if (closure_contains(program, rest, s)) current = std::move(rest);
    }

    CoreProfile profile;
    profile.core = current;
    profile.shortcuts = kb.facts.subtracted(current);
    profile.atomicity = current.size();

    // Depths of every stored fact from the core.  All are finite because
    // the core generates the closure of the full fact set.
    auto rounds = closure_depths(program, profile.core);
    int dmax = 0;
    for (const auto& s : kb.facts) {
        int d = rounds.at(s);
        profile.depth_of.emplace(s, d);
        if (d > dmax) dmax = d;
    }
    profile.max_depth = dmax;

    profile.strata.reserve(static_cast<std::size_t>(dmax) + 1);
    for (int m = 0; m <= dmax; ++m) {
        std::vector<GroundAtom> level;
        for (const auto& s : kb.facts)
            if (profile.depth_of.at(s) <= m) level.push_back(s);
        profile.strata.emplace_back(program, std::move(level));
    }
    return profile;
}

/// Atom_delta = atoms of S_O not re-derivable from the rest within
/// delta rounds.  Non-increasing in delta: starts at the full fact set
/// (delta = 0) and reaches the irredundant core at delta = max depth.
inline CoreFiltration delta_core_filtration(const KnowledgeBase& kb) {
    CoreProfile profile = irredundant_core(kb);
    CoreFiltration filtration;
    for (int delta = 0; delta <= profile.max_depth; ++delta) {
        std::vector<GroundAtom> kept;
        for (const auto& s : kb.facts) {
            FactSet rest = kb.facts.with_removed(s);
            if (!closure_contains(kb.program, rest, s, delta)) kept.push_back(s);
        }
        filtration.cores_by_delta.emplace_back(kb.program, std::move(kept));
    }
    return filtration;
}

/// Deductive independence check: for each core element a, the set
/// R(a) of reconstruction states whose substitution for a preserves
/// the closure.  Pairwise-disjoint R(a) certify the independence
/// assumption used by the converse bounds.
struct CoreDisjointnessReport {
    std::vector<std::pair<GroundAtom, FactSet>> zero_distortion_sets;
    std::vector<std::pair<GroundAtom, GroundAtom>> overlapping_pairs;
    bool disjoint = true;
};

inline CoreDisjointnessReport core_disjointness_check(const KnowledgeBase& kb,
                                                      const FactSet& recon_alphabet) {
    CoreProfile profile = irredundant_core(kb);
    FactSet full_closure = closure(kb.program, kb.facts).closure;

    CoreDisjointnessReport report;
    for (const auto& a : profile.core) {
        FactSet without = kb.facts.with_removed(a);
        std::vector<GroundAtom> zero;
        for (const auto& shat : recon_alphabet) {
            FactSet substituted = without.with_added(shat);
            if (closure(kb.program, substituted).closure == full_closure)
                zero.push_back(shat);
        }
        report.zero_distortion_sets.emplace_back(a, FactSet(kb.program, std::move(zero)));
    }
    for (std::size_t i = 0; i < report.zero_distortion_sets.size(); ++i) {
        for (std::size_t j = i + 1; j < report.zero_distortion_sets.size(); ++j) {
            FactSet common = report.zero_distortion_sets[i].second.intersected(
                report.zero_distortion_sets[j].second);
            if (!common.empty()) {
                report.disjoint = false;
                report.overlapping_pairs.emplace_back(report.zero_distortion_sets[i].first,
                                                      report.zero_distortion_sets[j].first);
            }
        }
    }
    return report;
}

} // namespace semrd

#endif // SEMRD_CORE_HPP
