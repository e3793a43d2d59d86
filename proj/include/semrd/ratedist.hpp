/***************************************************************
 *  ratedist.hpp
 *
 *  Semantic rate-distortion machinery: the zero-distortion
 *  rate-delay profile over the delta-core filtration, semantic
 *  rate-distortion curves via Lagrangian Blahut-Arimoto, leverage
 *  factors and compression ratios, critical derivation delay, and
 *  minimum-blocklength estimates.
 ***************************************************************/

#ifndef SEMRD_RATEDIST_HPP
#define SEMRD_RATEDIST_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "semrd/channel.hpp"
#include "semrd/core.hpp"
#include "semrd/distortion.hpp"

namespace semrd {

/*-----------------------------------------------------------
 * Rate-delay profile
 *---------------------------------------------------------*/
struct RateDelayProfile {
    std::vector<double> rates_by_delta; // R(0, delta) for delta = 0..max_depth
    std::vector<double> marginal;       // rate(delta-1) - rate(delta), for delta >= 1
    std::vector<double> p_delta;        // source mass on Atom_delta
    std::vector<std::size_t> filtration_sizes; // |Atom_delta|
};

/// rate(delta) = P_delta * H(pi_delta) where pi_delta is the source
/// law renormalized to Atom_delta.  `source` is indexed by the facts
/// in canonical order (= cores_by_delta[0], which is the full base).
inline RateDelayProfile rate_delay_profile(const CoreProfile& profile,
                                           const CoreFiltration& filtration,
                                           const Distribution& source) {
    (void)profile;
    if (filtration.cores_by_delta.empty())
        throw SemrdError(SemrdError::Kind::Config, "rate_delay_profile: empty filtration");
    const FactSet& facts = filtration.cores_by_delta[0];
    if (source.size() != facts.size())
        throw SemrdError(SemrdError::Kind::Config,
                         "rate_delay_profile: source must match the fact alphabet");
    source.validate();

    RateDelayProfile out;
    for (const FactSet& atom_d : filtration.cores_by_delta) {
        double p = 0.0;
        std::vector<double> pi;
        for (std::size_t i = 0; i < facts.size(); ++i)
            if (atom_d.contains(facts[i])) {
                p += source.probabilities[i];
                pi.push_back(source.probabilities[i]);
            }
        double rate = 0.0;
        if (p > 0.0) {
            for (double& v : pi) v /= p;
            rate = p * entropy_bits(pi);
        }
        out.p_delta.push_back(p);
        out.rates_by_delta.push_back(rate);
        out.filtration_sizes.push_back(atom_d.size());
    }
    for (std::size_t d = 1; d < out.rates_by_delta.size(); ++d)
        out.marginal.push_back(out.rates_by_delta[d - 1] - out.rates_by_delta[d]);
    return out;
}

/*-----------------------------------------------------------
 * Rate-distortion curves (Lagrangian Blahut-Arimoto)
 *---------------------------------------------------------*/
struct RDPoint {
    double distortion = 0.0; // requested grid value
    double achieved = 0.0;   // distortion actually achieved by the optimizing kernel
    double rate = 0.0;       // bits
    bool converged = false;
};

struct RDCurve {
    std::vector<RDPoint> points;
    DistortionKind kind = DistortionKind::closure;
};

namespace detail {

struct LagrangePoint {
    double distortion = 0.0;
    double rate = 0.0;
};

/// One Lagrangian BA run at multiplier s: minimizes I + s*E[d].
inline LagrangePoint rd_lagrange(const std::vector<double>& p,
                                 const std::vector<std::vector<double>>& d, double s,
                                 int max_iters = 5000, double tol = 1e-12) {
    const std::size_t n = p.size(), m = d[0].size();
    std::vector<double> q(m, 1.0 / static_cast<double>(m));
    std::vector<std::vector<double>> kappa(n, std::vector<double>(m, 0.0));
    const double ln2 = std::log(2.0);
    double prev_obj = std::numeric_limits<double>::infinity();
    LagrangePoint out;
    for (int it = 0; it < max_iters; ++it) {
        for (std::size_t x = 0; x < n; ++x) {
            double z = 0.0;
            for (std::size_t y = 0; y < m; ++y) {
                kappa[x][y] = q[y] * std::exp(-s * ln2 * d[x][y]);
                z += kappa[x][y];
            }
            for (std::size_t y = 0; y < m; ++y) kappa[x][y] /= z;
        }
        std::vector<double> q_new(m, 0.0);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < m; ++y) q_new[y] += p[x] * kappa[x][y];
        q.swap(q_new);
        double rate = 0.0, dist = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            if (p[x] <= 0.0) continue;
            for (std::size_t y = 0; y < m; ++y) {
                double k = kappa[x][y];
                if (k > 0.0 && q[y] > 0.0) rate += p[x] * k * std::log2(k / q[y]);
                dist += p[x] * k * d[x][y];
            }
        }
        out.rate = std::max(rate, 0.0);
        out.distortion = dist;
        double obj = rate + s * dist;
        if (std::abs(prev_obj - obj) < tol) break;
        prev_obj = obj;
    }
    return out;
}

/// R(0): minimize I with supports restricted to the zero-distortion
/// columns of each row (exact feasible set, no multiplier limit).
inline std::optional<double> rd_zero_rate(const std::vector<double>& p,
                                          const std::vector<std::vector<double>>& d,
                                          int max_iters = 5000, double tol = 1e-12) {
    const std::size_t n = p.size(), m = d[0].size();
    std::vector<std::vector<std::size_t>> allowed(n);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < m; ++y)
            if (d[x][y] == 0.0) allowed[x].push_back(y);
        if (p[x] > 0.0 && allowed[x].empty()) return std::nullopt; // D = 0 infeasible
    }
    std::vector<double> q(m, 1.0 / static_cast<double>(m));
    std::vector<std::vector<double>> kappa(n, std::vector<double>(m, 0.0));
    double prev = std::numeric_limits<double>::infinity();
    double rate = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        for (std::size_t x = 0; x < n; ++x) {
            std::fill(kappa[x].begin(), kappa[x].end(), 0.0);
            double z = 0.0;
            for (std::size_t y : allowed[x]) z += q[y];
            if (z <= 0.0) {
                // restart the row uniformly over its feasible columns
                for (std::size_t y : allowed[x])
                    kappa[x][y] = 1.0 / static_cast<double>(allowed[x].size());
            } else {
                for (std::size_t y : allowed[x]) kappa[x][y] = q[y] / z;
            }
        }
        std::vector<double> q_new(m, 0.0);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < m; ++y) q_new[y] += p[x] * kappa[x][y];
        q.swap(q_new);
        rate = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            if (p[x] <= 0.0) continue;
            for (std::size_t y = 0; y < m; ++y) {
                double k = kappa[x][y];
                if (k > 0.0 && q[y] > 0.0) rate += p[x] * k * std::log2(k / q[y]);
            }
        }
        if (std::abs(prev - rate) < tol) break;
        prev = rate;
    }
    return std::max(rate, 0.0);
}

} // namespace detail

inline RDCurve rd_curve_ba(const Distribution& source, const DistortionMatrix& d,
                           const std::vector<double>& d_grid, double tol = 1e-6) {
    source.validate();
    if (d.entries.empty() || d.entries.size() != source.size())
        throw SemrdError(SemrdError::Kind::Config, "rd_curve_ba: shape mismatch");
    const auto& p = source.probabilities;
    const auto& mat = d.entries;
    const std::size_t m = mat[0].size();

    // Feasibility floor and zero-rate ceiling.
    double d_min = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        double row_min = *std::min_element(mat[x].begin(), mat[x].end());
        d_min += p[x] * row_min;
    }
    double d_zero_rate = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < m; ++y) {
        double col = 0.0;
        for (std::size_t x = 0; x < p.size(); ++x) col += p[x] * mat[x][y];
        d_zero_rate = std::min(d_zero_rate, col);
    }

    // Multiplier sweep: geometric grid, then local bisection per target.
    constexpr int kSweepPoints = 60;
    const double s_lo = 1e-4, s_hi = 1e4;
    std::vector<double> s_grid(kSweepPoints);
    for (int i = 0; i < kSweepPoints; ++i)
        s_grid[static_cast<std::size_t>(i)] =
            s_lo * std::pow(s_hi / s_lo, static_cast<double>(i) / (kSweepPoints - 1));
    std::vector<detail::LagrangePoint> sweep;
    sweep.reserve(kSweepPoints);
    for (double s : s_grid) sweep.push_back(detail::rd_lagrange(p, mat, s));

    RDCurve curve;
    curve.kind = d.kind;
    for (double target : d_grid) {
        if (target < 0.0)
            throw SemrdError(SemrdError::Kind::Config, "rd_curve_ba: negative distortion target");
        if (target < d_min - 1e-12)
            throw SemrdError(SemrdError::Kind::Config,
                             "rd_curve_ba: target below the minimum achievable distortion");
        RDPoint pt;
        pt.distortion = target;
        if (target >= d_zero_rate) {
            pt.rate = 0.0;
            pt.achieved = d_zero_rate;
            pt.converged = true;
        } else if (target == 0.0 || target <= d_min + 1e-15) {
            auto r0 = detail::rd_zero_rate(p, mat);
            if (!r0)
                throw SemrdError(SemrdError::Kind::Config,
                                 "rd_curve_ba: zero distortion infeasible");
            pt.rate = *r0;
            pt.achieved = d_min;
            pt.converged = true;
        } else {
            // bracket the target on the sweep (distortion decreases in s)
            double lo = s_grid.front(), hi = s_grid.back();
            for (int i = 0; i + 1 < kSweepPoints; ++i) {
                const auto& a = sweep[static_cast<std::size_t>(i)];
                const auto& b = sweep[static_cast<std::size_t>(i + 1)];
                if (a.distortion >= target && b.distortion <= target) {
                    lo = s_grid[static_cast<std::size_t>(i)];
                    hi = s_grid[static_cast<std::size_t>(i + 1)];
                    break;
                }
            }
            detail::LagrangePoint best{};
            bool have = false;
            for (int it = 0; it < 200; ++it) {
                double mid = std::sqrt(lo * hi);
                detail::LagrangePoint q = detail::rd_lagrange(p, mat, mid);
                if (!have || std::abs(q.distortion - target) < std::abs(best.distortion - target)) {
                    best = q;
                    have = true;
                }
                if (std::abs(q.distortion - target) < tol) break;
                if (q.distortion > target)
                    lo = mid; // need a larger multiplier to push distortion down
                else
                    hi = mid;
            }
            pt.rate = best.rate;
            pt.achieved = best.distortion;
            pt.converged = std::abs(best.distortion - target) < 10 * tol;
        }
        curve.points.push_back(pt);
    }
    return curve;
}

/*-----------------------------------------------------------
 * Leverage factors and compression ratios
 *---------------------------------------------------------*/
struct LeverageReport {
    double lambda_1 = 0.0;   // log2|S_O| / log2|A|
    double lambda_inf = 0.0; // log2|S_O| / (P_A H(pi_A))
    double rho_comp = 0.0;   // 1 / lambda_1
    double rho_ent = 0.0;    // (|A| log2|A|) / (|S_O| log2|S_O|)
    bool lambda_1_infinite = false;   // |A| = 1 (degenerate one-fact core)
    bool lambda_inf_infinite = false; // P_A H(pi_A) = 0
};

inline LeverageReport leverage_report(const CoreProfile& profile, const Distribution& source) {
    if (profile.strata.empty())
        throw SemrdError(SemrdError::Kind::Config, "leverage_report: empty profile");
    const FactSet& facts = profile.strata.back();
    if (facts.empty() || profile.core.empty())
        throw SemrdError(SemrdError::Kind::Config, "leverage_report: needs |facts|>=1, |core|>=1");
    if (source.size() != facts.size())
        throw SemrdError(SemrdError::Kind::Config, "leverage_report: source size mismatch");
    source.validate();

    const double n = static_cast<double>(facts.size());
    const double k = static_cast<double>(profile.core.size());
    double p_core = 0.0;
    std::vector<double> pi;
    for (std::size_t i = 0; i < facts.size(); ++i)
        if (profile.core.contains(facts[i])) {
            p_core += source.probabilities[i];
            pi.push_back(source.probabilities[i]);
        }
    if (p_core > 0.0)
        for (double& v : pi) v /= p_core;
    double semantic_rate = p_core * entropy_bits(pi);

    LeverageReport rep;
    if (profile.core.size() <= 1) {
        rep.lambda_1_infinite = true;
        rep.lambda_1 = std::numeric_limits<double>::infinity();
        rep.rho_comp = 0.0;
    } else {
        rep.lambda_1 = std::log2(n) / std::log2(k);
        rep.rho_comp = 1.0 / rep.lambda_1;
    }
    if (semantic_rate <= 0.0) {
        rep.lambda_inf_infinite = true;
        rep.lambda_inf = std::numeric_limits<double>::infinity();
    } else {
        rep.lambda_inf = std::log2(n) / semantic_rate;
    }
    rep.rho_ent = (n > 1) ? (k * std::log2(k)) / (n * std::log2(n)) : 1.0;
    return rep;
}

/*-----------------------------------------------------------
 * Critical delay and blocklength bounds
 *---------------------------------------------------------*/
struct CriticalDelay {
    bool feasible = false;
    int delta_star = -1;
};

/// Smallest delta whose zero-distortion rate fits under the capacity.
inline CriticalDelay critical_delay(const RateDelayProfile& profile, double capacity) {
    if (capacity <= 0.0)
        throw SemrdError(SemrdError::Kind::Config, "critical_delay: capacity must be > 0");
    CriticalDelay out;
    for (std::size_t d = 0; d < profile.rates_by_delta.size(); ++d)
        if (profile.rates_by_delta[d] <= capacity) {
            out.feasible = true;
            out.delta_star = static_cast<int>(d);
            return out;
        }
    return out;
}

struct BlocklengthBounds {
    double n_star_full = 0.0;    // log2|S_O| / C
    double n_star_closure = 0.0; // log2|A| / C
    double converse = 0.0;       // ((1-eps) log2|A| - 1) / C
    double ratio = 0.0;          // log2|A| / log2|S_O|
    std::optional<Rational> ratio_exact; // exact when both sizes are powers of two
};

inline BlocklengthBounds blocklength_bounds(std::size_t core_size, std::size_t source_size,
                                            double capacity, double eps) {
    if (capacity <= 0.0)
        throw SemrdError(SemrdError::Kind::Config, "blocklength_bounds: capacity must be > 0");
    if (eps < 0.0 || eps >= 1.0)
        throw SemrdError(SemrdError::Kind::Config, "blocklength_bounds: need 0 <= eps < 1");
    if (core_size == 0 || source_size == 0)
        throw SemrdError(SemrdError::Kind::Config, "blocklength_bounds: empty alphabet");
    double log_s = std::log2(static_cast<double>(source_size));
    double log_a = std::log2(static_cast<double>(core_size));
    BlocklengthBounds out;
    out.n_star_full = log_s / capacity;
    out.n_star_closure = log_a / capacity;
    out.converse = ((1.0 - eps) * log_a - 1.0) / capacity;
    out.ratio = (log_s > 0.0) ? log_a / log_s : 1.0;
    auto pow2_exp = [](std::size_t v) -> std::optional<long long> {
        if (v == 0 || (v & (v - 1)) != 0) return std::nullopt;
        long long e = 0;
        while (v > 1) { v >>= 1; ++e; }
        return e;
    };
    auto ea = pow2_exp(core_size);
    auto es = pow2_exp(source_size);
    if (ea && es && *es > 0) out.ratio_exact = Rational(*ea, *es);
    return out;
}

} // namespace semrd

#endif // SEMRD_RATEDIST_HPP
