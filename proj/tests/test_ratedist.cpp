#include <catch2/catch_amalgamated.hpp>

#include "semrd/ratedist.hpp"
#include "test_util.hpp"

using namespace semrd;
using namespace semrd::testutil;
using Catch::Matchers::WithinAbs;

namespace {

RateDelayProfile path_profile(const PathExample& ex) {
    CoreProfile profile = irredundant_core(ex.sender);
    CoreFiltration filt = delta_core_filtration(ex.sender);
    return rate_delay_profile(profile, filt, uniform_distribution(ex.sender.facts.size()));
}

} // namespace

TEST_CASE("rate-delay profile of the path example is [3,1,1]") {
    auto ex = path_example();
    RateDelayProfile rd = path_profile(ex);
    REQUIRE(rd.rates_by_delta.size() == 3);
    CHECK_THAT(rd.rates_by_delta[0], WithinAbs(3.0, 1e-9));
    CHECK_THAT(rd.rates_by_delta[1], WithinAbs(1.0, 1e-9));
    CHECK_THAT(rd.rates_by_delta[2], WithinAbs(1.0, 1e-9));
    CHECK_THAT(rd.p_delta[0], WithinAbs(1.0, 1e-12));
    CHECK_THAT(rd.p_delta[1], WithinAbs(0.5, 1e-12));
    // monotone chain with non-negative marginals
    for (std::size_t d = 1; d < rd.rates_by_delta.size(); ++d) {
        CHECK(rd.rates_by_delta[d] <= rd.rates_by_delta[d - 1] + 1e-12);
        CHECK(rd.marginal[d - 1] >= -1e-12);
    }
}

TEST_CASE("rate-delay boundaries: H(P) at delta 0, core rate at the end") {
    Rng rng(2024, 0);
    for (int trial = 0; trial < 30; ++trial) {
        Rng trial_rng = rng.split(static_cast<std::uint64_t>(trial) + 100);
        RandomKb r = random_kb(trial_rng);
        if (r.kb.facts.empty()) continue;
        INFO("program:\n" << r.text);
        CoreProfile profile = irredundant_core(r.kb);
        CoreFiltration filt = delta_core_filtration(r.kb);
        Distribution uni = uniform_distribution(r.kb.facts.size());
        RateDelayProfile rd = rate_delay_profile(profile, filt, uni);
        CHECK_THAT(rd.rates_by_delta.front(),
                   WithinAbs(std::log2(static_cast<double>(r.kb.facts.size())), 1e-9));
        double core_rate =
            (static_cast<double>(profile.atomicity) / static_cast<double>(r.kb.facts.size())) *
            std::log2(static_cast<double>(profile.atomicity));
        CHECK_THAT(rd.rates_by_delta.back(), WithinAbs(core_rate, 1e-9));
        for (std::size_t d = 1; d < rd.rates_by_delta.size(); ++d)
            CHECK(rd.rates_by_delta[d] <= rd.rates_by_delta[d - 1] + 1e-12);
    }
}

TEST_CASE("point-mass source gives zero rates") {
    auto ex = path_example();
    CoreProfile profile = irredundant_core(ex.sender);
    CoreFiltration filt = delta_core_filtration(ex.sender);
    Distribution point;
    point.probabilities.assign(8, 0.0);
    // put all mass on the first core atom (Edge(a,b) is canonical-first)
    point.probabilities[0] = 1.0;
    RateDelayProfile rd = rate_delay_profile(profile, filt, point);
    for (double r : rd.rates_by_delta) CHECK_THAT(r, WithinAbs(0.0, 1e-12));
}

TEST_CASE("R(0) under closure distortion equals the terminal rate-delay value") {
    auto ex = path_example();
    Distribution uni = uniform_distribution(8);
    DistortionMatrix d =
        distortion_matrix(DistortionSpec::closure(ex.sender), ex.sender.facts, ex.sender.facts);
    RDCurve curve = rd_curve_ba(uni, d, {0.0}, 1e-8);
    REQUIRE(curve.points.size() == 1);
    CHECK_THAT(curve.points[0].rate, WithinAbs(1.0, 1e-6));
}

TEST_CASE("R(0) under hamming distortion equals the source entropy") {
    auto ex = path_example();
    Distribution uni = uniform_distribution(8);
    DistortionMatrix d =
        distortion_matrix(DistortionSpec::hamming(ex.sender), ex.sender.facts, ex.sender.facts);
    RDCurve curve = rd_curve_ba(uni, d, {0.0}, 1e-8);
    CHECK_THAT(curve.points[0].rate, WithinAbs(3.0, 1e-6));
}

TEST_CASE("rate hits zero at large distortion and rejects infeasible targets") {
    auto ex = path_example();
    Distribution uni = uniform_distribution(8);
    DistortionMatrix d =
        distortion_matrix(DistortionSpec::hamming(ex.sender), ex.sender.facts, ex.sender.facts);
    RDCurve curve = rd_curve_ba(uni, d, {1.0}, 1e-8);
    CHECK(curve.points[0].rate == 0.0);
    CHECK_THROWS_AS(rd_curve_ba(uni, d, {-0.5}, 1e-8), SemrdError);
}

TEST_CASE("RD curve is non-increasing and convex on a grid") {
    auto ex = path_example();
    Distribution uni = uniform_distribution(8);
    DistortionMatrix d =
        distortion_matrix(DistortionSpec::closure(ex.sender), ex.sender.facts, ex.sender.facts);
    std::vector<double> grid = {0.0, 0.01, 0.02, 0.03, 0.05, 0.08, 0.12, 0.2};
    RDCurve curve = rd_curve_ba(uni, d, grid, 1e-7);
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        CHECK(curve.points[i].rate <= curve.points[i - 1].rate + 1e-6);
    // convexity via second differences on the evenly-spaced middle section
    for (std::size_t i = 2; i < 5; ++i) {
        double a = curve.points[i - 2].rate, b = curve.points[i - 1].rate,
               c = curve.points[i].rate;
        CHECK(a - 2 * b + c >= -1e-5);
    }
}

TEST_CASE("core decomposition identity for closure distortion") {
    auto ex = path_example();
    CoreProfile profile = irredundant_core(ex.sender);
    const double p_a = static_cast<double>(profile.atomicity) /
                       static_cast<double>(ex.sender.facts.size()); // 0.5
    Distribution uni_full = uniform_distribution(8);
    DistortionMatrix d_full =
        distortion_matrix(DistortionSpec::closure(ex.sender), ex.sender.facts, ex.sender.facts);
    // core sub-source: uniform over the 4 core atoms, reconstruction also core
    Distribution uni_core = uniform_distribution(profile.core.size());
    DistortionMatrix d_core =
        distortion_matrix(DistortionSpec::closure(ex.sender), profile.core, profile.core);
    for (double D : {0.0, 0.02, 0.05}) {
        double r_full = rd_curve_ba(uni_full, d_full, {D}, 1e-9).points[0].rate;
        double r_core = rd_curve_ba(uni_core, d_core, {D / p_a}, 1e-9).points[0].rate;
        INFO("D = " << D);
        CHECK_THAT(r_full, WithinAbs(p_a * r_core, 1e-5));
    }
}

TEST_CASE("leverage report on the path example") {
    auto ex = path_example();
    CoreProfile profile = irredundant_core(ex.sender);
    LeverageReport rep = leverage_report(profile, uniform_distribution(8));
    CHECK_THAT(rep.lambda_1, WithinAbs(1.5, 1e-12));
    CHECK_THAT(rep.lambda_inf, WithinAbs(3.0, 1e-9));
    CHECK_THAT(rep.rho_comp, WithinAbs(2.0 / 3.0, 1e-12));
    CHECK(rep.lambda_inf >= rep.lambda_1);
    CHECK_FALSE(rep.lambda_1_infinite);
}

TEST_CASE("degenerate one-atom core is flagged infinite") {
    ParsedProgram p = parse_program(
        "q(X,X) :- p(X,X).\n"
        "p(a,a). q(a,a).\n");
    KnowledgeBase kb = make_kb(p, "tiny");
    CoreProfile profile = irredundant_core(kb);
    REQUIRE(profile.atomicity == 1);
    LeverageReport rep = leverage_report(profile, uniform_distribution(kb.facts.size()));
    CHECK(rep.lambda_1_infinite);
    CHECK(std::isinf(rep.lambda_1));
}

TEST_CASE("critical delay") {
    auto ex = path_example();
    RateDelayProfile rd = path_profile(ex);
    CriticalDelay cd = critical_delay(rd, 2.536);
    CHECK(cd.feasible);
    CHECK(cd.delta_star == 1);
    CHECK(critical_delay(rd, 3.5).delta_star == 0);
    RateDelayProfile steep;
    steep.rates_by_delta = {3.0, 2.8, 2.7};
    CHECK_FALSE(critical_delay(steep, 2.0).feasible);
    CHECK_THROWS_AS(critical_delay(rd, 0.0), SemrdError);
}

TEST_CASE("blocklength bounds") {
    double c = std::log2(10.0) - binary_entropy(0.1) - 0.1 * std::log2(9.0);
    BlocklengthBounds b = blocklength_bounds(4, 8, c, 0.0);
    CHECK_THAT(b.n_star_full, WithinAbs(1.183, 1e-3));
    CHECK_THAT(b.n_star_closure, WithinAbs(0.789, 1e-3));
    REQUIRE(b.ratio_exact.has_value());
    CHECK(*b.ratio_exact == Rational(2, 3));
    // |A| = |S_O| -> ratio 1
    CHECK_THAT(blocklength_bounds(8, 8, c, 0.0).ratio, WithinAbs(1.0, 1e-12));
    // converse formula spot check
    CHECK_THAT(blocklength_bounds(4, 8, 1.0, 0.5).converse, WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(blocklength_bounds(4, 8, 0.0, 0.0), SemrdError);
    CHECK_THROWS_AS(blocklength_bounds(4, 8, 1.0, 1.0), SemrdError);
}
