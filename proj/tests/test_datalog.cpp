#include <catch2/catch_amalgamated.hpp>

#include "semrd/datalog.hpp"
#include "test_util.hpp"

using namespace semrd;
using namespace semrd::testutil;

TEST_CASE("parser accepts rules, facts and comments") {
    ParsedProgram p = parse_program(
        "% a comment\n"
        "Path(x,y) :- Edge(x,y).  % trailing comment\n"
        "Edge(a,b). Edge(b,c).\n");
    CHECK(p.rule_count == 1);
    CHECK(p.facts.size() == 2);
    CHECK(p.program->find_predicate("Edge").has_value());
    CHECK(p.program->find_predicate("Path").has_value());
}

TEST_CASE("duplicate facts are deduplicated") {
    ParsedProgram p = parse_program("Edge(a,b). Edge(a,b). Edge(b,c).\n");
    CHECK(p.facts.size() == 2);
}

TEST_CASE("facts are kept in canonical order") {
    ParsedProgram p = parse_program("Edge(c,d). Edge(a,b). Apex(a). Edge(b,a).\n");
    std::vector<std::string> got;
    for (const auto& a : p.facts) got.push_back(p.program->render(a));
    std::vector<std::string> sorted = got;
    std::sort(sorted.begin(), sorted.end());
    CHECK(got == sorted);
}

TEST_CASE("parse errors carry positions and kind") {
    CHECK_THROWS_AS(parse_program("Edge(X,b).\n"), SemrdError);          // non-ground fact
    CHECK_THROWS_AS(parse_program("p(X,Y) :- q(X,X).\n"), SemrdError);   // unsafe head var
    CHECK_THROWS_AS(parse_program("p(a). p(a,b).\n"), SemrdError);       // arity mismatch
    CHECK_THROWS_AS(parse_program("p(X) :- q(X).\np(X) :- q(X).\n"), SemrdError); // dup rule
    CHECK_THROWS_AS(parse_program("p(a\n"), SemrdError);                 // syntax
    try {
        parse_program("Edge(X,b).\n");
        FAIL("expected a parse error");
    } catch (const SemrdError& e) {
        CHECK(e.kind() == SemrdError::Kind::Parse);
    }
}

TEST_CASE("closure of the path example has ten atoms") {
    auto ex = path_example();
    ClosureResult cl = closure(ex.sender.program, ex.sender.facts);
    CHECK(cl.closure.size() == 10);
    // round 1 adds Path(a,c) and Path(a,d); round 2 adds nothing
    CHECK(cl.stabilization_round == 1);
    CHECK(cl.closure.contains(parse_atom(*ex.sender.program, "Path(a,d)")));
}

TEST_CASE("iterate_consequence is monotone and T^0 is identity") {
    auto ex = path_example();
    FactSet t0 = iterate_consequence(ex.sender.program, ex.sender.facts, 0);
    CHECK(rendered(t0) == rendered(ex.sender.facts));
    FactSet prev = t0;
    for (int n = 1; n <= 4; ++n) {
        FactSet tn = iterate_consequence(ex.sender.program, ex.sender.facts, n);
        CHECK(prev.is_subset_of(tn));
        prev = tn;
    }
    CHECK(rendered(prev) == rendered(closure(ex.sender.program, ex.sender.facts).closure));
}

TEST_CASE("derivation depths from the core match hand values") {
    auto ex = path_example();
    // the core is the 4 edges; depths of derived Path atoms
    std::vector<GroundAtom> edges;
    for (const auto& a : ex.sender.facts)
        if (ex.sender.program->render(a).rfind("Edge", 0) == 0) edges.push_back(a);
    FactSet core(ex.sender.program, edges);
    REQUIRE(core.size() == 4);
    auto depth = [&](const char* s) {
        return derivation_depth(ex.sender.program, core, parse_atom(*ex.sender.program, s));
    };
    CHECK(depth("Edge(a,b)") == 0);
    CHECK(depth("Path(a,b)") == 1);
    CHECK(depth("Path(b,c)") == 1);
    CHECK(depth("Path(c,d)") == 1);
    CHECK(depth("Path(a,c)") == 1);
    CHECK(depth("Path(b,d)") == 2);
    CHECK(depth("Path(a,d)") == 2);
    CHECK_FALSE(depth("Edge(d,c)").has_value());
}

TEST_CASE("closure_contains with a round bound") {
    auto ex = path_example();
    std::vector<GroundAtom> edges;
    for (const auto& a : ex.sender.facts)
        if (ex.sender.program->render(a).rfind("Edge", 0) == 0) edges.push_back(a);
    FactSet core(ex.sender.program, edges);
    GroundAtom bd = parse_atom(*ex.sender.program, "Path(b,d)");
    CHECK_FALSE(closure_contains(ex.sender.program, core, bd, 1));
    CHECK(closure_contains(ex.sender.program, core, bd, 2));
    CHECK(closure_contains(ex.sender.program, core, bd));
}

TEST_CASE("fact set algebra") {
    auto ex = path_example();
    const FactSet& s = ex.sender.facts;
    GroundAtom ab = parse_atom(*ex.sender.program, "Edge(a,b)");
    FactSet without = s.with_removed(ab);
    CHECK(without.size() == s.size() - 1);
    CHECK_FALSE(without.contains(ab));
    CHECK(without.with_added(ab).size() == s.size());
    CHECK(s.intersected(without).size() == without.size());
    CHECK(s.unioned(without).size() == s.size());
    CHECK(s.subtracted(without).size() == 1);
    CHECK(without.is_subset_of(s));
    CHECK_FALSE(s.is_subset_of(without));
}

TEST_CASE("semi-naive evaluation matches the naive oracle on random programs") {
    Rng rng(20260826, 0);
    for (int trial = 0; trial < 120; ++trial) {
        Rng trial_rng = rng.split(static_cast<std::uint64_t>(trial));
        RandomKb r = random_kb(trial_rng);
        INFO("program:\n" << r.text);
        OracleResult oracle = naive_closure(r.kb.program, r.kb.facts);
        ClosureResult cl = closure(r.kb.program, r.kb.facts);
        CHECK(rendered(cl.closure) == oracle.closure);
        CHECK(cl.stabilization_round == oracle.rounds);
        auto depths = closure_depths(r.kb.program, r.kb.facts);
        for (const auto& [atom, round] : depths) {
            auto it = oracle.depth.find(r.kb.program->render(atom));
            REQUIRE(it != oracle.depth.end());
            CHECK(round == it->second);
        }
    }
}

TEST_CASE("closure operator laws: reflexive, monotone, idempotent") {
    Rng rng(77, 0);
    for (int trial = 0; trial < 60; ++trial) {
        Rng trial_rng = rng.split(static_cast<std::uint64_t>(trial) + 1000);
        RandomKb r = random_kb(trial_rng);
        INFO("program:\n" << r.text);
        FactSet cl = closure(r.kb.program, r.kb.facts).closure;
        // Cn1: reflexive
        CHECK(r.kb.facts.is_subset_of(cl));
        // Cn3: idempotent
        FactSet cl2 = closure(r.kb.program, cl).closure;
        CHECK(rendered(cl2) == rendered(cl));
        // Cn2: monotone under a random subset
        std::vector<GroundAtom> sub;
        for (const auto& a : r.kb.facts)
            if (trial_rng.bernoulli(0.5)) sub.push_back(a);
        FactSet sub_cl = closure(r.kb.program, FactSet(r.kb.program, sub)).closure;
        CHECK(sub_cl.is_subset_of(cl));
    }
}

TEST_CASE("make_atom and parse_atom reject unknown symbols") {
    auto ex = path_example();
    CHECK_THROWS_AS(make_atom(*ex.sender.program, "Nope", {"a"}), SemrdError);
    CHECK_THROWS_AS(make_atom(*ex.sender.program, "Edge", {"a"}), SemrdError);
    CHECK_THROWS_AS(parse_atom(*ex.sender.program, "Edge(a,z)"), SemrdError);
    CHECK(parse_atom(*ex.sender.program, "Edge(a, b)") ==
          make_atom(*ex.sender.program, "Edge", {"a", "b"}));
}
