#include "beliefscope/error.hpp"
#include "beliefscope/propagation.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace beliefscope;

namespace {

InstantiatedNetwork two_node(EvidenceSet ev = {}) {
    return apply_evidence(validate_network(fixtures::two_node()), ev);
}

NetworkSpec chain(std::size_t n) {
    NetworkSpec s;
    for (std::size_t i = 0; i < n; ++i) {
        NodeSpec node{"c" + std::to_string(i), NodeKind::chance, {"t", "f"}, {}, {{0.5, 0.5}}, {}, {}, {}};
        if (i) {
            node.parents = {"c" + std::to_string(i - 1)};
            node.cpt = {{0.7, 0.3}, {0.4, 0.6}};
        }
        s.nodes.push_back(node);
    }
    return s;
}

} // namespace

TEST_SUITE("propagation") {

TEST_CASE("observing F = t gives 0.45 / 0.55") {
    const auto inet = two_node({{{"F", "t"}}});
    const auto b = propagate(inet);
    CHECK(b.p("O", "t") == doctest::Approx(0.45 / 0.55).epsilon(1e-15));
    CHECK(b.p("O", "t") == doctest::Approx(0.8181818181818182).epsilon(1e-15));
    CHECK(b.at("F").p == Distribution{1.0, 0.0});
    CHECK(max_abs_diff(b, brute_force_beliefs(inet)) < 1e-12);
    CHECK(map_assignment(b) == std::map<std::string, std::string>{{"F", "t"}, {"O", "t"}});
}

TEST_CASE("no evidence gives marginals") {
    const auto b = propagate(two_node());
    CHECK(b.p("O", "t") == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b.p("F", "t") == doctest::Approx(0.55).epsilon(1e-15));
}

TEST_CASE("single node returns its prior") {
    const auto spec = parse_network_spec(R"({"nodes":[{"id":"X","states":["a","b","c"],"prior":[0.2,0.3,0.5]}]})");
    const auto inet = apply_evidence(validate_network(spec), {});
    CHECK(brute_force_beliefs(inet).at("X").p == Distribution{0.2, 0.3, 0.5});
    CHECK(max_abs_diff(propagate(inet), brute_force_beliefs(inet)) < 1e-15);
}

TEST_CASE("zero support raises at the node") {
    const auto spec = parse_network_spec(R"({"nodes":[
        {"id":"O","states":["t","f"],"prior":[0.5,0.5]},
        {"id":"F","states":["t","f"],"parent":"O","cpt":[[0,1],[0,1]]}]})");
    const auto inet = apply_evidence(validate_network(spec), {{{"F", "t"}}});
    try {
        propagate(inet);
        FAIL("expected ImpossibleEvidence");
    } catch (const ImpossibleEvidence& e) {
        CHECK(e.node() == "F");
        CHECK(std::string(e.what()).find("impossible evidence") != std::string::npos);
    }
    CHECK_THROWS_AS(brute_force_beliefs(inet), ImpossibleEvidence);
}

TEST_CASE("oracle cap") {
    const auto inet = apply_evidence(validate_network(chain(21)), {});
    CHECK_THROWS_AS(brute_force_beliefs(inet), CapExceeded);
    const auto small = apply_evidence(validate_network(chain(20)), {{{"c19", "t"}}});
    CHECK(max_abs_diff(propagate(small), brute_force_beliefs(small)) < 1e-12);
}

TEST_CASE("map ties go to the first state") {
    const Beliefs b({{"O", {"t", "f"}, {0.5, 0.5}}, {"P", {"a", "b", "c"}, {0.2, 0.4, 0.4}}});
    const auto m = map_assignment(b);
    CHECK(m.at("O") == "t");
    CHECK(m.at("P") == "b");
}

TEST_CASE("json output rounds to ten digits") {
    const auto j = beliefs_to_json(propagate(two_node({{{"F", "t"}}})));
    CHECK(j.find("0.8181818182") != std::string::npos);
}

TEST_CASE("property: message passing equals both enumerators") {
    oracle::Rng rng(21);
    for (int i = 0; i < 300; ++i) {
        const auto spec = oracle::random_tree(rng, oracle::pick(rng, 1, 10));
        const auto ev = oracle::random_evidence(rng, spec);
        const auto inet = apply_evidence(validate_network(spec), ev);
        const auto b = propagate(inet);
        CHECK(max_abs_diff(b, brute_force_beliefs(inet)) < 1e-9);
        CHECK(oracle::max_diff(b, oracle::enumerate(spec, ev)) < 1e-9);
        CHECK(oracle::well_formed(inet, b));
    }
}

TEST_CASE("property: child order does not matter") {
    oracle::Rng rng(22);
    for (int i = 0; i < 100; ++i) {
        const auto spec = oracle::random_tree(rng, oracle::pick(rng, 3, 10));
        const auto inet = apply_evidence(validate_network(spec), oracle::random_evidence(rng, spec));
        const auto base = propagate(inet);
        for (std::uint64_t seed = 1; seed <= 4; ++seed)
            CHECK(max_abs_diff(base, propagate(inet, {seed})) < 1e-12);
    }
}

TEST_CASE("property: full evidence clamps every node") {
    oracle::Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        const auto spec = oracle::random_tree(rng, oracle::pick(rng, 2, 8));
        const auto inet = apply_evidence(validate_network(spec), oracle::random_evidence(rng, spec, 1.0));
        CHECK(oracle::well_formed(inet, propagate(inet)));
    }
}

TEST_CASE("property: more evidence never revives a zero") {
    oracle::Rng rng(24);
    int compared = 0;
    for (int i = 0; i < 200; ++i) {
        const auto spec = oracle::random_tree(rng, oracle::pick(rng, 3, 8), 2, 3, 0.3);
        const auto net = validate_network(spec);
        auto ev = oracle::random_evidence(rng, spec, 0.2);
        auto more = ev;
        for (const auto& [k, v] : oracle::random_evidence(rng, spec, 0.3).assignments) more.assignments.emplace(k, v);
        Beliefs before, after;
        try {
            before = propagate(apply_evidence(net, ev));
            after = propagate(apply_evidence(net, more));
        } catch (const ImpossibleEvidence&) {
            continue;
        }
        ++compared;
        for (const auto& nb : before.nodes())
            for (std::size_t s = 0; s < nb.p.size(); ++s)
                if (nb.p[s] == 0.0) CHECK(after.at(nb.id).p[s] == 0.0);
    }
    CHECK(compared > 50);
}

TEST_CASE("property: propagate and oracle agree on impossibility") {
    oracle::Rng rng(25);
    for (int i = 0; i < 200; ++i) {
        const auto spec = oracle::random_tree(rng, oracle::pick(rng, 2, 7), 2, 3, 0.4);
        const auto ev = oracle::random_evidence(rng, spec, 0.5);
        const auto inet = apply_evidence(validate_network(spec), ev);
        const bool impossible = oracle::enumerate(spec, ev).empty();
        if (impossible) {
            CHECK_THROWS_AS(propagate(inet), ImpossibleEvidence);
        } else {
            CHECK(oracle::max_diff(propagate(inet), oracle::enumerate(spec, ev)) < 1e-9);
        }
    }
}

}
