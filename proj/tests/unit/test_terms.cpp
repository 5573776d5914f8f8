#include <doctest.h>

#include <cmath>
#include <random>

#include "dynlogit/error.hpp"
#include "dynlogit/gli.hpp"
#include "dynlogit/synthetic.hpp"
#include "dynlogit/terms.hpp"
#include "testkit.hpp"

using namespace dynlogit;

namespace {

VertexSet set_of(std::size_t n, std::initializer_list<VertexIndex> members) {
    VertexSet s(n);
    for (auto v : members) s.insert(v);
    return s;
}

// Five vertices; a and b regular. Times 1, 2, 3, 5 observed, 4 a gap.
NetworkPanel five_day_panel() {
    RiskSet rs({"a", "b", "c", "d", "e"},
               {{{"regular", true}, {"team", true}}, {{"regular", true}}, {{"regular", false}}, {}, {}});
    std::vector<Snapshot> snaps;
    snaps.push_back(make_snapshot(1, set_of(5, {0, 1, 2}), {{0, 1}, {0, 2}, {1, 2}}, {{"day", std::string("Monday")}}));
    snaps.push_back(make_snapshot(2, set_of(5, {0, 1, 3}), {{0, 3}}, {{"day", std::string("Tuesday")}}));
    snaps.push_back(make_snapshot(3, set_of(5, {0, 1, 2, 3}), {{0, 1}}, {{"day", std::string("Wednesday")}}));
    snaps.push_back(make_snapshot(5, set_of(5, {1, 4}), {{1, 4}}, {{"day", std::string("Friday")}}));
    return NetworkPanel(rs, snaps, {4});
}

TermSpec term(Target target, TermKind kind, int lag = 0) {
    TermSpec t;
    t.target = target;
    t.kind = kind;
    t.lag = lag;
    return t;
}

bool has_finding(const ValidationReport& r, Severity s, const std::string& needle) {
    for (const auto& f : r.findings)
        if (f.severity == s && f.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("model specs parse, default and round-trip") {
    const auto spec = parse_model_spec(R"({
      "name": "demo",
      "vertex_terms": [{"kind": "intercept"}, {"kind": "lag_indicator"}, {"kind": "seasonal"}],
      "edge_terms": [{"kind": "mixing", "params": {"attr": "regular", "class": "RN"}},
                     {"kind": "lag_cycle_embed", "lag": 2, "params": {"max_len": 5}}]
    })");
    REQUIRE(spec.vertex_terms.size() == 3);
    CHECK(spec.vertex_terms[1].lag == 1);
    CHECK(spec.vertex_terms[2].params.attr == "day");
    CHECK(spec.edge_terms[0].params.mixing == MixingClass::mixed);
    CHECK(spec.max_lag() == 2);
    CHECK(spec.column_names() ==
          std::vector<std::string>{"v:intercept", "v:lag1", "v:day[ref=Monday]", "e:mixing[regular:RN]",
                                   "e:cycles5.lag2"});
    CHECK(parse_model_spec(model_spec_to_text(spec)) == spec);
}

TEST_CASE("malformed specs are rejected") {
    CHECK_THROWS_AS(parse_model_spec(R"({"vertex_terms": [{"kind": "nope"}]})"), SpecError);
    CHECK_THROWS_AS(parse_model_spec(R"({"vertex_terms": [{"kind": "intercept", "extra": 1}]})"), SpecError);
    CHECK_THROWS_AS(parse_model_spec(R"({"vertex_terms": [{"kind": "log_size"}]})"), SpecError);
    CHECK_THROWS_AS(parse_model_spec(R"({"edge_terms": [{"kind": "lag_triangle"}]})"), SpecError);
    CHECK_THROWS_AS(parse_model_spec(R"({"vertex_terms": [{"kind": "intercept", "lag": 1}]})"), SpecError);
    CHECK_THROWS_AS(parse_model_spec(R"({"vertex_terms": [{"kind": "lag_indicator", "lag": 0}]})"), SpecError);
    CHECK_THROWS_AS(parse_model_spec(R"({"edge_terms": [{"kind": "lag_cycle_embed", "params": {"max_len": 10}}]})"),
                    SpecError);
    CHECK_THROWS_AS(parse_model_spec(R"({"vertex_terms": [{"kind": "attr_dummy"}]})"), SpecError);
    CHECK_THROWS_AS(parse_model_spec(R"({"edge_terms": [{"kind": "mixing", "params": {"attr": "r", "class": "XX"}}]})"),
                    SpecError);
    auto both = term(Target::vertex, TermKind::individual_dummy);
    both.params.label = "a";
    both.params.group = "team";
    CHECK_THROWS_AS(check_term(both), SpecError);
}

TEST_CASE("expansion gives one column per term") {
    const auto panel = five_day_panel();
    const auto spec = parse_model_spec(R"({
      "vertex_terms": [{"kind": "intercept"}, {"kind": "seasonal"}],
      "edge_terms": [{"kind": "mixing", "params": {"attr": "regular"}},
                     {"kind": "individual_dummy", "params": {"group": "team"}}]
    })");
    const auto ex = expand_model(spec, panel);
    CHECK(ex.expanded());
    CHECK(ex.column_names() == std::vector<std::string>{
                                   "v:intercept", "v:day[Tuesday]", "v:day[Wednesday]", "v:day[Thursday]",
                                   "v:day[Friday]", "v:day[Saturday]", "v:day[Sunday]", "e:mixing[regular:RR]",
                                   "e:mixing[regular:NN]", "e:mixing[regular:RN]", "e:indiv[a]"});
    CHECK(expand_model(ex, panel) == ex);
}

TEST_CASE("lag windows under both gap policies") {
    const auto panel = five_day_panel();
    CHECK(usable_times(panel, 1, LagPolicy::exclude) == std::vector<int>{2, 3});
    CHECK(usable_times(panel, 2, LagPolicy::exclude) == std::vector<int>{3});
    CHECK(usable_times(panel, 1, LagPolicy::bridge) == std::vector<int>{2, 3, 5});
    CHECK(usable_times(panel, 0, LagPolicy::exclude).size() == 4);
    try {
        lag_window(panel, 5, 1, LagPolicy::exclude);
        FAIL("expected a gap error");
    } catch (const GapError& e) {
        CHECK(e.t() == 5);
        CHECK(e.missing() == 4);
    }
    auto w = lag_window(panel, 5, 2, LagPolicy::bridge);
    REQUIRE(w.size() == 2);
    CHECK(w[0]->t == 3);
    CHECK(w[1]->t == 2);
}

TEST_CASE("time attributes advance weekdays past the last observation") {
    const auto panel = five_day_panel();
    CHECK(std::get<std::string>(time_attrs_at(panel, 4).at("day")) == "Thursday");
    CHECK(std::get<std::string>(time_attrs_at(panel, 6).at("day")) == "Saturday");
    CHECK(std::get<std::string>(time_attrs_at(panel, 12).at("day")) == "Friday");
    CHECK(std::get<std::string>(time_attrs_at(panel, 2).at("day")) == "Tuesday");
}

TEST_CASE("statistics read the right state") {
    const auto panel = five_day_panel();
    SUBCASE("lag indicator and triangles read the previous snapshot") {
        auto lag = term(Target::vertex, TermKind::lag_indicator, 1);
        CHECK(vertex_stat(lag, panel, 2, 2) == 1.0);
        CHECK(vertex_stat(lag, panel, 2, 3) == 0.0);
        auto tri = term(Target::vertex, TermKind::lag_triangle, 1);
        CHECK(vertex_stat(tri, panel, 2, 0) == 1.0);
        CHECK(vertex_stat(tri, panel, 3, 0) == 0.0);
        CHECK_THROWS_AS(vertex_stat(lag, panel, 5, 0), GapError);
        CHECK(vertex_stat(lag, panel, 5, 3, LagPolicy::bridge) == 1.0);
    }
    SUBCASE("log size reads the current presence set") {
        auto ls = term(Target::edge, TermKind::log_size);
        CHECK(edge_stat(ls, panel, 3, 0, 1, set_of(5, {0, 1, 2, 3})) == doctest::Approx(std::log(4.0)));
        CHECK(edge_stat(ls, panel, 3, 0, 1, set_of(5, {0, 1})) == doctest::Approx(std::log(2.0)));
        CHECK_THROWS_AS(edge_stat(ls, panel, 3, 0, 4, set_of(5, {0, 1})), ValidationError);
    }
    SUBCASE("cycle embedding is zero without the lagged edge") {
        auto cyc = term(Target::edge, TermKind::lag_cycle_embed, 1);
        cyc.params.max_len = 3;
        auto present = set_of(5, {0, 1, 2, 3});
        CHECK(edge_stat(cyc, panel, 2, 0, 1, present) == doctest::Approx(std::log(2.0)));
        CHECK(edge_stat(cyc, panel, 3, 0, 1, present) == 0.0);
        CHECK(edge_stat(cyc, panel, 3, 0, 3, present) == 0.0);
    }
    SUBCASE("mixing, dummies and seasonal levels") {
        auto mix = term(Target::edge, TermKind::mixing);
        mix.params.attr = "regular";
        mix.params.mixing = MixingClass::mixed;
        auto present = set_of(5, {0, 1, 2, 3});
        CHECK(edge_stat(mix, panel, 3, 0, 2, present) == 1.0);
        CHECK(edge_stat(mix, panel, 3, 0, 1, present) == 0.0);
        auto ind = term(Target::edge, TermKind::individual_dummy);
        ind.params.label = "c";
        CHECK(edge_stat(ind, panel, 3, 2, 3, present) == 1.0);
        CHECK(edge_stat(ind, panel, 3, 0, 1, present) == 0.0);
        auto day = term(Target::vertex, TermKind::seasonal);
        day.params.attr = "day";
        day.params.level = "Wednesday";
        CHECK(vertex_stat(day, panel, 3, 0) == 1.0);
        CHECK(vertex_stat(day, panel, 2, 0) == 0.0);
        auto attr = term(Target::vertex, TermKind::attr_dummy);
        attr.params.attr = "regular";
        CHECK(vertex_stat(attr, panel, 1, 1) == 1.0);
        CHECK(vertex_stat(attr, panel, 1, 3) == 0.0);
    }
}

TEST_CASE("pair cycle counts of named graphs") {
    testkit::DenseGraph k3(3);
    k3.add(0, 1);
    k3.add(1, 2);
    k3.add(0, 2);
    CHECK(pair_cycle_count(testkit::embed(k3), 0, 1, 3) == 1);

    testkit::DenseGraph k4(4);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) k4.add(a, b);
    CHECK(pair_cycle_count(testkit::embed(k4), 0, 1, 3) == 2);
    CHECK(pair_cycle_count(testkit::embed(k4), 0, 1, 4) == 4);

    testkit::DenseGraph c4(4);
    c4.add(0, 1);
    c4.add(1, 2);
    c4.add(2, 3);
    c4.add(3, 0);
    CHECK(pair_cycle_count(testkit::embed(c4), 0, 1, 3) == 0);
    CHECK(pair_cycle_count(testkit::embed(c4), 0, 1, 4) == 1);
    CHECK_THROWS_AS(pair_cycle_count(testkit::embed(c4), 0, 1, 2), RangeError);
}

TEST_CASE("pair cycle counts agree with enumeration on random graphs") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 60; ++rep) {
        auto g = testkit::random_graph(7, 0.55, rng);
        auto s = testkit::embed(g);
        for (int len = 3; len <= 7; ++len)
            for (std::size_t a = 0; a < g.n; ++a)
                for (std::size_t b = a + 1; b < g.n; ++b)
                    if (g.adj[a][b]) {
                        CHECK(pair_cycle_count(s, static_cast<VertexIndex>(a), static_cast<VertexIndex>(b), len) ==
                              testkit::oracle_pair_cycles(g, a, b, len));
                    }
    }
}

TEST_CASE("lagged triangles sum to three closed triads") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        auto g = testkit::random_graph(9, 0.4, rng);
        auto s = testkit::embed(g);
        std::uint64_t total = 0;
        for (VertexIndex v = 0; v < g.n; ++v) total += triangle_count(s, v);
        CHECK(total == 3 * triad_census(s)[3]);
    }
}

TEST_CASE("validation findings") {
    const auto panel = five_day_panel();
    SUBCASE("unknown attributes are errors") {
        auto r = validate_model(
            parse_model_spec(R"({"vertex_terms": [{"kind": "attr_dummy", "params": {"attr": "height"}}]})"), panel);
        CHECK_FALSE(r.ok());
        CHECK(has_finding(r, Severity::error, "height"));
    }
    SUBCASE("intercept with a full mixing set is collinear") {
        auto r = validate_model(parse_model_spec(R"({"edge_terms": [{"kind": "intercept"},
            {"kind": "mixing", "params": {"attr": "regular"}}]})"),
                                panel);
        CHECK(r.ok());
        CHECK(has_finding(r, Severity::warning, "collinear"));
    }
    SUBCASE("unobserved seasonal levels are reported") {
        auto r = validate_model(parse_model_spec(R"({"vertex_terms": [{"kind": "intercept"}, {"kind": "seasonal"}]})"),
                                panel);
        CHECK(has_finding(r, Severity::warning, "Sunday"));
        CHECK_FALSE(has_finding(r, Severity::warning, "collinear"));
    }
    SUBCASE("usable steps") {
        auto r = validate_model(parse_model_spec(R"({"vertex_terms": [{"kind": "lag_indicator"}]})"), panel);
        CHECK(r.transition_steps() == 2);
        CHECK(has_finding(r, Severity::info, "2 usable"));
        auto none = validate_model(parse_model_spec(R"({"vertex_terms": [{"kind": "lag_indicator", "lag": 4}]})"),
                                   panel);
        CHECK_FALSE(none.ok());
    }
}

TEST_CASE("synthetic beach panel has the expected shape") {
    const auto syn = beach_like_panel(1);
    CHECK(syn.panel.risk_set().size() == 95);
    CHECK(syn.panel.snapshots().size() == 30);
    CHECK(syn.panel.gaps() == std::vector<int>{25});
    CHECK(usable_times(syn.panel, 1, LagPolicy::exclude).size() == 28);
    CHECK(syn.coefficients.size() == syn.spec.column_count());
}
