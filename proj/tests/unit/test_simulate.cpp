#include <doctest.h>

#include <cmath>

#include "dynlogit/error.hpp"
#include "dynlogit/simulate.hpp"
#include "dynlogit/synthetic.hpp"
#include "testkit.hpp"

using namespace dynlogit;

namespace {

VertexSet set_of(std::size_t n, std::initializer_list<VertexIndex> members) {
    VertexSet s(n);
    for (auto v : members) s.insert(v);
    return s;
}

NetworkPanel small_panel() {
    RiskSet rs({"a", "b", "c", "d", "e", "f"});
    std::vector<Snapshot> snaps;
    snaps.push_back(make_snapshot(1, set_of(6, {0, 1, 2}), {{0, 1}}, {{"day", std::string("Monday")}}));
    snaps.push_back(make_snapshot(2, set_of(6, {0, 1, 3, 4}), {{0, 1}, {3, 4}}, {{"day", std::string("Tuesday")}}));
    snaps.push_back(make_snapshot(3, set_of(6, {1, 3, 4, 5}), {{1, 3}}, {{"day", std::string("Wednesday")}}));
    return NetworkPanel(rs, snaps);
}

ModelSpec lag_model() {
    return parse_model_spec(R"({
      "vertex_terms": [{"kind": "intercept"}, {"kind": "lag_indicator"}],
      "edge_terms": [{"kind": "intercept"}, {"kind": "lag_indicator"}]
    })");
}

FitResult lag_fit(double vi, double vl, double ei, double el) {
    return fit_from_coefficients(lag_model(), {vi, vl, ei, el});
}

}  // namespace

TEST_CASE("central interval order statistics") {
    std::vector<double> d100(100);
    for (std::size_t k = 0; k < 100; ++k) d100[k] = static_cast<double>(k + 1);
    auto [lo, hi] = central_interval(d100, 0.95);
    CHECK(lo == 3.0);
    CHECK(hi == 98.0);

    std::vector<double> d200(200);
    for (std::size_t k = 0; k < 200; ++k) d200[k] = static_cast<double>(200 - k);
    auto [lo2, hi2] = central_interval(d200, 0.95);
    CHECK(lo2 == 6.0);
    CHECK(hi2 == 195.0);

    auto [a, b] = central_interval({7.0}, 0.95);
    CHECK(a == 7.0);
    CHECK(b == 7.0);
    CHECK_THROWS_AS(central_interval({}, 0.95), RangeError);
    CHECK_THROWS_AS(central_interval({1.0}, 1.0), RangeError);
}

TEST_CASE("random streams are keyed by seed, replicate and time") {
    RngStream a(1, 0, 5);
    RngStream b(1, 0, 5);
    RngStream c(1, 1, 5);
    RngStream d(1, 0, 6);
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    CHECK(x != d.uniform());
    for (int k = 0; k < 1000; ++k) {
        double u = a.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
}

TEST_CASE("extreme coefficients give deterministic samples") {
    const auto panel = small_panel();
    RngStream rng(3, 0, 3);
    auto full = one_step_sample(lag_fit(50, 0, 50, 0), lag_model(), panel, 3, rng);
    CHECK(full.present.count() == 6);
    CHECK(full.edges.size() == 15);
    auto empty = one_step_sample(lag_fit(-50, 0, 50, 0), lag_model(), panel, 3, rng);
    CHECK(empty.present.count() == 0);
    CHECK(empty.edges.empty());
    // Persistence only: yesterday's state is copied.
    auto copy = one_step_sample(lag_fit(-50, 100, -50, 100), lag_model(), panel, 3, rng);
    CHECK(copy.present == panel.find(2)->present);
    CHECK(copy.edges == std::vector<Edge>{{0, 1}, {3, 4}});
    CHECK(copy.time_attrs == panel.find(3)->time_attrs);
}

TEST_CASE("threshold classification") {
    const auto panel = small_panel();
    SUBCASE("ties stay absent") {
        auto s = classify_threshold(lag_fit(0, 0, 0, 0), lag_model(), panel, 3);
        CHECK(s.present.count() == 0);
    }
    SUBCASE("probability 0.9 everywhere gives the complete graph") {
        const double l = testkit::logit(0.9);
        auto s = classify_threshold(lag_fit(l, 0, l, 0), lag_model(), panel, 3);
        CHECK(s.present.count() == 6);
        CHECK(s.edges.size() == 15);
    }
    SUBCASE("threshold state is the per-unit mode of many draws") {
        const auto fit = lag_fit(-0.4, 0.9, -0.3, 0.8);
        auto mode = classify_threshold(fit, lag_model(), panel, 3);
        std::vector<int> hits(6, 0);
        SimConfig fixed;
        fixed.fixed_vertex_set = true;
        std::vector<int> edge_hits(36, 0);
        const int n = 10000;
        for (int r = 0; r < n; ++r) {
            RngStream rng(9, static_cast<std::uint64_t>(r), 3);
            auto s = one_step_sample(fit, lag_model(), panel, 3, rng);
            for (VertexIndex v = 0; v < 6; ++v) hits[v] += s.present.contains(v);
            RngStream rng2(10, static_cast<std::uint64_t>(r), 3);
            auto f = one_step_sample(fit, lag_model(), panel, 3, rng2, fixed);
            for (const auto& e : f.edges) ++edge_hits[e.i * 6 + e.j];
        }
        for (VertexIndex v = 0; v < 6; ++v) CHECK(mode.present.contains(v) == (hits[v] > n / 2));
        SimConfig c;
        c.fixed_vertex_set = true;
        auto full_mode = classify_threshold(fit, lag_model(), panel, 3, c);
        for (VertexIndex i = 0; i < 6; ++i)
            for (VertexIndex j = i + 1; j < 6; ++j)
                CHECK(full_mode.has_edge(i, j) == (edge_hits[i * 6 + j] > n / 2));
    }
}

TEST_CASE("edges are conditionally independent given the vertex set") {
    const auto panel = small_panel();
    const auto fit = lag_fit(0, 0, -0.2, 1.0);
    SimConfig fixed;
    fixed.fixed_vertex_set = true;
    const int n = 20000;
    // (0,1) was an edge at t=2, (0,2) was not.
    int a = 0, b = 0, ab = 0;
    for (int r = 0; r < n; ++r) {
        RngStream rng(4, static_cast<std::uint64_t>(r), 3);
        auto s = one_step_sample(fit, lag_model(), panel, 3, rng, fixed);
        const bool x = s.has_edge(0, 1);
        const bool y = s.has_edge(0, 2);
        a += x;
        b += y;
        ab += x && y;
    }
    const double pa = logistic(0.8);
    const double pb = logistic(-0.2);
    const double se = std::sqrt(0.25 / n);
    CHECK(std::abs(a / double(n) - pa) < 4 * se);
    CHECK(std::abs(b / double(n) - pb) < 4 * se);
    CHECK(std::abs(ab / double(n) - pa * pb) < 4 * se);
}

TEST_CASE("one-step intervals are reproducible and shaped per step") {
    const auto syn = beach_like_panel(2);
    const auto fit = fit_from_coefficients(syn.spec, syn.coefficients);
    SimConfig c;
    c.replicates = 40;
    c.seed = 5;
    c.threads = 1;
    auto one = one_step_intervals(fit, syn.spec, syn.panel, c);
    c.threads = 4;
    auto four = one_step_intervals(fit, syn.spec, syn.panel, c);
    CHECK(adequacy_report_json(one.report) == adequacy_report_json(four.report));
    CHECK(one.report.total_steps == 28);
    REQUIRE(one.report.glis.size() == GliVector::kCount);
    for (const auto& g : one.report.glis) {
        CHECK(g.steps.size() == 28);
        for (const auto& s : g.steps) CHECK(s.lower <= s.upper);
    }
    c.seed = 6;
    CHECK(adequacy_report_json(one_step_intervals(fit, syn.spec, syn.panel, c).report) !=
          adequacy_report_json(one.report));
    CHECK(adequacy_report_csv(one.report).rfind("step,gli,lower,upper,observed,inside\n", 0) == 0);
}

TEST_CASE("projection") {
    const auto panel = small_panel();
    const auto spec = lag_model();
    SUBCASE("horizon one matches a one-step sample on the same stream") {
        const auto fit = lag_fit(-0.3, 0.8, -0.5, 1.2);
        SimConfig c;
        c.replicates = 5;
        c.keep_snapshots = true;
        c.seed = 11;
        auto traj = project(fit, spec, panel, c);
        REQUIRE(traj.size() == 5);
        for (std::size_t r = 0; r < 5; ++r) {
            RngStream rng(11, r, 4);
            auto s = one_step_sample(fit, spec, panel, 4, rng);
            REQUIRE(traj[r].snapshots.size() == 1);
            CHECK(traj[r].snapshots[0] == s);
            CHECK(traj[r].times == std::vector<int>{4});
            CHECK(std::get<std::string>(s.time_attrs.at("day")) == "Thursday");
        }
    }
    SUBCASE("a model that never turns anyone on stays empty") {
        SimConfig c;
        c.horizon = 6;
        c.replicates = 3;
        auto traj = project(lag_fit(-60, 0, -60, 0), spec, panel, c);
        for (const auto& t : traj) {
            CHECK(t.gli.size() == 6);
            for (const auto& g : t.gli) CHECK(g.size == 0);
        }
    }
    SUBCASE("sampled snapshots form a valid panel") {
        SimConfig c;
        c.horizon = 8;
        auto extended = simulate_panel(lag_fit(0.2, 0.5, -0.5, 1.0), spec, panel, c);
        CHECK(extended.snapshots().size() == 11);
        CHECK(extended.last_time() == 11);
        CHECK(panel_from_text(panel_to_text(extended)) == extended);
    }
    SUBCASE("second-order lags cross the observed/sampled seam") {
        auto spec2 = parse_model_spec(R"({"vertex_terms": [{"kind": "intercept"}, {"kind": "lag_indicator", "lag": 2}]})");
        // Presence copies the state two steps back.
        auto fit = fit_from_coefficients(spec2, {-60, 120});
        SimConfig c;
        c.horizon = 4;
        c.replicates = 1;
        c.keep_snapshots = true;
        auto traj = project(fit, spec2, panel, c)[0];
        REQUIRE(traj.snapshots.size() == 4);
        CHECK(traj.snapshots[0].present == panel.find(2)->present);
        CHECK(traj.snapshots[1].present == panel.find(3)->present);
        CHECK(traj.snapshots[2].present == panel.find(2)->present);
        CHECK(traj.snapshots[3].present == panel.find(3)->present);
    }
    SUBCASE("starting after a gap needs observed lags") {
        SimConfig c;
        c.start = 6;
        CHECK_THROWS_AS(project(lag_fit(0, 0, 0, 0), spec, panel, c), GapError);
    }
    SUBCASE("mismatched coefficients are rejected") {
        CHECK_THROWS_AS(fit_from_coefficients(spec, {1.0}), DimensionError);
    }
}
