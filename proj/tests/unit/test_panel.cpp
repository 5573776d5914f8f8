#include <doctest.h>

#include <fstream>

#include "dynlogit/error.hpp"
#include "dynlogit/panel.hpp"
#include "testkit.hpp"

using namespace dynlogit;

namespace {

RiskSet abc() { return RiskSet({"a", "b", "c", "d"}, {{{"regular", true}}, {{"regular", false}}, {}, {}}); }

VertexSet set_of(std::size_t n, std::initializer_list<VertexIndex> members) {
    VertexSet s(n);
    for (auto v : members) s.insert(v);
    return s;
}

NetworkPanel toy_panel() {
    auto rs = abc();
    std::vector<Snapshot> snaps;
    snaps.push_back(make_snapshot(1, set_of(4, {0, 1, 2}), {{0, 1}, {1, 2}}, {{"day", std::string("Monday")}}));
    snaps.push_back(make_snapshot(2, set_of(4, {0, 2}), {{0, 2}}, {{"day", std::string("Tuesday")}}));
    snaps.push_back(make_snapshot(4, set_of(4, {}), {}, {{"day", std::string("Thursday")}}));
    return NetworkPanel(rs, snaps, {3});
}

void write(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("vertex sets track membership") {
    VertexSet s(130);
    CHECK(s.empty());
    s.insert(0);
    s.insert(64);
    s.insert(129);
    CHECK(s.count() == 3);
    CHECK(s.contains(64));
    CHECK_FALSE(s.contains(65));
    CHECK_FALSE(s.contains(1000));
    s.erase(64);
    CHECK(s.members() == std::vector<VertexIndex>{0, 129});
    CHECK_THROWS_AS(s.insert(130), RangeError);
    CHECK(VertexSet::full(70).count() == 70);
}

TEST_CASE("attribute coding") {
    CHECK_FALSE(attr_truthy(AttrValue{}));
    CHECK_FALSE(attr_truthy(AttrValue{false}));
    CHECK_FALSE(attr_truthy(AttrValue{std::int64_t{0}}));
    CHECK_FALSE(attr_truthy(AttrValue{std::string()}));
    CHECK(attr_truthy(AttrValue{std::string("yes")}));
    CHECK(attr_truthy(AttrValue{2.5}));
    CHECK(attr_equals(AttrValue{std::int64_t{1}}, AttrValue{1.0}));
}

TEST_CASE("risk set fills missing attribute columns and rejects duplicates") {
    auto rs = abc();
    CHECK(rs.size() == 4);
    CHECK(rs.has_attribute("regular"));
    REQUIRE(rs.attr(3, "regular") != nullptr);
    CHECK(std::holds_alternative<std::monostate>(*rs.attr(3, "regular")));
    CHECK(rs.attr(0, "missing") == nullptr);
    CHECK(rs.find("c") == VertexIndex{2});
    CHECK_FALSE(rs.find("zz").has_value());
    CHECK_THROWS_AS(RiskSet({"a", "a"}), ValidationError);
}

TEST_CASE("snapshots canonicalize and validate edges") {
    auto s = make_snapshot(1, set_of(4, {0, 1, 2}), {{2, 1}, {0, 1}});
    CHECK(s.edges == std::vector<Edge>{{0, 1}, {1, 2}});
    CHECK(s.has_edge(2, 1));
    CHECK_FALSE(s.has_edge(0, 2));
    CHECK(s.edge_position(1, 2) == std::size_t{1});
    CHECK_THROWS_AS(make_snapshot(1, set_of(4, {0, 1}), {{1, 1}}), ValidationError);
    CHECK_THROWS_AS(make_snapshot(1, set_of(4, {0, 1}), {{0, 1}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(make_snapshot(1, set_of(4, {0, 1}), {{0, 3}}), ValidationError);
}

TEST_CASE("panels enforce their invariants") {
    auto p = toy_panel();
    CHECK(p.snapshots().size() == 3);
    CHECK(p.is_gap(3));
    CHECK(p.find(3) == nullptr);
    CHECK(p.first_time() == 1);
    CHECK(p.last_time() == 4);
    auto snaps = p.snapshots();
    CHECK_THROWS_AS(NetworkPanel(abc(), {snaps[0], snaps[0]}), ValidationError);
    CHECK_THROWS_AS(NetworkPanel(abc(), snaps, {2}), ValidationError);
    CHECK_THROWS_AS(NetworkPanel(abc(), snaps, {}, true), ValidationError);
    CHECK_THROWS_AS(NetworkPanel(RiskSet({"a"}), snaps), ValidationError);
}

TEST_CASE("panel text round-trips and is canonical") {
    auto p = toy_panel();
    auto text = panel_to_text(p);
    auto back = panel_from_text(text);
    CHECK(back == p);
    CHECK(panel_to_text(back) == text);

    auto dir = testkit::temp_dir("panel_io");
    save_panel(p, dir / "p.json");
    CHECK(load_panel(dir / "p.json") == p);
    CHECK_THROWS_AS(load_panel(dir / "missing.json"), IoError);
}

TEST_CASE("panel parse errors carry a location") {
    try {
        panel_from_text("{\n\"risk_set\": [\n{\"label\": \"a\"},\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.location().rfind("line ", 0) == 0);
    }
    try {
        panel_from_text(R"({"risk_set": [{"label": "a"}], "snapshots": [{"t": 1, "present": ["a"], "edges": [["a", 3]]}]})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.location() == "$.snapshots[0].edges[0][1]");
    }
    CHECK_THROWS_AS(
        panel_from_text(R"({"risk_set": [{"label": "a"}], "snapshots": [{"t": 1, "present": ["zz"], "edges": []}]})"),
        ValidationError);
}

TEST_CASE("subpanel restricts the time range") {
    auto p = toy_panel();
    auto s = subpanel(p, 2, 4);
    CHECK(s.snapshots().size() == 2);
    CHECK(s.gaps() == std::vector<int>{3});
    CHECK(s.risk_set() == p.risk_set());
    CHECK_THROWS_AS(subpanel(p, 5, 9), RangeError);
}

TEST_CASE("edge list conversion") {
    auto dir = testkit::temp_dir("convert");
    SUBCASE("single edge") {
        write(dir / "e.csv", "t,i,j\n1,x,y\n");
        write(dir / "p.csv", "t,label\n1,x\n1,y\n");
        auto p = convert_edge_list(dir / "e.csv", dir / "p.csv");
        REQUIRE(p.snapshots().size() == 1);
        CHECK(p.snapshots()[0].edges.size() == 1);
        CHECK(p.risk_set().labels() == std::vector<std::string>{"x", "y"});
    }
    SUBCASE("endpoint missing from presence names the row") {
        write(dir / "e.csv", "1 x y\n2 x y\n");
        write(dir / "p.csv", "1 x\n1 y\n2 x\n");
        try {
            convert_edge_list(dir / "e.csv", dir / "p.csv");
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("e.csv line 2") != std::string::npos);
        }
    }
    SUBCASE("convert then load equals a hand-written panel") {
        write(dir / "e.csv", "1,a,b\n1,b,c\n2,a,c\n");
        write(dir / "p.csv", "1,a\n1,b\n1,c\n2,a\n2,c\n4\n");
        write(dir / "v.csv", "label,regular\na,true\nb,false\nc,\nd,\n");
        write(dir / "t.csv", "t,day\n1,Monday\n2,Tuesday\n4,Thursday\n");
        ConvertOptions opts;
        opts.vertex_attrs = dir / "v.csv";
        opts.time_attrs = dir / "t.csv";
        opts.gaps = {3};
        auto converted = convert_edge_list(dir / "e.csv", dir / "p.csv", opts);
        save_panel(converted, dir / "panel.json");
        CHECK(load_panel(dir / "panel.json") == toy_panel());
    }
}
