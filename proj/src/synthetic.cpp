#include "dynlogit/synthetic.hpp"

#include <cstdio>
#include <map>

#include "dynlogit/simulate.hpp"

namespace dynlogit {

namespace {

constexpr const char* kModel = R"({
  "vertex_terms": [
    {"kind": "intercept"},
    {"kind": "attr_dummy", "params": {"attr": "regular"}},
    {"kind": "attr_dummy", "params": {"attr": "group1"}},
    {"kind": "lag_indicator", "lag": 1},
    {"kind": "lag_triangle", "lag": 1},
    {"kind": "seasonal", "params": {"attr": "day", "reference": "Monday"}}
  ],
  "edge_terms": [
    {"kind": "mixing", "params": {"attr": "regular"}},
    {"kind": "individual_dummy", "params": {"group": "group1"}},
    {"kind": "log_size"},
    {"kind": "lag_indicator", "lag": 1},
    {"kind": "lag_cycle_embed", "lag": 1, "params": {"max_len": 9}},
    {"kind": "seasonal", "params": {"attr": "day", "reference": "Monday"}}
  ]
})";

const std::map<std::string, double> kCoefficients = {
    {"v:intercept", -3.0},
    {"v:attr[regular]", 1.5},
    {"v:attr[group1]", 0.5},
    {"v:lag1", 1.2},
    {"v:triangles.lag1", 0.1},
    {"v:day[Tuesday]", -0.3},
    {"v:day[Wednesday]", 0.0},
    {"v:day[Thursday]", 0.2},
    {"v:day[Friday]", 0.4},
    {"v:day[Saturday]", 1.0},
    {"v:day[Sunday]", 0.9},
    {"e:mixing[regular:RR]", -4.5},
    {"e:mixing[regular:NN]", -6.0},
    {"e:mixing[regular:RN]", -5.2},
    {"e:log_size", 0.3},
    {"e:lag1", 2.0},
    {"e:cycles9.lag1", 0.3},
    {"e:day[Tuesday]", 0.0},
    {"e:day[Wednesday]", 0.1},
    {"e:day[Thursday]", 0.0},
    {"e:day[Friday]", 0.1},
    {"e:day[Saturday]", 0.6},
    {"e:day[Sunday]", 0.5},
};

const char* kDays[] = {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};

}  // namespace

ModelSpec beach_like_model() { return parse_model_spec(kModel); }

SyntheticPanel beach_like_panel(std::uint64_t seed) {
    constexpr std::size_t kVertices = 95;
    constexpr int kSlots = 31;
    constexpr int kGap = 25;

    std::vector<std::string> labels;
    std::vector<AttrMap> attrs;
    for (std::size_t v = 0; v < kVertices; ++v) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "v%02zu", v + 1);
        labels.emplace_back(buf);
        const bool regular = v < 54;
        attrs.push_back({{"regular", regular}, {"group1", v < 22}, {"group2", v >= 22 && v < 43}});
    }
    RiskSet risk(labels, attrs);

    // First day: independent draws, regulars more likely to attend.
    RngStream rng(seed, 0xBEAC4ULL, 1);
    VertexSet present(kVertices);
    for (VertexIndex v = 0; v < kVertices; ++v)
        if (rng.bernoulli(v < 54 ? 0.3 : 0.05)) present.insert(v);
    std::vector<Edge> edges;
    const auto members = present.members();
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            if (rng.bernoulli(0.1)) edges.push_back({members[a], members[b]});
    // Slot 1 is a Thursday.
    Snapshot first = make_snapshot(1, present, edges, {{"day", std::string(kDays[3])}});
    NetworkPanel seed_panel(risk, {first});

    const auto spec = beach_like_model();
    const auto expanded = expand_model(spec, seed_panel);
    std::vector<double> coef;
    for (const auto& name : expanded.column_names()) {
        auto it = kCoefficients.find(name);
        if (it != kCoefficients.end()) {
            coef.push_back(it->second);
        } else {
            // Individual dummies: fixed spread over the group.
            coef.push_back(-0.8 + 0.4 * static_cast<double>(coef.size() % 5));
        }
    }

    SimConfig config;
    config.horizon = kSlots - 1;
    config.seed = seed;
    config.threads = 1;
    auto full = simulate_panel(fit_from_coefficients(expanded, coef), expanded, seed_panel, config);

    std::vector<Snapshot> kept;
    for (const auto& s : full.snapshots())
        if (s.t != kGap) kept.push_back(s);
    return {NetworkPanel(risk, std::move(kept), {kGap}), expanded, std::move(coef)};
}

}  // namespace dynlogit
