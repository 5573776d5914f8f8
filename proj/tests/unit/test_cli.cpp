#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dynlogit/cli.hpp"
#include "dynlogit/panel.hpp"
#include "testkit.hpp"

using namespace dynlogit;
namespace fs = std::filesystem;

namespace {

const fs::path kModels = DYNLOGIT_MODELS_DIR;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string model(int k) { return (kModels / ("beach_model" + std::to_string(k) + ".json")).string(); }

/// Synthesizes the beach-like panel and fits model 4 into `dir`.
fs::path prepare(const fs::path& dir) {
    auto r = run({"--out-dir", dir.string(), "synthesize"});
    REQUIRE(r.code == 0);
    auto f = run({"--out-dir", dir.string(), "fit", (dir / "beach_like.panel.json").string(), "-s", model(4),
                  "--no-parts"});
    REQUIRE(f.code == 0);
    return dir / "beach_like.panel.json";
}

}  // namespace

TEST_CASE("convert builds a loadable panel") {
    auto dir = testkit::temp_dir("cli_convert");
    std::ofstream(dir / "e.csv") << "t,i,j\n1,x,y\n2,x,z\n";
    std::ofstream(dir / "p.csv") << "t,label\n1,x\n1,y\n2,x\n2,z\n";
    auto r = run({"--out-dir", dir.string(), "convert", (dir / "e.csv").string(), (dir / "p.csv").string(), "-o", (dir / "out.json").string()});
    CHECK(r.code == 0);
    auto p = load_panel(dir / "out.json");
    CHECK(p.snapshots().size() == 2);
    CHECK(p.risk_set().size() == 3);

    std::ofstream(dir / "bad.csv") << "1,x,q\n";
    auto bad = run({"--out-dir", dir.string(), "convert", (dir / "bad.csv").string(), (dir / "p.csv").string(), "-o", (dir / "x.json").string()});
    CHECK(bad.code == cli::kValidation);
    CHECK(bad.err.find("\"error\"") != std::string::npos);
}

TEST_CASE("fit ranks the four beach models") {
    auto dir = testkit::temp_dir("cli_fit");
    auto panel = prepare(dir);
    auto r = run({"--out-dir", dir.string(), "fit", panel.string(), "-s", model(1), "-s", model(2), "-s", model(3),
                  "-s", model(4)});
    CHECK(r.code == 0);
    auto ranking = nlohmann::json::parse(slurp(dir / "ranking.json"));
    REQUIRE(ranking["ranking"].size() == 4);
    CHECK(ranking["ranking"][0]["spec"].get<std::string>() == model(4));
    std::size_t n_obs = ranking["ranking"][0]["n_obs"].get<std::size_t>();
    for (const auto& row : ranking["ranking"]) CHECK(row["n_obs"].get<std::size_t>() == n_obs);
    CHECK(fs::exists(dir / "beach_model4.vertex.fit.json"));
    CHECK(fs::exists(dir / "beach_model4.edge.fit.csv"));
}

TEST_CASE("the default prior equals the explicit Cauchy prior") {
    auto a = testkit::temp_dir("cli_prior_a");
    auto b = testkit::temp_dir("cli_prior_b");
    auto panel = prepare(a);
    CHECK(run({"--out-dir", a.string(), "fit", panel.string(), "-s", model(2)}).code == 0);
    CHECK(run({"--out-dir", b.string(), "fit", panel.string(), "-s", model(2), "--prior", "cauchy:scale=2.5,df=1"})
              .code == 0);
    CHECK(slurp(a / "beach_model2.fit.json") == slurp(b / "beach_model2.fit.json"));
}

TEST_CASE("separated data exit with the separation code under MLE") {
    auto dir = testkit::temp_dir("cli_separation");
    std::ofstream(dir / "e.csv") << "t,i,j\n";
    std::ofstream(dir / "p.csv") << "1,a\n1,b\n2,a\n2,b\n3,a\n3,b\n";
    REQUIRE(run({"--out-dir", dir.string(), "convert", (dir / "e.csv").string(), (dir / "p.csv").string(), "-o", (dir / "p.json").string()}).code ==
            0);
    std::ofstream(dir / "m.json") << R"({"vertex_terms": [{"kind": "intercept"}], "edge_terms": [{"kind": "intercept"}]})";
    auto mle = run({"--out-dir", dir.string(), "fit", (dir / "p.json").string(), "-s", (dir / "m.json").string(),
                    "--prior", "none"});
    CHECK(mle.code == cli::kSeparation);
    auto post = run({"--out-dir", dir.string(), "fit", (dir / "p.json").string(), "-s", (dir / "m.json").string()});
    CHECK(post.code == 0);
}

TEST_CASE("adequacy is reproducible and covers every GLI at every step") {
    auto dir = testkit::temp_dir("cli_adequacy");
    auto panel = prepare(dir);
    const auto fit = (dir / "beach_model4.fit.json").string();
    auto a = run({"--out-dir", dir.string(), "--seed", "7", "adequacy", panel.string(), "-s", model(4), "-f", fit,
                  "--sims", "50"});
    REQUIRE(a.code == 0);
    auto first = slurp(dir / "adequacy.json");
    auto b = run({"--out-dir", dir.string(), "--seed", "7", "--threads", "1", "adequacy", panel.string(), "-s",
                  model(4), "-f", fit, "--sims", "50"});
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "adequacy.json") == first);

    auto doc = nlohmann::json::parse(first);
    CHECK(doc["glis"].size() == 9);
    for (const auto& [name, g] : doc["glis"].items()) CHECK(g["steps"].size() == 28);

    auto fixed = run({"--out-dir", dir.string(), "adequacy", panel.string(), "-s", model(4), "-f", fit, "--sims",
                      "20", "--fixed-vertex-set"});
    REQUIRE(fixed.code == 0);
    auto fdoc = nlohmann::json::parse(slurp(dir / "adequacy.json"));
    CHECK(fdoc["glis"]["network_size"]["summary"]["covered"].get<int>() == 0);
}

TEST_CASE("project writes trajectories and loadable graph dumps") {
    auto dir = testkit::temp_dir("cli_project");
    auto panel = prepare(dir);
    const auto fit = (dir / "beach_model4.fit.json").string();
    auto r = run({"--out-dir", dir.string(), "project", panel.string(), "-s", model(4), "-f", fit, "--horizon", "5",
                  "--sims", "2", "--dump-graphs"});
    REQUIRE(r.code == 0);
    auto csv = slurp(dir / "projection_rep0.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    auto dumped = load_panel(dir / "projection_rep1.panel.json");
    CHECK(dumped.snapshots().size() == 5);
    CHECK(run({"--out-dir", dir.string(), "gli", (dir / "projection_rep1.panel.json").string()}).code == 0);
}

TEST_CASE("exit codes") {
    auto dir = testkit::temp_dir("cli_codes");
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"fit"}).code == cli::kUsage);
    CHECK(run({"nonsense"}).code == cli::kUsage);
    CHECK(run({"gli", (dir / "missing.json").string()}).code == cli::kIo);
    std::ofstream(dir / "broken.json") << "{\"risk_set\": [";
    auto broken = run({"gli", (dir / "broken.json").string()});
    CHECK(broken.code == cli::kParse);
    auto err = nlohmann::json::parse(broken.err);
    CHECK(err["error"]["exit_code"].get<int>() == cli::kParse);
    CHECK(run({"--help"}).code == cli::kOk);
}
