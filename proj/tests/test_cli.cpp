// End-to-end checks of the snarkforge binary: exit codes, report fields,
// and the files each command writes.  The binary path comes in through the
// SNARKFORGE_BIN compile definition.

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "snarkforge/families.hpp"
#include "snarkforge/flows.hpp"
#include "snarkforge/multipole.hpp"
#include "snarkforge/transitions.hpp"

using namespace snarkforge;
using nlohmann::json;

namespace {

const std::string& scratch_dir() {
    static const std::string dir = [] {
        std::filesystem::path d = std::filesystem::current_path() / "cli_scratch";
        std::filesystem::create_directories(d);
        return d.string();
    }();
    return dir;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd =
        "cd " + scratch_dir() + " && " SNARKFORGE_BIN " " + args + " > cli_out.txt 2> cli_err.txt";
    int raw = std::system(cmd.c_str());
    RunResult r;
    if (WIFEXITED(raw)) r.exit_code = WEXITSTATUS(raw);
    std::ifstream in(scratch_dir() + "/cli_out.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string read_scratch(const std::string& file) {
    std::ifstream in(scratch_dir() + "/" + file);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_scratch(const std::string& file, const std::string& content) {
    std::ofstream out(scratch_dir() + "/" + file);
    out << content;
}

void write_graph(const std::string& file, const Multipole& g) {
    write_scratch(file, emit_graph6(g) + "\n");
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

std::set<ShapeTransition> shapes_from_report(const json& relation) {
    std::set<ShapeTransition> out;
    for (const auto& entry : relation.at("shapes")) {
        int w = entry[2].is_null() ? 0 : entry[2].get<int>();
        out.insert({shape_from_name(entry[0].get<std::string>()),
                    shape_from_name(entry[1].get<std::string>()), w});
    }
    return out;
}

FlowOptions replay_opt() {
    FlowOptions opt;
    opt.node_budget = 8'000'000'000;
    return opt;
}

} // namespace

TEST_CASE("cli generates even-order members") {
    RunResult r = run_cli("generate even-order --n 42");
    REQUIRE(r.exit_code == 0);
    json report = json::parse(r.out);
    CHECK(report["schema"] == 1);
    CHECK(report["order"] == 42);
    CHECK(report["girth"].get<int>() >= 5);
    CHECK(report["cyclic4"] == true);
    CHECK(report["pmi"] == ">=5");
    CHECK(report["certificate"] == "verified");

    SUBCASE("the graph6 file holds the reported member") {
        Multipole g = parse_graph6(first_line(read_scratch("even-order-42.g6")));
        CHECK(g.num_vertices() == 42);
        json meta = json::parse(read_scratch("even-order-42.json"));
        CHECK(meta["order"] == 42);
        CHECK(meta["graph6"] == first_line(read_scratch("even-order-42.g6")));
    }
    SUBCASE("the emitted certificate replays against the emitted graph") {
        json meta = json::parse(read_scratch("even-order-42.json"));
        Certificate c = parse_certificate(meta["certificate"].dump());
        Multipole g = parse_graph6(meta["graph6"].get<std::string>());
        CHECK(verify_certificate(c, g, replay_opt()));
    }
    SUBCASE("repeated runs emit identical files") {
        RunResult again = run_cli("generate even-order --n 42 --out again-42");
        REQUIRE(again.exit_code == 0);
        CHECK(read_scratch("again-42.g6") == read_scratch("even-order-42.g6"));
        CHECK(read_scratch("again-42.json") == read_scratch("even-order-42.json"));
    }
    SUBCASE("odd and undersized orders are usage errors") {
        CHECK(run_cli("generate even-order --n 41").exit_code == 2);
        CHECK(run_cli("generate even-order --n 40").exit_code == 2);
    }
}

TEST_CASE("cli windmill matches the library builder") {
    RunResult r = run_cli("generate windmill --fragments petersen,petersen,petersen --out w34");
    REQUIRE(r.exit_code == 0);
    json report = json::parse(r.out);
    CHECK(report["order"] == 34);
    CHECK(report["kind"] == "windmill-walk");

    HalinFragment f = petersen_fragment(replay_opt());
    FamilyMember m = windmill(f, f, f, WeldOrientation::straight, replay_opt());
    CHECK(first_line(read_scratch("w34.g6")) == emit_graph6(m.graph));

    SUBCASE("crossed welds certify too") {
        RunResult crossed = run_cli("generate windmill --weld crossed --out w34x");
        CHECK(crossed.exit_code == 0);
        CHECK(json::parse(crossed.out)["order"] == 34);
    }
    SUBCASE("fragment list errors") {
        CHECK(run_cli("generate windmill --fragments petersen,petersen").exit_code == 2);
        CHECK(run_cli("generate windmill --fragments petersen,petersen,bogus").exit_code == 2);
        CHECK(run_cli("generate windmill --weld sideways").exit_code == 2);
    }
    SUBCASE("treelike and halin agree on the same tree") {
        RunResult t = run_cli("generate treelike --k 2 --out tree-46");
        REQUIRE(t.exit_code == 0);
        CHECK(json::parse(t.out)["order"] == 46);
        RunResult h = run_cli("generate halin --tree [[],[],[[],[]]] --out halin-46");
        REQUIRE(h.exit_code == 0);
        CHECK(read_scratch("halin-46.g6") == read_scratch("tree-46.g6"));
        CHECK(run_cli("generate treelike --k 0").exit_code == 2);
        CHECK(run_cli("generate halin --tree [[]]").exit_code == 2);
    }
}

TEST_CASE("cli pmi reports the index with a witness file") {
    write_graph("petersen.g6", named_graph("Petersen"));
    write_graph("k33.g6", named_graph("K33"));
    write_graph("k4.g6", named_graph("K4"));

    RunResult r = run_cli("pmi petersen.g6 --budget 1000000000");
    REQUIRE(r.exit_code == 0);
    json report = json::parse(r.out);
    CHECK(report["pmi"] == "5");
    CHECK(report["order"] == 10);
    json witness = json::parse(read_scratch(report["witness"].get<std::string>()));
    CHECK(witness["cover"]["matchings"].size() == 5);

    SUBCASE("colourable graphs come out at 3") {
        CHECK(json::parse(run_cli("pmi k33.g6").out)["pmi"] == "3");
        CHECK(json::parse(run_cli("pmi k4.g6").out)["pmi"] == "3");
    }
    SUBCASE("assertions gate the exit code") {
        CHECK(run_cli("pmi petersen.g6 --budget 1000000000 --assert-ge 5").exit_code == 0);
        RunResult low = run_cli("pmi k33.g6 --assert-ge 4");
        CHECK(low.exit_code == 1);
        CHECK(json::parse(low.out)["pmi"] == "3");
    }
    SUBCASE("family members reach 5") {
        REQUIRE(run_cli("generate windmill --out w34pmi").exit_code == 0);
        RunResult big = run_cli("pmi w34pmi.g6 --budget 8000000000");
        REQUIRE(big.exit_code == 0);
        json rep = json::parse(big.out);
        CHECK(rep["pmi"] == "5");
        json w = json::parse(read_scratch(rep["witness"].get<std::string>()));
        CHECK(w["cover"]["matchings"].size() == 5);
    }
    SUBCASE("the direct cap and bridges are input errors") {
        REQUIRE(run_cli("generate windmill --out w34cap").exit_code == 0);
        CHECK(run_cli("pmi w34cap.g6 --direct-cap 20").exit_code == 2);
        write_scratch("k2.g6", "A_\n"); // the single-edge graph
        CHECK(run_cli("pmi k2.g6").exit_code == 2);
    }
}

TEST_CASE("cli transitions prints relations and classification tags") {
    write_graph("petersen.g6", named_graph("Petersen"));
    write_graph("k4.g6", named_graph("K4"));
    write_graph("heawood.g6", named_graph("Heawood"));

    RunResult r = run_cli("transitions petersen.g6 --path 0,1");
    REQUIRE(r.exit_code == 0);
    json report = json::parse(r.out);
    CHECK(report["kind"] == "(2,2)-pole");
    json classes = report["classes"];
    CHECK(std::find(classes.begin(), classes.end(), "decollineator") != classes.end());
    CHECK(shapes_from_report(report["relation"]) == decollineator_transitions().shapes);

    SUBCASE("deangulator tag") {
        json k4 = json::parse(run_cli("transitions k4.g6 --path 0,1").out);
        json tags = k4["classes"];
        CHECK(std::find(tags.begin(), tags.end(), "deangulator") != tags.end());
    }
    SUBCASE("weighted relation of a bipartite block") {
        RunResult hw = run_cli("transitions heawood.g6 --path 0,1,2 --weighted "
                               "--budget 8000000000");
        REQUIRE(hw.exit_code == 0);
        json rep = json::parse(hw.out);
        CHECK(rep["kind"] == "(2,2;1)-pole");
        CHECK(shapes_from_report(rep["relation"]) == bipartite_weighted_transitions().shapes);
        CHECK(!rep.contains("classes"));
    }
    SUBCASE("dot output") {
        RunResult dot = run_cli("transitions petersen.g6 --path 0,1 --dot");
        REQUIRE(dot.exit_code == 0);
        CHECK(dot.out.rfind("digraph", 0) == 0);
    }
    SUBCASE("path errors") {
        const auto& adj = vertex_adjacency(named_graph("Petersen"));
        int far = -1;
        for (int v = 1; v < 10 && far < 0; ++v)
            if (std::find(adj[0].begin(), adj[0].end(), v) == adj[0].end()) far = v;
        REQUIRE(far > 0);
        CHECK(run_cli("transitions petersen.g6 --path 0," + std::to_string(far)).exit_code == 2);
        CHECK(run_cli("transitions petersen.g6 --path 0,1 --weighted").exit_code == 2);
        CHECK(run_cli("transitions petersen.g6 --path 0").exit_code == 2);
        CHECK(run_cli("transitions petersen.g6 --path 0,x").exit_code == 2);
    }
}

TEST_CASE("cli cfn prints evidence ladders") {
    write_graph("petersen.g6", named_graph("Petersen"));
    write_graph("k4.g6", named_graph("K4"));

    RunResult r = run_cli("cfn petersen.g6 --qmax 2");
    REQUIRE(r.exit_code == 0);
    json report = json::parse(r.out);
    CHECK(report["statement"] == "9/2 < Phi_c <= 5");
    auto has_entry = [&](int p, int q, bool exists) {
        for (const auto& e : report["entries"])
            if (e["p"] == p && e["q"] == q && e["exists"] == exists) return true;
        return false;
    };
    CHECK(has_entry(4, 1, false));
    CHECK(has_entry(9, 2, false));
    CHECK(has_entry(5, 1, true));

    SUBCASE("exact values on small graphs") {
        json k4 = json::parse(run_cli("cfn k4.g6 --qmax 1").out);
        CHECK(k4["statement"] == "Phi_c = 4");
        CHECK(k4["exact"]["p"] == 4);
        CHECK(k4["exact"]["q"] == 1);
    }
    SUBCASE("bridges are input errors") {
        write_scratch("star.g6", "Cs\n"); // the three-edge star
        CHECK(run_cli("cfn star.g6").exit_code == 2);
    }
}

TEST_CASE("cli composite members (slow)") {
    RunResult g1 = run_cli("generate composite --variant g1 --k 1 --out comp-g1");
    REQUIRE(g1.exit_code == 0);
    json rep = json::parse(g1.out);
    CHECK(rep["order"] == 34);
    CHECK(rep["kind"] == "collineator-chain");
    CHECK(rep["certificate"] == "verified");
    Multipole g = parse_graph6(first_line(read_scratch("comp-g1.g6")));
    CHECK(g.num_vertices() == 34);
    CHECK(run_cli("generate composite --variant g3").exit_code == 2);
    CHECK(run_cli("generate composite --variant g1 --k 0").exit_code == 2);
}
