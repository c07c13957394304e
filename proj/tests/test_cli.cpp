#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dyadic/artifacts.hpp"
#include "dyadic/cli.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"
#include "oracles.hpp"

using namespace dyadic;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("dyadic_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

} // namespace

TEST_CASE("generators") {
    const auto line = generate("grid:8x1");
    CHECK(line.size() == 8);
    CHECK(line.dimension() == 2);
    CHECK(line.distance(0, 7) == 7.0);
    CHECK(line.id(5) == "5");
    const auto spaced = generate("grid:3x2:0.5");
    CHECK(spaced.distance(0, 5) == doctest::Approx(std::sqrt(0.25 * 4 + 0.25)));
    CHECK(generate("line:5").dimension() == 1);

    const auto sq = generate("snowflake(line:3, 2)");
    CHECK(sq.declared_a0() == 2.0);
    CHECK(sq.distance(0, 2) == 4.0);

    const auto u = generate("uniform:100:42");
    CHECK(u.size() == 100);
    const auto v = generate("uniform:100:42");
    for (PointIndex i = 0; i < 100; ++i) CHECK(u.distance(0, i) == v.distance(0, i));
    CHECK(generate("uniform:100:43").distance(0, 1) != u.distance(0, 1));
    CHECK(generate("clustered:50:4:1").size() == 50);

    for (const char* bad : {"grid:8", "grid:0x3", "line:-2", "uniform:10", "foo:1", "snowflake(line:3)",
                            "snowflake(line:3,0.5)", "grid:2x2:-1", ""}) {
        CHECK_THROWS_AS(generate(bad), InputError);
    }
}

TEST_CASE("csv and matrix readers") {
    const auto dir = scratch("readers");
    fs::create_directories(dir);
    write_file(dir / "pts.csv", "id,x,y,weight\na,0,0,1\nb,3,4,2\nc,6,8,1\n");
    const auto s = read_csv(dir / "pts.csv", MetricSpec::euclidean());
    CHECK(s.size() == 3);
    CHECK(s.distance(s.index_of("a"), s.index_of("b")) == 5.0);
    CHECK(s.weight(1) == 2.0);

    write_file(dir / "noweight.csv", "id,x\n0,1\n1,2\n");
    CHECK(read_csv(dir / "noweight.csv", MetricSpec::euclidean()).weight(0) == 1.0);

    write_file(dir / "bad.csv", "id,x\n0,abc\n");
    CHECK_THROWS_AS(read_csv(dir / "bad.csv", MetricSpec::euclidean()), InputError);
    write_file(dir / "ragged.csv", "id,x,y\n0,1\n");
    CHECK_THROWS_AS(read_csv(dir / "ragged.csv", MetricSpec::euclidean()), InputError);
    CHECK_THROWS_AS(read_csv(dir / "missing.csv", MetricSpec::euclidean()), InputError);

    write_file(dir / "m.txt", "3\n0 1 2\n1 0 1\n2 1 0\n");
    write_file(dir / "w.txt", "0 1\n1 5\n2 1\n");
    const auto m = read_matrix(dir / "m.txt", 1.0, dir / "w.txt");
    CHECK(m.distance(0, 2) == 2.0);
    CHECK(m.weight(1) == 5.0);
    write_file(dir / "asym.txt", "2\n0 1\n2 0\n");
    CHECK_THROWS_AS(read_matrix(dir / "asym.txt", 1.0), DataError);
    write_file(dir / "short.txt", "3\n0 1 2\n1 0 1\n");
    CHECK_THROWS_AS(read_matrix(dir / "short.txt", 1.0), InputError);
    fs::remove_all(dir);
}

TEST_CASE("17 significant digits reload exactly") {
    for (double v : {0.1, 1.0 / 3, 1e-300, 6.02214076e23, -2.5}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("artifacts round-trip to an identical report") {
    for (const auto& spec : {std::string("grid:8x1"), std::string("uniform:200:42"),
                             std::string("snowflake(line:64,2)")}) {
        const auto dir = scratch("roundtrip");
        const auto dec = oracle::build(spec);
        BuildManifest manifest;
        manifest.source = "generator " + spec;
        manifest.a0_mode = "declared";
        write_artifacts(dec, manifest, dir);
        const auto loaded = load_artifacts(dir);
        CHECK(loaded.manifest["source"] == manifest.source);
        CHECK(loaded.dec.cube_count() == dec.cube_count());
        CHECK(run_suite(loaded.dec).to_json() == run_suite(dec).to_json());
        fs::remove_all(dir);
    }
}

TEST_CASE("explicit-matrix artifacts round-trip") {
    const auto base = generate("uniform:30:3");
    std::vector<double> m;
    for (PointIndex a = 0; a < base.size(); ++a) {
        for (PointIndex b = 0; b < base.size(); ++b) m.push_back(base.distance(a, b));
    }
    auto space = std::make_shared<const FiniteSpace>(
        FiniteSpace::from_matrix(sequential_ids(base.size()), m, std::vector<double>(base.size(), 2.0), 1.0));
    const auto dec = decompose(space);
    const auto dir = scratch("matrix");
    write_artifacts(dec, {}, dir);
    CHECK(fs::exists(dir / "space.matrix"));
    const auto loaded = load_artifacts(dir);
    CHECK(loaded.dec.space->weight(3) == 2.0);
    CHECK(run_suite(loaded.dec).to_json() == run_suite(dec).to_json());
    fs::remove_all(dir);
}

TEST_CASE("damaged artifacts are input errors") {
    const auto dir = scratch("damaged");
    write_artifacts(oracle::build("grid:8x1"), {}, dir);
    write_file(dir / "cubes.txt", "garbage\n");
    CHECK_THROWS_AS(load_artifacts(dir), InputError);
    fs::remove(dir / "cubes.txt");
    CHECK_THROWS_AS(load_artifacts(dir), InputError);
    CHECK_THROWS_AS(load_artifacts(dir / "nowhere"), InputError);
    fs::remove_all(dir);
}

TEST_CASE("cli build, query and verify on the line") {
    const auto dir = scratch("cli_line");
    auto r = cli({"build", "--gen", "grid:8x1", "--a0", "default", "--delta", "default", "--out", dir.string()});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("generations 2") != std::string::npos);
    CHECK(r.out.find("cubes [1, 8]") != std::string::npos);
    CHECK(r.out.find("N0_emp 8") != std::string::npos);
    for (const char* f : {"manifest.json", "ledger.json", "ledger.txt", "space.csv", "nets.txt", "tree.dot",
                          "tree.txt", "cubes.txt", "members.txt"}) {
        CHECK_MESSAGE(fs::exists(dir / f), f);
    }
    CHECK(slurp(dir / "members.txt").find("-1:0 0 1 2 3 4 5 6 7") != std::string::npos);

    r = cli({"query", "--artifacts", dir.string(), "--point", "5", "--k", "0"});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("cube 0:5") != std::string::npos);
    CHECK(r.out.find("lineage 0:5 -1:0") != std::string::npos);
    r = cli({"query", "--artifacts", dir.string(), "--point", "5", "--k", "-1"});
    CHECK(r.out.find("cube -1:0") != std::string::npos);
    r = cli({"query", "--artifacts", dir.string(), "--point", "p9", "--k", "0"});
    CHECK(r.code == exit_code::input);

    r = cli({"verify", "--artifacts", dir.string()});
    CHECK(r.code == exit_code::ok);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "report.txt"));
    fs::remove_all(dir);
}

TEST_CASE("cli reports uncovered points") {
    // A hand-made decomposition with gaps, written and queried through the CLI.
    auto space = oracle::fixture("grid:8x1");
    const auto ledger = derive_constants(1.0);
    std::vector<Net> nets{build_net(*space, 2.0, NetOrder::by_id(), 0)};
    const auto dec = materialize(space, {ledger.scale_ratio, 0, 0}, ledger, nets,
                                 OrderTree(0, {nets[0].centers.size()}, {{}}));
    const auto dir = scratch("cli_gap");
    write_artifacts(dec, {}, dir);
    const auto r = cli({"query", "--artifacts", dir.string(), "--point", "3", "--k", "0"});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("point 3 uncovered at k=0") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cli error classes") {
    const auto dir = scratch("cli_errors");
    fs::create_directories(dir);
    write_file(dir / "bad.csv", "id,x\na,oops\n");
    CHECK(cli({"build", "--input", (dir / "bad.csv").string(), "--out", (dir / "o").string()}).code ==
          exit_code::input);
    write_file(dir / "dup.csv", "id,x\na,1\nb,1\n");
    CHECK(cli({"build", "--input", (dir / "dup.csv").string(), "--out", (dir / "o").string()}).code ==
          exit_code::data);
    CHECK(cli({"build", "--gen", "grid:8x1", "--delta", "0.5", "--out", (dir / "o").string()}).code ==
          exit_code::constraint);
    const auto r = cli({"build", "--gen", "grid:8x1", "--delta", "0.5", "--out", (dir / "o").string()});
    CHECK(r.err.find("1/(2 A0)") != std::string::npos);
    CHECK(cli({"build", "--gen", "grid:8x1", "--a0", "0.9", "--delta", "0.4", "--relaxed", "--out",
               (dir / "o").string()})
              .code == exit_code::construction);
    CHECK(cli({"verify", "--artifacts", (dir / "none").string()}).code == exit_code::input);
    CHECK(cli({"build"}).code == exit_code::input);
    CHECK(cli({"build", "--gen", "grid:8x1", "--input", "x.csv"}).code == exit_code::input);
    CHECK(cli({"build", "--gen", "grid:8x1", "--order", "shuffle"}).code == exit_code::input);
    CHECK(cli({"frobnicate"}).code == exit_code::input);
    CHECK(cli({"--help"}).code == exit_code::ok);
    fs::remove_all(dir);
}

TEST_CASE("cli relaxed verify reports warnings") {
    const auto dir = scratch("cli_relaxed");
    const auto r = cli({"verify", "--gen", "grid:8x1", "--relaxed", "--delta", "0.4", "--out", dir.string()});
    CHECK(r.out.find("relaxed: delta") != std::string::npos);
    CHECK((r.code == exit_code::ok || r.code == exit_code::verification_failed));
    fs::remove_all(dir);
}

TEST_CASE("cli inject then verify fails") {
    const auto dir = scratch("cli_inject");
    REQUIRE(cli({"build", "--gen", "uniform:200:42", "--out", (dir / "clean").string()}).code == exit_code::ok);
    for (const char* fault : {"reparent", "delete_member", "inflate_ball", "break_separation", "zero_weight"}) {
        const auto out = (dir / fault).string();
        auto r = cli({"inject", "--artifacts", (dir / "clean").string(), "--fault", fault, "--seed", "7", "--out",
                      out});
        REQUIRE_MESSAGE(r.code == exit_code::ok, r.err);
        r = cli({"verify", "--artifacts", out});
        CHECK_MESSAGE(r.code == exit_code::verification_failed, fault);
        CHECK(r.out.find("FAIL") != std::string::npos);
    }
    CHECK(cli({"inject", "--artifacts", (dir / "clean").string(), "--fault", "nope", "--seed", "1", "--out",
               (dir / "x").string()})
              .code == exit_code::input);
    fs::remove_all(dir);
}

TEST_CASE("cli runs are byte-identical") {
    const auto a = scratch("cli_det_a");
    const auto b = scratch("cli_det_b");
    const std::vector<std::string> common{"--gen", "uniform:200:42", "--order", "shuffle", "--seed", "9"};
    auto args = common;
    args.insert(args.begin(), "verify");
    auto with_a = args;
    with_a.insert(with_a.end(), {"--out", a.string()});
    auto with_b = args;
    with_b.insert(with_b.end(), {"--out", b.string()});
    CHECK(cli(with_a).code == exit_code::ok);
    CHECK(cli(with_b).code == exit_code::ok);
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), name.string());
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("cli ledger") {
    auto r = cli({"ledger", "--A0", "1"});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("C1") != std::string::npos);
    r = cli({"ledger", "--A0", "2", "--json"});
    CHECK(r.code == exit_code::ok);
    const auto j = Json::parse(r.out);
    CHECK(j.contains("C6"));
    CHECK(cli({"ledger", "--A0", "0.5"}).code == exit_code::input);
}
