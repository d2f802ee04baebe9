#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// exercises the remodeler binary end to end: exit codes, report shapes,
// determinism, golden comparisons

namespace {

struct RunResult {
    int code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = "./build/remodeler " + args + " > /tmp/cli_out.txt 2> /tmp/cli_err.txt";
    int rc = std::system(cmd.c_str());
    std::ifstream in("/tmp/cli_out.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

} // namespace

TEST_CASE("inspect: valid fans exit 0 and print the stats") {
    auto r = run("inspect data/fans/c3.json");
    CHECK(r.code == 0);
    CHECK(r.out.find("\"g\": 0") != std::string::npos);
    CHECK(r.out.find("\"n\": 3") != std::string::npos);
    auto r2 = run("inspect data/fans/conifold.json");
    CHECK(r2.code == 0);
    CHECK(r2.out.find("\"p\": 1") != std::string::npos);
    CHECK(r2.out.find("\"p_prime\": 1") != std::string::npos);
}

TEST_CASE("inspect: malformed JSON exits 4, invalid fan exits 2") {
    std::ofstream bad("/tmp/bad_fan.json");
    bad << "{\"rays\": [[1,0";
    bad.close();
    CHECK(run("inspect /tmp/bad_fan.json").code == 4);
    std::ofstream geom("/tmp/bad_geom.json");
    geom << "{\"rays\": [[0,0],[1,0],[0,1],[1,1]], \"cones3\": [[1,2,3],[1,2,4]]}";
    geom.close();
    CHECK(run("inspect /tmp/bad_geom.json").code == 2);
}

TEST_CASE("charge: point class on C3 gives (-2 pi i)^3") {
    auto r = run("charge --fan data/fans/c3.json --sheaf \"O(V: p{1,2,3})\" --nonequiv --cochar 2,1");
    CHECK(r.code == 0);
    CHECK(r.out.find("248.050") != std::string::npos); // |(-2 pi i)^3| = 8 pi^3
}

TEST_CASE("charge: sheaf outside the declared support exits 2") {
    // the divisor at the origin point is not in Sigma^+ for this chamber
    auto r = run("charge --fan data/fans/c3.json --sheaf \"O(V: d1)\" --cochar 2,1");
    CHECK(r.code == 2);
}

TEST_CASE("charge: sheaf grammar errors exit 4") {
    CHECK(run("charge --fan data/fans/c3.json --sheaf \"O(V: x1)\" --cochar 2,1").code == 4);
}

TEST_CASE("compare01 passes on c3 and conifold, rejects the wrong chamber") {
    CHECK(run("compare01 --fan data/fans/c3.json --cochar 2,1").code == 0);
    CHECK(run("compare01 --fan data/fans/conifold.json --cochar 2,1").code == 0);
    // K_P2 exercises the gamma-kind seams: an open two-chart chain and the
    // closed three-chart cycle around the compact divisor; Re z is kept away
    // from zero because the charts sit ~|log q| apart in Re xhat
    CHECK(run("compare01 --fan data/fans/kp2.json --cochar 3,1 --u1 3,0 --u2 1.1,0 --z 0.8,0").code == 0);
    // u on the other side of the wall from the cocharacter
    auto r = run("compare01 --fan data/fans/c3.json --cochar 2,1 --u1 -1,0 --u2 -0.7,0");
    CHECK(r.code == 2);
}

TEST_CASE("gkz report is all-zero and matches the golden file") {
    auto r = run("gkz --fan data/fans/conifold.json --order 6 --golden data/golden/gkz_conifold_order6.json");
    CHECK(r.code == 0);
    CHECK(r.out.find("\"all_zero\": true") != std::string::npos);
    CHECK(r.out.find("\"golden\": \"match\"") != std::string::npos);
}

TEST_CASE("tr and graphsum run and agree") {
    auto r = run("tr --curve data/curves/airy.json --g 1 --n 1 --golden data/golden/tr_airy_g1n1.json");
    CHECK(r.code == 0);
    auto r2 = run("graphsum --curve data/curves/airy.json --g 1 --n 2 --check-against-recursion");
    CHECK(r2.code == 0);
    CHECK(r2.out.find("\"matches_recursion\": true") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
    auto a = run("charge --fan data/fans/conifold.json --sheaf \"O(V: l{2,3})\" --cochar 2,1 --order 5");
    auto b = run("charge --fan data/fans/conifold.json --sheaf \"O(V: l{2,3})\" --cochar 2,1 --order 5");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("csv output format") {
    auto r = run("charge --fan data/fans/c3.json --sheaf \"O(V: p{1,2,3})\" --nonequiv --cochar 2,1 --format csv");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("u1_re,", 0) == 0);
}
