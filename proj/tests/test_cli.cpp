#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef MTERM_CLI_PATH
#error "MTERM_CLI_PATH must point at the built binary"
#endif

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(MTERM_CLI_PATH) + " " + args +
                      " >/tmp/mterm_cli_stdout.txt 2>/tmp/mterm_cli_stderr.txt";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("deviations golden CSV") {
    REQUIRE(run("deviations --x 3,0,4 --dict std:3 --csv-out /tmp/mterm_g1.csv") == 0);
    CHECK(slurp("/tmp/mterm_g1.csv") ==
          "m,sigma,subset\n"
          "0,5,\"\"\n"
          "1,3,\"2\"\n"
          "2,0,\"0,2\"\n"
          "3,0,\"0,1,2\"\n");
    REQUIRE(run("deviations --x 1,0 --dict std:2 --max-m 0 --csv-out /tmp/mterm_g2.csv") == 0);
    CHECK(slurp("/tmp/mterm_g2.csv") == "m,sigma,subset\n0,1,\"\"\n");
}

TEST_CASE("exit codes by failure class") {
    CHECK(run("deviations --x 1,0 --dict std:nonsense") == 1);
    CHECK(run("deviations --x 1,0,3 --dict std:2") == 1);  // dimension mismatch
    CHECK(run("deviations --x 1,0 --dict std:2 --kernel vliw9000") == 1);
    CHECK(run("nonexistent-subcommand") == 1);
    CHECK(run("deviations") == 1);  // missing required options
    // C(20, 10) = 184756 > 1000.
    CHECK(run("deviations --x 1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20 "
              "--dict std:20 --max-m 10 --budget 1000") == 2);
    CHECK(run("realize --target 1,0.5 --epsilon 0.1 --ball 2 --seed 42 --max-iters 1") == 3);
}

TEST_CASE("reports are byte-identical across reruns") {
    REQUIRE(run("deviations --x 0.3,-1.2,0.5,2 --dict exact:1,0.6,0.3,0.1 "
                "--seed 9 --json-out /tmp/mterm_r1.json") == 0);
    REQUIRE(run("deviations --x 0.3,-1.2,0.5,2 --dict exact:1,0.6,0.3,0.1 "
                "--seed 9 --json-out /tmp/mterm_r2.json") == 0);
    std::string a = slurp("/tmp/mterm_r1.json");
    CHECK(!a.empty());
    CHECK(a == slurp("/tmp/mterm_r2.json"));

    REQUIRE(run("hardy-verify --samples 300 --seed 4 --json-out /tmp/mterm_h1.json") == 0);
    REQUIRE(run("hardy-verify --samples 300 --seed 4 --json-out /tmp/mterm_h2.json") == 0);
    std::string h = slurp("/tmp/mterm_h1.json");
    CHECK(!h.empty());
    CHECK(h == slurp("/tmp/mterm_h2.json"));

    REQUIRE(run("step-verify --samples 40 --seed 6 --json-out /tmp/mterm_s1.json") == 0);
    REQUIRE(run("step-verify --samples 40 --seed 6 --json-out /tmp/mterm_s2.json") == 0);
    CHECK(slurp("/tmp/mterm_s1.json") == slurp("/tmp/mterm_s2.json"));
}

TEST_CASE("thread count never changes deviation reports") {
    REQUIRE(run("deviations --x 0.3,-1.2,0.5,2,0.9 --dict tri:4,0.05,2,11 "
                "--threads 1 --json-out /tmp/mterm_t1.json") == 0);
    REQUIRE(run("deviations --x 0.3,-1.2,0.5,2,0.9 --dict tri:4,0.05,2,11 "
                "--threads 4 --json-out /tmp/mterm_t4.json") == 0);
    std::string a = slurp("/tmp/mterm_t1.json");
    std::string b = slurp("/tmp/mterm_t4.json");
    // The reports differ only in the recorded thread count.
    size_t pa = a.find("\"threads\""), pb = b.find("\"threads\"");
    REQUIRE(pa != std::string::npos);
    REQUIRE(pb == pa);
    CHECK(a.substr(0, pa) == b.substr(0, pb));
    size_t ea = a.find('\n', pa), eb = b.find('\n', pb);
    CHECK(a.substr(ea) == b.substr(eb));
}

TEST_CASE("construct round-trips through the deviations command") {
    REQUIRE(run("construct --builder exact --target 1,0.5,0.25 "
                "--out /tmp/mterm_dict.json") == 0);
    REQUIRE(run("deviations --x 0,1,0 --dict /tmp/mterm_dict.json "
                "--json-out /tmp/mterm_d1.json") == 0);
    REQUIRE(run("deviations --x 0,1,0 --dict /tmp/mterm_dict.json "
                "--json-out /tmp/mterm_d2.json") == 0);
    CHECK(slurp("/tmp/mterm_d1.json") == slurp("/tmp/mterm_d2.json"));
    // Builders reachable by spec string too; the remark4 alias matches exact.
    // The reports echo the builder string under params, so compare results only.
    REQUIRE(run("deviations --x 0,1,0 --dict exact:1,0.5,0.25 "
                "--json-out /tmp/mterm_d3.json") == 0);
    REQUIRE(run("deviations --x 0,1,0 --dict remark4:1,0.5,0.25 "
                "--json-out /tmp/mterm_d4.json") == 0);
    std::string d3 = slurp("/tmp/mterm_d3.json"), d4 = slurp("/tmp/mterm_d4.json");
    size_t p3 = d3.find("\"results\""), p4 = d4.find("\"results\"");
    REQUIRE(p3 != std::string::npos);
    REQUIRE(p4 != std::string::npos);
    CHECK(d3.substr(p3) == d4.substr(p4));
}

TEST_CASE("rho and thinboard run clean") {
    CHECK(run("rho --dict std:4 --restarts 8 --seed 2 --json-out /tmp/mterm_rho.json") == 0);
    std::string r = slurp("/tmp/mterm_rho.json");
    CHECK(r.find("\"rho_upper\"") != std::string::npos);
    CHECK(r.find("\"certified_lower\": 0.5") != std::string::npos);
    CHECK(run("thinboard --next tri:3,0.05,2,7 --current std:4") == 0);
}

TEST_CASE("realize failure still writes the trace") {
    CHECK(run("realize --target 1,0.5 --epsilon 0.1 --ball 2 --seed 42 "
              "--max-iters 1 --trace-out /tmp/mterm_trace.json") == 3);
    std::string t = slurp("/tmp/mterm_trace.json");
    CHECK(t.find("\"converged\": false") != std::string::npos);
    CHECK(t.find("\"residual_trace\"") != std::string::npos);
}

TEST_CASE("kernel selection is honored end to end") {
    REQUIRE(run("deviations --x 3,0,4 --dict std:3 --kernel scalar "
                "--json-out /tmp/mterm_k.json") == 0);
    CHECK(slurp("/tmp/mterm_k.json").find("\"kernel\": \"scalar\"") != std::string::npos);
}
