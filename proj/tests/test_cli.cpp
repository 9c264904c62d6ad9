// End-to-end tests of the betti binary: flag handling, exit codes, grid
// fixtures, JSON schema and round-trips, and the cache subcommands. The
// binary path and fixture directory come in as compile definitions.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs through /bin/sh so tests can prefix env assignments; stderr is
// dropped (a separate case checks it is non-empty on usage errors).
RunResult run(const std::string& args, bool keep_stderr = false) {
  std::string cmd = args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  int status = pclose(f);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string cli = BETTI_CLI_PATH;
// Make sure an ambient cache directory cannot leak into the runs.
const std::string clean = "env -u BETTI_CACHE_DIR " + cli;

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("betti-cli-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("single betti queries and the closed-form agreement line") {
  auto r = run(clean + " betti --a 3 --b 3 --p 11 --q 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "kappa_{11,1}(segre(3,3)) over gf32003 = 22\nclosed form 22, AGREE\n");

  r = run(clean + " betti --a 2 --b 2 --p 5 --q 1");
  CHECK(r.exit_code == 0);
  // a = 2 is below the closed-form theorem's range: no AGREE line.
  CHECK(r.out == "kappa_{5,1}(segre(2,2)) over gf32003 = 20\n");

  r = run(clean + " betti --a 2 --b 2 --p 5 --q 1 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "a,b,p,q,field,betti\n2,2,5,1,gf32003,20\n");

  r = run(clean + " betti --a 2 --b 2 --p 5 --q 1 --field rational");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "kappa_{5,1}(segre(2,2)) over rational = 20\n");
}

TEST_CASE("usage errors exit 2") {
  CHECK(run(clean + " betti --a 0 --b 1 --p 1").exit_code == 2);
  CHECK(run(clean + " betti --a 3 --b 2 --p 1").exit_code == 2);     // a > b
  CHECK(run(clean + " betti --a 1 --b 1").exit_code == 2);           // no --p, no --full
  CHECK(run(clean + " betti --a 1 --b 1 --p 1 --nope").exit_code == 2);
  CHECK(run(clean + " betti --a 1 --b 1 --p 1 --field gf4").exit_code == 2);
  CHECK(run(clean + " betti --a 1 --b 1 --p 1 --format yaml").exit_code == 2);
  CHECK(run(clean + " betti --a 1 --b 1 --p 1 --threads 0").exit_code == 2);
  CHECK(run(clean + " betti --a 1 --b 1 --e 1,2 --p 1").exit_code == 2);
  CHECK(run(clean + " bidegree --a 1 --b 1").exit_code == 2);        // --p required
  CHECK(run(clean).exit_code == 2);                                  // no subcommand
  CHECK(run(clean + " cache").exit_code == 2);
  CHECK(run(clean + " cache stats").exit_code == 2);                 // no dir anywhere

  CHECK(run(clean + " verify").exit_code == 2);                      // no suite
  CHECK(run(clean + " verify cocycles --a 3").exit_code == 2);       // --b required
  CHECK(run(clean + " verify cocycles --a 2 --b 3").exit_code == 2); // needs 3 <= a <= b
  CHECK(run(clean + " verify en --c 1").exit_code == 2);             // --e required
  CHECK(run(clean + " verify en --e 1,2 --max-deg 3").exit_code == 2);
  CHECK(run(clean + " verify chainmap --a 3 --b 3 --p-index 9").exit_code == 2);
  CHECK(run(clean + " verify kernel --a 3 --b 3 --field gf4").exit_code == 2);
  CHECK(run(clean + " verify relres --a 3 --b 3 --max-deg -1").exit_code == 2);

  auto r = run(clean + " betti --a 0 --b 1 --p 1", /*keep_stderr=*/true);
  CHECK(r.out.find("1 <= a <= b") != std::string::npos);

  CHECK(run(clean + " --help").exit_code == 0);
}

TEST_CASE("verify suites report line per check and exit by verdict") {
  auto r = run(clean + " verify relres --a 3 --b 3 --max-deg 4");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("deg 4 pos 2: dim 104, rank_out 104, homology 0, PASS\n") !=
        std::string::npos);
  CHECK(r.out.find("overall: PASS\n") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);

  r = run(clean + " verify cocycles --a 3 --b 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("expressions verified: 22 of 22\n") != std::string::npos);
  CHECK(r.out.find("witness claims: 11 of 11 shift counts\n") != std::string::npos);
  CHECK(r.out.find("rank 22 vs kappa_{11,1} = 22: EQUAL\n") != std::string::npos);
  CHECK(r.out.find("overall: PASS\n") != std::string::npos);

  r = run(clean + " verify en --e 1,2 --c 1 --max-deg 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("minimality: generator degrees 0 1 3 strictly increase, PASS\n") !=
        std::string::npos);
  CHECK(r.out.find("overall: PASS\n") != std::string::npos);

  r = run(clean + " verify kernel --a 3 --b 3 --field rational");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("map domain 440, null space dim 11, expected 11, PASS\n") !=
        std::string::npos);
  CHECK(r.out.find("overall: PASS\n") != std::string::npos);

  r = run(clean + " verify chainmap --a 2 --b 2 --p-index 2 --max-deg 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("i0 0 augmentation square: 275 vectors, PASS\n") != std::string::npos);
  CHECK(r.out.find("overall: PASS\n") != std::string::npos);
}

TEST_CASE("bidegree grids match the stored fixtures") {
  auto r = run(clean + " bidegree --a 2 --b 2 --p 5 --q 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out == fixture("bidegree_2_2_p5_q1.txt") + "total: 20\n");

  r = run(clean + " bidegree --a 3 --b 3 --p 11 --q 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out == fixture("bidegree_3_3_p11_q1.txt") + "total: 22\n");
}

TEST_CASE("grid orientation: rows u2 descending, rotate flips to u1 rows") {
  // Asymmetric print window so orientation is observable: u2 in [5,8] only.
  auto r = run(clean + " bidegree --a 2 --b 2 --p 5 --q 1 --window 4,8,5,8");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "0 0 1 0 0\n"   // u2 = 8
        "0 1 2 1 0\n"   // u2 = 7
        "1 2 4 2 1\n"   // u2 = 6
        "0 1 2 1 0\n"   // u2 = 5
        "total: 20\n");

  r = run(clean + " bidegree --a 2 --b 2 --p 5 --q 1 --rotate --window 4,8,5,8");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "0 1 0 0\n"     // u1 = 4, u2 = 5..8
        "1 2 1 0\n"
        "2 4 2 1\n"
        "1 2 1 0\n"
        "0 1 0 0\n"
        "total: 20\n");

  r = run(clean + " bidegree --a 2 --b 2 --p 5 --q 1 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.substr(0, 10) == "0,0,1,0,0\n");

  CHECK(run(clean + " bidegree --a 2 --b 2 --p 5 --q 1 --window 1,2,3").exit_code == 2);
}

TEST_CASE("json schema, sort order, and byte-exact round-trip") {
  auto r = run(clean + " betti --a 2 --b 2 --p 5 --q 1 --format json");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::ordered_json::parse(r.out);
  CHECK(j["algebra"] == "segre");
  CHECK(j["a"] == 2);
  CHECK(j["b"] == 2);
  CHECK(j["p"] == 5);
  CHECK(j["q"] == 1);
  CHECK(j["field"] == "gf32003");
  CHECK(j["betti"] == 20);
  REQUIRE(j["blocks"].is_array());
  std::size_t sum = 0;
  std::vector<std::pair<int, int>> order;
  for (const auto& blk : j["blocks"]) {
    sum += blk["dim"].get<std::size_t>();
    order.emplace_back(blk["bidegree"][0].get<int>(), blk["bidegree"][1].get<int>());
  }
  CHECK(sum == 20);
  CHECK(std::is_sorted(order.begin(), order.end()));
  CHECK(j.dump() + "\n" == r.out);

  // Field order as documented: algebra, a, b, p, q, field, betti, blocks.
  CHECK(r.out.substr(0, 46) == R"({"algebra":"segre","a":2,"b":2,"p":5,"q":1,"fi)");

  // bidegree --format json emits the same document.
  auto r2 = run(clean + " bidegree --a 2 --b 2 --p 5 --q 1 --format json");
  CHECK(r2.out == r.out);

  // Scroll algebras carry their column degrees instead of (a, b).
  auto rs = run(clean + " betti --e 1,2 --p 2 --q 1 --format json");
  CHECK(rs.exit_code == 0);
  auto js = nlohmann::ordered_json::parse(rs.out);
  CHECK(js["algebra"] == "scroll");
  CHECK(js["e"] == nlohmann::ordered_json::array({1, 2}));
  CHECK(js["betti"] == 2);
  CHECK(js.dump() + "\n" == rs.out);
}

TEST_CASE("full table output") {
  auto r = run(clean + " betti --a 1 --b 1 --full --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "p,q0,q1,q2,q3\n0,1,0,0,0\n1,0,1,0,0\n");

  r = run(clean + " betti --a 1 --b 1 --full --max-p 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("segre(1,1) over gf32003") != std::string::npos);

  r = run(clean + " betti --a 1 --b 1 --full --format json");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::ordered_json::parse(r.out);
  CHECK(j["max_p"] == 1);
  CHECK(j["table"][0] == nlohmann::ordered_json::array({1, 0}));
  CHECK(j["table"][1] == nlohmann::ordered_json::array({0, 1}));
}

TEST_CASE("output is independent of thread count and cache state") {
  auto base = run(clean + " betti --a 2 --b 2 --p 5 --q 1 --format json");
  auto threaded = run(clean + " betti --a 2 --b 2 --p 5 --q 1 --format json --threads 4");
  CHECK(base.out == threaded.out);

  TempDir tmp;
  std::string with_cache =
      clean + " betti --a 2 --b 2 --p 5 --q 1 --format json --cache " + tmp.path.string();
  auto cold = run(with_cache);
  auto warm = run(with_cache);
  CHECK(cold.exit_code == 0);
  CHECK(cold.out == base.out);
  CHECK(warm.out == base.out);
}

TEST_CASE("cache subcommands and the environment override") {
  TempDir tmp;
  auto dir = tmp.path.string();

  auto st = run(clean + " cache stats --cache " + dir);
  CHECK(st.exit_code == 0);
  CHECK(st.out.find("records: 0\n") != std::string::npos);

  CHECK(run(clean + " betti --a 1 --b 2 --p 1 --q 1 --cache " + dir).exit_code == 0);
  st = run(clean + " cache stats --cache " + dir);
  CHECK(st.exit_code == 0);
  CHECK(st.out.find("records: 0") == std::string::npos);
  CHECK(st.out.find("segre(1,2) / gf32003") != std::string::npos);

  // BETTI_CACHE_DIR wins over --cache: the bogus flag path is ignored.
  auto env_run = "env BETTI_CACHE_DIR=" + dir + " " + cli;
  CHECK(run(env_run + " betti --a 1 --b 1 --p 1 --q 1 --cache /nonexistent").exit_code == 0);
  st = run(env_run + " cache stats --cache /nonexistent");
  CHECK(st.out.find("segre(1,1) / gf32003") != std::string::npos);

  auto cl = run(clean + " cache clear --cache " + dir);
  CHECK(cl.exit_code == 0);
  st = run(clean + " cache stats --cache " + dir);
  CHECK(st.out.find("records: 0\n") != std::string::npos);
}
