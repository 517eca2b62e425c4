#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "cli.hpp"

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = nearflow::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

const std::string kCounterexample = R"({"x":["1","1","0","0","0","0"],"u":["1","0"]})";

}  // namespace

TEST_CASE("flow-eval reproduces the closed-form element") {
  const auto r = run_cli({"flow-eval", "--algebra", "qh", "--generator",
                          R"({"x":["1","0","0","0","0","1"],"u":["0","0"]})", "--times", "1,2,4"});
  CHECK(r.code == 0);
  const auto j = nearflow::json::parse(r.out);
  CHECK(j.at("x")[0] == "6/5");
  CHECK(j.at("x")[5] == "2/5");
  CHECK(j.at("u")[0] == "2/3");
}

TEST_CASE("gen-check flags the counterexample with exit code 2") {
  const auto r = run_cli({"gen-check", "--algebra", "qh", "--generator", kCounterexample, "--quadruples",
                          "1,2,3,4"});
  CHECK(r.code == 2);
  const auto j = nearflow::json::parse(r.out);
  CHECK(j.at("all_pass") == false);
  bool eq2_failed = false, eq1_ok = false;
  for (const auto& c : j.at("checks")) {
    if (c.at("check") == "flow_eq_2" && c.at("pass") == false) eq2_failed = true;
    if (c.at("check") == "flow_eq_1" && c.at("pass") == true) eq1_ok = true;
  }
  CHECK(eq2_failed);
  CHECK(eq1_ok);
}

TEST_CASE("the failing witness replays through flow-verify") {
  const auto r = run_cli({"gen-check", "--algebra", "qh", "--generator", kCounterexample, "--quadruples",
                          "1,2,3,4"});
  REQUIRE(r.code == 2);
  const auto j = nearflow::json::parse(r.out);
  std::vector<std::string> times;
  for (const auto& c : j.at("checks"))
    if (c.at("check") == "flow_eq_2" && c.contains("witness"))
      for (const auto& t : c.at("witness").at("times")) times.push_back(t.get<std::string>());
  REQUIRE(times.size() == 4);
  const std::string quad = times[0] + "," + times[1] + "," + times[2] + "," + times[3];
  const auto replay = run_cli({"flow-verify", "--algebra", "qh", "--generator", kCounterexample,
                               "--quadruples", quad});
  CHECK(replay.code == 2);
  CHECK(nearflow::json::parse(replay.out).at("all_pass") == false);
}

TEST_CASE("variance-coeffs emits the worked CSV row") {
  const auto r = run_cli({"variance-coeffs", "--params",
                          R"({"theta":"0","eta":"0","sigma":"0","tau":"0","gamma":"1","chi":1})",
                          "--times", "1,2,4", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out == "r,s,u,xr2,xrxu,xu2,xr,xu,one\n1,2,4,0,0,0,0,0,2/3\n");
}

TEST_CASE("qh-coeffs CSV matches the flow coordinates") {
  const auto r = run_cli({"qh-coeffs", "--generator-params",
                          R"({"alpha":"1","beta":"0","rho":"0","h4":"0","h5":"0","h6":"1"})", "--times",
                          "1,2,4", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out == "r,s,u,A,B,C,D,E,F,a,b\n1,2,4,6/5,0,1/5,0,0,2/5,2/3,1/3\n");

  const auto viaparams = run_cli({"qh-coeffs", "--params",
                                  R"({"theta":"0","eta":"0","sigma":"0","tau":"0","gamma":"1","chi":1})",
                                  "--times", "1,2,4;2,3,5", "--format", "json"});
  CHECK(viaparams.code == 0);
  const auto j = nearflow::json::parse(viaparams.out);
  CHECK(j.size() == 2);
  // Brownian second moment: A = a^2 = 4/9 at (1, 2, 4), F = Var = 2/3.
  CHECK(j[0].at("A") == "4/9");
  CHECK(j[0].at("F") == "2/3");
}

TEST_CASE("laws-check exit codes") {
  const auto ok = run_cli({"laws-check", "--algebra", "affine", "--dim", "2", "--samples", "12", "--seed",
                           "5", "--workers", "2"});
  CHECK(ok.code == 0);
  CHECK(nearflow::json::parse(ok.out).at("all_pass") == true);
}

TEST_CASE("usage and domain errors map to exit codes 1 and 3") {
  CHECK(run_cli({"no-such-command"}).code == 1);
  CHECK(run_cli({"flow-eval", "--algebra", "qh", "--times", "1,2,4"}).code == 1);  // missing generator
  CHECK(run_cli({"flow-eval", "--algebra", "qh", "--generator", "{bad json", "--times", "1,2,4"}).code ==
        1);

  // Trivial generator evaluated outside its domain: r < 0.
  const auto dom = run_cli({"flow-eval", "--algebra", "qh", "--generator",
                            R"({"x":["0","0","0","0","0","0"],"u":["0","0"]})", "--times", "1,1,2"});
  CHECK(dom.code == 3);
  CHECK(nearflow::json::parse(dom.out).contains("error"));

  // Affine generator with negative rate is a domain error.
  const auto neg = run_cli({"flow-eval", "--algebra", "affine", "--generator",
                            R"({"alpha":"-1","vec":["0"]})", "--times", "0,1"});
  CHECK(neg.code == 3);
}

TEST_CASE("affine one-way evaluation") {
  const auto r = run_cli({"flow-eval", "--algebra", "affine", "--generator",
                          R"({"alpha":"1","vec":["1"]})", "--times", "1,2"});
  CHECK(r.code == 0);
  const auto j = nearflow::json::parse(r.out);
  CHECK(j.at("alpha") == "3/2");
  CHECK(j.at("vec")[0] == "1/2");
}

TEST_CASE("gen-recover round trips through a family file") {
  const auto eval = run_cli({"flow-eval", "--algebra", "qh", "--generator",
                             R"({"x":["1","0","0","0","0","1"],"u":["0","0"]})", "--times",
                             "0,1/2,1"});
  REQUIRE(eval.code == 0);
  nearflow::json entry{{"r", "0"}, {"s", "1/2"}, {"u", "1"}, {"elem", nearflow::json::parse(eval.out)}};
  nearflow::json family{{"entries", nearflow::json::array({entry})}};

  const std::string path = "/tmp/nearflow_family_test.json";
  std::ofstream(path) << family.dump();
  const auto rec = run_cli({"gen-recover", "--algebra", "qh", "--family", "@" + path, "--t-probe", "1/2"});
  CHECK(rec.code == 0);
  const auto j = nearflow::json::parse(rec.out);
  CHECK(j.at("x")[0] == "1");
  CHECK(j.at("x")[5] == "1");
  CHECK(j.at("u")[0] == "0");
  std::remove(path.c_str());
}

TEST_CASE("deterministic byte-identical output") {
  const std::vector<std::string> cmd{"qh-coeffs", "--generator-params",
                                     R"({"alpha":"2","beta":"1","rho":"1","h4":"1","h5":"0","h6":"1"})",
                                     "--times", "1,2,4;1/2,3/4,7/2", "--format", "csv"};
  const auto a = run_cli(cmd), b = run_cli(cmd);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const std::vector<std::string> laws{"laws-check", "--algebra", "qh", "--samples", "10", "--seed", "3"};
  const auto l1 = run_cli(laws);
  auto laws8 = laws;
  laws8.push_back("--workers");
  laws8.push_back("8");
  const auto l8 = run_cli(laws8);
  CHECK(l1.out == l8.out);
}

TEST_CASE("the installed binary behaves like the library entry point") {
#ifdef NEARFLOW_CLI_PATH
  const std::string cmd = std::string(NEARFLOW_CLI_PATH) +
                          " variance-coeffs --params "
                          "'{\"theta\":\"0\",\"eta\":\"0\",\"sigma\":\"0\",\"tau\":\"0\",\"gamma\":\"1\","
                          "\"chi\":1}' --times 1,2,4 --format csv";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buf[256];
  while (fgets(buf, sizeof buf, pipe)) output += buf;
  const int status = pclose(pipe);
  CHECK(status == 0);
  CHECK(output == "r,s,u,xr2,xrxu,xu2,xr,xu,one\n1,2,4,0,0,0,0,0,2/3\n");
#endif
}

TEST_CASE("simulate writes a dump with header") {
  const std::string base = "/tmp/nearflow_dump_test";
  const auto r = run_cli({"simulate", "--process", "sign", "--grid", "1,2", "--paths", "1000", "--seed",
                          "9", "--dump", base});
  CHECK(r.code == 0);
  std::ifstream hdr(base + ".json");
  REQUIRE(hdr.good());
  nearflow::json j;
  hdr >> j;
  CHECK(j.at("n_paths") == 1000);
  std::ifstream bin(base + ".bin", std::ios::binary | std::ios::ate);
  REQUIRE(bin.good());
  CHECK(bin.tellg() == static_cast<std::streamoff>(2 * 1000 * sizeof(double)));
  std::remove((base + ".json").c_str());
  std::remove((base + ".bin").c_str());
}

TEST_CASE("mc-validate single check") {
  const auto r = run_cli({"mc-validate", "--check", "sign-rank", "--paths", "5000", "--seed", "4"});
  CHECK(r.code == 0);
  CHECK(nearflow::json::parse(r.out).at("pass") == true);
}

TEST_CASE("harness-coeffs commands") {
  const auto lin = run_cli({"harness-coeffs", "--kind", "unbounded", "--times", "1,2,4", "--format",
                            "csv"});
  CHECK(lin.code == 0);
  CHECK(lin.out == "r,s,u,a,b,A_ru,B_ru\n1,2,4,4/3,1/6,1,-1/4\n");

  const auto second = run_cli({"harness-coeffs", "--moment", "second", "--kind", "bounded", "--a", "1",
                               "--b", "0", "--times", "1,3", "--format", "csv"});
  CHECK(second.code == 0);
  CHECK(second.out == "s,t,a_ts,b_ts,c_ts\n1,3,2,0,1\n");
}
