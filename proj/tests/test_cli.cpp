#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = smbtree::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Cli, Parse) {
  auto r = run({"parse", "max(S Z,lim n.n)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "max(S Z, lim n. n)\n");
  EXPECT_EQ(run({"parse", "--desugar", "2"}).out, "S S Z\n");
  auto bad = run({"parse", "max(Z Z)"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("        ^"), std::string::npos);
}

TEST(Cli, Simplify) {
  EXPECT_EQ(run({"simplify", "max(Z, S Z)"}).out, "1\n");
  auto r = run({"simplify", "--certify", "max(S 2, S 3)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("  = S max(2, 3)    [succ-dist at .] fwd PASS, bwd PASS\n"), std::string::npos);
  EXPECT_EQ(r.out.substr(r.out.size() - 2), "4\n");
  EXPECT_EQ(run({"simplify", "lim n. 5"}).out, "5\n");
}

TEST(Cli, CompareAndCheck) {
  std::string path = ::testing::TempDir() + "cli_cmp.deriv";
  auto r = run({"cmp", "2", "omega", "--emit-deriv", path});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "PROVED_LT\n");
  auto ok = run({"check", path, "2", "omega"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out.substr(0, 4), "PASS");
  auto swapped = run({"check", path, "omega", "2"});
  EXPECT_EQ(swapped.code, 3);
  EXPECT_EQ(swapped.out.substr(0, 4), "FAIL");
  std::remove(path.c_str());
}

TEST(Cli, Unknown) {
  auto r = run({"cmp", "S omega", "omega", "--budget", "1000"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "UNKNOWN\nnote: search budget of 1000 nodes exhausted; not a disproof\n");
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"cmp", "x", "omega"}).code, 2);
  EXPECT_EQ(run({"check", "/nonexistent/file", "Z", "Z"}).code, 2);
  std::string bogus = temp_file("cli_bogus.deriv", "smbderiv/1\nrel le\nS\n");
  EXPECT_EQ(run({"check", bogus, "Z", "Z"}).code, 2);
  EXPECT_EQ(run({"laws", "--law", "nope"}).code, 2);
  EXPECT_EQ(run({"cmp", "--budget", "many", "1", "2"}).code, 2);
}

TEST(Cli, Laws) {
  auto r = run({"laws", "--trials", "3", "--law", "idem", "--law", "sup_empty"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "law             cases   pass   fail  exhausted\n"
            "idem                3      3      0          0\n"
            "sup_empty           3      3      0          0\n");
}

TEST(Cli, DemoUnify) {
  std::string f1 = temp_file("u1.htree", "g(a, fun n. iter n f a, b())\n");
  std::string f2 = temp_file("u2.htree", "g(a, fun m. iter m f a, b())\n");
  std::string f3 = temp_file("u3.htree", "g(a, fun m. iter m h a, b())\n");
  auto r = run({"demo-unify", f1, f2});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "g(a, fun{a, f(a), f(f(a)), ...}, b())\ncalls 14, descents 13, every descent witness audited\n");
  EXPECT_EQ(run({"demo-unify", f1, f3}).code, 1);
  std::string broken = temp_file("u4.htree", "g(a");
  EXPECT_EQ(run({"demo-unify", f1, broken}).code, 2);
}

TEST(Cli, Deterministic) {
  for (auto args : std::vector<std::vector<std::string>>{
           {"cmp", "lim n. max(n, 3)", "S omega", "--emit-deriv", "-", "--seed", "5"},
           {"simplify", "--certify", "max(max(omega, 2), max(S 1, omega))"},
           {"laws", "--trials", "2", "--seed", "11"}}) {
    auto a = run(args), b = run(args);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out);
  }
}
