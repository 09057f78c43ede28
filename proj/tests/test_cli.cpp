#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + std::string(QSLAB_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  std::size_t k;
  while ((k = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), k);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string last_line(const std::string& s) {
  auto t = s;
  while (!t.empty() && t.back() == '\n') t.pop_back();
  auto p = t.rfind('\n');
  return p == std::string::npos ? t : t.substr(p + 1);
}

std::string first_data_line(const std::string& s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto e = s.find('\n', pos);
    std::string line = s.substr(pos, e - pos);
    if (!line.empty() && line[0] != '#') return line;
    pos = e + 1;
  }
  return "";
}

}  // namespace

TEST(Cli, FormulaValue) {
  auto r = run("formula --name qs_mean --n 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(last_line(r.out), "8/3");
  EXPECT_NE(r.out.find("# n=3"), std::string::npos);
  auto j = nlohmann::json::parse(run("formula --name qs_var --n 3 --format json").out);
  EXPECT_EQ(j["rows"][0]["value"], "2/9");
  EXPECT_EQ(j["config"]["name"], "qs_var");
}

TEST(Cli, FormulaList) {
  auto r = run("formula --list");
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  bool found = false;
  for (auto& e : j)
    if (e["name"] == "qs_mean") {
      found = true;
      EXPECT_EQ(e["params"][0], "n");
      EXPECT_TRUE(e["exact"].get<bool>());
    }
  EXPECT_TRUE(found);
}

TEST(Cli, MergeWorkedExample) {
  auto r = run("merge --chains \"5,7,9,11,12;4,6,10\"");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("comparisons=13\n"), std::string::npos);
  EXPECT_NE(r.out.find("merged=4,5,6,7,9,10,11,12\n"), std::string::npos);
  auto b = run("merge --chains \"5,7,9,11,12;4,6,10\" --strategy binary");
  EXPECT_NE(b.out.find("comparisons=6\n"), std::string::npos);
  EXPECT_EQ(run("merge --chains \"1,x\"").code, 2);
}

TEST(Cli, RootsJson) {
  auto r = run("roots --family multi --k 2");
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  bool three = false, minus_two = false;
  for (auto& z : j["roots"]) {
    double re = z["re"], im = z["im"];
    if (std::abs(re - 3) < 1e-9 && std::abs(im) < 1e-12) three = true;
    if (std::abs(re + 2) < 1e-9 && std::abs(im) < 1e-12) minus_two = true;
  }
  EXPECT_TRUE(three);
  EXPECT_TRUE(minus_two);
  EXPECT_TRUE(j["certified"].get<bool>());
  EXPECT_EQ(run("roots --family general --k 1 --t 2").code, 2);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("sort --bogus").code, 2);
  EXPECT_EQ(run("formula --name qs_mean --n x").code, 2);
  EXPECT_EQ(run("formula --name qs_mean").code, 2);
  EXPECT_EQ(run("dist --n 13").code, 3);
  EXPECT_EQ(run("poset analyze --file /nonexistent/file").code, 2);
  EXPECT_EQ(run("sort --seed notanumber").code, 2);
  EXPECT_EQ(run("sort --keys 1,1,2").code, 2);
  EXPECT_EQ(run("graph-order --p 1.5 --steps 0").code, 2);
}

TEST(Cli, HelpListsFlagsWithDefaults) {
  for (std::string sub : {"sort", "formula", "identity", "roots", "poset gen", "poset analyze", "poset sort", "merge",
                          "graph-order", "mc", "dist"}) {
    auto r = run(sub + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--seed"), std::string::npos) << sub;
    EXPECT_NE(r.out.find("--format"), std::string::npos) << sub;
  }
  auto s = run("sort --help").out;
  EXPECT_NE(s.find("[single]"), std::string::npos);
  EXPECT_NE(s.find("--cutoff"), std::string::npos);
}

TEST(Cli, DeterministicAndJobsInvariant) {
  for (std::string cmd : {"mc --n 60 --trials 300", "poset sort --model kdim --k 2 --n 30 --trials 6 --strategy binary",
                          "graph-order --points 3 --steps 20000", "sort --n 50 --variant multi --k 3",
                          "mc --mode skewness --grid 5,20 --trials 200"}) {
    auto a = run(cmd + " --jobs 1"), b = run(cmd + " --jobs 3"), c = run(cmd + " --jobs 1");
    EXPECT_EQ(a.code, 0) << cmd;
    EXPECT_EQ(a.out, b.out) << cmd;
    EXPECT_EQ(a.out, c.out) << cmd;
  }
  EXPECT_NE(run("sort --n 50 --seed 1").out, run("sort --n 50 --seed 2").out);
}

TEST(Cli, SeedFromEnvironment) {
  auto env = run("sort --n 40", "QSLAB_SEED=99");
  auto flag = run("sort --n 40 --seed 99");
  EXPECT_EQ(env.out, flag.out);
  EXPECT_NE(env.out.find("# seed=99"), std::string::npos);
  EXPECT_NE(run("sort --n 40").out.find("# seed=12648430"), std::string::npos);
  EXPECT_EQ(run("sort --n 40 --seed 0xC0FFEE").out, run("sort --n 40").out);
}

TEST(Cli, CsvSchemas) {
  EXPECT_EQ(first_data_line(run("poset sort --model levels --d 4 --k 5 --n 20 --trials 2").out),
            "model,n,trial,comparisons_used,info_bound,fk_upper,ratio");
  EXPECT_EQ(first_data_line(run("graph-order --p 0.5 --steps 0").out),
            "p,f,h,theta3_bound,crude_bound,mu_lower,sim_under,sim_over");
  EXPECT_EQ(first_data_line(run("mc --n 20 --trials 100").out),
            "variant,params,n,trials,seed,mean,var,skew,reference,radius,pass");
  // RFC-4180: a params field with commas is quoted
  auto m = run("mc --variant multiset --mult 2,1 --n 3 --trials 200").out;
  EXPECT_NE(m.find("\"s=2,1\""), std::string::npos);
}

TEST(Cli, PosetRoundTrip) {
  std::string file = testing::TempDir() + "qslab_cli_poset.txt";
  EXPECT_EQ(run("poset gen --model levels --d 3 --k 2 --n 6 --out " + file).code, 0);
  auto a = run("poset analyze --file " + file);
  EXPECT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("width=2\n"), std::string::npos);
  EXPECT_NE(a.out.find("height=3\n"), std::string::npos);
  EXPECT_NE(a.out.find("extensions=8\n"), std::string::npos);
  auto s = run("poset sort --file " + file + " --strategy shellsort");
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("file,6,0,"), std::string::npos);
}

TEST(Cli, DistAndIdentity) {
  auto d = run("dist --n 3");
  EXPECT_NE(d.out.find("2,1/3\n3,2/3\n"), std::string::npos);
  auto i = nlohmann::json::parse(run("identity --format json").out);
  EXPECT_TRUE(i["all_hold"].get<bool>());
  EXPECT_EQ(run("identity --name nope").code, 2);
}
