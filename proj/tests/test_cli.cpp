#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("INTERGAIN_CLI");
  REQUIRE_MESSAGE(p != nullptr, "INTERGAIN_CLI must point at the built binary");
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) res.output.append(buf, n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("intergain_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate exit codes follow the contract") {
  TempDir dir;
  SUBCASE("clean table exits 0") {
    spit(dir.path / "s.csv", "model,target,seed,score\nm,x,0,70\n");
    spit(dir.path / "b.csv", "target,seed,score\nx,0,65\n");
    CHECK(run("validate --scores " + (dir.path / "s.csv").string() + " --baselines " +
              (dir.path / "b.csv").string())
              .exit_code == 0);
  }
  SUBCASE("violations exit 2") {
    spit(dir.path / "s.csv", "model,target,seed,score\nm,x,0,70\nm,y,0,105\n");
    spit(dir.path / "b.csv", "target,seed,score\nx,0,65\n");
    CHECK(run("validate --scores " + (dir.path / "s.csv").string() + " --baselines " +
              (dir.path / "b.csv").string())
              .exit_code == 2);
  }
  SUBCASE("parse failure exits 1") {
    spit(dir.path / "s.csv", "model,target,seed,score\nm,x,zero,70\n");
    spit(dir.path / "b.csv", "target,seed,score\nx,0,65\n");
    CHECK(run("validate --scores " + (dir.path / "s.csv").string() + " --baselines " +
              (dir.path / "b.csv").string())
              .exit_code == 1);
    CHECK(run("validate --scores " + (dir.path / "missing.csv").string() + " --baselines " +
              (dir.path / "b.csv").string())
              .exit_code == 1);
  }
}

TEST_CASE("fraction-scaled input is rejected unless --scale is passed") {
  TempDir dir;
  spit(dir.path / "s.csv", "model,target,seed,score\nm,x,0,0.7\n");
  spit(dir.path / "b.csv", "target,seed,score\nx,0,0.65\n");
  const std::string io =
      " --scores " + (dir.path / "s.csv").string() + " --baselines " + (dir.path / "b.csv").string();
  CHECK(run("gains" + io + " --out " + (dir.path / "r.json").string()).exit_code == 2);
  CHECK(run("gains" + io + " --scale --out " + (dir.path / "r.json").string()).exit_code == 0);
  const std::string rep = slurp(dir.path / "r.json");
  CHECK(rep.find("\"mean_gain\"") != std::string::npos);
}

TEST_CASE("synth then analyze produces a deterministic full report") {
  TempDir dir;
  const std::string scores = (dir.path / "scores.csv").string();
  const std::string baselines = (dir.path / "baselines.csv").string();
  CHECK(run("synth --models 5 --targets 5 --seeds 2 --noise 0.3 --seed 5 --square --out " + scores +
            " --baselines-out " + baselines)
            .exit_code == 0);
  REQUIRE(fs::exists(scores));
  REQUIRE(fs::exists(baselines));

  const std::string io = " --scores " + scores + " --baselines " + baselines;
  const std::string r1 = (dir.path / "r1.json").string();
  const std::string r2 = (dir.path / "r2.json").string();
  CHECK(run("analyze --all" + io + " --n-perm 200 --shuffles 4 --out " + r1).exit_code == 0);
  CHECK(run("analyze --all" + io + " --n-perm 200 --shuffles 4 --threads 3 --out " + r2).exit_code == 0);
  CHECK(slurp(r1) == slurp(r2));  // byte-identical across thread counts

  const std::string text = slurp(r1);
  for (const char* section : {"\"gains\"", "\"decomposition\"", "\"ranking\"", "\"sensitivity\"",
                              "\"symmetry\"", "\"validation\""})
    CHECK(text.find(section) != std::string::npos);
}

TEST_CASE("rank and recommend consume quality files") {
  TempDir dir;
  spit(dir.path / "s.csv",
       "model,target,seed,score\nma,x,0,72\nma,y,0,71\nmb,x,0,75\nmb,y,0,69\n");
  spit(dir.path / "b.csv", "target,seed,score\nx,0,70\ny,0,70\n");
  spit(dir.path / "lp.csv", "model,value\nma,5.0\nmb,9.0\n");

  const std::string rep = (dir.path / "rank.json").string();
  CHECK(run("rank --scores " + (dir.path / "lp.csv").string() + " --gains " +
            (dir.path / "s.csv").string() + " --baselines " + (dir.path / "b.csv").string() +
            " --k 1,2 --out " + rep)
            .exit_code == 0);
  const std::string text = slurp(rep);
  CHECK(text.find("\"ranking\"") != std::string::npos);
  CHECK(text.find("mb") < text.find("ma"));  // mb has the higher LP value

  const RunResult rec = run("recommend --lp " + (dir.path / "lp.csv").string() + " --k 1");
  CHECK(rec.exit_code == 0);
  CHECK(rec.output.find("mb") != std::string::npos);
  CHECK(rec.output.find("predicted_avg_gain") != std::string::npos);
}

TEST_CASE("gains --plots writes a heatmap next to the report") {
  TempDir dir;
  spit(dir.path / "s.csv", "model,target,seed,score\nm,x,0,72\nm,y,0,69\n");
  spit(dir.path / "b.csv", "target,seed,score\nx,0,70\ny,0,70\n");
  CHECK(run("gains --scores " + (dir.path / "s.csv").string() + " --baselines " +
            (dir.path / "b.csv").string() + " --plots --out-dir " + dir.path.string() +
            " --out report.json")
            .exit_code == 0);
  CHECK(fs::exists(dir.path / "report.json"));
  CHECK(fs::exists(dir.path / "heatmap.svg"));
  CHECK(slurp(dir.path / "heatmap.svg").find("<svg") != std::string::npos);
}

TEST_CASE("symmetry and xcorr subcommands") {
  TempDir dir;
  // square layout: the same two ids act as sources and targets
  spit(dir.path / "s.csv",
       "model,target,seed,score\na,a,0,71\na,b,0,74\nb,a,0,74\nb,b,0,73\n");
  spit(dir.path / "b.csv", "target,seed,score\na,0,70\nb,0,70\n");
  const std::string io =
      " --scores " + (dir.path / "s.csv").string() + " --baselines " + (dir.path / "b.csv").string();
  const std::string rep = (dir.path / "sym.json").string();
  CHECK(run("symmetry" + io + " --out " + rep).exit_code == 0);
  CHECK(slurp(rep).find("\"s\": 1.0") != std::string::npos);

  spit(dir.path / "s2.csv",
       "model,target,seed,score\na,a,0,72\na,b,0,75\nb,a,0,73\nb,b,0,74\nc,a,0,70\nc,b,0,71\n");
  // xcorr needs >= 3 shared targets; this pair has 2 -> expect exit 1
  CHECK(run("xcorr" + io + " --other " + (dir.path / "s2.csv").string() + " --other-baselines " +
            (dir.path / "b.csv").string() + " --quantity target_mean --out " +
            (dir.path / "x.json").string())
            .exit_code == 1);
}

TEST_CASE("environment variables override defaults") {
  TempDir dir;
  const std::string scores = (dir.path / "scores.csv").string();
  const std::string baselines = (dir.path / "baselines.csv").string();
  // INTERGAIN_SEED changes the generated table
  const std::string cmd = "INTERGAIN_SEED=77 " + cli_path() + " synth --models 3 --targets 3 --seeds 1 --out " +
                          scores + " --baselines-out " + baselines + " 2>/dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string with_env = slurp(scores);
  CHECK(run("synth --models 3 --targets 3 --seeds 1 --seed 77 --out " + scores +
            " --baselines-out " + baselines)
            .exit_code == 0);
  CHECK(slurp(scores) == with_env);
}

}  // TEST_SUITE
