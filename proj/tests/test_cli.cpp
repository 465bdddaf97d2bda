#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "evalanche/cli.hpp"
#include "evalanche/io.hpp"

using namespace evalanche;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "evalanche");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("evalanche_cli_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name, std::ios::binary) << content;
    return path_ / name;
  }

 private:
  fs::path path_;
};

const fs::path kGolden = EVALANCHE_GOLDEN_DIR;

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"matrix", "--bogus"}).code == kExitUsage);
  CHECK(run({"matrix", "--values", "/nonexistent.csv"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"--version"}).out.find(std::string(kVersion)) != std::string::npos);

  TempDir dir;
  const auto values = dir.write("v.csv", "8\n4\n1\n");
  CHECK(run({"matrix", "--values", values.string(), "--merge", "u0"}).code == kExitUsage);
  CHECK(run({"diagonal", "--values", values.string(), "--rows", "4"}).code == kExitUsage);
  CHECK(run({"diagonal", "--values", values.string(), "--rows", "x"}).code == kExitUsage);
  const auto bad_config = dir.write("bad.json", R"({"k": 10, "unknown": 1})");
  const Run r = run({"simulate", "--config", bad_config.string(), "--out", (dir.path() / "o").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("unknown") != std::string::npos);
  CHECK(r.out.empty());
  const auto blocker = dir.write("file", "x");
  CHECK(run({"simulate", "--out", (blocker / "sub").string()}).code == kExitUsage);
}

TEST_CASE("domain errors exit with 2") {
  TempDir dir;
  CHECK(run({"merge", "--values", dir.write("empty.csv", "").string()}).code == kExitUsage);
  const auto values = dir.write("v.csv", "8\n4\n1\n");
  run({"matrix", "--values", values.string(), "--out", (dir.path() / "m.csv").string()});
  CHECK(run({"region", "--matrix", (dir.path() / "m.csv").string(), "--row", "2", "--alpha", "0"}).code ==
        kExitNumerical);
  CHECK(run({"region", "--matrix", (dir.path() / "m.csv").string(), "--row", "9", "--alpha", "1"}).code ==
        kExitNumerical);
}

TEST_CASE("matrix subcommand reproduces the golden files") {
  TempDir dir;
  const auto values = dir.write("v.csv", "8\n4\n1\n");
  const auto svg = dir.path() / "dm.svg";
  const Run r = run({"matrix", "--values", values.string(), "--merge", "u1", "--heatmap", svg.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == slurp(kGolden / "matrix_841_u1.csv"));
  CHECK(slurp(svg) == slurp(kGolden / "heatmap_841_u1.svg"));

  const Run mix = run({"matrix", "--values", values.string(), "--merge", "mix:0.5,0.5", "--regularize"});
  CHECK(mix.code == kExitOk);
  CHECK(mix.out.find("r,j,log10_value,bucket\n") == 0);
}

TEST_CASE("diagonal, subdiag, merge and region subcommands") {
  TempDir dir;
  const auto values = dir.write("v.csv", "value\n4\n8\n1\n");
  const Run d = run({"diagonal", "--values", values.string(), "--rows", "1-2"});
  CHECK(d.code == kExitOk);
  CHECK(d.out == "row,kind,log10_value,value\n1,diagonal,0.636822097587,4.333333333\n"
                 "2,diagonal,0.397940008672,2.5\n");
  const Run s = run({"subdiag", "--values", values.string(), "--rows", "2"});
  CHECK(s.out == "row,kind,log10_value,value\n2,subdiagonal,1.16633142177,14.66666667\n");
  const Run m = run({"merge", "--values", dir.write("p.csv", "8 4").string(), "--merge", "mix:0,0.5,0.5"});
  CHECK(m.out == "merge,log10_value,value\nmix:0,0.5,0.5,1.27875360095,19\n");

  const auto mfile = dir.path() / "m.csv";
  CHECK(run({"matrix", "--values", values.string(), "--out", mfile.string()}).code == kExitOk);
  const Run region = run({"region", "--matrix", mfile.string(), "--row", "2", "--alpha", "3"});
  CHECK(region.code == kExitOk);
  CHECK(region.out == "row,alpha,lower_bound,members\n2,3,1,1;2\n");
  const Run rj = run({"region", "--matrix", mfile.string(), "--row", "2", "--alpha", "10", "--format", "json"});
  CHECK(nlohmann::json::parse(rj.out)["regions"][0]["members"] == nlohmann::json::array({0, 1, 2}));
}

TEST_CASE("validate-poly subcommand") {
  TempDir dir;
  const auto good = dir.write("good.json", R"({"k":2,"terms":[{"vars":[],"coef":0.2},{"vars":[1],"coef":0.15},
    {"vars":[2],"coef":0.15},{"vars":[1,2],"coef":0.5}]})");
  const Run g = run({"validate-poly", "--poly", good.string()});
  CHECK(g.code == kExitOk);
  CHECK(g.out == "valid\nsymmetric: weights 0.2 0.3 0.5 (convex NESP mixture)\n");
  const auto bad = dir.write("bad.json", R"({"k":2,"terms":[{"vars":[1],"coef":0.5},{"vars":[1,2],"coef":0.6}]})");
  const Run b = run({"validate-poly", "--poly", bad.string(), "--format", "json"});
  CHECK(b.code == kExitOk);
  const auto j = nlohmann::json::parse(b.out);
  CHECK(j["valid"] == false);
  CHECK(j["symmetric"] == false);
  CHECK(run({"validate-poly", "--poly", dir.write("m.json", "{").string()}).code == kExitUsage);
}

TEST_CASE("simulate writes a reproducible bundle") {
  TempDir dir;
  const auto config = dir.write("c.json", R"({"k":10,"n_false":5,"steps":200,"tracked_rows":[4,5,6],
    "checkpoints":[0,200],"seed":3})");
  const auto out1 = dir.path() / "run1";
  const Run r = run({"simulate", "--config", config.string(), "--out", out1.string(), "--plot", "--replicates", "3"});
  REQUIRE(r.code == kExitOk);
  for (const char* name : {"manifest.json", "series.csv", "series.svg", "final_table.csv", "summary.csv",
                           "matrix_0.csv", "matrix_200.csv", "matrix_200_regularized.csv", "heatmap_200.svg",
                           "regions_200.csv"}) {
    INFO(name);
    CHECK(fs::exists(out1 / name));
  }

  // The manifest alone reproduces every other file.
  const auto out2 = dir.path() / "run2";
  REQUIRE(run({"simulate", "--config", (out1 / "manifest.json").string(), "--out", out2.string(), "--plot",
               "--replicates", "3"})
              .code == kExitOk);
  for (const auto& entry : fs::directory_iterator(out1)) {
    INFO(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(out2 / entry.path().filename()));
  }

  const auto out3 = dir.path() / "run3";
  REQUIRE(run({"simulate", "--config", config.string(), "--seed", "4", "--out", out3.string(), "--format", "json"})
              .code == kExitOk);
  CHECK(fs::exists(out3 / "series.json"));
  CHECK(fs::exists(out3 / "matrix_200.json"));
  CHECK(slurp(out3 / "final_table.csv") != slurp(out1 / "final_table.csv"));
  CHECK(nlohmann::json::parse(slurp(out3 / "manifest.json"))["config"]["seed"] == 4);
}

TEST_CASE("oracle-check passes") {
  const Run r = run({"oracle-check", "--trials", "20"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
