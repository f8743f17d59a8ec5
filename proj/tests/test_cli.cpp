#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "isurf/pointset_io.h"

using namespace isurf;
namespace fs = std::filesystem;

namespace {

const std::string kCli = ISURF_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path tmp_dir() {
  const fs::path dir = fs::temp_directory_path() / "isurf_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = tmp_dir() / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kSphereScene = R"({"op":"sphere","center":[0,0,0],"radius":0.5})";
const std::string kCubeScene = R"({"op":"box","center":[0,0,0],"half_extents":[1,1,1]})";
const std::string kShellScene = R"({"op":"absolute","child":{"op":"sphere","radius":0.5}})";

}  // namespace

TEST_CASE("sample: expected yield, byte-identical reruns, thread independence") {
  const std::string scene = write_file("sphere.json", kSphereScene);
  const std::string out_a = (tmp_dir() / "a.ply").string();
  const std::string out_b = (tmp_dir() / "b.ply").string();
  const std::string rep_a = (tmp_dir() / "a.json").string();
  const std::string rep_b = (tmp_dir() / "b.json").string();

  REQUIRE(run("sample --scene " + scene + " --rays 100000 --seed 7 -o " + out_a + " --report " +
              rep_a + " --threads 1") == 0);
  const auto points = read_points(out_a);
  const double expected = 100000 * std::numbers::pi / 12.0;
  CHECK(std::abs(static_cast<double>(points.size()) - expected) < 650);  // 3 sigma
  const std::string first_points = slurp(out_a);
  const std::string first_report = slurp(rep_a);

  // Same config and paths, different thread count: bytes must not change.
  REQUIRE(run("sample --scene " + scene + " --rays 100000 --seed 7 -o " + out_a + " --report " +
              rep_a + " --threads 4") == 0);
  CHECK(first_points == slurp(out_a));
  CHECK(first_report == slurp(rep_a));
  (void)out_b;
  (void)rep_b;

  const auto report = nlohmann::json::parse(slurp(rep_a));
  CHECK(report["hits"] == static_cast<std::int64_t>(points.size()));
  CHECK(report.contains("config_hash"));
  CHECK(report["config"]["seed"] == 7);
}

TEST_CASE("sample: --samples requests an exact count; resample duplicates allowed") {
  const std::string scene = write_file("sphere.json", kSphereScene);
  const std::string out = (tmp_dir() / "count.ply").string();
  REQUIRE(run("sample --scene " + scene + " --samples 5000 --seed 3 -o " + out) == 0);
  CHECK(read_points(out).size() == 5000);
  REQUIRE(run("sample --scene " + scene + " --mode resample --samples 4000 --seed 3 -o " + out) ==
          0);
  CHECK(read_points(out).size() == 4000);
  REQUIRE(run("sample --scene " + scene + " --mode keep-one --rays 30000 --seed 3 -o " + out) ==
          0);
  CHECK(read_points(out).size() > 1000);
}

TEST_CASE("sample: stratified mode covers the surface") {
  const std::string scene = write_file("sphere.json", kSphereScene);
  const std::string out = (tmp_dir() / "strat.xyz").string();
  REQUIRE(run("sample --scene " + scene +
              " --mode stratified --rays 50000 --voxel-res 8 --seed 5 -o " + out) == 0);
  CHECK(read_points(out).size() > 1000);
}

TEST_CASE("sample: bad arguments and load failures use the documented exit codes") {
  const std::string scene = write_file("sphere.json", kSphereScene);
  const std::string out = (tmp_dir() / "x.ply").string();
  CHECK(run("sample --scene " + scene + " --rays 0 -o " + out) == 2);
  CHECK(run("sample --scene " + scene + " --mode resample --rays 100 -o " + out) == 2);
  CHECK(run("sample --rays 10 -o " + out) == 2);
  CHECK(run("sample --scene " + (tmp_dir() / "missing.json").string() + " --rays 10 -o " + out) ==
        3);
  const std::string bad = write_file("bad.json", "{not json");
  CHECK(run("sample --scene " + bad + " --rays 10 -o " + out) == 3);
  const std::string empty = write_file("empty.json", R"({"op":"sphere","center":[9,9,9],"radius":0.1})");
  CHECK(run("sample --scene " + empty + " --rays 2000 -o " + out) == 4);
}

TEST_CASE("moments: sphere and cube oracles through the CLI") {
  const std::string sphere = write_file("sphere.json", kSphereScene);
  const std::string cube = write_file("cube.json", kCubeScene);
  const std::string rep = (tmp_dir() / "m.json").string();

  REQUIRE(run("moments --scene " + sphere + " --rays 300000 --seed 2 --threads 2 --report " +
              rep) == 0);
  auto j = nlohmann::json::parse(slurp(rep));
  CHECK(std::abs(j["estimates"]["area"].get<double>() - std::numbers::pi) <
        0.02 * std::numbers::pi);
  CHECK(std::abs(j["estimates"]["volume"].get<double>() - std::numbers::pi / 6) <
        0.02 * std::numbers::pi / 6);

  REQUIRE(run("moments --scene " + cube + " --rays 200000 --seed 2 --report " + rep) == 0);
  j = nlohmann::json::parse(slurp(rep));
  CHECK(std::abs(j["estimates"]["area"].get<double>() - 24.0) < 0.01 * 24.0);
  CHECK(std::abs(j["estimates"]["volume"].get<double>() - 8.0) < 0.01 * 8.0);
}

TEST_CASE("moments: stratified voxel path and convergence sweep") {
  const std::string sphere = write_file("sphere.json", kSphereScene);
  const std::string rep = (tmp_dir() / "strat.json").string();
  REQUIRE(run("moments --scene " + sphere + " --rays 200000 --voxel-res 8 --seed 4 --report " +
              rep) == 0);
  auto j = nlohmann::json::parse(slurp(rep));
  CHECK(std::abs(j["estimates"]["area"].get<double>() - std::numbers::pi) <
        0.03 * std::numbers::pi);
  CHECK(std::abs(j["estimates"]["volume"].get<double>() - std::numbers::pi / 6) <
        0.03 * std::numbers::pi / 6);

  const std::string conv = (tmp_dir() / "conv.csv").string();
  REQUIRE(run("moments --scene " + sphere + " --rays 2000 --sweep 2000,8000 --sweep-out " + conv +
              " --report " + rep) == 0);
  std::ifstream in(conv);
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("moments: volume on an unsigned field exits 5") {
  const std::string shell = write_file("shell.json", kShellScene);
  CHECK(run("moments --scene " + shell + " --rays 1000 --volume") == 5);
  // Without --volume the area-only report succeeds.
  const std::string rep = (tmp_dir() / "shell.json.out").string();
  REQUIRE(run("moments --scene " + shell + " --rays 50000 --report " + rep) == 0);
  const auto j = nlohmann::json::parse(slurp(rep));
  CHECK_FALSE(j["estimates"].contains("volume"));
}

TEST_CASE("eval: three methods produce rows; bad method or empty mesh fail") {
  const std::string csv = (tmp_dir() / "rows.csv").string();
  REQUIRE(run("eval --torus 0.5,0.2 --samples 4000 --seeds 1 --threads 2 -o " + csv) == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,shape,samples,tv,evals,seed");
  int rows = 0;
  bool saw_ours = false, saw_rejection = false, saw_gt = false;
  while (std::getline(in, line)) {
    ++rows;
    saw_ours |= line.rfind("ours,", 0) == 0;
    saw_rejection |= line.rfind("rejection,", 0) == 0;
    saw_gt |= line.rfind("ground-truth,", 0) == 0;
  }
  CHECK(rows == 3);
  CHECK(saw_ours);
  CHECK(saw_rejection);
  CHECK(saw_gt);

  CHECK(run("eval --torus 0.5,0.2 --samples 100 --methods warp -o " + csv) == 2);
  const std::string empty_mesh = write_file("empty.obj", "# no geometry\n");
  CHECK(run("eval --mesh " + empty_mesh + " --samples 100 -o " + csv) == 3);
}

TEST_CASE("eval ingests a directory of meshes, one set of rows per shape") {
  // Two tetrahedra written as OBJ into a fresh directory.
  const fs::path dir = tmp_dir() / "meshes";
  fs::create_directories(dir);
  for (int m = 0; m < 2; ++m) {
    std::ofstream out(dir / ("tet" + std::to_string(m) + ".obj"));
    const double s = 0.4 + 0.2 * m;
    out << "v " << s << " " << s << " " << s << "\n"
        << "v " << s << " " << -s << " " << -s << "\n"
        << "v " << -s << " " << s << " " << -s << "\n"
        << "v " << -s << " " << -s << " " << s << "\n"
        << "f 1 3 2\nf 1 2 4\nf 1 4 3\nf 2 3 4\n";
  }
  const std::string csv = (tmp_dir() / "dir_rows.csv").string();
  REQUIRE(run("eval --mesh " + dir.string() +
              " --samples 2000 --methods ours,ground-truth --seeds 1 -o " + csv) == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  int tet0 = 0, tet1 = 0;
  while (std::getline(in, line)) {
    tet0 += line.find("tet0.obj") != std::string::npos;
    tet1 += line.find("tet1.obj") != std::string::npos;
  }
  CHECK(tet0 == 2);
  CHECK(tet1 == 2);
}

TEST_CASE("bluenoise and importance resampling round-trip through files") {
  const std::string scene = write_file("sphere.json", kSphereScene);
  const std::string pts = (tmp_dir() / "in.ply").string();
  REQUIRE(run("sample --scene " + scene + " --rays 40000 --seed 9 -o " + pts) == 0);
  const auto input = read_points(pts);
  REQUIRE(input.size() > 2000);

  const std::string blue = (tmp_dir() / "blue.ply").string();
  REQUIRE(run("bluenoise --in " + pts + " --count 500 --area 3.14159265 -o " + blue) == 0);
  CHECK(read_points(blue).size() == 500);

  const std::string resampled = (tmp_dir() / "imp.xyz").string();
  REQUIRE(run("resample-importance --in " + pts + " --count 1000 --weights constant --seed 4 -o " +
              resampled) == 0);
  CHECK(read_points(resampled).size() == 1000);

  REQUIRE(run("resample-importance --in " + pts + " --count 1000 --weights curvature --scene " +
              scene + " --seed 4 -o " + resampled) == 0);
  CHECK(read_points(resampled).size() == 1000);

  CHECK(run("resample-importance --in " + pts + " --count 10 --weights nonsense -o " +
            resampled) == 2);
}
