#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "prv/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "prv_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "cd '" + work_dir().string() + "' && '" PRV_CLI_PATH "' " + args + " >out.txt 2>err.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const std::string& name, const std::string& text) { std::ofstream(work_dir() / name) << text; }

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("tammes --bogus") == 2);
  CHECK(run("tammes --n 0") == 2);
  CHECK(run("plan --solver fastest t.json") == 2);
  write("bad_cfg.json", R"({"objects": 0})");
  CHECK(run("simulate --config bad_cfg.json --out-dir sim") == 2);
  write("unknown.json", R"({"nn": 3})");
  CHECK(run("tammes --config unknown.json") == 2);
  write("costs.csv", "3\n0,1\n1,0\n");
  CHECK(run("plan --costs costs.csv") == 2);
  CHECK(run("train --objects 5") == 2);
}

TEST_CASE("subcommands succeed") {
  CHECK(run("--help") == 0);
  CHECK(run("tammes --n 6 --restarts 2 --iters 200 --out t.json") == 0);
  CHECK(fs::exists(work_dir() / "t.json"));
  CHECK(run("plan t.json --out p.json") == 0);
  const prv::Json p = prv::load_json_file(work_dir() / "p.json");
  CHECK(p["order"].size() == 7);
  CHECK(p["planning_time_s"].is_null());
  write("costs.csv", "3\n0,1,2\n1,0,1.5\n2,1.5,0\n");
  CHECK(run("plan --costs costs.csv --start 2 --out pc.json") == 0);
  CHECK(prv::load_json_file(work_dir() / "pc.json")["order"][0] == 2);
  CHECK(run("synth --id 1 --out-dir obj") == 0);
  CHECK(run("label obj/samples.csv --out l.json") == 0);
  CHECK(run("train --objects 30 --out m.json") == 0);
  CHECK(run("predict --model m.json obj/top.png obj/left.png obj/front.png --out pr.json") == 0);
  const int v = prv::load_json_file(work_dir() / "pr.json")["v_hat"];
  CHECK(v >= 13);
  CHECK(v <= 58);
  CHECK(run("predict --statistic median --out ps.json") == 0);
  CHECK(prv::load_json_file(work_dir() / "ps.json")["v_hat"] == 34);
  write("sim.json", R"({"objects": 1, "trials_per_cell": 1, "train_objects": 20, "tammes": {"restarts": 1, "iters": 200}})");
  CHECK(run("simulate --config sim.json --out-dir sim") == 0);
  CHECK(prv::load_json_file(work_dir() / "sim/manifest.json")["status"] == "complete");
}

TEST_CASE("fit failures exit 3") {
  write("wild.csv", "v,psnr\n3,1e308\n5,-1e308\n7,1e308\n9,-1e308\n11,1e308\n");
  CHECK(run("label wild.csv") == 3);
}

TEST_CASE("undecodable images exit 4") {
  CHECK(run("train --objects 20 --out m4.json") == 0);
  write("bad.png", "not a png");
  CHECK(run("predict --model m4.json bad.png") == 4);
}

TEST_CASE("simulation failures exit 5") {
  write("sim5.json", R"({"objects": 1, "trials_per_cell": 1, "train_objects": 20, "tammes_table": "missing.json"})");
  CHECK(run("simulate --config sim5.json --out-dir sim5") == 5);
  CHECK(prv::load_json_file(work_dir() / "sim5/manifest.json")["status"] == "partial");
}
