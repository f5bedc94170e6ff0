#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = DRIFTSTAB_CLI_PATH;
const std::string kData = DRIFTSTAB_DATA_DIR;

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path tmp_file(const std::string& name) {
  return fs::temp_directory_path() / ("driftstab_test_" + name);
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream os(path);
  os << body;
}

}  // namespace

TEST_CASE("check on the shipped scenario passes strictly") {
  CHECK(run(kCli + " check --config " + kData +
            "/paper_scenario.ini --strict > /dev/null") == 0);
}

TEST_CASE("check with too few bins fails under --strict, reports otherwise") {
  const fs::path cfg = tmp_file("k2.ini");
  write_file(cfg,
             "[plant]\na=2.5\nb=1\nnoise_std=1\n[quantizer]\nK=2\n"
             "[channel]\np=0.9\n");
  CHECK(run(kCli + " check --config " + cfg.string() + " > /dev/null") == 0);
  CHECK(run(kCli + " check --config " + cfg.string() +
            " --strict > /dev/null") == 1);
}

TEST_CASE("malformed config exits 2 naming the field") {
  const fs::path cfg = tmp_file("bad.ini");
  write_file(cfg, "[plant]\na=2.5\nwarp=9\n");
  const fs::path err = tmp_file("bad.err");
  CHECK(run(kCli + " check --config " + cfg.string() + " 2> " +
            err.string()) == 2);
  CHECK(slurp(err).find("plant.warp") != std::string::npos);
}

TEST_CASE("synth picks the minimal even K and reports the lattice") {
  const fs::path out = tmp_file("synth.out");
  CHECK(run(kCli + " synth --a 2.5 --p 0.9 -m 2 > " + out.string()) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("K+1 = 5") != std::string::npos);
  CHECK(text.find("alpha") != std::string::npos);
}

TEST_CASE("synth reports infeasibility with exit 1") {
  CHECK(run(kCli + " synth --a 2.5 --p 0.8 --K 4 2> /dev/null") == 1);
}

TEST_CASE("simulate emits byte-identical CSV on reruns") {
  const fs::path f1 = tmp_file("traj1.csv");
  const fs::path f2 = tmp_file("traj2.csv");
  const std::string base = kCli + " simulate --config " + kData +
                           "/paper_scenario.ini --T 500 --out ";
  CHECK(run(base + f1.string() + " > /dev/null") == 0);
  CHECK(run(base + f2.string() + " > /dev/null") == 0);
  const std::string b1 = slurp(f1);
  CHECK(b1 == slurp(f2));
  CHECK(b1.find("# config_hash=") == 0);
  CHECK(b1.find("t,x,delta,h,erasure_ok,symbol,x_hat,u,is_stop") !=
        std::string::npos);
}

TEST_CASE("DRIFTSTAB_SEED changes the trajectory") {
  const fs::path f1 = tmp_file("seed1.csv");
  const fs::path f2 = tmp_file("seed2.csv");
  const std::string base = kCli + " simulate --config " + kData +
                           "/paper_scenario.ini --T 200 --out ";
  CHECK(run(base + f1.string() + " > /dev/null") == 0);
  CHECK(run("DRIFTSTAB_SEED=999 " + base + f2.string() + " > /dev/null") == 0);
  CHECK(slurp(f1) != slurp(f2));
}

TEST_CASE("stoptimes writes the sandwich table") {
  const fs::path out = tmp_file("tail.csv");
  CHECK(run(kCli + " stoptimes --config " + kData +
            "/paper_scenario.ini --samples 5000 --kmax 5 --jobs 1 --strict "
            "--out " + out.string() + " > /dev/null") == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("k,lower,empirical,ci_lo,ci_hi,upper") != std::string::npos);
}

TEST_CASE("driftlab verifies the shipped birth-death spec strictly") {
  const fs::path out = tmp_file("lab.csv");
  CHECK(run(kCli + " driftlab --chain " + kData +
            "/birth_death_chain.txt --spec " + kData +
            "/birth_death_drift.txt --horizon 5 --strict --out " +
            out.string() + " > /dev/null") == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("state,in_C,V,delta,EV_next") != std::string::npos);
}

TEST_CASE("driftlab rejects a malformed chain file with exit 2") {
  const fs::path chain = tmp_file("bad_chain.txt");
  write_file(chain, "0.5 0.6\n0.5 0.5\n");
  CHECK(run(kCli + " driftlab --chain " + chain.string() + " --spec " + kData +
            "/birth_death_drift.txt 2> /dev/null") == 2);
}
