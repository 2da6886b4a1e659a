#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using tefcorr::cli::run_cli;
namespace cli = tefcorr::cli;

namespace {

std::string model(const std::string& name) {
  return std::string(TEFCORR_MODELS_DIR) + "/" + name;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("tefcorr_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("verify passes a pair field and flags a corrupted one") {
  const auto ok = run({"verify", "--model", model("chain_j02.model"), "--instances", "2000"});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("# model_digest\t") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  const auto bad = run({"verify", "--model", model("corrupted.model"), "--instances", "10000"});
  CHECK(bad.code == cli::kIdentityFailure);
  CHECK(bad.err.find("witness") != std::string::npos);
}

TEST_CASE("exact prints the hand-checked two-site values") {
  const auto probes = temp_file("two_site.probes", "0=1\n0=1;1=1\n");
  const auto r = run({"exact", "--model", model("two_site.model"), "--window", "0:1", "--probes", probes});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("partition_function\t3.5\n") != std::string::npos);
  CHECK(r.out.find("0.42857142857142855") != std::string::npos);
  CHECK(r.out.find("0.14285714285714285") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({"exact", "--model", model("missing.model"), "--window", "0:1"}).code == cli::kInputError);
  CHECK(run({"exact", "--model", model("zero.model")}).code == cli::kInputError);
  CHECK(run({"frobnicate"}).code == cli::kInputError);
  CHECK(run({"exact", "--model", model("zero.model"), "--window", "0:40"}).code ==
        cli::kBudgetExceeded);
  CHECK(run({"solve", "--model", model("strong.model"), "--window", "0:5"}).code == cli::kGateFailure);
  const auto divergent = temp_file("divergent.model",
                                   "dimension = 1\nspins = 0 1\nvacuum = 0\nrange = 1\n"
                                   "coupling = 1 : 1 1 : 3\n");
  CHECK(run({"solve", "--model", divergent, "--window", "0:5", "--override-gate"}).code ==
        cli::kDivergence);
  CHECK(run({"converge", "--model", model("chain_weak.model"), "--window", "-2:2", "--probes",
             model("center.probes")})
            .code == cli::kInputError);
  const auto malformed = temp_file("malformed.model", "dimension = 1\nspins = 0 1\nvacuum = 0\nrange = x\n");
  const auto r = run({"bounds", "--model", malformed});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find(":4:") != std::string::npos);
}

TEST_CASE("bounds reports the gate without failing") {
  const auto r = run({"bounds", "--model", model("strong.model")});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("gate\tfail") != std::string::npos);
  const auto w = run({"bounds", "--model", model("chain_weak.model")});
  CHECK(w.out.find("gate\tpass") != std::string::npos);
}

TEST_CASE("output is byte-identical across thread counts") {
  const std::vector<std::vector<std::string>> commands{
      {"verify", "--model", model("chain_j02.model"), "--instances", "3000", "--seed", "5"},
      {"solve", "--model", model("chain_weak.model"), "--window", "0:9"},
      {"solve", "--model", model("chain_weak.model"), "--window", "-5:5", "--mode", "infinite"},
      {"converge", "--model", model("chain_weak.model"), "--window", "-1:1", "--window", "-3:3",
       "--probes", model("center.probes")},
  };
  for (const auto& base : commands) {
    std::string first;
    for (const char* threads : {"1", "4", "8"}) {
      auto args = base;
      args.push_back("--threads");
      args.push_back(threads);
      const auto r = run(args);
      CHECK(r.code == cli::kOk);
      if (first.empty()) {
        first = r.out;
      } else {
        CHECK(r.out == first);
      }
    }
  }
}
