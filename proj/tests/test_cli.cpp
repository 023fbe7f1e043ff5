// Copyright 2026 The qsrlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsrlc/cli.hpp"

namespace qsrlc {
namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qsrlc");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_file(const std::string &name, const std::string &text) {
  auto path = (std::filesystem::path(testing::TempDir()) / name).string();
  std::ofstream(path) << text;
  return path;
}

const std::string kPlus = R"({"registers":[{"label":"C","dim":2}],"amplitudes":[0.7071067811865476,0.7071067811865476]})";
const std::string kGhz =
    R"({"registers":[{"label":"R","dim":2},{"label":"A","dim":1},{"label":"B","dim":2},{"label":"C","dim":2}],)"
    R"("amplitudes":[0.7071067811865476,0,0,0,0,0,0,0.7071067811865476]})";
const std::string kMixed = R"({"registers":[{"label":"X","dim":2}],"matrix":[[0.5,0],[0,0.5]]})";
const std::string kZero = R"({"registers":[{"label":"X","dim":2}],"matrix":[[1,0],[0,0]]})";

// |Phi+>_RB (x) (sqrt(0.8)|00> + sqrt(0.2)|11>)_AC.
std::string product_instance() {
  std::ostringstream os;
  os << R"({"registers":[{"label":"R","dim":2},{"label":"A","dim":2},{"label":"B","dim":2},{"label":"C","dim":2}],)"
     << R"("amplitudes":[)";
  for (int i = 0; i < 16; ++i) {
    int r = i >> 3 & 1, a = i >> 2 & 1, b = i >> 1 & 1, c = i & 1;
    double v = (r == b && a == c) ? std::sqrt(a ? 0.1 : 0.4) : 0.0;
    os << (i ? "," : "") << format_number(v);
  }
  os << "]}";
  return os.str();
}

TEST(Cli, HelpAndUnknownCommand) {
  auto h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("quantity"), std::string::npos);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"quantity", "entropy"}).code, 2);  // missing state file
}

TEST(Cli, CoherenceOfPlus) {
  auto plus = write_file("plus.json", kPlus);
  auto r = run({"quantity", "rc", plus, "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "quantity,value");
  double v = std::stod(r.out.substr(r.out.rfind(',') + 1));
  EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Cli, ConditionalMutualInformationOfGhz) {
  auto ghz = write_file("ghz.json", kGhz);
  auto r = run({"quantity", "cmi", "--parts", "R,C,B", ghz, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 1.0, 1e-12);
}

TEST(Cli, InfiniteQuantityNeedsFlag) {
  auto mixed = write_file("mixed.json", kMixed), zero = write_file("zero.json", kZero);
  EXPECT_EQ(run({"quantity", "relent", mixed, zero}).code, 2);
  auto r = run({"quantity", "relent", mixed, zero, "--allow-inf", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("inf"), std::string::npos);
}

TEST(Cli, MalformedInputs) {
  auto bad = write_file("bad.json", "{\"registers\": [");
  auto r = run({"quantity", "entropy", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("malformed JSON"), std::string::npos);
  auto unnormalized =
      write_file("unnorm.json", R"({"registers":[{"label":"X","dim":2}],"amplitudes":[1,1]})");
  EXPECT_EQ(run({"quantity", "entropy", unnormalized}).code, 2);
  EXPECT_EQ(run({"quantity", "entropy", "/nonexistent/state.json"}).code, 2);
  EXPECT_EQ(run({"quantity", "dh", write_file("m.json", kMixed), write_file("m2.json", kMixed), "--eps", "1.5"}).code,
            2);
}

TEST(Cli, RatesInBothUnits) {
  auto ghz = write_file("ghz_rates.json", kGhz);
  auto q = run({"rates", ghz, "--format", "json"});
  ASSERT_EQ(q.code, 0) << q.err;
  auto c = run({"rates", ghz, "--format", "json", "--units", "cobits"});
  ASSERT_EQ(c.code, 0) << c.err;
  auto jq = nlohmann::json::parse(q.out), jc = nlohmann::json::parse(c.out);
  EXPECT_NEAR(jq["rates"]["q_min_std"]["value"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(jc["rates"]["q_min_std"]["value"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(jc["rates"]["classical_rate_incoherent"]["unit"], "bits");
}

TEST(Cli, RandomRatesAreDeterministic) {
  auto a = run({"rates", "--random", "--seed", "7", "--format", "csv"});
  auto b = run({"rates", "--random", "--seed", "7", "--format", "csv"});
  auto c = run({"rates", "--random", "--seed", "8", "--format", "csv"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), rate_csv_header());
}

TEST(Cli, SimulateCoherenceCreation) {
  auto r = run({"simulate", "coherence-creation", "--q", "2", "--e", "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["counters"]["coherent_qubits_out"], 3);
  EXPECT_EQ(run({"simulate", "coherence-creation", "--q", "9", "--e", "9"}).code, 3);
}

TEST(Cli, SimulateConvexSplitIsSeeded) {
  auto a = run({"simulate", "convex-split", "--delta", "0.25", "--seed", "3", "--format", "csv"});
  auto b = run({"simulate", "convex-split", "--delta", "0.25", "--seed", "3", "--format", "csv"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "k,delta,n,fidelity_sq,bound,holds");
  EXPECT_EQ(run({"simulate", "convex-split", "--delta", "1.5"}).code, 2);
}

TEST(Cli, SimulateQsrAndBudget) {
  auto inst = write_file("inst.json", product_instance());
  auto r = run({"simulate", "qsr", inst, "--eps1", "0.5", "--eps2", "0.3", "--gamma", "0.3", "--sigma", "0.8,0.2",
                "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "k,d_f,n,b,cobits,uhlmann_overlap,purified_distance,distance_bound");
  auto tiny = run({"simulate", "qsr", inst, "--budget", "16"});
  EXPECT_EQ(tiny.code, 3);
  EXPECT_NE(tiny.err.find("budget"), std::string::npos);
}

TEST(Cli, Sweeps) {
  auto ghz = write_file("ghz_sweep.json", kGhz);
  auto copies = run({"sweep", "copies", ghz, "--n", "1:2", "--format", "csv"});
  ASSERT_EQ(copies.code, 0) << copies.err;
  EXPECT_EQ(std::count(copies.out.begin(), copies.out.end(), '\n'), 3);
  EXPECT_EQ(run({"sweep", "copies", ghz, "--n", "3:2"}).code, 2);
  auto delta = run({"sweep", "delta", "--values", "0.5,0.25", "--format", "csv"});
  ASSERT_EQ(delta.code, 0) << delta.err;
  EXPECT_EQ(delta.out.substr(0, delta.out.find('\n')), "delta,k,n,fidelity_sq,bound");
  auto inst = write_file("inst_sweep.json", product_instance());
  auto b = run({"sweep", "b", inst, "--range", "1:2", "--sigma", "0.8,0.2", "--format", "csv"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(b.out.substr(0, b.out.find('\n')), "b,n,cobits,purified_distance");
}

TEST(Cli, OutputFile) {
  auto path = (std::filesystem::path(testing::TempDir()) / "report.csv").string();
  auto r = run({"rates", "--random", "--format", "csv", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, rate_csv_header());
}

TEST(Cli, Selftest) {
  auto r = run({"selftest"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace qsrlc
