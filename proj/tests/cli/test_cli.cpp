// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("wina_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Runs the binary inside the scratch directory; env is prepended verbatim.
    Outcome run(const std::string& args, const std::string& env = "") const {
        const fs::path err_file = dir_ / "stderr.txt";
        const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + WINA_CLI_PATH + "' " + args +
                                " 2> '" + err_file.string() + "'";
        Outcome r;
        FILE* pipe = popen(cmd.c_str(), "r");
        if (pipe == nullptr) {
            return r;
        }
        std::array<char, 4096> buf{};
        std::size_t n = 0;
        while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
            r.out.append(buf.data(), n);
        }
        const int status = pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = read(err_file);
        return r;
    }

    std::string read(const fs::path& p) const {
        std::ifstream in(p.is_absolute() ? p : dir_ / p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    json read_json(const std::string& name) const { return json::parse(read(name)); }

    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    bool exists(const std::string& name) const { return fs::exists(dir_ / name); }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("--version").code, 0);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("cost --d notanumber").code, 2);
}

TEST_F(Cli, SynthBenchRejectsZeroSeeds) {
    const Outcome r = run("synth-bench --seeds 0");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--seeds"), std::string::npos);
}

TEST_F(Cli, SynthBenchWinaBelowTealAndDeterministic) {
    const std::string args = "synth-bench --dims 128,128 --sparsity 0.25,0.5 --seeds 4 --methods teal,wina "
                             "--orthogonalize --no-timing --out ";
    const Outcome a = run(args + "a.json");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("teal"), std::string::npos);
    EXPECT_NE(a.out.find("base_seed=0"), std::string::npos);
    EXPECT_TRUE(exists("a.csv"));
    ASSERT_EQ(run(args + "b.json").code, 0);
    EXPECT_EQ(read("a.json"), read("b.json"));
    EXPECT_EQ(read("a.csv"), read("b.csv"));

    const json rep = read_json("a.json");
    EXPECT_EQ(rep["format_version"], 1);
    std::map<std::pair<std::string, double>, double> mean;
    for (const auto& row : rep["results"]) {
        mean[{row["method"].get<std::string>(), row["sparsity"].get<double>()}] = row["mean"].get<double>();
    }
    for (double s : {0.25, 0.5}) {
        EXPECT_LT(mean.at({"wina", s}), mean.at({"teal", s})) << s;
    }
}

TEST_F(Cli, SynthBenchDefaultOutputName) {
    ASSERT_EQ(run("synth-bench --dims 16,16 --seeds 1 --methods teal --seed 7").code, 0);
    EXPECT_TRUE(exists("synth_bench_seed7.json"));
}

TEST_F(Cli, SynthBenchConfigFile) {
    write("cfg.json", R"({"dims": [32, 32], "sparsity_levels": [0.5], "seeds": 2, "methods": ["wina"]})");
    ASSERT_EQ(run("synth-bench --config cfg.json --no-timing --out r.json").code, 0);
    EXPECT_EQ(read_json("r.json")["results"].size(), 1u);
    write("bad.json", R"({"dims": "wide"})");
    const Outcome bad = run("synth-bench --config bad.json");
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("dims"), std::string::npos);
    write("typo.json", R"({"sparsity": [0.5]})");
    const Outcome typo = run("synth-bench --config typo.json");
    EXPECT_EQ(typo.code, 2);
    EXPECT_NE(typo.err.find("/sparsity"), std::string::npos);
}

TEST_F(Cli, SeedFromEnvironment) {
    const Outcome r = run("make-net --kind chain --dims 4,4", "WINA_SEED=42");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("seed=42"), std::string::npos);
    EXPECT_TRUE(exists("chain_seed42.json"));
    ASSERT_EQ(run("make-net --kind chain --dims 4,4 --seed 42 --out again.json").code, 0);
    EXPECT_EQ(read("chain_seed42.json"), read("again.json"));
}

TEST_F(Cli, CostTable) {
    const Outcome r = run("cost --d 4096 --m 11008 --a 0.5 --r 64");
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* s : {"dense", "teal", "wina", "rsparse", "0.51907", "0.52469", "202375168"}) {
        EXPECT_NE(r.out.find(s), std::string::npos) << s;
    }
    const json j = read_json("cost_d4096_m11008.json");
    EXPECT_EQ(j["format_version"], 1);
    EXPECT_EQ(run("cost --a 1.5").code, 2);
}

TEST_F(Cli, VerifyQuick) {
    const Outcome r = run("verify --quick");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST_F(Cli, AllocateWithinBudget) {
    const Outcome r = run("allocate --dims 64,64,64,64 --target 0.65 --step 0.05 --out plan.json");
    ASSERT_EQ(r.code, 0) << r.err;
    const json plan = read_json("plan.json");
    const auto s = plan["per_layer_sparsity"].get<std::vector<double>>();
    const auto p = plan["parameters"].get<std::vector<double>>();
    ASSERT_EQ(s.size(), 3u);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        num += s[i] * p[i];
        den += p[i];
    }
    EXPECT_LE(std::abs(num / den - 0.65), 0.05 + 1e-12);
    EXPECT_LE(num / den, 0.65 + 1e-9);
    EXPECT_EQ(run("allocate --target 1.5").code, 2);
}

TEST_F(Cli, AllocateBlockNet) {
    ASSERT_EQ(run("make-net --kind block --d 16 --m 32 --heads 2 --out blk.json").code, 0);
    const Outcome r = run("allocate --net blk.json --target 0.5 --out plan.json");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_json("plan.json")["per_layer_sparsity"].size(), 7u);
}

TEST_F(Cli, OrthoChain) {
    ASSERT_EQ(run("make-net --kind chain --dims 12,10,8,6 --out c.json").code, 0);
    const Outcome r = run("ortho --in c.json --out o.json --report rep.json");
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    const json rep = read_json("rep.json");
    EXPECT_TRUE(rep["passed"].get<bool>());
    EXPECT_LE(rep["invariance"]["max_relative_deviation"].get<double>(), 1e-6);
    EXPECT_GE(rep["invariance"]["n_inputs"].get<int>(), 20);
    int targeted = 0;
    for (const auto& m : rep["matrices"]) {
        if (m["targeted"].get<bool>()) {
            ++targeted;
            EXPECT_LE(m["gram_offdiag_after"].get<double>(), 1e-8) << m["name"];
        }
    }
    EXPECT_EQ(targeted, 2);

    // A second pass leaves the function alone.
    const Outcome again = run("ortho --in o.json --out oo.json --report rep2.json");
    ASSERT_EQ(again.code, 0);
    EXPECT_LE(read_json("rep2.json")["invariance"]["max_relative_deviation"].get<double>(), 1e-6);
}

TEST_F(Cli, OrthoBlock) {
    ASSERT_EQ(run("make-net --kind block --d 32 --m 64 --heads 4 --out b.json").code, 0);
    const Outcome r = run("ortho --in b.json");
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    ASSERT_TRUE(exists("b.ortho.json"));
    const json rep = read_json("b.ortho.report.json");
    EXPECT_LE(rep["invariance"]["max_relative_deviation"].get<double>(), 1e-5);
    for (const auto& m : rep["matrices"]) {
        if (m["targeted"].get<bool>()) {
            EXPECT_LE(m["gram_offdiag_after"].get<double>(), 1e-8) << m["name"];
        }
    }
}

TEST_F(Cli, MalformedFileReportsPointer) {
    write("bad.json", R"({"format_version": 1, "kind": "chain",
        "layers": [{"rows": 2, "cols": 2, "data": [1, 2, 3, "four"]}]})");
    const Outcome r = run("ortho --in bad.json");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/layers/0/data/3"), std::string::npos) << r.err;

    write("notjson.json", "{");
    EXPECT_EQ(run("ortho --in notjson.json").code, 2);
    EXPECT_EQ(run("ortho --in missing.json").code, 2);
}

TEST_F(Cli, GemvBench) {
    const Outcome r = run("gemv-bench --rows 64 --cols 128 --sparsity 0,0.5 --reps 30 --out g.csv");
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = read("g.csv");
    EXPECT_EQ(csv.rfind("variant,sparsity,batch,median_ns", 0), 0u);
    EXPECT_NE(csv.find("wina,0.5"), std::string::npos);
    EXPECT_EQ(run("gemv-bench --reps 5").code, 2);
}
