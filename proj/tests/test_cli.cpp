// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "support.hpp"

#include <fdbfc/cli.hpp>
#include <fdbfc/config.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fdbfc;
namespace fs = std::filesystem;
using support::kind_of;

namespace {

const std::string kConfigDir = FDBFC_CONFIG_DIR;

std::string bundled(int which) { return kConfigDir + "/scenario" + std::to_string(which) + ".json"; }

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("fdbfc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string &leaf = "") const { return (leaf.empty() ? path : path / leaf).string(); }
};

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run_cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::dispatch(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

void write_text(const fs::path &p, const std::string &text)
{
    std::ofstream(p) << text;
}

} // namespace

TEST(Config, BundledScenarioOne)
{
    const auto cfg = cli::load_config(bundled(1));
    EXPECT_EQ(cfg.num_subcarriers, 8);
    EXPECT_EQ(cfg.num_taps, 8);
    EXPECT_EQ(cfg.cp_length, 2);
    EXPECT_EQ(cfg.dims.i.nrf_tx, 6);
    EXPECT_EQ(cfg.dims.i.nrf_rx, 2);
    EXPECT_EQ(cfg.dims.j.nrf_rx, 2);
    EXPECT_EQ(cfg.dims.k.nrf_tx, 2);
    EXPECT_EQ(cfg.dims.i.nt, 32);
    EXPECT_EQ(cfg.dims.i.ns, 2);
    EXPECT_EQ(cfg.dims.k.ns, 2);
    EXPECT_EQ(cfg.snr_ii_db, 80.0);
    EXPECT_DOUBLE_EQ(cfg.snr_ii, 1e8);
    EXPECT_DOUBLE_EQ(cfg.rician_kappa, 10.0);
    EXPECT_EQ(cfg.grid.size(), 9u);
    EXPECT_EQ(cfg.snr_offset_db, 0.0);
}

TEST(Config, BundledScenarioTwo)
{
    const auto cfg = cli::load_config(bundled(2));
    EXPECT_EQ(cfg.num_subcarriers, 128);
    EXPECT_EQ(cfg.num_taps, 128);
    EXPECT_EQ(cfg.cp_length, 32);
    EXPECT_EQ(cfg.dims.i.nrf_tx, 8);
    EXPECT_EQ(cfg.dims.i.nrf_rx, 4);
    EXPECT_EQ(cfg.dims.j.nrf_rx, 4);
    EXPECT_EQ(cfg.dims.k.nrf_tx, 4);
}

TEST(Config, BundledScenarioThree)
{
    const auto cfg = cli::load_config(bundled(3));
    EXPECT_EQ(cfg.num_subcarriers, 8);
    EXPECT_EQ(cfg.snr_offset_db, 30.0);
    for (const auto &p : cfg.grid)
        EXPECT_EQ(p.snr_ij_db, p.snr_ki_db + 30.0);
}

TEST(Config, RejectsCyclicPrefixViolation)
{
    auto root = cli::read_json_file(bundled(1));
    root["U"] = 4;
    try {
        cli::parse_config(root);
        ADD_FAILURE() << "expected rejection";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        EXPECT_NE(std::string(e.what()).find("cyclic-prefix"), std::string::npos) << e.what();
    }
}

TEST(Config, RejectsUnknownAndMalformedFields)
{
    auto root = cli::read_json_file(bundled(1));
    root["colour"] = "blue";
    EXPECT_EQ(kind_of([&] { cli::parse_config(root); }), ErrorKind::Config);
    root = cli::read_json_file(bundled(1));
    root["trials"] = "many";
    EXPECT_EQ(kind_of([&] { cli::parse_config(root); }), ErrorKind::Config);
    root = cli::read_json_file(bundled(1));
    root.erase("rf_chains");
    EXPECT_EQ(kind_of([&] { cli::parse_config(root); }), ErrorKind::Config);
}

TEST(Config, NegativeInfinitySelfInterference)
{
    auto root = cli::read_json_file(bundled(1));
    root["snr_ii_db"] = "-inf";
    EXPECT_EQ(cli::parse_config(root).snr_ii, 0.0);
}

TEST(Config, ParseErrorReportsLine)
{
    try {
        cli::parse_json_text("{\n  \"U\": 8,\n  \"D\": ,\n}", "broken.json");
        ADD_FAILURE() << "expected a parse error";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        EXPECT_NE(std::string(e.what()).find("broken.json:3"), std::string::npos) << e.what();
    }
}

TEST(Config, OverridesUseDottedKeys)
{
    const auto cfg = cli::load_config(bundled(1), {"trials=3", "rf_chains.i_tx=4", "name=custom"});
    EXPECT_EQ(cfg.trials, 3);
    EXPECT_EQ(cfg.dims.i.nrf_tx, 4);
    EXPECT_EQ(cfg.name, "custom");
    EXPECT_EQ(kind_of([] { cli::load_config(bundled(1), {"no_equals_sign"}); }), ErrorKind::Config);
}

TEST(Cli, ValidateBundledConfigs)
{
    const Outcome r = run_cli({"validate", "--config", bundled(1), "--config", bundled(2), "--config", bundled(3)});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("ok"), std::string::npos);
}

TEST(Cli, ValidateReportsConfigErrors)
{
    TempDir dir;
    auto root = cli::read_json_file(bundled(1));
    root["U"] = 2;
    write_text(dir.path / "bad.json", root.dump());
    const Outcome r = run_cli({"validate", "--config", dir.str("bad.json")});
    EXPECT_EQ(r.code, cli::kExitConfig);
    EXPECT_NE(r.err.find("cyclic-prefix"), std::string::npos);
}

TEST(Cli, UnknownSubcommandIsUsageError)
{
    const Outcome r = run_cli({"frobnicate"});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
    EXPECT_NE(run_cli({}).code, 0);
}

TEST(Cli, SweepSinglePoint)
{
    TempDir dir;
    const Outcome r =
        run_cli({"sweep", "--config", bundled(1), "--trials", "1", "--grid", "10", "--out", dir.str("sweep")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string trials = slurp(dir.path / "sweep" / "trials.csv");
    const std::string agg = slurp(dir.path / "sweep" / "aggregate.csv");
    EXPECT_EQ(std::count(trials.begin(), trials.end(), '\n'), 2);
    EXPECT_EQ(std::count(agg.begin(), agg.end(), '\n'), 5);
    EXPECT_NE(trials.find("\nequal_users_low_selectivity,10,10,0,"), std::string::npos) << trials;
}

TEST(Cli, RunIsDeterministic)
{
    TempDir dir;
    for (const char *leaf : {"a", "b"}) {
        const Outcome r = run_cli({"run", "--config", bundled(3), "--trials", "2", "--seed", "99", "--out", dir.str(leaf)});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    const std::string a = slurp(dir.path / "a" / "trials.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir.path / "b" / "trials.csv"));
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
}

TEST(Cli, FlagsOverrideSetOverridesFile)
{
    TempDir dir;
    const Outcome r = run_cli({"run", "--config", bundled(1), "--set", "trials=5", "--set", "grid_db=[20]", "--trials",
                               "2", "--out", dir.str("o")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(dir.path / "o" / "trials.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(csv.find(",20,20,1,"), std::string::npos) << csv;
}

TEST(Cli, DumpCodebookAndChannel)
{
    TempDir dir;
    Outcome r = run_cli({"dump-codebook", "--size", "4", "--out", dir.str("cb")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string cb = slurp(dir.path / "cb" / "codebook_4.csv");
    EXPECT_EQ(std::count(cb.begin(), cb.end(), '\n'), 17);

    r = run_cli({"dump-channel", "--config", bundled(1), "--link", "ii", "--domain", "taps", "--out", dir.str("ch")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string ch = slurp(dir.path / "ch" / "channel_ii_taps.csv");
    EXPECT_EQ(std::count(ch.begin(), ch.end(), '\n'), 1 + 8 * 32 * 32);

    EXPECT_EQ(run_cli({"dump-channel", "--config", bundled(1), "--link", "xx", "--out", dir.str("ch")}).code,
              cli::kExitUsage);
}

TEST(Cli, MissingConfigFileIsUsageError)
{
    EXPECT_EQ(run_cli({"validate", "--config", "/nonexistent/file.json"}).code, cli::kExitUsage);
}
