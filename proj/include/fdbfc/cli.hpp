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

#ifndef FDBFC_CLI_HPP
#define FDBFC_CLI_HPP

// Command-line surface: run, sweep, dump-channel, dump-codebook, validate.
//
// Precedence for scenario values, lowest to highest:
//   config file  <  --set key=value (in order given)  <  --seed / --trials / --grid

#include "config.hpp"

#include "CLI11.hpp"

#include <filesystem>

namespace fdbfc::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitRuntime = 3,
};

struct CliInvocation {
    std::string subcommand;
    std::vector<std::string> config_paths;
    std::string output_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::vector<double> grid_db;

    // dump-channel
    std::string link = "ij";
    std::string domain = "subcarriers";
    int trial = 0;
    std::size_t snr_index = 0;
    // dump-codebook
    int codebook_size = 0;
};

inline ScenarioConfig load_invocation_config(const CliInvocation &inv, const std::string &path)
{
    json root = read_json_file(path);
    apply_overrides(root, inv.overrides);
    if (inv.seed)
        root["master_seed"] = *inv.seed;
    if (inv.trials)
        root["trials"] = *inv.trials;
    if (!inv.grid_db.empty())
        root["grid_db"] = inv.grid_db;
    return parse_config(root);
}

inline std::filesystem::path prepare_output_dir(const std::string &out)
{
    require(!out.empty(), ErrorKind::InvalidArgument, "--out is required");
    std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path &path, const std::string &content)
{
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
    os << content;
    require(static_cast<bool>(os), ErrorKind::InvalidArgument, "failed writing '" + path.string() + "'");
}

inline int execute(const CliInvocation &inv, std::ostream &out)
{
    if (inv.subcommand == "validate") {
        for (const auto &path : inv.config_paths) {
            const ScenarioConfig cfg = load_invocation_config(inv, path);
            out << path << ": ok (" << cfg.name << ", U=" << cfg.num_subcarriers << ", D=" << cfg.num_taps << ")\n";
            if (!bfc::has_zf_dimensionality(cfg.dims))
                out << path << ": warning: Nrf_tx(i) < Ns(i) + Ns(k)\n";
        }
        return kExitOk;
    }

    if (inv.subcommand == "dump-codebook") {
        int size = inv.codebook_size;
        if (size <= 0) {
            require(!inv.config_paths.empty(), ErrorKind::InvalidArgument, "dump-codebook needs --size or --config");
            size = static_cast<int>(load_invocation_config(inv, inv.config_paths.front()).dims.i.nt);
        }
        const auto dir = prepare_output_dir(inv.output_path);
        std::ostringstream ss;
        sim::write_codebook_csv(ss, hybrid::dft_codebook(size));
        write_file(dir / ("codebook_" + std::to_string(size) + ".csv"), ss.str());
        return kExitOk;
    }

    require(inv.config_paths.size() == 1, ErrorKind::InvalidArgument, "exactly one --config is required");
    ScenarioConfig cfg = load_invocation_config(inv, inv.config_paths.front());
    const auto dir = prepare_output_dir(inv.output_path);

    if (inv.subcommand == "dump-channel") {
        require(inv.trial >= 0, ErrorKind::InvalidArgument, "--trial must be >= 0");
        require(inv.snr_index < cfg.grid.size(), ErrorKind::InvalidArgument, "--snr-index out of range");
        const sim::ChannelDraw draw = sim::draw_channels(cfg, sim::trial_seed(cfg.master_seed, inv.snr_index, inv.trial));
        const bool taps = inv.domain == "taps";
        require(taps || inv.domain == "subcarriers", ErrorKind::InvalidArgument,
                "--domain must be taps or subcarriers");
        const MatrixList *list = nullptr;
        if (inv.link == "ki")
            list = taps ? &draw.taps_ki.taps : &draw.h_ki.subchannels;
        else if (inv.link == "ij")
            list = taps ? &draw.taps_ij.taps : &draw.h_ij.subchannels;
        else if (inv.link == "ii")
            list = taps ? &draw.taps_ii.taps : &draw.h_ii.subchannels;
        require(list != nullptr, ErrorKind::InvalidArgument, "--link must be ki, ij or ii");
        std::ostringstream ss;
        sim::write_matrix_list_csv(ss, *list, taps ? "tap_index" : "subcarrier_index");
        write_file(dir / ("channel_" + inv.link + "_" + inv.domain + ".csv"), ss.str());
        return kExitOk;
    }

    if (inv.subcommand == "run") {
        // single SNR point: the first grid entry
        cfg.grid_db.resize(1);
        cfg.resolve();
    }
    const sim::SweepTable table = sim::run_sweep(cfg);
    std::ostringstream trials_csv;
    sim::write_trials_csv(trials_csv, table);
    write_file(dir / "trials.csv", trials_csv.str());
    if (inv.subcommand == "sweep") {
        std::ostringstream agg;
        sim::write_aggregate_csv(agg, table);
        write_file(dir / "aggregate.csv", agg.str());
    }
    out << "wrote " << table.rows.size() << " trial rows to " << dir.string() << "\n";
    return kExitOk;
}

/// Parses arguments (argv[0] excluded) and runs the subcommand.
inline int dispatch(std::vector<std::string> args, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    CLI::App app{"Frequency-selective full-duplex beamforming-cancellation simulator", "fdbfc"};
    app.require_subcommand(1);

    CliInvocation inv;
    auto add_common = [&](CLI::App *sub, bool scenario_flags) {
        sub->add_option("--config", inv.config_paths, "Scenario JSON file")->check(CLI::ExistingFile);
        sub->add_option("--set", inv.overrides, "Override a config field: key=value (dotted keys allowed)");
        if (scenario_flags) {
            sub->add_option("--out", inv.output_path, "Output directory")->required();
            sub->add_option("--seed", inv.seed, "Master seed");
            sub->add_option("--trials", inv.trials, "Trials per SNR point")->check(CLI::PositiveNumber);
            sub->add_option("--grid", inv.grid_db, "Comma-separated snr_ij values in dB")->delimiter(',');
        }
    };

    auto *run = app.add_subcommand("run", "Run trials at the first grid point; writes trials.csv");
    add_common(run, true);
    auto *sweep = app.add_subcommand("sweep", "Run the full SNR sweep; writes trials.csv and aggregate.csv");
    add_common(sweep, true);
    auto *dump_channel = app.add_subcommand("dump-channel", "Write one channel realization as CSV");
    add_common(dump_channel, true);
    dump_channel->add_option("--link", inv.link, "ki, ij or ii")->check(CLI::IsMember({"ki", "ij", "ii"}));
    dump_channel->add_option("--domain", inv.domain, "taps or subcarriers")
        ->check(CLI::IsMember({"taps", "subcarriers"}));
    dump_channel->add_option("--trial", inv.trial, "Trial index");
    dump_channel->add_option("--snr-index", inv.snr_index, "Grid index used in the seed derivation");
    auto *dump_codebook = app.add_subcommand("dump-codebook", "Write a DFT codebook as CSV");
    add_common(dump_codebook, false);
    dump_codebook->add_option("--out", inv.output_path, "Output directory")->required();
    dump_codebook->add_option("--size", inv.codebook_size, "Codebook size (default: Nt(i) of --config)");
    auto *validate = app.add_subcommand("validate", "Check configuration files");
    add_common(validate, false);

    for (auto *sub : {run, sweep, dump_channel, validate})
        sub->get_option("--config")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        err << app.help();
        return kExitUsage;
    }
    inv.subcommand = app.get_subcommands().front()->get_name();

    try {
        return execute(inv, out);
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Config ? kExitConfig : kExitRuntime;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace fdbfc::cli

#endif // FDBFC_CLI_HPP
