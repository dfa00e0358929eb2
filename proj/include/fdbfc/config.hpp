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

#ifndef FDBFC_CONFIG_HPP
#define FDBFC_CONFIG_HPP

// JSON scenario configuration. Schema (all keys optional unless noted):
//
//   name             string
//   U, D             integers, U >= D >= 1 (required)
//   n_cp             integer, default D/4
//   antennas         {i_tx, i_rx, j_rx, k_tx}      default 32 each
//   rf_chains        {i_tx, i_rx, j_rx, k_tx}      (required)
//   streams          {i, k}                         default 2 each
//   snr_ii_db        number or "-inf", default 80
//   rician_kappa_db  number, default 10
//   snr_offset_db    number, default 0 (snr_ij = snr_ki + offset)
//   grid_db          array of numbers, default -10..30 step 5
//   trials           integer, default 100
//   master_seed      unsigned integer, default 1
//   desired_clusters, desired_rays, si_clusters, si_rays   [min, max]
//   angle_spread_std, sampling_rate, rolloff, array_separation   numbers
//   delay_wrap       "cyclic" | "linear"
//   apply_cp_overhead  bool
//
// Unknown keys are rejected.

#include "sim.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace fdbfc::cli {

using json = nlohmann::json;
using sim::ScenarioConfig;

inline std::vector<double> default_grid_db()
{
    std::vector<double> g;
    for (int db = -10; db <= 30; db += 5)
        g.push_back(db);
    return g;
}

namespace detail {

[[noreturn]] inline void field_error(const std::string &field, const std::string &what)
{
    throw Error(ErrorKind::Config, "field '" + field + "': " + what);
}

template <class T>
T get_field(const json &obj, const std::string &key, const std::string &path, T fallback)
{
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    try {
        if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!it->is_number_integer())
                field_error(path, "expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number())
                field_error(path, "expected a number");
        }
        return it->get<T>();
    } catch (const json::exception &e) {
        field_error(path, e.what());
    }
}

inline const json &require_field(const json &obj, const std::string &key)
{
    auto it = obj.find(key);
    if (it == obj.end())
        field_error(key, "missing required field");
    return *it;
}

inline void check_keys(const json &obj, const std::string &where, std::initializer_list<const char *> allowed)
{
    if (!obj.is_object())
        field_error(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key()))
            field_error(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
}

inline sim::ClusterCountRange read_range(const json &root, const char *clusters_key, const char *rays_key,
                                         sim::ClusterCountRange fallback)
{
    auto read_pair = [&](const char *key, int &lo, int &hi) {
        auto it = root.find(key);
        if (it == root.end())
            return;
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer())
            field_error(key, "expected [min, max] integers");
        lo = (*it)[0].get<int>();
        hi = (*it)[1].get<int>();
    };
    read_pair(clusters_key, fallback.clusters_min, fallback.clusters_max);
    read_pair(rays_key, fallback.rays_min, fallback.rays_max);
    return fallback;
}

inline double read_db(const json &root, const char *key, double fallback)
{
    auto it = root.find(key);
    if (it == root.end())
        return fallback;
    if (it->is_string()) {
        if (it->get<std::string>() == "-inf")
            return -std::numeric_limits<double>::infinity();
        field_error(key, "expected a number or \"-inf\"");
    }
    if (!it->is_number())
        field_error(key, "expected a number or \"-inf\"");
    return it->get<double>();
}

} // namespace detail

/// Builds a resolved ScenarioConfig from a parsed JSON document.
inline ScenarioConfig parse_config(const json &root)
{
    using namespace detail;
    check_keys(root, "",
               {"name", "U", "D", "n_cp", "antennas", "rf_chains", "streams", "snr_ii_db", "rician_kappa_db",
                "snr_offset_db", "grid_db", "trials", "master_seed", "desired_clusters", "desired_rays",
                "si_clusters", "si_rays", "angle_spread_std", "sampling_rate", "rolloff", "array_separation",
                "delay_wrap", "apply_cp_overhead"});

    ScenarioConfig cfg;
    cfg.name = get_field<std::string>(root, "name", "name", cfg.name);
    require_field(root, "U");
    require_field(root, "D");
    cfg.num_subcarriers = get_field<int>(root, "U", "U", 0);
    cfg.num_taps = get_field<int>(root, "D", "D", 0);
    cfg.cp_length = get_field<int>(root, "n_cp", "n_cp", cfg.num_taps / 4);

    auto &d = cfg.dims;
    if (auto it = root.find("antennas"); it != root.end()) {
        check_keys(*it, "antennas", {"i_tx", "i_rx", "j_rx", "k_tx"});
        d.i.nt = get_field<int>(*it, "i_tx", "antennas.i_tx", 32);
        d.i.nr = get_field<int>(*it, "i_rx", "antennas.i_rx", 32);
        d.j.nr = get_field<int>(*it, "j_rx", "antennas.j_rx", 32);
        d.k.nt = get_field<int>(*it, "k_tx", "antennas.k_tx", 32);
    }
    d.j.nt = d.j.nr;
    d.k.nr = d.k.nt;

    const json &rf = require_field(root, "rf_chains");
    check_keys(rf, "rf_chains", {"i_tx", "i_rx", "j_rx", "k_tx"});
    for (const char *k : {"i_tx", "i_rx", "j_rx", "k_tx"})
        if (!rf.contains(k))
            field_error(std::string("rf_chains.") + k, "missing required field");
    d.i.nrf_tx = get_field<int>(rf, "i_tx", "rf_chains.i_tx", 0);
    d.i.nrf_rx = get_field<int>(rf, "i_rx", "rf_chains.i_rx", 0);
    d.j.nrf_rx = get_field<int>(rf, "j_rx", "rf_chains.j_rx", 0);
    d.k.nrf_tx = get_field<int>(rf, "k_tx", "rf_chains.k_tx", 0);
    // j only receives and k only transmits; mirror their unused chain counts.
    d.j.nrf_tx = d.j.nrf_rx;
    d.k.nrf_rx = d.k.nrf_tx;

    if (auto it = root.find("streams"); it != root.end()) {
        check_keys(*it, "streams", {"i", "k"});
        d.i.ns = get_field<int>(*it, "i", "streams.i", 2);
        d.k.ns = get_field<int>(*it, "k", "streams.k", 2);
    }
    d.j.ns = d.i.ns;

    cfg.snr_ii_db = read_db(root, "snr_ii_db", 80.0);
    cfg.rician_kappa_db = read_db(root, "rician_kappa_db", 10.0);
    cfg.snr_offset_db = get_field<double>(root, "snr_offset_db", "snr_offset_db", 0.0);

    cfg.grid_db = default_grid_db();
    if (auto it = root.find("grid_db"); it != root.end()) {
        if (!it->is_array())
            field_error("grid_db", "expected an array of numbers");
        cfg.grid_db.clear();
        for (const auto &v : *it) {
            if (!v.is_number())
                field_error("grid_db", "expected an array of numbers");
            cfg.grid_db.push_back(v.get<double>());
        }
    }
    cfg.trials = get_field<int>(root, "trials", "trials", 100);
    if (auto it = root.find("master_seed"); it != root.end()) {
        if (!it->is_number_unsigned())
            field_error("master_seed", "expected a non-negative integer");
        cfg.master_seed = it->get<std::uint64_t>();
    }

    cfg.desired_counts = read_range(root, "desired_clusters", "desired_rays", cfg.desired_counts);
    cfg.si_counts = read_range(root, "si_clusters", "si_rays", cfg.si_counts);
    cfg.angle_spread_std = get_field<double>(root, "angle_spread_std", "angle_spread_std", cfg.angle_spread_std);
    cfg.sampling_rate = get_field<double>(root, "sampling_rate", "sampling_rate", cfg.sampling_rate);
    cfg.rolloff = get_field<double>(root, "rolloff", "rolloff", cfg.rolloff);
    cfg.array_separation = get_field<double>(root, "array_separation", "array_separation", cfg.array_separation);
    const auto wrap = get_field<std::string>(root, "delay_wrap", "delay_wrap", "cyclic");
    if (wrap == "cyclic")
        cfg.delay_wrap = channel::DelayWrap::Cyclic;
    else if (wrap == "linear")
        cfg.delay_wrap = channel::DelayWrap::Linear;
    else
        field_error("delay_wrap", "expected \"cyclic\" or \"linear\"");
    cfg.apply_cp_overhead = get_field<bool>(root, "apply_cp_overhead", "apply_cp_overhead", false);

    cfg.resolve();
    return cfg;
}

/// Parses JSON text; syntax errors report line and column.
inline json parse_json_text(const std::string &text, const std::string &source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        std::size_t line = 1, col = 1;
        for (std::size_t n = 0; n + 1 < e.byte && n < text.size(); ++n) {
            if (text[n] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorKind::Config,
                    source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

inline json read_json_file(const std::string &path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Config, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

/// Applies `key=value` overrides. Keys may be dotted paths into nested
/// objects; values are parsed as JSON, falling back to a plain string.
inline void apply_overrides(json &root, const std::vector<std::string> &overrides)
{
    for (const auto &item : overrides) {
        const auto eq = item.find('=');
        require(eq != std::string::npos && eq > 0, ErrorKind::Config,
                "override '" + item + "' is not of the form key=value");
        const std::string key = item.substr(0, eq);
        const std::string text = item.substr(eq + 1);
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded())
            value = text;

        json *node = &root;
        std::size_t start = 0;
        for (;;) {
            const auto dot = key.find('.', start);
            const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            require(!part.empty(), ErrorKind::Config, "override key '" + key + "' has an empty component");
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            json &child = (*node)[part];
            if (child.is_null())
                child = json::object();
            require(child.is_object(), ErrorKind::Config, "override key '" + key + "' descends into a non-object");
            node = &child;
            start = dot + 1;
        }
    }
}

inline ScenarioConfig load_config(const std::string &path, const std::vector<std::string> &overrides = {})
{
    json root = read_json_file(path);
    apply_overrides(root, overrides);
    return parse_config(root);
}

} // namespace fdbfc::cli

#endif // FDBFC_CONFIG_HPP
