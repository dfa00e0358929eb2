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

#ifndef FDBFC_SIM_HPP
#define FDBFC_SIM_HPP

// Seeded Monte Carlo harness: channel draws, full design, rate and
// benchmark evaluation over an SNR sweep.

#include "metrics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace fdbfc::sim {

/// Inclusive uniform ranges for cluster and ray counts.
struct ClusterCountRange {
    int clusters_min = 1;
    int clusters_max = 1;
    int rays_min = 1;
    int rays_max = 1;

    void validate(const std::string &what) const
    {
        require(clusters_min >= 1 && clusters_max >= clusters_min && rays_min >= 1 && rays_max >= rays_min,
                ErrorKind::InvalidArgument, what + " cluster/ray ranges must satisfy 1 <= min <= max");
    }
};

/// One sweep point. Both dB (for reporting) and linear values are stored;
/// the conversion happens once, when the configuration is resolved.
struct SnrPoint {
    double snr_ij_db = 0.0;
    double snr_ki_db = 0.0;
    double snr_ij = 1.0;
    double snr_ki = 1.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    int num_subcarriers = 8;  // U
    int num_taps = 8;         // D
    int cp_length = 2;        // N_CP = D/4
    bfc::NetworkDimensions dims;

    double snr_ii_db = 80.0;
    double rician_kappa_db = 10.0;
    double snr_offset_db = 0.0;     // snr_ij = snr_ki + offset
    std::vector<double> grid_db;    // sweep variable is snr_ij in dB
    int trials = 100;
    std::uint64_t master_seed = 1;

    ClusterCountRange desired_counts{1, 6, 1, 10};
    ClusterCountRange si_counts{1, 3, 1, 6};
    double angle_spread_std = 0.2;
    double sampling_rate = 2e9;
    double rolloff = 1.0;
    double array_separation = 10.0;  // wavelengths between tx and rx arrays at i
    channel::DelayWrap delay_wrap = channel::DelayWrap::Cyclic;
    bool apply_cp_overhead = false;

    // Linear quantities, filled by resolve().
    double snr_ii = 0.0;
    double rician_kappa = 0.0;
    std::vector<SnrPoint> grid;

    /// Checks the invariants and derives the linear-unit fields.
    void resolve()
    {
        require(num_taps >= 1, ErrorKind::Config, "D must be >= 1");
        require(num_subcarriers >= num_taps, ErrorKind::Config,
                "U = " + std::to_string(num_subcarriers) + " < D = " + std::to_string(num_taps) +
                    " violates the cyclic-prefix assumption (U >= D)");
        require(cp_length >= 0, ErrorKind::Config, "n_cp must be >= 0");
        require(trials >= 1, ErrorKind::Config, "trials must be >= 1");
        require(!grid_db.empty(), ErrorKind::Config, "SNR grid is empty");
        require(!std::isnan(snr_ii_db) && !(std::isinf(snr_ii_db) && snr_ii_db > 0), ErrorKind::Config,
                "snr_ii_db must be finite or -inf");
        require(!std::isnan(rician_kappa_db), ErrorKind::Config, "rician_kappa_db must not be NaN");
        require(std::isfinite(snr_offset_db), ErrorKind::Config, "snr_offset_db must be finite");
        require(angle_spread_std >= 0.0 && sampling_rate > 0.0 && rolloff >= 0.0 && rolloff <= 1.0,
                ErrorKind::Config, "angle spread, sampling rate or rolloff out of range");
        require(array_separation > 0.0, ErrorKind::Config, "array separation must be > 0");
        try {
            dims.validate();
            desired_counts.validate("desired");
            si_counts.validate("SI");
        } catch (const Error &e) {
            throw Error(ErrorKind::Config, e.what());
        }

        snr_ii = db_to_linear(snr_ii_db);
        rician_kappa = db_to_linear(rician_kappa_db);
        grid.clear();
        for (double db : grid_db) {
            require(std::isfinite(db), ErrorKind::Config, "SNR grid values must be finite");
            SnrPoint p;
            p.snr_ij_db = db;
            p.snr_ki_db = db - snr_offset_db;
            p.snr_ij = db_to_linear(p.snr_ij_db);
            p.snr_ki = db_to_linear(p.snr_ki_db);
            grid.push_back(p);
        }
    }
};

struct TrialResult {
    int trial = 0;
    std::size_t snr_index = 0;
    SnrPoint snr;
    metrics::RateReport rates;
    metrics::BenchmarkReport bench;
};

/// Per-trial seed: splitmix64 chain over (master_seed, snr index, trial index).
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t snr_index, int trial_index)
{
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ static_cast<std::uint64_t>(snr_index));
    h = mix64(h ^ static_cast<std::uint64_t>(trial_index));
    return h;
}

/// The three subcarrier-domain channels of one realization.
struct ChannelDraw {
    channel::ChannelTaps taps_ki, taps_ij, taps_ii;
    channel::SubcarrierChannels h_ki, h_ij, h_ii;
};

template <class Rng>
channel::ClusterParams draw_cluster_params(const ScenarioConfig &cfg, const ClusterCountRange &range, Rng &rng)
{
    std::uniform_int_distribution<int> clusters(range.clusters_min, range.clusters_max);
    std::uniform_int_distribution<int> rays(range.rays_min, range.rays_max);
    channel::ClusterParams p;
    p.n_clust = clusters(rng);
    p.n_rays = rays(rng);
    p.angle_spread_std = cfg.angle_spread_std;
    p.delay_span_taps = cfg.num_taps;
    p.sampling_rate = cfg.sampling_rate;
    p.rolloff = cfg.rolloff;
    p.delay_wrap = cfg.delay_wrap;
    return p;
}

/// Draws H_ki, H_ij and H_ii for one trial. With snr_ii == 0 the SI channel is zeroed.
inline ChannelDraw draw_channels(const ScenarioConfig &cfg, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const auto &d = cfg.dims;
    ChannelDraw out;
    out.taps_ki = channel::gen_clustered_taps(draw_cluster_params(cfg, cfg.desired_counts, rng), d.i.nr, d.k.nt, rng);
    out.taps_ij = channel::gen_clustered_taps(draw_cluster_params(cfg, cfg.desired_counts, rng), d.j.nr, d.i.nt, rng);

    channel::SiChannelParams si;
    si.rician_kappa = cfg.rician_kappa;
    si.nlos_params = draw_cluster_params(cfg, cfg.si_counts, rng);
    const auto arrays = channel::stacked_arrays(d.i.nt, d.i.nr, cfg.array_separation);
    si.geometry_tx = arrays.tx;
    si.geometry_rx = arrays.rx;
    out.taps_ii = channel::gen_si_taps(si, rng);
    if (cfg.snr_ii == 0.0)
        for (auto &tap : out.taps_ii.taps)
            tap.setZero();

    out.h_ki = channel::taps_to_subcarriers(out.taps_ki, cfg.num_subcarriers);
    out.h_ij = channel::taps_to_subcarriers(out.taps_ij, cfg.num_subcarriers);
    out.h_ii = channel::taps_to_subcarriers(out.taps_ii, cfg.num_subcarriers);
    return out;
}

/// Design and evaluation on given channels.
inline TrialResult evaluate_trial(const ScenarioConfig &cfg, const ChannelDraw &draw, const SnrPoint &snr)
{
    const bfc::LinkSnrs snrs{snr.snr_ij, snr.snr_ki, cfg.snr_ii};
    const bfc::Codebooks codebooks = bfc::dft_codebooks(cfg.dims);
    const bfc::DesiredEigenbeams eig = bfc::desired_eigenbeams(draw.h_ki, draw.h_ij, cfg.dims);

    const bfc::DesignOutput design = bfc::design_full(eig, draw.h_ij, draw.h_ii, cfg.dims, snrs, codebooks);
    TrialResult r;
    r.snr = snr;
    r.rates = metrics::evaluate_design(draw.h_ki, draw.h_ij, draw.h_ii, design, snrs);
    r.bench = metrics::benchmarks(draw.h_ki, draw.h_ij, eig, bfc::design_hd_nodes(eig, cfg.dims, codebooks),
                                  bfc::design_fd_node_initial(eig, cfg.dims, codebooks), snrs);

    if (cfg.apply_cp_overhead) {
        const double f = metrics::cp_overhead_factor(cfg.num_subcarriers, cfg.cp_length);
        r.rates.rate_ij *= f;
        r.rates.rate_ki *= f;
        r.rates.sum_fd = r.rates.rate_ij + r.rates.rate_ki;
        r.bench.ideal_fd_digital *= f;
        r.bench.ideal_fd_hybrid *= f;
        r.bench.hd_digital = r.bench.ideal_fd_digital / 2.0;
        r.bench.hd_hybrid = r.bench.ideal_fd_hybrid / 2.0;
    }
    return r;
}

/// One Monte Carlo trial; deterministic in (master_seed, snr_index, trial_index).
inline TrialResult run_trial(const ScenarioConfig &cfg, std::size_t snr_index, int trial_index)
{
    require(snr_index < cfg.grid.size(), ErrorKind::InvalidArgument,
            "SNR index out of range (was the configuration resolved?)");
    require(trial_index >= 0, ErrorKind::InvalidArgument, "trial index must be >= 0");
    const ChannelDraw draw = draw_channels(cfg, trial_seed(cfg.master_seed, snr_index, trial_index));
    TrialResult r = evaluate_trial(cfg, draw, cfg.grid[snr_index]);
    r.trial = trial_index;
    r.snr_index = snr_index;
    return r;
}

// ---------------------------------------------------------------------------
// Sweeps

inline constexpr const char *kMetricNames[] = {"rate_ij",          "rate_ki",         "sum_fd",    "ideal_fd_digital",
                                               "ideal_fd_hybrid", "hd_digital",      "hd_hybrid"};
inline constexpr std::size_t kNumMetrics = 7;

using MetricRow = std::array<double, kNumMetrics>;

inline MetricRow metric_values(const TrialResult &r)
{
    return {r.rates.rate_ij,         r.rates.rate_ki,        r.rates.sum_fd,   r.bench.ideal_fd_digital,
            r.bench.ideal_fd_hybrid, r.bench.hd_digital,     r.bench.hd_hybrid};
}

/// Order statistic with linear interpolation between closest ranks.
inline double quantile(std::vector<double> values, double q)
{
    require(!values.empty(), ErrorKind::InvalidArgument, "quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

struct AggregateRow {
    std::size_t snr_index = 0;
    SnrPoint snr;
    MetricRow median{}, mean{}, q25{}, q75{};
};

struct SweepTable {
    std::string scenario;
    std::vector<TrialResult> rows;       // ordered by (snr index, trial)
    std::vector<AggregateRow> aggregates; // one per snr point
};

/// Worker cap from FDBFC_MAX_WORKERS, defaulting to the hardware concurrency.
inline unsigned default_worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("FDBFC_MAX_WORKERS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1)
            n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

inline AggregateRow aggregate(std::size_t snr_index, const SnrPoint &snr, const std::vector<TrialResult> &trials)
{
    AggregateRow a;
    a.snr_index = snr_index;
    a.snr = snr;
    for (std::size_t m = 0; m < kNumMetrics; ++m) {
        std::vector<double> v;
        v.reserve(trials.size());
        for (const auto &t : trials)
            v.push_back(metric_values(t)[m]);
        a.median[m] = quantile(v, 0.5);
        a.q25[m] = quantile(v, 0.25);
        a.q75[m] = quantile(v, 0.75);
        a.mean[m] = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }
    return a;
}

/// Runs every (snr point, trial) pair. Jobs are spread over `workers`
/// threads; results land in fixed slots so ordering never depends on timing.
inline SweepTable run_sweep(const ScenarioConfig &cfg, unsigned workers = default_worker_count())
{
    require(!cfg.grid.empty(), ErrorKind::InvalidArgument, "SNR grid is empty (was the configuration resolved?)");
    const std::size_t per_point = static_cast<std::size_t>(cfg.trials);
    const std::size_t num_jobs = cfg.grid.size() * per_point;

    SweepTable table;
    table.scenario = cfg.name;
    table.rows.resize(num_jobs);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t job = next++; job < num_jobs; job = next++) {
            try {
                table.rows[job] = run_trial(cfg, job / per_point, static_cast<int>(job % per_point));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = num_jobs;
            }
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(num_jobs)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    for (std::size_t s = 0; s < cfg.grid.size(); ++s) {
        const auto first = table.rows.begin() + static_cast<std::ptrdiff_t>(s * per_point);
        table.aggregates.push_back(
            aggregate(s, cfg.grid[s], std::vector<TrialResult>(first, first + static_cast<std::ptrdiff_t>(per_point))));
    }
    return table;
}

// ---------------------------------------------------------------------------
// CSV

/// Number with the given significant digits; 0 picks the shortest text that
/// reads back as the same double.
inline std::string format_number(double v, int digits = 0)
{
    char buf[64];
    if (digits > 0) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        return buf;
    }
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline void write_trials_csv(std::ostream &os, const SweepTable &table)
{
    os << "scenario,snr_ij_db,snr_ki_db,trial";
    for (const char *m : kMetricNames)
        os << ',' << m;
    os << '\n';
    for (const auto &r : table.rows) {
        os << table.scenario << ',' << format_number(r.snr.snr_ij_db) << ',' << format_number(r.snr.snr_ki_db) << ','
           << r.trial;
        for (double v : metric_values(r))
            os << ',' << format_number(v);
        os << '\n';
    }
}

inline void write_aggregate_csv(std::ostream &os, const SweepTable &table)
{
    os << "scenario,snr_ij_db,snr_ki_db,stat";
    for (const char *m : kMetricNames)
        os << ',' << m;
    os << '\n';
    for (const auto &a : table.aggregates) {
        const std::pair<const char *, const MetricRow *> stats[] = {
            {"median", &a.median}, {"mean", &a.mean}, {"q25", &a.q25}, {"q75", &a.q75}};
        for (const auto &[name, row] : stats) {
            os << table.scenario << ',' << format_number(a.snr.snr_ij_db) << ',' << format_number(a.snr.snr_ki_db)
               << ',' << name;
            for (double v : *row)
                os << ',' << format_number(v);
            os << '\n';
        }
    }
}

/// Tap- or subcarrier-indexed matrices as (index, rx_index, tx_index, real, imag).
inline void write_matrix_list_csv(std::ostream &os, const MatrixList &list, const char *index_name)
{
    os << index_name << ",rx_index,tx_index,real,imag\n";
    for (std::size_t n = 0; n < list.size(); ++n)
        for (Eigen::Index r = 0; r < list[n].rows(); ++r)
            for (Eigen::Index c = 0; c < list[n].cols(); ++c)
                os << n << ',' << r << ',' << c << ',' << format_number(list[n](r, c).real(), 17) << ','
                   << format_number(list[n](r, c).imag(), 17) << '\n';
}

inline void write_codebook_csv(std::ostream &os, const hybrid::Codebook &cb)
{
    os << "row,col,real,imag\n";
    for (Eigen::Index r = 0; r < cb.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < cb.matrix.cols(); ++c)
            os << r << ',' << c << ',' << format_number(cb.matrix(r, c).real(), 17) << ','
               << format_number(cb.matrix(r, c).imag(), 17) << '\n';
}

} // namespace fdbfc::sim

#endif // FDBFC_SIM_HPP
