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

#ifndef FDBFC_TESTS_SUPPORT_HPP
#define FDBFC_TESTS_SUPPORT_HPP

#include <fdbfc/sim.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace support {

using namespace fdbfc;

template <class F>
ErrorKind kind_of(F &&f)
{
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an fdbfc::Error";
    return ErrorKind::Config;
}

/// Bundled scenarios built in code: 1 = equal users / low selectivity, 2 = high selectivity,
/// 3 = low selectivity with SNR_ij = SNR_ki + 30 dB.
inline sim::ScenarioConfig scenario(int which)
{
    sim::ScenarioConfig cfg;
    cfg.name = "scenario" + std::to_string(which);
    const bool wide = which == 2;
    cfg.num_subcarriers = wide ? 128 : 8;
    cfg.num_taps = cfg.num_subcarriers;
    cfg.cp_length = cfg.num_taps / 4;
    cfg.dims.i.nrf_tx = wide ? 8 : 6;
    cfg.dims.i.nrf_rx = wide ? 4 : 2;
    cfg.dims.j.nrf_tx = cfg.dims.j.nrf_rx = wide ? 4 : 2;
    cfg.dims.k.nrf_tx = cfg.dims.k.nrf_rx = wide ? 4 : 2;
    cfg.snr_offset_db = which == 3 ? 30.0 : 0.0;
    cfg.grid_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
    cfg.master_seed = 2020 + static_cast<std::uint64_t>(which);
    cfg.resolve();
    return cfg;
}

/// ULA angle whose response equals DFT column k of an n-point codebook.
inline double grid_angle(int k, int n)
{
    const double c = 2.0 * k / n;
    return std::acos(c > 1.0 ? c - 2.0 : c);
}

/// Channel made of rays that sit exactly on codebook directions, so its
/// singular vectors are combinations of codebook columns.
inline channel::SubcarrierChannels grid_channel(const std::vector<std::pair<int, int>> &aoa_aod, Eigen::Index n,
                                                int num_taps, int num_subcarriers, std::mt19937_64 &rng)
{
    channel::ClusterParams p;
    p.n_rays = static_cast<int>(aoa_aod.size());
    p.delay_span_taps = num_taps;
    std::uniform_real_distribution<double> delay(0.0, num_taps * p.symbol_period());
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    std::vector<channel::Ray> rays;
    for (const auto &[r, t] : aoa_aod)
        rays.push_back({cdouble(g(rng), g(rng)), grid_angle(r, static_cast<int>(n)),
                        grid_angle(t, static_cast<int>(n)), delay(rng)});
    return channel::taps_to_subcarriers(channel::taps_from_rays(rays, n, n, p), num_subcarriers);
}

inline double median(std::vector<double> v) { return sim::median(std::move(v)); }

} // namespace support

#endif // FDBFC_TESTS_SUPPORT_HPP
