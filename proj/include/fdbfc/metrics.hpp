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

#ifndef FDBFC_METRICS_HPP
#define FDBFC_METRICS_HPP

#include "bfc.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>

namespace fdbfc::metrics {

using bfc::HybridBeamformer;
using channel::SubcarrierChannels;

struct LinkRates {
    std::vector<double> per_subcarrier;
    double average = 0.0;
};

struct RateReport {
    double rate_ij = 0.0;
    double rate_ki = 0.0;
    std::vector<double> per_subcarrier_ij;
    std::vector<double> per_subcarrier_ki;
    double sum_fd = 0.0;
};

struct BenchmarkReport {
    double ideal_fd_digital = 0.0;
    double ideal_fd_hybrid = 0.0;
    double hd_digital = 0.0;
    double hd_hybrid = 0.0;
};

/// Optional interference seen by the receiver: snr * H F F^* H^*.
struct Interference {
    const CMatrix *channel = nullptr;
    const CMatrix *precoder = nullptr;
    double snr = 0.0;
};

namespace detail {

inline double log2_det_hpd(const CMatrix &m)
{
    Eigen::LLT<CMatrix> llt(m);
    require(llt.info() == Eigen::Success, ErrorKind::NumericalFailure, "matrix is not positive definite");
    const auto &l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index n = 0; n < l.rows(); ++n)
        acc += std::log2(l(n, n).real());
    return 2.0 * acc;
}

inline void require_full_rank_combiner(const CMatrix &w)
{
    const CMatrix gram = w.adjoint() * w;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
    const auto &ev = es.eigenvalues();
    require(ev.size() > 0 && ev(ev.size() - 1) > 0.0 && ev(0) > 1e-12 * ev(ev.size() - 1),
            ErrorKind::DegenerateCombiner, "combiner is rank deficient");
}

} // namespace detail

/// Gaussian mutual information in bps/Hz of one subcarrier, interference
/// treated as noise:
///   log2 det(I + snr W^* H F F^* H^* W (W^* Q W)^-1),  Q = I + snr_int H_int F_int F_int^* H_int^*.
/// Evaluated through the whitened Ns x Ns form.
inline double spectral_efficiency(const CMatrix &h, const CMatrix &f, const CMatrix &w, double snr,
                                  const Interference &interference = {})
{
    require(snr >= 0.0 && std::isfinite(snr), ErrorKind::InvalidArgument, "SNR must be finite and >= 0");
    require(w.rows() == h.rows() && h.cols() == f.rows(), ErrorKind::InvalidArgument,
            "combiner, channel and precoder do not chain");
    detail::require_full_rank_combiner(w);

    CMatrix noise = w.adjoint() * w;
    if (interference.channel != nullptr && interference.snr > 0.0) {
        require(interference.precoder != nullptr, ErrorKind::InvalidArgument, "interference precoder missing");
        const CMatrix g = w.adjoint() * (*interference.channel * *interference.precoder);
        noise.noalias() += interference.snr * (g * g.adjoint());
    }
    noise = (0.5 * (noise + noise.adjoint())).eval();

    Eigen::LLT<CMatrix> llt(noise);
    require(llt.info() == Eigen::Success, ErrorKind::DegenerateCombiner, "combined noise covariance is singular");
    const CMatrix x = llt.matrixL().solve(std::sqrt(snr) * (w.adjoint() * (h * f)));
    CMatrix m = x * x.adjoint();
    m.diagonal().array() += 1.0;
    return std::max(0.0, detail::log2_det_hpd(0.5 * (m + m.adjoint())));
}

inline LinkRates link_rates(const MatrixList &h, const MatrixList &f, const MatrixList &w, double snr,
                            const MatrixList *h_int = nullptr, const MatrixList *f_int = nullptr,
                            double snr_int = 0.0)
{
    require(!h.empty() && f.size() == h.size() && w.size() == h.size(), ErrorKind::InvalidArgument,
            "subcarrier counts differ");
    require(h_int == nullptr || (h_int->size() == h.size() && f_int != nullptr && f_int->size() == h.size()),
            ErrorKind::InvalidArgument, "interference subcarrier counts differ");
    LinkRates out;
    out.per_subcarrier.reserve(h.size());
    for (std::size_t u = 0; u < h.size(); ++u) {
        Interference itf;
        if (h_int != nullptr)
            itf = {&(*h_int)[u], &(*f_int)[u], snr_int};
        out.per_subcarrier.push_back(spectral_efficiency(h[u], f[u], w[u], snr, itf));
    }
    out.average = std::accumulate(out.per_subcarrier.begin(), out.per_subcarrier.end(), 0.0) /
                  static_cast<double>(out.per_subcarrier.size());
    return out;
}

/// Link i -> j; node j is half-duplex and sees no self-interference.
inline LinkRates rate_ij(const SubcarrierChannels &h_ij, const HybridBeamformer &precoder_i,
                         const HybridBeamformer &combiner_j, double snr_ij)
{
    return link_rates(h_ij.subchannels, precoder_i.effective(), combiner_j.effective(), snr_ij);
}

/// Link k -> i with the self-interference of i's own transmission treated as noise.
inline LinkRates rate_ki(const SubcarrierChannels &h_ki, const SubcarrierChannels &h_ii,
                         const HybridBeamformer &precoder_k, const HybridBeamformer &combiner_i,
                         const HybridBeamformer &precoder_i, double snr_ki, double snr_ii)
{
    const MatrixList f_i = precoder_i.effective();
    return link_rates(h_ki.subchannels, precoder_k.effective(), combiner_i.effective(), snr_ki, &h_ii.subchannels,
                      &f_i, snr_ii);
}

inline RateReport make_report(LinkRates ij, LinkRates ki)
{
    RateReport r;
    r.rate_ij = ij.average;
    r.rate_ki = ki.average;
    r.per_subcarrier_ij = std::move(ij.per_subcarrier);
    r.per_subcarrier_ki = std::move(ki.per_subcarrier);
    r.sum_fd = r.rate_ij + r.rate_ki;
    return r;
}

/// Achieved rates of a complete design.
inline RateReport evaluate_design(const SubcarrierChannels &h_ki, const SubcarrierChannels &h_ij,
                                  const SubcarrierChannels &h_ii, const bfc::DesignOutput &design,
                                  const bfc::LinkSnrs &snrs)
{
    return make_report(rate_ij(h_ij, design.precoder_i, design.combiner_j, snrs.snr_ij),
                       rate_ki(h_ki, h_ii, design.precoder_k, design.combiner_i, design.precoder_i, snrs.snr_ki,
                               snrs.snr_ii));
}

/// Multiplicative cyclic-prefix overhead U / (U + N_CP). Not applied unless
/// the caller asks for it.
inline double cp_overhead_factor(Eigen::Index num_subcarriers, Eigen::Index cp_length)
{
    return static_cast<double>(num_subcarriers) / static_cast<double>(num_subcarriers + cp_length);
}

/// Interference-free benchmarks from precomputed eigenbeamformers and their
/// FS-OMP hybridizations. Half-duplex values assume equal time sharing.
inline BenchmarkReport benchmarks(const SubcarrierChannels &h_ki, const SubcarrierChannels &h_ij,
                                  const bfc::DesiredEigenbeams &eig, const bfc::HalfDuplexDesign &hd,
                                  const bfc::FullDuplexInitial &fd, const bfc::LinkSnrs &snrs)
{
    BenchmarkReport b;
    b.ideal_fd_digital = link_rates(h_ij.subchannels, eig.precoder_i, eig.combiner_j, snrs.snr_ij).average +
                         link_rates(h_ki.subchannels, eig.precoder_k, eig.combiner_i, snrs.snr_ki).average;

    const HybridBeamformer f_i = bfc::normalized(fd.precoder_i);
    const HybridBeamformer f_k = bfc::normalized(hd.precoder_k);
    b.ideal_fd_hybrid = rate_ij(h_ij, f_i, hd.combiner_j, snrs.snr_ij).average +
                        link_rates(h_ki.subchannels, f_k.effective(), fd.combiner_i.effective(), snrs.snr_ki).average;

    b.hd_digital = b.ideal_fd_digital / 2.0;
    b.hd_hybrid = b.ideal_fd_hybrid / 2.0;
    return b;
}

inline BenchmarkReport benchmarks(const SubcarrierChannels &h_ki, const SubcarrierChannels &h_ij,
                                  const bfc::NetworkDimensions &dims, const bfc::LinkSnrs &snrs,
                                  const bfc::Codebooks &codebooks)
{
    dims.validate();
    snrs.validate();
    const bfc::DesiredEigenbeams eig = bfc::desired_eigenbeams(h_ki, h_ij, dims);
    return benchmarks(h_ki, h_ij, eig, bfc::design_hd_nodes(eig, dims, codebooks),
                      bfc::design_fd_node_initial(eig, dims, codebooks), snrs);
}

} // namespace fdbfc::metrics

#endif // FDBFC_METRICS_HPP
