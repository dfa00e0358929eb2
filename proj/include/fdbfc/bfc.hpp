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

#ifndef FDBFC_BFC_HPP
#define FDBFC_BFC_HPP

// Beamforming-cancellation design for a full-duplex node i transmitting to a
// half-duplex node j while receiving from a half-duplex node k.

#include "channel.hpp"
#include "hybrid.hpp"

#include <Eigen/Cholesky>

namespace fdbfc::bfc {

using channel::SubcarrierChannels;
using hybrid::Codebook;
using hybrid::HybridBeamformer;

/// Antenna, RF-chain and stream counts of one node. `ns` is the number of
/// streams the node transmits.
struct NodeDimensions {
    Eigen::Index nt = 32;
    Eigen::Index nr = 32;
    Eigen::Index nrf_tx = 2;
    Eigen::Index nrf_rx = 2;
    Eigen::Index ns = 2;

    void validate(const char *node) const
    {
        const std::string n(node);
        require(nt >= 1 && nr >= 1, ErrorKind::InvalidArgument, "node " + n + ": antenna counts must be >= 1");
        require(ns >= 1, ErrorKind::InvalidArgument, "node " + n + ": stream count must be >= 1");
        require(nrf_tx >= 1 && nrf_rx >= 1, ErrorKind::InvalidArgument,
                "node " + n + ": RF-chain counts must be >= 1");
    }
};

struct NetworkDimensions {
    NodeDimensions i;  // full-duplex
    NodeDimensions j;  // receives i.ns streams
    NodeDimensions k;  // transmits k.ns streams

    void validate() const
    {
        i.validate("i");
        j.validate("j");
        k.validate("k");
        require(i.nrf_tx >= i.ns, ErrorKind::InvalidArgument, "Nrf_tx(i) must be >= Ns(i)");
        require(i.nrf_rx >= k.ns, ErrorKind::InvalidArgument, "Nrf_rx(i) must be >= Ns(k)");
        require(j.nrf_rx >= i.ns, ErrorKind::InvalidArgument, "Nrf_rx(j) must be >= Ns(i)");
        require(k.nrf_tx >= k.ns, ErrorKind::InvalidArgument, "Nrf_tx(k) must be >= Ns(k)");
        require(i.ns <= std::min(i.nt, j.nr), ErrorKind::InvalidArgument, "Ns(i) exceeds the i->j channel rank");
        require(k.ns <= std::min(k.nt, i.nr), ErrorKind::InvalidArgument, "Ns(k) exceeds the k->i channel rank");
    }
};

/// Link SNRs in linear units.
struct LinkSnrs {
    double snr_ij = 1.0;
    double snr_ki = 1.0;
    double snr_ii = 0.0;

    void validate() const
    {
        for (double s : {snr_ij, snr_ki, snr_ii})
            require(s >= 0.0 && std::isfinite(s), ErrorKind::InvalidArgument, "SNRs must be finite and >= 0");
    }
};

/// RF codebooks of the four beamformers in the network.
struct Codebooks {
    Codebook i_tx;
    Codebook i_rx;
    Codebook j_rx;
    Codebook k_tx;
};

inline Codebooks dft_codebooks(const NetworkDimensions &dims)
{
    return {hybrid::dft_codebook(dims.i.nt), hybrid::dft_codebook(dims.i.nr),
            hybrid::dft_codebook(dims.j.nr), hybrid::dft_codebook(dims.k.nt)};
}

// ---------------------------------------------------------------------------
// Eigenbeamformers

/// Dominant right/left singular vectors of one subchannel.
struct EigenBeams {
    CMatrix precoder;  // Nt x ns_tx
    CMatrix combiner;  // Nr x ns_rx
    Eigen::VectorXd singular_values;
};

inline EigenBeams eigen_beams(const CMatrix &subchannel, Eigen::Index ns_tx, Eigen::Index ns_rx)
{
    const Eigen::Index rank = std::min(subchannel.rows(), subchannel.cols());
    require(ns_tx >= 1 && ns_tx <= rank && ns_rx >= 1 && ns_rx <= rank, ErrorKind::InvalidArgument,
            "stream count exceeds min(Nr, Nt)");
    Eigen::BDCSVD<CMatrix> svd(subchannel, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixV().leftCols(ns_tx), svd.matrixU().leftCols(ns_rx), svd.singularValues()};
}

inline CMatrix eigen_precoder(const CMatrix &subchannel, Eigen::Index ns)
{
    return eigen_beams(subchannel, ns, ns).precoder;
}

inline CMatrix eigen_combiner(const CMatrix &subchannel, Eigen::Index ns)
{
    return eigen_beams(subchannel, ns, ns).combiner;
}

/// Fully-digital eigenbeamformers of both desired links on every subcarrier.
struct DesiredEigenbeams {
    MatrixList precoder_k;  // right singular vectors of H_ki
    MatrixList combiner_i;  // left singular vectors of H_ki
    MatrixList precoder_i;  // right singular vectors of H_ij
    MatrixList combiner_j;  // left singular vectors of H_ij
};

inline DesiredEigenbeams desired_eigenbeams(const SubcarrierChannels &h_ki, const SubcarrierChannels &h_ij,
                                            const NetworkDimensions &dims)
{
    require(h_ki.num_subcarriers() == h_ij.num_subcarriers() && h_ki.num_subcarriers() >= 1,
            ErrorKind::InvalidArgument, "desired channels must share a nonzero subcarrier count");
    require_same_shape(h_ki.subchannels, "H_ki");
    require_same_shape(h_ij.subchannels, "H_ij");
    require(h_ki[0].rows() == dims.i.nr && h_ki[0].cols() == dims.k.nt, ErrorKind::InvalidArgument,
            "H_ki must be Nr(i) x Nt(k)");
    require(h_ij[0].rows() == dims.j.nr && h_ij[0].cols() == dims.i.nt, ErrorKind::InvalidArgument,
            "H_ij must be Nr(j) x Nt(i)");

    DesiredEigenbeams out;
    for (std::size_t u = 0; u < h_ki.subchannels.size(); ++u) {
        EigenBeams ki = eigen_beams(h_ki[u], dims.k.ns, dims.k.ns);
        EigenBeams ij = eigen_beams(h_ij[u], dims.i.ns, dims.i.ns);
        out.precoder_k.push_back(std::move(ki.precoder));
        out.combiner_i.push_back(std::move(ki.combiner));
        out.precoder_i.push_back(std::move(ij.precoder));
        out.combiner_j.push_back(std::move(ij.combiner));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hybridization

struct HalfDuplexDesign {
    HybridBeamformer precoder_k;
    HybridBeamformer combiner_j;
};

struct FullDuplexInitial {
    HybridBeamformer combiner_i;
    HybridBeamformer precoder_i;  // baseband part is the initial (pre-RZF) one
};

inline HalfDuplexDesign design_hd_nodes(const DesiredEigenbeams &eig, const NetworkDimensions &dims,
                                        const Codebooks &codebooks)
{
    return {hybrid::fs_omp(eig.precoder_k, codebooks.k_tx, dims.k.nrf_tx),
            hybrid::fs_omp(eig.combiner_j, codebooks.j_rx, dims.j.nrf_rx)};
}

inline HalfDuplexDesign design_hd_nodes(const SubcarrierChannels &h_ki, const SubcarrierChannels &h_ij,
                                        const NetworkDimensions &dims, const Codebooks &codebooks)
{
    dims.validate();
    return design_hd_nodes(desired_eigenbeams(h_ki, h_ij, dims), dims, codebooks);
}

inline FullDuplexInitial design_fd_node_initial(const DesiredEigenbeams &eig, const NetworkDimensions &dims,
                                                const Codebooks &codebooks)
{
    return {hybrid::fs_omp(eig.combiner_i, codebooks.i_rx, dims.i.nrf_rx),
            hybrid::fs_omp(eig.precoder_i, codebooks.i_tx, dims.i.nrf_tx)};
}

inline FullDuplexInitial design_fd_node_initial(const SubcarrierChannels &h_ki, const SubcarrierChannels &h_ij,
                                                const NetworkDimensions &dims, const Codebooks &codebooks)
{
    dims.validate();
    return design_fd_node_initial(desired_eigenbeams(h_ki, h_ij, dims), dims, codebooks);
}

// ---------------------------------------------------------------------------
// Effective channels seen by the baseband precoder at i

struct EffectiveChannels {
    MatrixList h_int;  // Ns(k) x Nrf_tx(i)
    MatrixList h_des;  // Ns(i) x Nrf_tx(i)
};

/// H_int[u] = W_bb,i[u]^* W_rf,i^* H_ii[u] F_rf,i and
/// H_des[u] = W_bb,j[u]^* W_rf,j^* H_ij[u] F_rf,i.
inline EffectiveChannels effective_channels(const HybridBeamformer &combiner_i, const HybridBeamformer &combiner_j,
                                            const CMatrix &precoder_i_rf, const SubcarrierChannels &h_ii,
                                            const SubcarrierChannels &h_ij)
{
    const std::size_t num_sc = h_ii.subchannels.size();
    require(num_sc >= 1 && h_ij.subchannels.size() == num_sc && combiner_i.num_subcarriers() == num_sc &&
                combiner_j.num_subcarriers() == num_sc,
            ErrorKind::InvalidArgument, "subcarrier counts differ");
    require(combiner_i.rf.rows() == h_ii[0].rows() && h_ii[0].cols() == precoder_i_rf.rows(),
            ErrorKind::InvalidArgument, "SI channel does not chain with the beamformers at i");
    require(combiner_j.rf.rows() == h_ij[0].rows() && h_ij[0].cols() == precoder_i_rf.rows(),
            ErrorKind::InvalidArgument, "H_ij does not chain with combiner j and the RF precoder at i");

    const CMatrix wi_rf_h = combiner_i.rf.adjoint();
    const CMatrix wj_rf_h = combiner_j.rf.adjoint();
    EffectiveChannels out;
    out.h_int.reserve(num_sc);
    out.h_des.reserve(num_sc);
    for (std::size_t u = 0; u < num_sc; ++u) {
        require(combiner_i.bb_per_subcarrier[u].rows() == combiner_i.rf.cols() &&
                    combiner_j.bb_per_subcarrier[u].rows() == combiner_j.rf.cols(),
                ErrorKind::InvalidArgument, "baseband combiner does not match its RF combiner");
        out.h_int.push_back(combiner_i.bb_per_subcarrier[u].adjoint() * (wi_rf_h * (h_ii[u] * precoder_i_rf)));
        out.h_des.push_back(combiner_j.bb_per_subcarrier[u].adjoint() * (wj_rf_h * (h_ij[u] * precoder_i_rf)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// RZF baseband precoder

/// Regularized zero-forcing baseband precoder for one subcarrier,
///   (H_des^* H_des + snr_ii/snr_ij H_int^* H_int + nrf/snr_ij I)^-1 H_des^*,
/// truncated to its first ns columns.
inline CMatrix rzf_precoder(const CMatrix &h_des, const CMatrix &h_int, const LinkSnrs &snrs,
                            Eigen::Index nrf_tx_i, Eigen::Index ns_i)
{
    require(snrs.snr_ij > 0.0 && std::isfinite(snrs.snr_ij), ErrorKind::InvalidArgument,
            "RZF precoder needs a finite snr_ij > 0");
    require(snrs.snr_ii >= 0.0 && std::isfinite(snrs.snr_ii), ErrorKind::InvalidArgument,
            "snr_ii must be finite and >= 0");
    require(h_des.cols() == nrf_tx_i && h_int.cols() == nrf_tx_i, ErrorKind::InvalidArgument,
            "effective channels must have Nrf_tx(i) columns");
    require(ns_i >= 1 && ns_i <= h_des.rows(), ErrorKind::InvalidArgument,
            "Ns(i) must not exceed the rows of the effective desired channel");

    CMatrix gram = h_des.adjoint() * h_des;
    if (snrs.snr_ii > 0.0)
        gram.noalias() += (snrs.snr_ii / snrs.snr_ij) * (h_int.adjoint() * h_int);
    gram.diagonal().array() += static_cast<double>(nrf_tx_i) / snrs.snr_ij;
    // Enforce exact Hermitian symmetry before factorizing.
    gram = (0.5 * (gram + gram.adjoint())).eval();

    Eigen::LLT<CMatrix> llt(gram);
    require(llt.info() == Eigen::Success, ErrorKind::NumericalFailure, "regularized Gram is not positive definite");
    const CMatrix f = llt.solve(CMatrix(h_des.adjoint()));
    require(f.allFinite(), ErrorKind::NumericalFailure, "RZF solve produced non-finite values");
    return f.leftCols(ns_i);
}

inline MatrixList rzf_precoder(const EffectiveChannels &eff, const LinkSnrs &snrs, Eigen::Index nrf_tx_i,
                               Eigen::Index ns_i)
{
    MatrixList out;
    out.reserve(eff.h_des.size());
    for (std::size_t u = 0; u < eff.h_des.size(); ++u)
        out.push_back(rzf_precoder(eff.h_des[u], eff.h_int[u], snrs, nrf_tx_i, ns_i));
    return out;
}

// ---------------------------------------------------------------------------
// Power normalization

/// Rescales every baseband column so the effective column rf*bb[u](:,l) has
/// unit norm; total power over subcarriers is then U*Ns.
inline MatrixList normalize_precoder(const CMatrix &rf, const MatrixList &bb_per_subcarrier)
{
    MatrixList out = bb_per_subcarrier;
    for (auto &bb : out) {
        require(bb.rows() == rf.cols(), ErrorKind::InvalidArgument, "baseband rows must match RF columns");
        const CMatrix eff = rf * bb;
        for (Eigen::Index l = 0; l < bb.cols(); ++l) {
            const double norm = eff.col(l).norm();
            require(norm > 0.0 && std::isfinite(norm), ErrorKind::DegeneratePrecoder,
                    "effective precoder column has zero norm");
            bb.col(l) /= norm;
        }
    }
    return out;
}

inline HybridBeamformer normalized(HybridBeamformer bf)
{
    bf.bb_per_subcarrier = normalize_precoder(bf.rf, bf.bb_per_subcarrier);
    return bf;
}

// ---------------------------------------------------------------------------
// End-to-end design

struct DesignOutput {
    HybridBeamformer precoder_k;
    HybridBeamformer combiner_j;
    HybridBeamformer precoder_i;  // RZF baseband, normalized
    HybridBeamformer combiner_i;
    /// Non-fatal diagnostics, e.g. too few RF chains at i for a ZF solution.
    std::vector<std::string> warnings;
};

/// True when Nrf_tx(i) leaves room for a zero-forcing solution, i.e.
/// Nrf_tx(i) >= Ns(i) + Ns(k).
inline bool has_zf_dimensionality(const NetworkDimensions &dims)
{
    return dims.i.nrf_tx >= dims.i.ns + dims.k.ns;
}

inline DesignOutput design_full(const DesiredEigenbeams &eig, const SubcarrierChannels &h_ij,
                                const SubcarrierChannels &h_ii, const NetworkDimensions &dims,
                                const LinkSnrs &snrs, const Codebooks &codebooks)
{
    HalfDuplexDesign hd = design_hd_nodes(eig, dims, codebooks);
    FullDuplexInitial fd = design_fd_node_initial(eig, dims, codebooks);

    const EffectiveChannels eff = effective_channels(fd.combiner_i, hd.combiner_j, fd.precoder_i.rf, h_ii, h_ij);

    DesignOutput out;
    out.precoder_k = normalized(std::move(hd.precoder_k));
    out.combiner_j = std::move(hd.combiner_j);
    out.combiner_i = std::move(fd.combiner_i);
    out.precoder_i.rf = std::move(fd.precoder_i.rf);
    out.precoder_i.bb_per_subcarrier =
        normalize_precoder(out.precoder_i.rf, rzf_precoder(eff, snrs, dims.i.nrf_tx, dims.i.ns));
    if (!has_zf_dimensionality(dims))
        out.warnings.push_back("Nrf_tx(i) = " + std::to_string(dims.i.nrf_tx) + " < Ns(i) + Ns(k) = " +
                               std::to_string(dims.i.ns + dims.k.ns) +
                               "; the precoder at i cannot fully null self-interference");
    return out;
}

inline DesignOutput design_full(const SubcarrierChannels &h_ki, const SubcarrierChannels &h_ij,
                                const SubcarrierChannels &h_ii, const NetworkDimensions &dims,
                                const LinkSnrs &snrs, const Codebooks &codebooks)
{
    dims.validate();
    snrs.validate();
    require(h_ii.num_subcarriers() == h_ij.num_subcarriers(), ErrorKind::InvalidArgument,
            "SI channel subcarrier count differs");
    require_same_shape(h_ii.subchannels, "H_ii");
    require(h_ii[0].rows() == dims.i.nr && h_ii[0].cols() == dims.i.nt, ErrorKind::InvalidArgument,
            "H_ii must be Nr(i) x Nt(i)");
    return design_full(desired_eigenbeams(h_ki, h_ij, dims), h_ij, h_ii, dims, snrs, codebooks);
}

} // namespace fdbfc::bfc

#endif // FDBFC_BFC_HPP
