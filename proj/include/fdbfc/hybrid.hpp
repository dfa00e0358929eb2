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

#ifndef FDBFC_HYBRID_HPP
#define FDBFC_HYBRID_HPP

#include "common.hpp"

#include <Eigen/SVD>

#include <limits>

namespace fdbfc::hybrid {

/// Moore-Penrose pseudoinverse. Singular values below rtol * sigma_max are
/// treated as zero.
inline CMatrix pseudo_inverse(const CMatrix &a, double rtol = 1e-12)
{
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    const double cutoff = s.size() > 0 ? rtol * s(0) : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff)
            inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// Candidate RF beamformers: constant-amplitude, phase-quantized columns.
struct Codebook {
    CMatrix matrix;
    double phase_resolution = 0.0;

    Eigen::Index num_antennas() const { return matrix.rows(); }
    Eigen::Index size() const { return matrix.cols(); }
};

/// n-point DFT codebook, entry (m, k) = exp(i*2*pi*m*k/n) / sqrt(n).
inline Codebook dft_codebook(Eigen::Index n)
{
    require(n >= 1, ErrorKind::InvalidArgument, "codebook size must be >= 1");
    Codebook cb;
    cb.phase_resolution = 2.0 * kPi / static_cast<double>(n);
    cb.matrix.resize(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index k = 0; k < n; ++k)
            cb.matrix(m, k) = std::polar(scale, cb.phase_resolution * static_cast<double>((m * k) % n));
    return cb;
}

struct OmpResult {
    CMatrix rf;                               // Na x Nrf
    CMatrix bb;                               // Nrf x K
    std::vector<Eigen::Index> selected;       // codebook column per RF chain
};

/// Greedy OMP hybrid factorization target ~ rf * bb with rf columns taken
/// from the codebook. Each iteration adds the unused codebook column with the
/// largest summed squared correlation against the residual (ties go to the
/// lowest index), then refits bb by least squares.
inline OmpResult omp_hybrid_approx(const CMatrix &target, const Codebook &codebook, Eigen::Index nrf)
{
    require(nrf >= 1, ErrorKind::InvalidArgument, "number of RF chains must be >= 1");
    require(nrf <= codebook.size(), ErrorKind::InvalidArgument,
            "number of RF chains exceeds codebook size");
    require(target.rows() == codebook.num_antennas(), ErrorKind::InvalidArgument,
            "target rows must match codebook antennas");

    const CMatrix &a = codebook.matrix;
    OmpResult out;
    out.rf.resize(a.rows(), 0);
    std::vector<bool> used(static_cast<std::size_t>(a.cols()), false);

    CMatrix residual = target;
    for (Eigen::Index it = 0; it < nrf; ++it) {
        const Eigen::VectorXd score = (a.adjoint() * residual).rowwise().squaredNorm();
        Eigen::Index best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            if (used[static_cast<std::size_t>(k)])
                continue;
            if (score(k) > best_score) {
                best_score = score(k);
                best = k;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        out.selected.push_back(best);

        out.rf.conservativeResize(Eigen::NoChange, it + 1);
        out.rf.col(it) = a.col(best);
        out.bb = pseudo_inverse(out.rf) * target;

        residual = target - out.rf * out.bb;
        const double norm = residual.norm();
        if (norm > 0.0)
            residual /= norm;
    }
    return out;
}

/// Hybrid beamformer: one frequency-flat RF matrix, one baseband matrix per subcarrier.
struct HybridBeamformer {
    CMatrix rf;
    MatrixList bb_per_subcarrier;

    std::size_t num_subcarriers() const { return bb_per_subcarrier.size(); }
    CMatrix effective(std::size_t u) const { return rf * bb_per_subcarrier[u]; }

    MatrixList effective() const
    {
        MatrixList out;
        out.reserve(bb_per_subcarrier.size());
        for (const auto &bb : bb_per_subcarrier)
            out.push_back(rf * bb);
        return out;
    }
};

/// Horizontal block concatenation [X[0] X[1] ... X[U-1]].
inline CMatrix fs_stack(const MatrixList &per_subcarrier)
{
    require_same_shape(per_subcarrier, "per-subcarrier matrices");
    const Eigen::Index rows = per_subcarrier.front().rows();
    const Eigen::Index cols = per_subcarrier.front().cols();
    CMatrix out(rows, cols * static_cast<Eigen::Index>(per_subcarrier.size()));
    for (std::size_t u = 0; u < per_subcarrier.size(); ++u)
        out.middleCols(static_cast<Eigen::Index>(u) * cols, cols) = per_subcarrier[u];
    return out;
}

inline MatrixList fs_unstack(const CMatrix &stacked, Eigen::Index num_subcarriers)
{
    require(num_subcarriers >= 1 && stacked.cols() % num_subcarriers == 0, ErrorKind::InvalidArgument,
            "stacked width is not a multiple of the subcarrier count");
    const Eigen::Index cols = stacked.cols() / num_subcarriers;
    MatrixList out;
    out.reserve(static_cast<std::size_t>(num_subcarriers));
    for (Eigen::Index u = 0; u < num_subcarriers; ++u)
        out.emplace_back(stacked.middleCols(u * cols, cols));
    return out;
}

/// Frequency-selective OMP: one OMP run on the stacked targets, so a single
/// RF matrix serves every subcarrier.
inline HybridBeamformer fs_omp(const MatrixList &per_subcarrier, const Codebook &codebook, Eigen::Index nrf)
{
    const CMatrix stacked = fs_stack(per_subcarrier);
    OmpResult r = omp_hybrid_approx(stacked, codebook, nrf);
    return {std::move(r.rf), fs_unstack(r.bb, static_cast<Eigen::Index>(per_subcarrier.size()))};
}

} // namespace fdbfc::hybrid

#endif // FDBFC_HYBRID_HPP
