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

// Independent reference computations used only by the tests. Nothing here
// calls into the library's numerical paths.

#ifndef FDBFC_TESTS_ORACLES_HPP
#define FDBFC_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Entry-by-entry DFT across taps with an explicit complex exponential.
inline std::vector<Mat> naive_dft(const std::vector<Mat> &taps, int num_subcarriers)
{
    std::vector<Mat> out;
    const auto rows = taps.front().rows(), cols = taps.front().cols();
    for (int u = 0; u < num_subcarriers; ++u) {
        Mat h(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                cd acc = 0.0;
                for (std::size_t d = 0; d < taps.size(); ++d)
                    acc += taps[d](r, c) *
                           std::exp(cd(0.0, -2.0 * std::numbers::pi * u * static_cast<double>(d) / num_subcarriers));
                h(r, c) = acc;
            }
        }
        out.push_back(h);
    }
    return out;
}

/// Triple-loop matrix product.
inline Mat naive_mul(const Mat &a, const Mat &b)
{
    Mat c = Mat::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index k = 0; k < a.cols(); ++k)
                c(i, j) += a(i, k) * b(k, j);
    return c;
}

inline Mat naive_adjoint(const Mat &a)
{
    Mat t(a.cols(), a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            t(j, i) = std::conj(a(i, j));
    return t;
}

/// Rate of the k -> i link assembled from the received-signal model:
/// the full array covariance R_y = snr_ki H_ki F_k F_k^* H_ki^* + snr_ii H_ii F_i F_i^* H_ii^* + I
/// is combined, and the rate is log2 det(W^* R_y W) - log2 det(W^* (R_y - desired) W),
/// with determinants from LU.
inline double covariance_rate(const Mat &h_ki, const Mat &f_k, const Mat &h_ii, const Mat &f_i, const Mat &w,
                              double snr_ki, double snr_ii)
{
    const auto n = h_ki.rows();
    const Mat desired = snr_ki * naive_mul(naive_mul(h_ki, f_k), naive_adjoint(naive_mul(h_ki, f_k)));
    const Mat si = snr_ii * naive_mul(naive_mul(h_ii, f_i), naive_adjoint(naive_mul(h_ii, f_i)));
    const Mat ry = desired + si + Mat::Identity(n, n);
    const Mat total = naive_mul(naive_mul(naive_adjoint(w), ry), w);
    const Mat undesired = naive_mul(naive_mul(naive_adjoint(w), ry - desired), w);
    return std::log2(std::abs(total.fullPivLu().determinant()) / std::abs(undesired.fullPivLu().determinant()));
}

/// Random matrix with iid CN(0, 1) entries.
template <class Rng>
Mat random_cn(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = cd(n(rng), n(rng));
    return m;
}

/// Random matrix with orthonormal columns (QR of a Gaussian matrix).
template <class Rng>
Mat random_orthonormal(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
    Eigen::HouseholderQR<Mat> qr(random_cn(rows, cols, rng));
    return qr.householderQ() * Mat::Identity(rows, cols);
}

/// Trapezoidal integral of f over [a, b] with n panels.
template <class F>
double trapezoid(F f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double acc = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i)
        acc += f(a + i * h);
    return acc * h;
}

} // namespace oracle

#endif // FDBFC_TESTS_ORACLES_HPP
