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

#ifndef FDBFC_COMMON_HPP
#define FDBFC_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdbfc {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

enum class ErrorKind {
    InvalidArgument,
    InvalidGeometry,
    NumericalFailure,
    DegeneratePrecoder,
    DegenerateCombiner,
    Config,
};

inline const char *to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidGeometry: return "invalid-geometry";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::DegeneratePrecoder: return "degenerate-precoder";
    case ErrorKind::DegenerateCombiner: return "degenerate-combiner";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

/// Library error. Every failure raised by fdbfc carries one of the kinds above.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string &what)
{
    if (!condition)
        throw Error(kind, what);
}

/// Power ratio in dB to linear. -inf maps to exactly 0.
inline double db_to_linear(double db)
{
    if (std::isinf(db) && db < 0.0)
        return 0.0;
    return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

/// Ordered list of equally-shaped complex matrices, indexed by tap or subcarrier.
using MatrixList = std::vector<CMatrix>;

inline void require_same_shape(const MatrixList &list, const char *what)
{
    require(!list.empty(), ErrorKind::InvalidArgument, std::string(what) + " is empty");
    for (const auto &m : list)
        require(m.rows() == list.front().rows() && m.cols() == list.front().cols(),
                ErrorKind::InvalidArgument, std::string(what) + " matrices differ in shape");
}

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace fdbfc

#endif // FDBFC_COMMON_HPP
