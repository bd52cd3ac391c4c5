// SPDX-License-Identifier: Apache-2.0
//
// fsanm - frequency-selective atomic norm channel estimation
// Copyright (C) 2026 fsanm developers
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

#include "core/psd.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include <lapacke.h>

#include "core/error.hpp"

namespace fsanm
{
    EigenRange eigen_range(const CMatrix &A)
    {
        require(A.rows() == A.cols(), ErrorCode::dimension_mismatch, "eigen_range: matrix must be square");
        if (A.size() == 0)
            return {};
        Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
        return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
    }

    bool is_psd(const CMatrix &A, double eps)
    {
        const EigenRange r = eigen_range(A);
        return r.min >= -eps * std::max(1.0, r.max);
    }

    PsdProjector::PsdProjector(int n)
        : n_(n), scratch_(n, n), vectors_(n, n), values_(static_cast<std::size_t>(std::max(n, 1))),
          support_(static_cast<std::size_t>(2 * std::max(n, 1)))
    {
        require(n >= 1, ErrorCode::invalid_argument, "PsdProjector: dimension must be positive");
        lapack_complex_double wq{};
        double rwq = 0.0;
        lapack_int iwq = 0;
        lapack_int found = 0;
        const lapack_int info = LAPACKE_zheevr_work(
            LAPACK_COL_MAJOR, 'V', 'V', 'L', n, reinterpret_cast<lapack_complex_double *>(scratch_.data()), n, 0.0,
            1.0, 0, 0, 0.0, &found, values_.data(), reinterpret_cast<lapack_complex_double *>(vectors_.data()), n,
            support_.data(), &wq, -1, &rwq, -1, &iwq, -1);
        require(info == 0, ErrorCode::invalid_argument, "PsdProjector: workspace query failed");
        work_.resize(static_cast<std::size_t>(reinterpret_cast<const double *>(&wq)[0]) + 1);
        rwork_.resize(static_cast<std::size_t>(rwq) + 1);
        iwork_.resize(static_cast<std::size_t>(iwq) + 1);
    }

    int PsdProjector::project(CMatrix &A)
    {
        require(A.rows() == n_ && A.cols() == n_, ErrorCode::dimension_mismatch, "PsdProjector: size mismatch");
        constexpr double huge = std::numeric_limits<double>::max();
        scratch_ = A;
        // Range is half-open (vl, vu]: positive side (0, inf), negative side (-inf, 0].
        const double vl = positive_side_ ? 0.0 : -huge;
        const double vu = positive_side_ ? huge : 0.0;
        lapack_int found = 0;
        const lapack_int info = LAPACKE_zheevr_work(
            LAPACK_COL_MAJOR, 'V', 'V', 'L', n_, reinterpret_cast<lapack_complex_double *>(scratch_.data()), n_, vl,
            vu, 0, 0, 0.0, &found, values_.data(), reinterpret_cast<lapack_complex_double *>(vectors_.data()), n_,
            support_.data(), reinterpret_cast<lapack_complex_double *>(work_.data()),
            static_cast<lapack_int>(work_.size()), rwork_.data(), static_cast<lapack_int>(rwork_.size()),
            iwork_.data(), static_cast<lapack_int>(iwork_.size()));
        require(info == 0, ErrorCode::not_converged, "PsdProjector: eigendecomposition failed (info " +
                                                         std::to_string(info) + ")");

        const int k = static_cast<int>(found);
        const int n_pos = positive_side_ ? k : n_ - k;
        auto V = vectors_.leftCols(k);
        Eigen::Map<const Eigen::VectorXd> lam(values_.data(), k);
        if (positive_side_)
        {
            if (k == 0)
                A.setZero();
            else
                A.noalias() = (V * lam.cast<cdouble>().asDiagonal()) * V.adjoint();
        }
        else if (k > 0)
        {
            A.noalias() -= (V * lam.cast<cdouble>().asDiagonal()) * V.adjoint();
            A = (0.5 * (A + A.adjoint())).eval();
        }
        positive_side_ = 2 * n_pos <= n_;
        return n_pos;
    }
}
