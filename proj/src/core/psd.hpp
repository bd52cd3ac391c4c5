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

#ifndef FSANM_CORE_PSD_HPP
#define FSANM_CORE_PSD_HPP

#include <vector>

#include "core/signal_model.hpp"

namespace fsanm
{
    inline constexpr double default_psd_eps = 1e-8;

    struct EigenRange
    {
        double min = 0.0;
        double max = 0.0;
    };

    // Extreme eigenvalues of a Hermitian matrix (lower triangle is read).
    EigenRange eigen_range(const CMatrix &A);

    // min eigenvalue >= -eps * max(1, lambda_max)
    bool is_psd(const CMatrix &A, double eps = default_psd_eps);

    // Euclidean projection onto the Hermitian PSD cone by clipping negative eigenvalues.
    // Only the eigenpairs on one side of zero are computed (LAPACK zheevr with a value range),
    // picking the side that was smaller on the previous call. Holds LAPACK workspace for one
    // matrix size; not shareable across threads.
    class PsdProjector
    {
    public:
        explicit PsdProjector(int n);

        // In-place projection of the Hermitian matrix A (both triangles are overwritten).
        // Returns the number of positive eigenvalues kept.
        int project(CMatrix &A);

        int dim() const noexcept { return n_; }

    private:
        int n_;
        bool positive_side_ = true;
        CMatrix scratch_;
        CMatrix vectors_;
        std::vector<double> values_;
        std::vector<int> support_;
        std::vector<cdouble> work_;
        std::vector<double> rwork_;
        std::vector<int> iwork_;
    };
}

#endif
