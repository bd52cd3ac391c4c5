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

#include <doctest.h>

#include "core/error.hpp"
#include "core/psd.hpp"
#include "support.hpp"

using namespace fsanm;
using namespace fsanm::test;

namespace
{
    // Projection by a full eigendecomposition with negative eigenvalues clipped.
    CMat ref_project(const CMat &A)
    {
        Eigen::SelfAdjointEigenSolver<CMat> es(A);
        const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        return es.eigenvectors() * lam.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
    }
}

TEST_CASE("projection matches a clipped eigendecomposition")
{
    Gen g(1);
    for (int n : {1, 2, 5, 17, 40})
    {
        PsdProjector proj(n);
        // alternate between mostly-positive and mostly-negative spectra so both
        // one-sided paths are exercised, in both orders
        for (int rep = 0; rep < 12; ++rep)
        {
            const double shift = (rep % 3 == 0) ? 2.0 : (rep % 3 == 1 ? -2.0 : 0.0);
            const CMat A = g.hermitian(n) + shift * CMat::Identity(n, n);
            CMat P = A;
            const int kept = proj.project(P);
            const CMat R = ref_project(A);
            CHECK((P - R).norm() <= 1e-9 * (1.0 + A.norm()));
            CHECK((P - P.adjoint()).norm() < 1e-12 * (1.0 + A.norm()));

            int positive = 0;
            Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
            for (Eigen::Index i = 0; i < n; ++i)
                positive += es.eigenvalues()[i] > 0.0;
            CHECK(kept == positive);
        }
    }
}

TEST_CASE("projection is idempotent and leaves PSD input alone")
{
    Gen g(2);
    PsdProjector proj(12);
    const CMat B = g.matrix(12, 5);
    const CMat A = B * B.adjoint(); // rank 5, PSD
    CMat P = A;
    proj.project(P);
    CHECK((P - A).norm() < 1e-10 * A.norm());
    CMat Q = P;
    proj.project(Q);
    CHECK((Q - P).norm() < 1e-10 * A.norm());

    CMat N = -A;
    proj.project(N);
    CHECK(N.norm() < 1e-10 * A.norm());
}

TEST_CASE("projection dimension checks")
{
    CHECK_THROWS_AS(PsdProjector(0), Error);
    PsdProjector proj(3);
    CMat A = CMat::Identity(4, 4);
    CHECK_THROWS_AS(proj.project(A), Error);
}

TEST_CASE("psd predicate and eigen range")
{
    Gen g(3);
    const CMat B = g.matrix(6, 3);
    const CMat A = B * B.adjoint();
    CHECK(is_psd(A));
    CHECK_FALSE(is_psd(-A));
    const EigenRange r = eigen_range(A);
    CHECK(r.min == doctest::Approx(min_eig(A)).epsilon(1e-9));
    CHECK(r.max == doctest::Approx(max_eig(A)).epsilon(1e-9));
    // tolerance is relative to the largest eigenvalue
    CMat C = A;
    C -= 1e-10 * r.max * CMat::Identity(6, 6);
    CHECK(is_psd(C, 1e-8));
    CHECK_FALSE(is_psd(C, 1e-12));
}
