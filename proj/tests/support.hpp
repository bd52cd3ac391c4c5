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
//
// Small generators and independent reference computations shared by the tests.

#ifndef FSANM_TESTS_SUPPORT_HPP
#define FSANM_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace fsanm::test
{
    using cd = std::complex<double>;
    using CMat = Eigen::MatrixXcd;
    using CVec = Eigen::VectorXcd;

    class Gen
    {
    public:
        explicit Gen(std::uint64_t seed) : rng_(seed) {}

        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
        int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
        double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
        cd complex_normal() { return {normal() * std::sqrt(0.5), normal() * std::sqrt(0.5)}; }
        cd unit_phase() { return std::polar(1.0, uniform(-std::numbers::pi, std::numbers::pi)); }

        CMat matrix(int rows, int cols)
        {
            CMat M(rows, cols);
            for (int j = 0; j < cols; ++j)
                for (int i = 0; i < rows; ++i)
                    M(i, j) = complex_normal();
            return M;
        }

        CMat hermitian(int n)
        {
            const CMat A = matrix(n, n);
            return 0.5 * (A + A.adjoint());
        }

        // Band [lo, hi] with width at least min_width.
        std::pair<double, double> band(double min_width = 0.05, double max_width = 0.9)
        {
            const double w = uniform(min_width, max_width);
            const double lo = uniform(-0.5, 0.5 - w);
            return {lo, lo + w};
        }

        std::mt19937_64 &engine() { return rng_; }

    private:
        std::mt19937_64 rng_;
    };

    // a(n, f) written out entry by entry.
    inline CVec ref_steering(int n, double f)
    {
        CVec a(n);
        for (int k = 0; k < n; ++k)
            a[k] = std::polar(1.0, 2.0 * std::numbers::pi * k * f);
        return a;
    }

    // Kronecker product from the definition.
    inline CVec ref_kron(const CVec &a, const CVec &b)
    {
        CVec out(a.size() * b.size());
        for (Eigen::Index i = 0; i < a.size(); ++i)
            for (Eigen::Index j = 0; j < b.size(); ++j)
                out[i * b.size() + j] = a[i] * b[j];
        return out;
    }

    inline double min_eig(const CMat &A)
    {
        return Eigen::SelfAdjointEigenSolver<CMat>(A, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    }

    inline double max_eig(const CMat &A)
    {
        return Eigen::SelfAdjointEigenSolver<CMat>(A, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    }

    // Band polynomial evaluated directly: 2 cos(2 pi f - pi (lo + hi)) - 2 cos(pi (hi - lo)).
    inline double ref_beta(double lo, double hi, double f)
    {
        using std::numbers::pi;
        return 2.0 * std::cos(2.0 * pi * f - pi * (lo + hi)) - 2.0 * std::cos(pi * (hi - lo));
    }

    inline double nmse_ref(const CMat &est, const CMat &truth)
    {
        return 10.0 * std::log10((est - truth).squaredNorm() / truth.squaredNorm());
    }
}

#endif
