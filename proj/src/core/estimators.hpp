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

#ifndef FSANM_CORE_ESTIMATORS_HPP
#define FSANM_CORE_ESTIMATORS_HPP

#include <optional>
#include <vector>

#include "core/conic_solver.hpp"
#include "core/fs_toeplitz.hpp"
#include "core/signal_model.hpp"

namespace fsanm
{
    // Column-major vectorization, vec(H) for an n_r x n_t channel. Entry m * n_r + p holds
    // H(p, m), so vec(a(n_r, phi) a(n_t, theta)^H) = a*(n_t, theta) (x) a(n_r, phi).
    CVector vec(const CMatrix &H);
    CMatrix unvec(const CVector &h, Eigen::Index rows, Eigen::Index cols);

    // Normalized squared error 10 log10(||H_hat - H||_F^2 / ||H||_F^2). An exact estimate is
    // reported as nmse_floor_db.
    inline constexpr double nmse_floor_db = -300.0;
    double nmse_db(const CMatrix &H_hat, const CMatrix &H_true);

    struct SolverSummary
    {
        int iterations = 0;
        bool converged = false;
        double objective = 0.0;
        double primal_residual = 0.0;
        double dual_residual = 0.0;
        double mu = 0.0;
    };

    struct OmpTrace
    {
        std::vector<int> support;          // selected dictionary columns, in selection order
        std::vector<double> correlations;  // normalized correlation of each selected column
        std::vector<double> residual_norms; // residual after each refit
        bool pinv_fallback = false;        // a selected sub-dictionary was rank deficient
    };

    struct EstimateResult
    {
        CMatrix H_hat; // n_r x n_t (a single row in 1D)
        CVector h_hat; // vec(H_hat)
        std::optional<double> nmse_db;
        std::optional<VandermondeDecomposition> retrieved; // physical (theta, phi)
        std::optional<SolverSummary> solver;
        std::optional<OmpTrace> omp;
    };

    struct EstimatorOptions
    {
        std::optional<double> mu; // overrides the default rule
        double mu_scale = 1.0;    // multiplies the default rule sigma sqrt(N log N)
        SolverOptions solver;
        bool retrieve = false;    // attach a Vandermonde decomposition of the solution
        RetrieveOptions retrieve_options{0, 1e-3, 1e-1};
        std::optional<CMatrix> truth; // fills nmse_db when given
    };

    // FS-ANM with one receive antenna. The solver works on the conjugated channel
    // h = H^H = sum_l conj(alpha_l) a(n_t, theta_l) seen through y = conj(Y)^T = X^H F^H h + n;
    // the result is conjugated back so H_hat estimates H itself.
    EstimateResult estimate_fs_anm_1d(const MeasurementSet &m, const FrequencyInterval &tx_band,
                                      const EstimatorOptions &opts = {});

    // FS-ANM for n_t, n_r > 1 on vec(Y) = (X^T F^T (x) I) vec(H) + vec(N). The atoms of vec(H)
    // carry a*(n_t, theta) = a(n_t, -theta), so the Tx constraint uses the mirrored band.
    EstimateResult estimate_fs_anm_2d(const MeasurementSet &m, const FrequencyInterval &tx_band,
                                      const FrequencyInterval &rx_band, const EstimatorOptions &opts = {});

    // Classic atomic norm estimate (no band constraints); 1D or 2D from the measurement shape.
    EstimateResult estimate_anm_plain(const MeasurementSet &m, const EstimatorOptions &opts = {});

    // Uniform frequency grid dictionary. In 1D (n_r == 1) the columns are a(n_t, g) in the
    // conjugated-channel domain; in 2D they are a*(n_t, g_t) (x) a(n_r, g_r) in the vec(H)
    // domain. Columns are normalized to unit norm.
    struct GridDictionary
    {
        int n_t = 0;
        int n_r = 0;
        int grid_tx = 0;
        int grid_rx = 1;
        std::vector<double> tx_freqs; // per column
        std::vector<double> rx_freqs; // per column
        CMatrix atoms;
    };

    GridDictionary make_grid_dictionary(int n_t, int n_r, int grid_tx, int grid_rx = 1);

    // Grid sizes G_t = round(mult * n_t) and, in 2D, G_r = round(G_t * n_r / n_t).
    GridDictionary grid_for_multiplier(int n_t, int n_r, double mult);

    // Orthogonal matching pursuit with a known number of paths and least-squares refit.
    EstimateResult estimate_omp(const MeasurementSet &m, const GridDictionary &dict, int sparsity,
                                const std::optional<CMatrix> &truth = std::nullopt);

    // Effective linear model y = Phi h used by every estimator for this measurement.
    struct LinearModel
    {
        CVector y;
        CMatrix Phi;
        bool two_dim = false;
    };

    LinearModel linear_model(const MeasurementSet &m);
}

#endif
