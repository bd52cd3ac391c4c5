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

#ifndef FSANM_CORE_CONIC_SOLVER_HPP
#define FSANM_CORE_CONIC_SOLVER_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "core/fs_toeplitz.hpp"

namespace fsanm
{
    enum class ConstraintMode
    {
        fs,   // block-arrow constraint plus the T_beta constraints
        plain // block-arrow constraint only (classic atomic norm)
    };

    struct SolverOptions
    {
        double rho = 1.0;
        bool adaptive_rho = true;
        int adapt_interval = 25;
        double adapt_factor = 2.0;
        double adapt_ratio = 3.0;
        int max_iter = 50000;
        double eps_abs = 1e-6;
        double eps_rel = 1e-4;
        // Over-relaxation parameter in (0, 2); 1 is plain ADMM.
        double relaxation = 1.0;
        bool record_trace = false;
    };

    // minimize 1/2 ||y - Phi h||^2 + mu * [ Tr(T(V)) / (2 n_t n_r) + t / 2 ]
    // s.t. [[T(V), h], [h^H, t]] >= 0 and (fs mode) T_beta1(V) >= 0, T_beta2(V) >= 0.
    // The 1D problem is the n_r = 1 case with only beta1.
    struct SdpProblem
    {
        CVector y;
        CMatrix Phi;
        double mu = 1.0;
        int n_t = 1;
        int n_r = 1;
        std::optional<BetaCoeffs> beta1; // constrains the Tx (outer) frequency
        std::optional<BetaCoeffs> beta2; // constrains the Rx (inner) frequency
        ConstraintMode mode = ConstraintMode::fs;
        // Atomic-norm evaluation: h is pinned to y, the data term is dropped and mu is ignored.
        bool fixed_h = false;
    };

    struct IterationRecord
    {
        int iteration = 0;
        double objective = 0.0;
        double primal_residual = 0.0;
        double dual_residual = 0.0;
        double rho = 0.0;
    };

    struct SdpSolution
    {
        CVector h_hat;
        TwoLevelToeplitzSeq toeplitz = TwoLevelToeplitzSeq::zeros(1, 1);
        double t_scalar = 0.0;
        double objective = 0.0;
        double norm_value = 0.0; // Tr(T)/(2N) + t/2 at the returned iterate
        double primal_residual = 0.0;
        double dual_residual = 0.0;
        double primal_tolerance = 0.0;
        double dual_tolerance = 0.0;
        int iterations = 0;
        bool converged = false;
        std::vector<IterationRecord> trace;

        // PSD copies held by the splitting (exactly PSD); the structured matrices built from
        // `toeplitz` lie within primal_residual of them in Frobenius norm.
        std::vector<CMatrix> cone_blocks;
    };

    SdpSolution solve(const SdpProblem &problem, const SolverOptions &opts = {});

    // Builds the structured blocks [[T(V), h], [h^H, t]], T_beta1, T_beta2 at a solution, in the
    // order the splitting uses them.
    std::vector<CMatrix> structured_blocks(const SdpProblem &problem, const SdpSolution &solution);

    // Atomic norm of h over atoms a(n_t, theta) (x) a(n_r, phi) with theta in tx_band and phi in
    // rx_band (fs mode) or unrestricted (plain mode). Throws ErrorCode::not_converged when the
    // solver does not meet its tolerances.
    double atomic_norm(const CVector &h, int n_t, int n_r, const std::optional<FrequencyInterval> &tx_band,
                       const std::optional<FrequencyInterval> &rx_band, ConstraintMode mode,
                       const SolverOptions &opts = {});

    // Default regularization weight sigma * sqrt(N log N) with N = n_t * n_r.
    double default_mu(double noise_var, int n_t, int n_r);

    // iteration,objective,primal_residual,dual_residual,rho
    void write_trace_csv(std::ostream &os, const std::vector<IterationRecord> &trace);
}

#endif
