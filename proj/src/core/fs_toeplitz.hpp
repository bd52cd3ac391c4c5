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

#ifndef FSANM_CORE_FS_TOEPLITZ_HPP
#define FSANM_CORE_FS_TOEPLITZ_HPP

#include <optional>
#include <span>
#include <vector>

#include "core/signal_model.hpp"

namespace fsanm
{
    // Coefficients of beta(f) = r_{+1} z^{-1} + r_0 + r_{-1} z, z = e^{i2pi f}.
    // beta vanishes at both band edges, is positive inside the band and negative outside.
    struct BetaCoeffs
    {
        cdouble r_plus1;
        cdouble r_0;
        cdouble r_minus1;
        FrequencyInterval interval;

        double operator()(double f) const;
    };

    BetaCoeffs beta_coeffs(const FrequencyInterval &interval);

    // Generating sequence t_{-(n-1)}, ..., t_{n-1} of an n x n Toeplitz matrix.
    class ToeplitzSeq
    {
    public:
        ToeplitzSeq(int n, std::vector<cdouble> t);
        static ToeplitzSeq zeros(int n);
        // t_k = sum_l c_l e^{i2pi k f_l}, i.e. Toep(t) = sum_l c_l a(n, f_l) a(n, f_l)^H.
        static ToeplitzSeq from_atoms(int n, std::span<const double> freqs, std::span<const double> coeffs);

        int n() const noexcept { return n_; }
        cdouble operator[](int lag) const { return t_[static_cast<std::size_t>(lag + n_ - 1)]; }
        cdouble &operator[](int lag) { return t_[static_cast<std::size_t>(lag + n_ - 1)]; }
        const std::vector<cdouble> &data() const noexcept { return t_; }

        bool hermitian(double tol = 0.0) const;

    private:
        int n_;
        std::vector<cdouble> t_;
    };

    // Bivariate sequence V = [v_{-(n_r-1)}, ..., v_{n_r-1}], v_j(k) for k in [-(n_t-1), n_t-1].
    // Stored as a (2n_t-1) x (2n_r-1) matrix with V(k + n_t - 1, j + n_r - 1) = v_j(k).
    class TwoLevelToeplitzSeq
    {
    public:
        TwoLevelToeplitzSeq(int n_t, int n_r, CMatrix V);
        static TwoLevelToeplitzSeq zeros(int n_t, int n_r);
        // v_j(k) = sum_l c_l e^{i2pi(k theta_l + j phi_l)}.
        static TwoLevelToeplitzSeq from_atoms(int n_t, int n_r, std::span<const double> tx_freqs,
                                              std::span<const double> rx_freqs, std::span<const double> coeffs);
        // One-level sequence viewed as a 2-level one with n_r = 1.
        static TwoLevelToeplitzSeq from_1d(const ToeplitzSeq &seq);

        int n_t() const noexcept { return n_t_; }
        int n_r() const noexcept { return n_r_; }
        cdouble operator()(int k, int j) const { return V_(k + n_t_ - 1, j + n_r_ - 1); }
        cdouble &operator()(int k, int j) { return V_(k + n_t_ - 1, j + n_r_ - 1); }
        const CMatrix &matrix() const noexcept { return V_; }

        ToeplitzSeq to_1d() const; // requires n_r == 1
        bool hermitian(double tol = 0.0) const;

    private:
        int n_t_;
        int n_r_;
        CMatrix V_;
    };

    // Structured matrix description shared by the assemblers and the solver. Rows/columns are
    // indexed (m, p) -> m * rx_count + p with m < tx_count (Tx element) and p < rx_count (Rx
    // element), matching vec(H) of an n_r x n_t channel and the atom a(n_t, theta) (x) a(n_r, phi).
    // Entry ((m,p),(n,q)) = sum_taps weight * V(m - n - dk, p - q - dj).
    struct StencilTap
    {
        cdouble weight;
        int dk;
        int dj;
    };

    struct Stencil
    {
        int tx_count;
        int rx_count;
        std::vector<StencilTap> taps;

        int dim() const noexcept { return tx_count * rx_count; }
    };

    Stencil toeplitz_stencil(int n_t, int n_r);
    Stencil beta_tx_stencil(int n_t, int n_r, const BetaCoeffs &coeffs); // T_beta1, (n_t-1) n_r
    Stencil beta_rx_stencil(int n_t, int n_r, const BetaCoeffs &coeffs); // T_beta2, n_t (n_r-1)

    CMatrix assemble(const Stencil &stencil, const TwoLevelToeplitzSeq &seq);

    // [T]_{mn} = t_{m-n}
    CMatrix toeplitz(const ToeplitzSeq &seq);
    // [T_beta]_{mn} = sum_{j=-1}^{1} r_j t_{m-n-j}, (n-1) x (n-1)
    CMatrix t_beta_1d(const ToeplitzSeq &seq, const BetaCoeffs &coeffs);
    CMatrix two_level_toeplitz(const TwoLevelToeplitzSeq &seq);
    CMatrix t_beta1_2d(const TwoLevelToeplitzSeq &seq, const BetaCoeffs &coeffs1);
    CMatrix t_beta2_2d(const TwoLevelToeplitzSeq &seq, const BetaCoeffs &coeffs2);

    // b(theta, phi) = a(n_t, theta) (x) a(n_r, phi)
    CVector kron_atom(int n_t, int n_r, double theta, double phi);

    struct Atom
    {
        double coefficient = 0.0;
        double tx_freq = 0.0;
        std::optional<double> rx_freq;
    };

    struct VandermondeDecomposition
    {
        std::vector<Atom> atoms;
        double residual_norm = 0.0; // relative Frobenius reassembly error

        bool within(const FrequencyInterval &tx_band, const std::optional<FrequencyInterval> &rx_band = {}) const;
    };

    struct RetrieveOptions
    {
        int model_order = 0;            // 0: use the numerical rank
        double rank_threshold = 1e-3;   // eigenvalues >= threshold * lambda_max count towards the rank
        double residual_tolerance = 1e-6;
    };

    // Frequency retrieval by matrix pencil (ESPRIT on the signal subspace) followed by a
    // least-squares fit of positive coefficients. Throws ErrorCode::model_order when the
    // order is inconsistent with the numerical rank or exceeds the uniqueness bound, and when
    // the reassembly residual exceeds the tolerance.
    VandermondeDecomposition vandermonde_retrieve(const ToeplitzSeq &seq, const RetrieveOptions &opts = {});

    // 2-level version: theta from the Tx marginal Toeplitz block, phi from the Rx marginal,
    // then pairing by a least-squares coefficient fit over all candidate pairs. Requires
    // order < min(n_t, n_r).
    VandermondeDecomposition vandermonde_retrieve(const TwoLevelToeplitzSeq &seq, const RetrieveOptions &opts = {});
}

#endif
