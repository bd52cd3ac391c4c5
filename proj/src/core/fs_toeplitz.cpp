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

#include "core/fs_toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace fsanm
{
    namespace
    {
        constexpr double pi = std::numbers::pi;

        cdouble expi(double cycles) { return std::polar(1.0, 2.0 * pi * (cycles - std::floor(cycles))); }

        // Signal-subspace ESPRIT on a Hermitian Toeplitz matrix; returns `order` frequencies.
        std::vector<double> esprit(const CMatrix &T, int order)
        {
            const Eigen::Index n = T.rows();
            Eigen::SelfAdjointEigenSolver<CMatrix> es(T);
            const CMatrix U = es.eigenvectors().rightCols(order);
            const CMatrix U1 = U.topRows(n - 1);
            const CMatrix U2 = U.bottomRows(n - 1);
            const CMatrix psi = U1.colPivHouseholderQr().solve(U2);
            Eigen::ComplexEigenSolver<CMatrix> ces(psi, false);
            std::vector<double> freqs;
            freqs.reserve(static_cast<std::size_t>(order));
            for (Eigen::Index k = 0; k < ces.eigenvalues().size(); ++k)
                freqs.push_back(std::arg(ces.eigenvalues()[k]) / (2.0 * pi));
            std::sort(freqs.begin(), freqs.end());
            return freqs;
        }

        int numerical_rank(const CMatrix &T, double threshold)
        {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(T, Eigen::EigenvaluesOnly);
            const double lmax = es.eigenvalues().maxCoeff();
            if (!(lmax > 0.0))
                return 0;
            return static_cast<int>((es.eigenvalues().array() >= threshold * lmax).count());
        }

        // Weighted least squares for real coefficients c in V(k,j) ~ sum_a c_a e^{i2pi(k tx_a + j rx_a)};
        // the weight (n_t-|k|)(n_r-|j|) is the multiplicity of each lag in the assembled matrix.
        Eigen::VectorXd fit_coefficients(const TwoLevelToeplitzSeq &seq, const std::vector<double> &tx,
                                         const std::vector<double> &rx)
        {
            const int n_t = seq.n_t();
            const int n_r = seq.n_r();
            const Eigen::Index n_lags = static_cast<Eigen::Index>((2 * n_t - 1) * (2 * n_r - 1));
            const Eigen::Index r = static_cast<Eigen::Index>(tx.size());
            Eigen::MatrixXd A(2 * n_lags, r);
            Eigen::VectorXd b(2 * n_lags);
            Eigen::Index row = 0;
            for (int j = -(n_r - 1); j <= n_r - 1; ++j)
                for (int k = -(n_t - 1); k <= n_t - 1; ++k)
                {
                    const double w = std::sqrt(static_cast<double>((n_t - std::abs(k)) * (n_r - std::abs(j))));
                    for (Eigen::Index a = 0; a < r; ++a)
                    {
                        const cdouble e = expi(k * tx[static_cast<std::size_t>(a)] + j * rx[static_cast<std::size_t>(a)]);
                        A(row, a) = w * e.real();
                        A(row + 1, a) = w * e.imag();
                    }
                    b(row) = w * seq(k, j).real();
                    b(row + 1) = w * seq(k, j).imag();
                    row += 2;
                }
            return A.colPivHouseholderQr().solve(b);
        }

        double relative_residual(const CMatrix &T, const CMatrix &R)
        {
            const double denom = T.norm();
            return denom > 0.0 ? (T - R).norm() / denom : (T - R).norm();
        }
    }

    double BetaCoeffs::operator()(double f) const
    {
        const cdouble z = expi(f);
        return (r_plus1 / z + r_0 + r_minus1 * z).real();
    }

    BetaCoeffs beta_coeffs(const FrequencyInterval &interval)
    {
        const double lo = interval.lo();
        const double hi = interval.hi();
        // sgn(hi - lo) = +1: FrequencyInterval guarantees hi > lo.
        const cdouble r1 = std::polar(1.0, pi * (lo + hi));
        const cdouble r0 = -2.0 * std::cos(pi * (hi - lo));
        return {r1, r0, std::conj(r1), interval};
    }

    ToeplitzSeq::ToeplitzSeq(int n, std::vector<cdouble> t) : n_(n), t_(std::move(t))
    {
        require(n >= 1, ErrorCode::invalid_argument, "ToeplitzSeq: n must be >= 1");
        require(t_.size() == static_cast<std::size_t>(2 * n - 1), ErrorCode::dimension_mismatch,
                "ToeplitzSeq: expected 2n-1 = " + std::to_string(2 * n - 1) + " entries, got " +
                    std::to_string(t_.size()));
    }

    ToeplitzSeq ToeplitzSeq::zeros(int n)
    {
        require(n >= 1, ErrorCode::invalid_argument, "ToeplitzSeq: n must be >= 1");
        return {n, std::vector<cdouble>(static_cast<std::size_t>(2 * n - 1))};
    }

    ToeplitzSeq ToeplitzSeq::from_atoms(int n, std::span<const double> freqs, std::span<const double> coeffs)
    {
        require(freqs.size() == coeffs.size(), ErrorCode::dimension_mismatch, "from_atoms: size mismatch");
        ToeplitzSeq seq = zeros(n);
        for (int k = -(n - 1); k <= n - 1; ++k)
            for (std::size_t l = 0; l < freqs.size(); ++l)
                seq[k] += coeffs[l] * expi(k * freqs[l]);
        return seq;
    }

    bool ToeplitzSeq::hermitian(double tol) const
    {
        for (int k = 0; k < n_; ++k)
            if (std::abs((*this)[-k] - std::conj((*this)[k])) > tol)
                return false;
        return true;
    }

    TwoLevelToeplitzSeq::TwoLevelToeplitzSeq(int n_t, int n_r, CMatrix V) : n_t_(n_t), n_r_(n_r), V_(std::move(V))
    {
        require(n_t >= 1 && n_r >= 1, ErrorCode::invalid_argument, "TwoLevelToeplitzSeq: dimensions must be >= 1");
        require(V_.rows() == 2 * n_t - 1 && V_.cols() == 2 * n_r - 1, ErrorCode::dimension_mismatch,
                "TwoLevelToeplitzSeq: V must be (2n_t-1) x (2n_r-1)");
    }

    TwoLevelToeplitzSeq TwoLevelToeplitzSeq::zeros(int n_t, int n_r)
    {
        require(n_t >= 1 && n_r >= 1, ErrorCode::invalid_argument, "TwoLevelToeplitzSeq: dimensions must be >= 1");
        return {n_t, n_r, CMatrix::Zero(2 * n_t - 1, 2 * n_r - 1)};
    }

    TwoLevelToeplitzSeq TwoLevelToeplitzSeq::from_atoms(int n_t, int n_r, std::span<const double> tx_freqs,
                                                        std::span<const double> rx_freqs,
                                                        std::span<const double> coeffs)
    {
        require(tx_freqs.size() == coeffs.size() && rx_freqs.size() == coeffs.size(), ErrorCode::dimension_mismatch,
                "from_atoms: size mismatch");
        TwoLevelToeplitzSeq seq = zeros(n_t, n_r);
        for (int j = -(n_r - 1); j <= n_r - 1; ++j)
            for (int k = -(n_t - 1); k <= n_t - 1; ++k)
                for (std::size_t l = 0; l < coeffs.size(); ++l)
                    seq(k, j) += coeffs[l] * expi(k * tx_freqs[l] + j * rx_freqs[l]);
        return seq;
    }

    TwoLevelToeplitzSeq TwoLevelToeplitzSeq::from_1d(const ToeplitzSeq &seq)
    {
        CMatrix V(2 * seq.n() - 1, 1);
        for (std::size_t i = 0; i < seq.data().size(); ++i)
            V(static_cast<Eigen::Index>(i), 0) = seq.data()[i];
        return {seq.n(), 1, std::move(V)};
    }

    ToeplitzSeq TwoLevelToeplitzSeq::to_1d() const
    {
        require(n_r_ == 1, ErrorCode::dimension_mismatch, "to_1d: sequence is two-level");
        std::vector<cdouble> t(V_.col(0).data(), V_.col(0).data() + V_.rows());
        return {n_t_, std::move(t)};
    }

    bool TwoLevelToeplitzSeq::hermitian(double tol) const
    {
        for (int j = -(n_r_ - 1); j <= n_r_ - 1; ++j)
            for (int k = -(n_t_ - 1); k <= n_t_ - 1; ++k)
                if (std::abs((*this)(-k, -j) - std::conj((*this)(k, j))) > tol)
                    return false;
        return true;
    }

    Stencil toeplitz_stencil(int n_t, int n_r)
    {
        return {n_t, n_r, {{1.0, 0, 0}}};
    }

    Stencil beta_tx_stencil(int n_t, int n_r, const BetaCoeffs &c)
    {
        require(n_t >= 2, ErrorCode::invalid_argument, "T_beta (Tx): need n_t >= 2");
        return {n_t - 1, n_r, {{c.r_plus1, 1, 0}, {c.r_0, 0, 0}, {c.r_minus1, -1, 0}}};
    }

    Stencil beta_rx_stencil(int n_t, int n_r, const BetaCoeffs &c)
    {
        require(n_r >= 2, ErrorCode::invalid_argument, "T_beta (Rx): need n_r >= 2");
        return {n_t, n_r - 1, {{c.r_plus1, 0, 1}, {c.r_0, 0, 0}, {c.r_minus1, 0, -1}}};
    }

    CMatrix assemble(const Stencil &s, const TwoLevelToeplitzSeq &seq)
    {
        require(s.tx_count <= seq.n_t() && s.rx_count <= seq.n_r(), ErrorCode::dimension_mismatch,
                "assemble: stencil larger than the sequence");
        const int d = s.dim();
        CMatrix M(d, d);
        for (int m = 0; m < s.tx_count; ++m)
            for (int p = 0; p < s.rx_count; ++p)
                for (int n = 0; n < s.tx_count; ++n)
                    for (int q = 0; q < s.rx_count; ++q)
                    {
                        cdouble v = 0.0;
                        for (const auto &tap : s.taps)
                            v += tap.weight * seq(m - n - tap.dk, p - q - tap.dj);
                        M(m * s.rx_count + p, n * s.rx_count + q) = v;
                    }
        return M;
    }

    CMatrix toeplitz(const ToeplitzSeq &seq)
    {
        return assemble(toeplitz_stencil(seq.n(), 1), TwoLevelToeplitzSeq::from_1d(seq));
    }

    CMatrix t_beta_1d(const ToeplitzSeq &seq, const BetaCoeffs &coeffs)
    {
        return assemble(beta_tx_stencil(seq.n(), 1, coeffs), TwoLevelToeplitzSeq::from_1d(seq));
    }

    CMatrix two_level_toeplitz(const TwoLevelToeplitzSeq &seq)
    {
        return assemble(toeplitz_stencil(seq.n_t(), seq.n_r()), seq);
    }

    CMatrix t_beta1_2d(const TwoLevelToeplitzSeq &seq, const BetaCoeffs &coeffs1)
    {
        return assemble(beta_tx_stencil(seq.n_t(), seq.n_r(), coeffs1), seq);
    }

    CMatrix t_beta2_2d(const TwoLevelToeplitzSeq &seq, const BetaCoeffs &coeffs2)
    {
        return assemble(beta_rx_stencil(seq.n_t(), seq.n_r(), coeffs2), seq);
    }

    CVector kron_atom(int n_t, int n_r, double theta, double phi)
    {
        const CVector at = steering(n_t, theta);
        const CVector ar = steering(n_r, phi);
        CVector b(n_t * n_r);
        for (int m = 0; m < n_t; ++m)
            b.segment(m * n_r, n_r) = at[m] * ar;
        return b;
    }

    bool VandermondeDecomposition::within(const FrequencyInterval &tx_band,
                                          const std::optional<FrequencyInterval> &rx_band) const
    {
        for (const auto &a : atoms)
        {
            if (!tx_band.contains(a.tx_freq))
                return false;
            if (rx_band && a.rx_freq && !rx_band->contains(*a.rx_freq))
                return false;
        }
        return true;
    }

    VandermondeDecomposition vandermonde_retrieve(const ToeplitzSeq &seq, const RetrieveOptions &opts)
    {
        const int n = seq.n();
        require(seq.hermitian(1e-9 * (1.0 + std::abs(seq[0]))), ErrorCode::invalid_argument,
                "vandermonde_retrieve: sequence is not Hermitian");
        const CMatrix T = toeplitz(seq);
        const int rank = numerical_rank(T, opts.rank_threshold);
        const int order = opts.model_order > 0 ? opts.model_order : rank;
        require(order >= 1, ErrorCode::model_order, "vandermonde_retrieve: zero matrix has no atoms");
        require(order == rank, ErrorCode::model_order,
                "vandermonde_retrieve: model order " + std::to_string(order) + " but numerical rank " +
                    std::to_string(rank));
        require(order <= n - 1, ErrorCode::model_order,
                "vandermonde_retrieve: rank " + std::to_string(order) + " has no unique decomposition for n = " +
                    std::to_string(n));

        const std::vector<double> freqs = esprit(T, order);
        const std::vector<double> zeros(freqs.size(), 0.0);
        const Eigen::VectorXd c = fit_coefficients(TwoLevelToeplitzSeq::from_1d(seq), freqs, zeros);

        VandermondeDecomposition out;
        CMatrix R = CMatrix::Zero(n, n);
        for (std::size_t k = 0; k < freqs.size(); ++k)
        {
            out.atoms.push_back({c[static_cast<Eigen::Index>(k)], freqs[k], std::nullopt});
            const CVector a = steering(n, freqs[k]);
            R.noalias() += c[static_cast<Eigen::Index>(k)] * a * a.adjoint();
        }
        out.residual_norm = relative_residual(T, R);
        require(c.minCoeff() > 0.0, ErrorCode::model_order, "vandermonde_retrieve: non-positive coefficient");
        require(out.residual_norm <= opts.residual_tolerance, ErrorCode::model_order,
                "vandermonde_retrieve: reassembly residual " + std::to_string(out.residual_norm) +
                    " exceeds tolerance");
        return out;
    }

    VandermondeDecomposition vandermonde_retrieve(const TwoLevelToeplitzSeq &seq, const RetrieveOptions &opts)
    {
        const int n_t = seq.n_t();
        const int n_r = seq.n_r();
        if (n_r == 1)
            return vandermonde_retrieve(seq.to_1d(), opts);
        require(seq.hermitian(1e-9 * (1.0 + std::abs(seq(0, 0)))), ErrorCode::invalid_argument,
                "vandermonde_retrieve: sequence is not Hermitian");

        const CMatrix T = two_level_toeplitz(seq);
        const int rank = numerical_rank(T, opts.rank_threshold);
        const int order = opts.model_order > 0 ? opts.model_order : rank;
        require(order >= 1, ErrorCode::model_order, "vandermonde_retrieve: zero matrix has no atoms");
        require(order == rank, ErrorCode::model_order,
                "vandermonde_retrieve: model order " + std::to_string(order) + " but numerical rank " +
                    std::to_string(rank));
        require(order < std::min(n_t, n_r), ErrorCode::model_order,
                "vandermonde_retrieve: rank " + std::to_string(order) + " not below min(n_t, n_r)");

        std::vector<cdouble> tx_marginal(static_cast<std::size_t>(2 * n_t - 1));
        for (int k = -(n_t - 1); k <= n_t - 1; ++k)
            tx_marginal[static_cast<std::size_t>(k + n_t - 1)] = seq(k, 0);
        std::vector<cdouble> rx_marginal(static_cast<std::size_t>(2 * n_r - 1));
        for (int j = -(n_r - 1); j <= n_r - 1; ++j)
            rx_marginal[static_cast<std::size_t>(j + n_r - 1)] = seq(0, j);

        const std::vector<double> thetas = esprit(toeplitz(ToeplitzSeq(n_t, tx_marginal)), order);
        const std::vector<double> phis = esprit(toeplitz(ToeplitzSeq(n_r, rx_marginal)), order);

        // Fit every candidate pair, then keep the strongest one-to-one pairing.
        std::vector<double> grid_tx;
        std::vector<double> grid_rx;
        for (double th : thetas)
            for (double ph : phis)
            {
                grid_tx.push_back(th);
                grid_rx.push_back(ph);
            }
        const Eigen::VectorXd c_all = fit_coefficients(seq, grid_tx, grid_rx);

        std::vector<bool> used_tx(thetas.size(), false);
        std::vector<bool> used_rx(phis.size(), false);
        std::vector<double> sel_tx;
        std::vector<double> sel_rx;
        for (int pick = 0; pick < order; ++pick)
        {
            Eigen::Index best = -1;
            for (Eigen::Index i = 0; i < c_all.size(); ++i)
            {
                const auto a = static_cast<std::size_t>(i) / phis.size();
                const auto b = static_cast<std::size_t>(i) % phis.size();
                if (used_tx[a] || used_rx[b])
                    continue;
                if (best < 0 || c_all[i] > c_all[best])
                    best = i;
            }
            const auto a = static_cast<std::size_t>(best) / phis.size();
            const auto b = static_cast<std::size_t>(best) % phis.size();
            used_tx[a] = used_rx[b] = true;
            sel_tx.push_back(thetas[a]);
            sel_rx.push_back(phis[b]);
        }
        const Eigen::VectorXd c = fit_coefficients(seq, sel_tx, sel_rx);

        VandermondeDecomposition out;
        CMatrix R = CMatrix::Zero(n_t * n_r, n_t * n_r);
        for (std::size_t k = 0; k < sel_tx.size(); ++k)
        {
            out.atoms.push_back({c[static_cast<Eigen::Index>(k)], sel_tx[k], sel_rx[k]});
            const CVector b = kron_atom(n_t, n_r, sel_tx[k], sel_rx[k]);
            R.noalias() += c[static_cast<Eigen::Index>(k)] * b * b.adjoint();
        }
        out.residual_norm = relative_residual(T, R);
        require(c.minCoeff() > 0.0, ErrorCode::model_order, "vandermonde_retrieve: non-positive coefficient");
        require(out.residual_norm <= opts.residual_tolerance, ErrorCode::model_order,
                "vandermonde_retrieve: reassembly residual " + std::to_string(out.residual_norm) +
                    " exceeds tolerance");
        return out;
    }
}
