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

#include "core/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace fsanm
{
    namespace
    {
        double wrap_frequency(double f)
        {
            f -= std::round(f);
            return f == -0.5 ? 0.5 : f;
        }

        // Maps a solution back to the physical channel and fills the shared result fields.
        EstimateResult finish(const MeasurementSet &m, const LinearModel &lm, const CVector &h_tilde,
                              const std::optional<CMatrix> &truth)
        {
            EstimateResult out;
            if (lm.two_dim)
            {
                out.h_hat = h_tilde;
                out.H_hat = unvec(h_tilde, m.n_r(), m.n_t());
            }
            else
            {
                out.H_hat = h_tilde.adjoint();
                out.h_hat = vec(out.H_hat);
            }
            if (truth)
                out.nmse_db = nmse_db(out.H_hat, *truth);
            return out;
        }

        double resolve_mu(const MeasurementSet &m, const EstimatorOptions &opts)
        {
            if (opts.mu)
            {
                require(*opts.mu > 0.0, ErrorCode::invalid_argument, "estimator: mu must be > 0");
                return *opts.mu;
            }
            const double mu = opts.mu_scale * default_mu(m.noise_var, static_cast<int>(m.n_t()),
                                                         static_cast<int>(m.n_r()));
            require(mu > 0.0, ErrorCode::invalid_argument,
                    "estimator: default mu is zero for noiseless data; pass mu explicitly");
            return mu;
        }

        EstimateResult run_sdp(const MeasurementSet &m, ConstraintMode mode, const std::optional<BetaCoeffs> &beta1,
                               const std::optional<BetaCoeffs> &beta2, const EstimatorOptions &opts)
        {
            const LinearModel lm = linear_model(m);
            SdpProblem pb;
            pb.y = lm.y;
            pb.Phi = lm.Phi;
            pb.mu = resolve_mu(m, opts);
            pb.n_t = static_cast<int>(m.n_t());
            pb.n_r = static_cast<int>(m.n_r());
            pb.mode = mode;
            pb.beta1 = beta1;
            pb.beta2 = beta2;

            const SdpSolution sol = solve(pb, opts.solver);
            EstimateResult out = finish(m, lm, sol.h_hat, opts.truth);
            out.solver = SolverSummary{sol.iterations, sol.converged, sol.objective, sol.primal_residual,
                                       sol.dual_residual, pb.mu};
            if (opts.retrieve)
            {
                try
                {
                    VandermondeDecomposition d = vandermonde_retrieve(sol.toeplitz, opts.retrieve_options);
                    // The 2D solver sees a*(n_t, theta): undo the Tx mirror.
                    if (lm.two_dim)
                        for (auto &a : d.atoms)
                            a.tx_freq = wrap_frequency(-a.tx_freq);
                    out.retrieved = std::move(d);
                }
                catch (const Error &)
                {
                    // Retrieval is a diagnostic; an ill-conditioned solution just has none.
                }
            }
            return out;
        }
    }

    CVector vec(const CMatrix &H)
    {
        return Eigen::Map<const CVector>(H.data(), H.size());
    }

    CMatrix unvec(const CVector &h, Eigen::Index rows, Eigen::Index cols)
    {
        require(h.size() == rows * cols, ErrorCode::dimension_mismatch, "unvec: length does not match shape");
        return Eigen::Map<const CMatrix>(h.data(), rows, cols);
    }

    double nmse_db(const CMatrix &H_hat, const CMatrix &H_true)
    {
        require(H_hat.rows() == H_true.rows() && H_hat.cols() == H_true.cols(), ErrorCode::dimension_mismatch,
                "nmse: shapes differ");
        const double ref = H_true.squaredNorm();
        require(ref > 0.0, ErrorCode::invalid_argument, "nmse: reference channel is zero");
        const double err = (H_hat - H_true).squaredNorm();
        if (err == 0.0)
            return nmse_floor_db;
        return std::max(nmse_floor_db, 10.0 * std::log10(err / ref));
    }

    LinearModel linear_model(const MeasurementSet &m)
    {
        require(m.Y.cols() == m.F.cols() && m.X.rows() == m.F.cols() && m.X.cols() == m.F.cols(),
                ErrorCode::dimension_mismatch, "measurement: Y, F, X disagree on the slot count");
        LinearModel lm;
        const CMatrix FX = m.F * m.X; // n_t x S
        if (m.n_r() == 1)
        {
            lm.y = m.Y.row(0).adjoint();
            lm.Phi = FX.adjoint();
        }
        else
        {
            lm.two_dim = true;
            lm.y = vec(m.Y);
            const Eigen::Index n_r = m.n_r();
            const Eigen::Index n_t = m.n_t();
            const Eigen::Index S = m.slots();
            // kron(FX^T, I_{n_r}): block (s, col) is FX(col, s) * I.
            lm.Phi = CMatrix::Zero(S * n_r, n_t * n_r);
            for (Eigen::Index s = 0; s < S; ++s)
                for (Eigen::Index c = 0; c < n_t; ++c)
                    for (Eigen::Index p = 0; p < n_r; ++p)
                        lm.Phi(s * n_r + p, c * n_r + p) = FX(c, s);
        }
        return lm;
    }

    EstimateResult estimate_fs_anm_1d(const MeasurementSet &m, const FrequencyInterval &tx_band,
                                      const EstimatorOptions &opts)
    {
        require(m.n_r() == 1, ErrorCode::dimension_mismatch, "estimate_fs_anm_1d: needs a single receive antenna");
        require(m.n_t() >= 2, ErrorCode::invalid_argument, "estimate_fs_anm_1d: needs n_t >= 2");
        return run_sdp(m, ConstraintMode::fs, beta_coeffs(tx_band), std::nullopt, opts);
    }

    EstimateResult estimate_fs_anm_2d(const MeasurementSet &m, const FrequencyInterval &tx_band,
                                      const FrequencyInterval &rx_band, const EstimatorOptions &opts)
    {
        require(m.n_t() > 1 && m.n_r() > 1, ErrorCode::dimension_mismatch, "estimate_fs_anm_2d: needs n_t, n_r > 1");
        return run_sdp(m, ConstraintMode::fs, beta_coeffs(tx_band.mirrored()), beta_coeffs(rx_band), opts);
    }

    EstimateResult estimate_anm_plain(const MeasurementSet &m, const EstimatorOptions &opts)
    {
        return run_sdp(m, ConstraintMode::plain, std::nullopt, std::nullopt, opts);
    }

    GridDictionary make_grid_dictionary(int n_t, int n_r, int grid_tx, int grid_rx)
    {
        require(n_t >= 1 && n_r >= 1, ErrorCode::invalid_argument, "grid dictionary: empty array");
        require(grid_tx >= 1 && grid_rx >= 1, ErrorCode::invalid_argument, "grid dictionary: grid size must be >= 1");
        if (n_r == 1)
            grid_rx = 1;
        GridDictionary d;
        d.n_t = n_t;
        d.n_r = n_r;
        d.grid_tx = grid_tx;
        d.grid_rx = grid_rx;
        d.atoms.resize(static_cast<Eigen::Index>(n_t) * n_r, static_cast<Eigen::Index>(grid_tx) * grid_rx);
        Eigen::Index col = 0;
        for (int gt = 0; gt < grid_tx; ++gt)
            for (int gr = 0; gr < grid_rx; ++gr, ++col)
            {
                const double theta = -0.5 + static_cast<double>(gt) / grid_tx;
                const double phi = n_r == 1 ? 0.0 : -0.5 + static_cast<double>(gr) / grid_rx;
                d.tx_freqs.push_back(theta);
                d.rx_freqs.push_back(phi);
                CVector a = n_r == 1 ? steering(n_t, theta) : kron_atom(n_t, n_r, -theta, phi);
                d.atoms.col(col) = a.normalized();
            }
        return d;
    }

    GridDictionary grid_for_multiplier(int n_t, int n_r, double mult)
    {
        require(mult > 0.0, ErrorCode::invalid_argument, "grid multiplier must be positive");
        const int g_t = std::max(1, static_cast<int>(std::lround(mult * n_t)));
        const int g_r = n_r == 1 ? 1 : std::max(1, static_cast<int>(std::lround(static_cast<double>(g_t) * n_r / n_t)));
        return make_grid_dictionary(n_t, n_r, g_t, g_r);
    }

    EstimateResult estimate_omp(const MeasurementSet &m, const GridDictionary &dict, int sparsity,
                                const std::optional<CMatrix> &truth)
    {
        require(dict.n_t == m.n_t() && dict.n_r == m.n_r(), ErrorCode::dimension_mismatch,
                "estimate_omp: dictionary does not match the array");
        require(sparsity >= 1 && sparsity <= dict.atoms.cols(), ErrorCode::invalid_argument,
                "estimate_omp: sparsity must be in [1, dictionary size]");
        const LinearModel lm = linear_model(m);
        const CMatrix A = lm.Phi * dict.atoms;
        const Eigen::VectorXd col_norms = A.colwise().norm().transpose();

        OmpTrace trace;
        CVector residual = lm.y;
        CVector coeffs;
        std::vector<bool> taken(static_cast<std::size_t>(A.cols()), false);
        for (int step = 0; step < sparsity; ++step)
        {
            const CVector corr = A.adjoint() * residual;
            Eigen::Index best = -1;
            double best_val = -1.0;
            for (Eigen::Index k = 0; k < A.cols(); ++k)
            {
                if (taken[static_cast<std::size_t>(k)] || col_norms[k] == 0.0)
                    continue;
                const double v = std::abs(corr[k]) / col_norms[k];
                if (v > best_val)
                {
                    best_val = v;
                    best = k;
                }
            }
            if (best < 0)
                break;
            taken[static_cast<std::size_t>(best)] = true;
            trace.support.push_back(static_cast<int>(best));
            trace.correlations.push_back(best_val);

            CMatrix sub(A.rows(), static_cast<Eigen::Index>(trace.support.size()));
            for (std::size_t i = 0; i < trace.support.size(); ++i)
                sub.col(static_cast<Eigen::Index>(i)) = A.col(trace.support[i]);
            Eigen::ColPivHouseholderQR<CMatrix> qr(sub);
            if (qr.rank() < sub.cols())
            {
                trace.pinv_fallback = true;
                coeffs = Eigen::CompleteOrthogonalDecomposition<CMatrix>(sub).solve(lm.y);
            }
            else
                coeffs = qr.solve(lm.y);
            residual = lm.y - sub * coeffs;
            trace.residual_norms.push_back(residual.norm());
        }

        CVector h = CVector::Zero(dict.atoms.rows());
        for (std::size_t i = 0; i < trace.support.size(); ++i)
            h += coeffs[static_cast<Eigen::Index>(i)] * dict.atoms.col(trace.support[i]);
        EstimateResult out = finish(m, lm, h, truth);
        out.omp = std::move(trace);
        return out;
    }
}
