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

// Consensus ADMM for the structured SDP
//
//   min  f(h) + mu/2 * (x_0 + t)
//   s.t. W(x, h, t) = [[T(x), h], [h^H, t]] = Z_0 >= 0,   G_i(x) = Z_i >= 0,
//
// where x is a real parametrization of the Hermitian lag sequence V (x_0 = V(0,0)) and G_i are
// the T_beta maps. Each iteration solves one quadratic in (x, h, t) exactly, projects every
// block onto the PSD cone, and updates the unscaled multipliers.

#include "core/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "core/error.hpp"
#include "core/psd.hpp"

namespace fsanm
{
    namespace
    {
        struct ParamTerm
        {
            Eigen::Index lag;
            cdouble coef;
        };

        // Real coordinates of a Hermitian 2-level lag sequence. Lag (k, j) is stored at flat
        // index (k + n_t - 1) + (j + n_r - 1) * (2 n_t - 1), the column-major layout of V.
        class LagSpace
        {
        public:
            LagSpace(int n_t, int n_r) : n_t_(n_t), n_r_(n_r), rows_(2 * n_t - 1), n_lags_((2 * n_t - 1) * (2 * n_r - 1))
            {
                params_.push_back({{index(0, 0), 1.0}});
                for (int j = 0; j <= n_r - 1; ++j)
                    for (int k = (j == 0 ? 1 : -(n_t - 1)); k <= n_t - 1; ++k)
                    {
                        params_.push_back({{index(k, j), 1.0}, {index(-k, -j), 1.0}});
                        params_.push_back({{index(k, j), cdouble(0.0, 1.0)}, {index(-k, -j), cdouble(0.0, -1.0)}});
                    }
            }

            Eigen::Index index(int k, int j) const { return (k + n_t_ - 1) + static_cast<Eigen::Index>(j + n_r_ - 1) * rows_; }
            Eigen::Index size() const { return static_cast<Eigen::Index>(params_.size()); }
            Eigen::Index n_lags() const { return n_lags_; }
            int n_t() const { return n_t_; }
            int n_r() const { return n_r_; }

            void to_sequence(const Eigen::VectorXd &x, TwoLevelToeplitzSeq &seq) const
            {
                CMatrix V = CMatrix::Zero(rows_, 2 * n_r_ - 1);
                cdouble *v = V.data();
                for (std::size_t p = 0; p < params_.size(); ++p)
                    for (const auto &term : params_[p])
                        v[term.lag] += term.coef * x[static_cast<Eigen::Index>(p)];
                seq = TwoLevelToeplitzSeq(n_t_, n_r_, std::move(V));
            }

            // Real gradient b_p = Re sum conj(c) S(lag) for a lag-space accumulation S.
            void pull_back(const CVector &S, Eigen::VectorXd &b) const
            {
                for (std::size_t p = 0; p < params_.size(); ++p)
                {
                    double acc = 0.0;
                    for (const auto &term : params_[p])
                        acc += (std::conj(term.coef) * S[term.lag]).real();
                    b[static_cast<Eigen::Index>(p)] += acc;
                }
            }

            // N = Re(C^H K C).
            Eigen::MatrixXd pull_back(const CMatrix &K) const
            {
                const Eigen::Index np = size();
                Eigen::MatrixXd N(np, np);
                for (Eigen::Index p = 0; p < np; ++p)
                    for (Eigen::Index q = p; q < np; ++q)
                    {
                        double acc = 0.0;
                        for (const auto &a : params_[static_cast<std::size_t>(p)])
                            for (const auto &b : params_[static_cast<std::size_t>(q)])
                                acc += (std::conj(a.coef) * K(a.lag, b.lag) * b.coef).real();
                        N(p, q) = N(q, p) = acc;
                    }
                return N;
            }

        private:
            int n_t_;
            int n_r_;
            Eigen::Index rows_;
            Eigen::Index n_lags_;
            std::vector<std::vector<ParamTerm>> params_;
        };

        // Accumulates the Gram matrix of one stencil in lag space: every base lag (bk, bj)
        // occurs (tx_count - |bk|) (rx_count - |bj|) times in the assembled matrix.
        void add_gram(const Stencil &s, const LagSpace &lags, CMatrix &K)
        {
            for (int bj = -(s.rx_count - 1); bj <= s.rx_count - 1; ++bj)
                for (int bk = -(s.tx_count - 1); bk <= s.tx_count - 1; ++bk)
                {
                    const double count = static_cast<double>((s.tx_count - std::abs(bk)) * (s.rx_count - std::abs(bj)));
                    for (const auto &a : s.taps)
                        for (const auto &b : s.taps)
                            K(lags.index(bk - a.dk, bj - a.dj), lags.index(bk - b.dk, bj - b.dj)) +=
                                count * std::conj(a.weight) * b.weight;
                }
        }

        // S(lag) += sum over entries of conj(w) * P(entry), i.e. the adjoint of assemble().
        void add_adjoint(const Stencil &s, const LagSpace &lags, const CMatrix &P, CVector &S)
        {
            const int rc = s.rx_count;
            for (int n = 0; n < s.tx_count; ++n)
                for (int q = 0; q < rc; ++q)
                {
                    const Eigen::Index col = n * rc + q;
                    for (int m = 0; m < s.tx_count; ++m)
                        for (int p = 0; p < rc; ++p)
                        {
                            const cdouble v = P(m * rc + p, col);
                            for (const auto &tap : s.taps)
                                S[lags.index(m - n - tap.dk, p - q - tap.dj)] += std::conj(tap.weight) * v;
                        }
                }
        }

        void fill_block_arrow(const CMatrix &T, const CVector &h, double t, CMatrix &W)
        {
            const Eigen::Index N = T.rows();
            W.topLeftCorner(N, N) = T;
            W.topRightCorner(N, 1) = h;
            W.bottomLeftCorner(1, N) = h.adjoint();
            W(N, N) = t;
        }

        std::vector<Stencil> constraint_stencils(const SdpProblem &pb)
        {
            std::vector<Stencil> out;
            if (pb.mode != ConstraintMode::fs)
                return out;
            if (pb.beta1)
                out.push_back(beta_tx_stencil(pb.n_t, pb.n_r, *pb.beta1));
            if (pb.beta2)
                out.push_back(beta_rx_stencil(pb.n_t, pb.n_r, *pb.beta2));
            return out;
        }

        void validate(const SdpProblem &pb, const SolverOptions &opts)
        {
            require(pb.n_t >= 1 && pb.n_r >= 1, ErrorCode::invalid_argument, "solve: dimensions must be positive");
            const Eigen::Index N = static_cast<Eigen::Index>(pb.n_t) * pb.n_r;
            if (pb.fixed_h)
                require(pb.y.size() == N, ErrorCode::dimension_mismatch, "solve: h has wrong length");
            else
            {
                require(pb.Phi.cols() == N, ErrorCode::dimension_mismatch, "solve: Phi column count must be n_t*n_r");
                require(pb.Phi.rows() == pb.y.size(), ErrorCode::dimension_mismatch, "solve: Phi rows must match y");
                require(pb.mu > 0.0 && std::isfinite(pb.mu), ErrorCode::invalid_argument, "solve: mu must be > 0");
            }
            if (pb.mode == ConstraintMode::fs)
            {
                require(pb.beta1.has_value() || pb.beta2.has_value(), ErrorCode::invalid_argument,
                        "solve: fs mode needs at least one band");
                if (pb.n_r == 1)
                    require(!pb.beta2.has_value(), ErrorCode::invalid_argument, "solve: Rx band given for a 1D problem");
            }
            require(opts.rho > 0.0 && opts.max_iter >= 1 && opts.eps_abs >= 0.0 && opts.eps_rel >= 0.0,
                    ErrorCode::invalid_argument, "solve: invalid solver options");
            require(opts.relaxation > 0.0 && opts.relaxation < 2.0, ErrorCode::invalid_argument,
                    "solve: relaxation must lie in (0, 2)");
            require(opts.adapt_interval >= 1 && opts.adapt_factor > 1.0 && opts.adapt_ratio > 1.0,
                    ErrorCode::invalid_argument, "solve: invalid rho adaptation settings");
        }
    }

    SdpSolution solve(const SdpProblem &pb, const SolverOptions &opts)
    {
        validate(pb, opts);
        const int n_t = pb.n_t;
        const int n_r = pb.n_r;
        const Eigen::Index N = static_cast<Eigen::Index>(n_t) * n_r;
        const double mu = pb.fixed_h ? 1.0 : pb.mu;

        const LagSpace lags(n_t, n_r);
        const Stencil t_stencil = toeplitz_stencil(n_t, n_r);
        const std::vector<Stencil> g_stencils = constraint_stencils(pb);
        const std::size_t n_blocks = 1 + g_stencils.size();

        SdpSolution sol;
        sol.h_hat = CVector::Zero(N);
        sol.toeplitz = TwoLevelToeplitzSeq::zeros(n_t, n_r);

        // y = 0: the zero point is feasible with objective 0, a lower bound.
        if (pb.y.squaredNorm() == 0.0)
        {
            sol.converged = true;
            for (std::size_t b = 0; b < n_blocks; ++b)
            {
                const Eigen::Index d = b == 0 ? N + 1 : g_stencils[b - 1].dim();
                sol.cone_blocks.push_back(CMatrix::Zero(d, d));
            }
            return sol;
        }

        // Normal equations for the x-update: (T*T + sum G_i* G_i) x = rhs.
        CMatrix K = CMatrix::Zero(lags.n_lags(), lags.n_lags());
        add_gram(t_stencil, lags, K);
        for (const auto &s : g_stencils)
            add_gram(s, lags, K);
        const Eigen::LLT<Eigen::MatrixXd> normal(lags.pull_back(K));
        require(normal.info() == Eigen::Success, ErrorCode::invalid_argument, "solve: singular lag normal matrix");

        // h-update: (Phi^H Phi + 2 rho I) h = Phi^H y + 2 rho m, diagonalized once.
        CMatrix gram_vecs;
        Eigen::VectorXd gram_vals;
        CVector phi_y;
        if (!pb.fixed_h)
        {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(pb.Phi.adjoint() * pb.Phi);
            gram_vecs = es.eigenvectors();
            gram_vals = es.eigenvalues().cwiseMax(0.0);
            phi_y = pb.Phi.adjoint() * pb.y;
        }

        std::vector<PsdProjector> projectors;
        std::vector<CMatrix> W(n_blocks), Z(n_blocks), Lam(n_blocks), Z_prev(n_blocks);
        for (std::size_t b = 0; b < n_blocks; ++b)
        {
            const Eigen::Index d = b == 0 ? N + 1 : g_stencils[b - 1].dim();
            projectors.emplace_back(static_cast<int>(d));
            W[b] = Z[b] = Lam[b] = CMatrix::Zero(d, d);
        }
        double n_entries = 0.0;
        for (const auto &z : Z)
            n_entries += static_cast<double>(z.size());
        const double sqrt_entries = std::sqrt(n_entries);

        Eigen::VectorXd x = Eigen::VectorXd::Zero(lags.size());
        CVector h = pb.fixed_h ? CVector(pb.y) : CVector(CVector::Zero(N));
        double t = 0.0;
        double rho = opts.rho;
        TwoLevelToeplitzSeq seq = TwoLevelToeplitzSeq::zeros(n_t, n_r);
        CVector S(lags.n_lags());
        Eigen::VectorXd rhs(lags.size());
        CMatrix M;
        const double alpha = opts.relaxation;

        for (int it = 1; it <= opts.max_iter; ++it)
        {
            // (x, h, t)-update against M_b = Z_b - Lam_b / rho.
            S.setZero();
            rhs.setZero();
            M = Z[0] - Lam[0] / rho;
            add_adjoint(t_stencil, lags, M.topLeftCorner(N, N), S);
            if (!pb.fixed_h)
            {
                const CVector r = phi_y + 2.0 * rho * M.topRightCorner(N, 1);
                CVector c = gram_vecs.adjoint() * r;
                for (Eigen::Index i = 0; i < N; ++i)
                    c[i] /= gram_vals[i] + 2.0 * rho;
                h.noalias() = gram_vecs * c;
            }
            t = M(N, N).real() - mu / (2.0 * rho);
            for (std::size_t g = 0; g < g_stencils.size(); ++g)
            {
                M = Z[g + 1] - Lam[g + 1] / rho;
                add_adjoint(g_stencils[g], lags, M, S);
            }
            lags.pull_back(S, rhs);
            rhs[0] -= mu / (2.0 * rho);
            x = normal.solve(rhs);
            lags.to_sequence(x, seq);

            fill_block_arrow(assemble(t_stencil, seq), h, t, W[0]);
            for (std::size_t g = 0; g < g_stencils.size(); ++g)
                W[g + 1] = assemble(g_stencils[g], seq);

            // Cone projections and multiplier updates.
            double r_sq = 0.0, s_sq = 0.0, w_sq = 0.0, z_sq = 0.0, lam_sq = 0.0;
            for (std::size_t b = 0; b < n_blocks; ++b)
            {
                Z_prev[b] = Z[b];
                const CMatrix W_hat = alpha * W[b] + (1.0 - alpha) * Z_prev[b];
                Z[b] = W_hat + Lam[b] / rho;
                projectors[b].project(Z[b]);
                Lam[b] += rho * (W_hat - Z[b]);

                r_sq += (W[b] - Z[b]).squaredNorm();
                s_sq += (Z[b] - Z_prev[b]).squaredNorm();
                w_sq += W[b].squaredNorm();
                z_sq += Z[b].squaredNorm();
                lam_sq += Lam[b].squaredNorm();
            }
            const double r_norm = std::sqrt(r_sq);
            const double s_norm = rho * std::sqrt(s_sq);
            const double eps_pri = sqrt_entries * opts.eps_abs + opts.eps_rel * std::sqrt(std::max(w_sq, z_sq));
            const double eps_dual = sqrt_entries * opts.eps_abs + opts.eps_rel * std::sqrt(lam_sq);

            const double norm_value = 0.5 * (x[0] + t);
            const double objective =
                pb.fixed_h ? norm_value : 0.5 * (pb.y - pb.Phi * h).squaredNorm() + mu * norm_value;
            if (opts.record_trace)
                sol.trace.push_back({it, objective, r_norm, s_norm, rho});

            sol.iterations = it;
            sol.objective = objective;
            sol.norm_value = norm_value;
            sol.primal_residual = r_norm;
            sol.dual_residual = s_norm;
            sol.primal_tolerance = eps_pri;
            sol.dual_tolerance = eps_dual;
            if (r_norm <= eps_pri && s_norm <= eps_dual)
            {
                sol.converged = true;
                break;
            }

            if (opts.adaptive_rho && it % opts.adapt_interval == 0)
            {
                // Balance residuals measured against their own tolerances.
                const double r_rel = r_norm / eps_pri;
                const double s_rel = s_norm / eps_dual;
                if (r_rel > opts.adapt_ratio * s_rel)
                    rho *= opts.adapt_factor;
                else if (s_rel > opts.adapt_ratio * r_rel)
                    rho /= opts.adapt_factor;
            }
        }

        sol.h_hat = h;
        sol.toeplitz = seq;
        sol.t_scalar = t;
        sol.cone_blocks = std::move(Z);
        return sol;
    }

    std::vector<CMatrix> structured_blocks(const SdpProblem &pb, const SdpSolution &sol)
    {
        const Eigen::Index N = static_cast<Eigen::Index>(pb.n_t) * pb.n_r;
        std::vector<CMatrix> out;
        CMatrix W(N + 1, N + 1);
        fill_block_arrow(two_level_toeplitz(sol.toeplitz), sol.h_hat, sol.t_scalar, W);
        out.push_back(std::move(W));
        for (const auto &s : constraint_stencils(pb))
            out.push_back(assemble(s, sol.toeplitz));
        return out;
    }

    double atomic_norm(const CVector &h, int n_t, int n_r, const std::optional<FrequencyInterval> &tx_band,
                       const std::optional<FrequencyInterval> &rx_band, ConstraintMode mode, const SolverOptions &opts)
    {
        SdpProblem pb;
        pb.y = h;
        pb.n_t = n_t;
        pb.n_r = n_r;
        pb.mode = mode;
        pb.fixed_h = true;
        if (mode == ConstraintMode::fs)
        {
            if (tx_band)
                pb.beta1 = beta_coeffs(*tx_band);
            if (rx_band)
                pb.beta2 = beta_coeffs(*rx_band);
        }
        const SdpSolution sol = solve(pb, opts);
        require(sol.converged, ErrorCode::not_converged,
                "atomic_norm: solver stopped after " + std::to_string(sol.iterations) + " iterations");
        return sol.norm_value;
    }

    double default_mu(double noise_var, int n_t, int n_r)
    {
        require(noise_var >= 0.0, ErrorCode::invalid_argument, "default_mu: negative noise variance");
        const double N = static_cast<double>(n_t) * n_r;
        return std::sqrt(noise_var) * std::sqrt(N * std::log(N));
    }

    void write_trace_csv(std::ostream &os, const std::vector<IterationRecord> &trace)
    {
        os << "iteration,objective,primal_residual,dual_residual,rho\n";
        for (const auto &r : trace)
            os << r.iteration << ',' << r.objective << ',' << r.primal_residual << ',' << r.dual_residual << ','
               << r.rho << '\n';
    }
}
