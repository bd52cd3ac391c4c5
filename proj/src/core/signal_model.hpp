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

#ifndef FSANM_CORE_SIGNAL_MODEL_HPP
#define FSANM_CORE_SIGNAL_MODEL_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fsanm
{
    using cdouble = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;

    // Open band (lo, hi) of normalized spatial frequencies, -1/2 <= lo < hi <= 1/2.
    class FrequencyInterval
    {
    public:
        FrequencyInterval(double lo, double hi);

        static FrequencyInterval full() { return {-0.5, 0.5}; }

        double lo() const noexcept { return lo_; }
        double hi() const noexcept { return hi_; }
        double width() const noexcept { return hi_ - lo_; }
        double center() const noexcept { return 0.5 * (lo_ + hi_); }

        bool contains(double f) const noexcept { return f > lo_ && f < hi_; }

        // Band seen by conjugated atoms a*(N, f) = a(N, -f).
        FrequencyInterval mirrored() const { return {-hi_, -lo_}; }

    private:
        double lo_;
        double hi_;
    };

    // ULA steering vector a(N, f) = [1, e^{i2pi f}, ..., e^{i2pi(N-1)f}]^T.
    struct ArrayResponse
    {
        int n_antennas = 0;
        double freq = 0.0;
        CVector values;
    };

    ArrayResponse array_response(int n, double freq);

    // Same vector without the range checks; used on hot paths where f is already validated
    // or deliberately outside [-1/2, 1/2] (aliases).
    CVector steering(int n, double freq);

    // Circular distance on the unit-period frequency axis.
    double wrapped_distance(double a, double b) noexcept;

    struct Path
    {
        cdouble gain;
        double tx_freq = 0.0; // theta
        double rx_freq = 0.0; // phi
    };

    struct PathSet
    {
        std::vector<Path> paths;
        double min_sep_tx = 0.0;
        double min_sep_rx = 0.0;

        // Checks range and pairwise wrap-around separation.
        bool valid() const noexcept;
    };

    // How to draw one path. A pinned frequency is used as-is; otherwise the frequency is
    // uniform on the band (or on (-1/2, 1/2) when no band is given).
    struct PathSpec
    {
        double gain_variance = 1.0;
        std::optional<FrequencyInterval> tx_band;
        std::optional<FrequencyInterval> rx_band;
        std::optional<double> tx_freq;
        std::optional<double> rx_freq;
    };

    struct Channel
    {
        PathSet paths;
        CMatrix H; // n_r x n_t
    };

    // H = sum_l gain_l a(n_r, phi_l) a(n_t, theta_l)^H.
    CMatrix channel_matrix(int n_t, int n_r, const PathSet &paths);

    // Draws a random sparse channel. Frequencies are rejection-sampled until every pair is
    // separated by more than min_sep (per dimension); throws ErrorCode::infeasible after
    // max_attempts failed draws. With n_r == 1 the receive frequencies are fixed at 0 and
    // carry no separation requirement.
    Channel generate_channel(int n_t, int n_r, std::span<const PathSpec> spec, double min_sep_tx,
                             double min_sep_rx, std::uint64_t seed, int max_attempts = 10000);

    struct MeasurementSet
    {
        CMatrix Y; // n_r x S
        CMatrix F; // n_t x S
        CMatrix X; // S x S, diagonal
        double noise_var = 0.0;
        std::uint64_t seed = 0;

        Eigen::Index slots() const noexcept { return F.cols(); }
        Eigen::Index n_t() const noexcept { return F.rows(); }
        Eigen::Index n_r() const noexcept { return Y.rows(); }
    };

    // Y = H F X + N with N_ij ~ CN(0, noise_var). The noise draws for a fixed seed are the
    // same for every noise_var, so sweeping the SNR rescales a single realization.
    MeasurementSet simulate_measurements(const CMatrix &H, const CMatrix &F, const CMatrix &X,
                                         double noise_var, std::uint64_t seed);

    enum class SensingKind
    {
        dft,     // S distinct columns of the unitary DFT matrix
        gaussian // i.i.d. CN(0,1) columns normalized to unit norm
    };

    CMatrix sensing_matrix(int n_t, int slots, SensingKind kind, std::uint64_t seed);

    // Noise variance giving the requested per-sample SNR for the realized H F X.
    double noise_variance_for_snr(const CMatrix &H, const CMatrix &F, const CMatrix &X, double snr_db);

    // [min, max] of d_over_lambda * sin(angle) over angle in [center - width/2, center + width/2],
    // clamped to [-1/2, 1/2]. Angles in radians.
    FrequencyInterval angle_prior_to_interval(double center_angle, double width, double d_over_lambda = 0.5);

    // splitmix64 finalizer; used to derive per-trial and per-stage seeds.
    std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;
}

#endif
