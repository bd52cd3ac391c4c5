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

#include "core/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "core/error.hpp"

namespace fsanm
{
    namespace
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;

        cdouble draw_complex_gaussian(std::mt19937_64 &rng, double variance)
        {
            std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * variance));
            const double re = normal(rng);
            const double im = normal(rng);
            return {re, im};
        }

        double draw_in_band(std::mt19937_64 &rng, const std::optional<FrequencyInterval> &band)
        {
            const double lo = band ? band->lo() : -0.5;
            const double hi = band ? band->hi() : 0.5;
            std::uniform_real_distribution<double> uniform(lo, hi);
            double f = uniform(rng);
            while (f <= lo) // open band
                f = uniform(rng);
            return f;
        }

        bool separated(const std::vector<Path> &paths, double min_sep_tx, double min_sep_rx, bool check_rx)
        {
            for (std::size_t i = 0; i < paths.size(); ++i)
                for (std::size_t j = i + 1; j < paths.size(); ++j)
                {
                    if (wrapped_distance(paths[i].tx_freq, paths[j].tx_freq) <= min_sep_tx)
                        return false;
                    if (check_rx && wrapped_distance(paths[i].rx_freq, paths[j].rx_freq) <= min_sep_rx)
                        return false;
                }
            return true;
        }
    }

    FrequencyInterval::FrequencyInterval(double lo, double hi) : lo_(lo), hi_(hi)
    {
        require(std::isfinite(lo) && std::isfinite(hi), ErrorCode::invalid_argument,
                "frequency interval bounds must be finite");
        require(lo >= -0.5 && hi <= 0.5, ErrorCode::invalid_argument,
                "frequency interval must lie inside [-1/2, 1/2]");
        require(lo < hi, ErrorCode::invalid_argument, "frequency interval must have positive width");
    }

    ArrayResponse array_response(int n, double freq)
    {
        require(n >= 1, ErrorCode::invalid_argument, "array_response: n must be >= 1");
        require(std::isfinite(freq) && freq >= -0.5 && freq <= 0.5, ErrorCode::invalid_argument,
                "array_response: frequency outside [-1/2, 1/2]");
        return {n, freq, steering(n, freq)};
    }

    CVector steering(int n, double freq)
    {
        CVector a(n);
        for (int k = 0; k < n; ++k)
        {
            // Reduce k*f mod 1 first so the phase stays accurate for long arrays.
            const double cycles = k * freq - std::floor(k * freq);
            a[k] = std::polar(1.0, two_pi * cycles);
        }
        return a;
    }

    double wrapped_distance(double a, double b) noexcept
    {
        double d = std::fmod(std::abs(a - b), 1.0);
        return std::min(d, 1.0 - d);
    }

    bool PathSet::valid() const noexcept
    {
        for (const auto &p : paths)
            if (!(p.tx_freq >= -0.5 && p.tx_freq <= 0.5 && p.rx_freq >= -0.5 && p.rx_freq <= 0.5))
                return false;
        return separated(paths, min_sep_tx, min_sep_rx, min_sep_rx > 0.0);
    }

    CMatrix channel_matrix(int n_t, int n_r, const PathSet &paths)
    {
        require(n_t >= 1 && n_r >= 1, ErrorCode::invalid_argument, "channel_matrix: empty array");
        CMatrix H = CMatrix::Zero(n_r, n_t);
        for (const auto &p : paths.paths)
            H.noalias() += p.gain * steering(n_r, p.rx_freq) * steering(n_t, p.tx_freq).adjoint();
        return H;
    }

    Channel generate_channel(int n_t, int n_r, std::span<const PathSpec> spec, double min_sep_tx,
                             double min_sep_rx, std::uint64_t seed, int max_attempts)
    {
        require(n_t >= 1 && n_r >= 1, ErrorCode::invalid_argument, "generate_channel: empty array");
        require(!spec.empty(), ErrorCode::invalid_argument, "generate_channel: need at least one path");
        require(min_sep_tx >= 0.0 && min_sep_rx >= 0.0, ErrorCode::invalid_argument,
                "generate_channel: negative separation");
        if (n_r > 1)
            require(spec.size() <= static_cast<std::size_t>(std::min(n_t, n_r)), ErrorCode::invalid_argument,
                    "generate_channel: more paths than min(n_t, n_r)");
        for (const auto &s : spec)
            require(s.gain_variance >= 0.0, ErrorCode::invalid_argument, "generate_channel: negative gain variance");

        const bool two_dim = n_r > 1;
        std::mt19937_64 rng(seed);
        std::vector<Path> paths(spec.size());
        bool ok = false;
        for (int attempt = 0; attempt < max_attempts && !ok; ++attempt)
        {
            for (std::size_t l = 0; l < spec.size(); ++l)
            {
                paths[l].tx_freq = spec[l].tx_freq ? *spec[l].tx_freq : draw_in_band(rng, spec[l].tx_band);
                if (two_dim)
                    paths[l].rx_freq = spec[l].rx_freq ? *spec[l].rx_freq : draw_in_band(rng, spec[l].rx_band);
                else
                    paths[l].rx_freq = 0.0;
            }
            ok = separated(paths, min_sep_tx, min_sep_rx, two_dim);
        }
        if (!ok)
            fail(ErrorCode::infeasible, "generate_channel: separation not met after " + std::to_string(max_attempts) +
                                            " attempts");

        for (std::size_t l = 0; l < spec.size(); ++l)
            paths[l].gain = draw_complex_gaussian(rng, spec[l].gain_variance);

        Channel ch;
        ch.paths.paths = std::move(paths);
        ch.paths.min_sep_tx = min_sep_tx;
        ch.paths.min_sep_rx = two_dim ? min_sep_rx : 0.0;
        ch.H = channel_matrix(n_t, n_r, ch.paths);
        return ch;
    }

    MeasurementSet simulate_measurements(const CMatrix &H, const CMatrix &F, const CMatrix &X, double noise_var,
                                         std::uint64_t seed)
    {
        require(H.cols() == F.rows(), ErrorCode::dimension_mismatch, "simulate_measurements: H and F not conformable");
        require(X.rows() == F.cols() && X.cols() == F.cols(), ErrorCode::dimension_mismatch,
                "simulate_measurements: X must be S x S");
        require(noise_var >= 0.0 && std::isfinite(noise_var), ErrorCode::invalid_argument,
                "simulate_measurements: noise variance must be >= 0");
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index j = 0; j < X.cols(); ++j)
                require(i == j || X(i, j) == cdouble(0.0), ErrorCode::invalid_argument,
                        "simulate_measurements: pilot matrix must be diagonal");

        MeasurementSet m;
        m.F = F;
        m.X = X;
        m.noise_var = noise_var;
        m.seed = seed;
        m.Y = H * F * X;

        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double scale = std::sqrt(0.5 * noise_var);
        // Column-major draw order keeps realizations stable under SNR rescaling.
        for (Eigen::Index s = 0; s < m.Y.cols(); ++s)
            for (Eigen::Index r = 0; r < m.Y.rows(); ++r)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                m.Y(r, s) += scale * cdouble(re, im);
            }
        return m;
    }

    CMatrix sensing_matrix(int n_t, int slots, SensingKind kind, std::uint64_t seed)
    {
        require(n_t >= 1 && slots >= 1, ErrorCode::invalid_argument, "sensing_matrix: empty dimensions");
        std::mt19937_64 rng(seed);
        CMatrix F(n_t, slots);
        if (kind == SensingKind::dft)
        {
            require(slots <= n_t, ErrorCode::invalid_argument, "sensing_matrix: DFT codebook has only n_t beams");
            std::vector<int> idx(n_t);
            std::iota(idx.begin(), idx.end(), 0);
            // Partial Fisher-Yates: first `slots` entries are a uniform sample without replacement.
            for (int s = 0; s < slots; ++s)
            {
                std::uniform_int_distribution<int> pick(s, n_t - 1);
                std::swap(idx[s], idx[pick(rng)]);
            }
            const double norm = 1.0 / std::sqrt(static_cast<double>(n_t));
            for (int s = 0; s < slots; ++s)
                for (int m = 0; m < n_t; ++m)
                {
                    const long long km = static_cast<long long>(m) * idx[s] % n_t;
                    F(m, s) = std::polar(norm, two_pi * static_cast<double>(km) / n_t);
                }
        }
        else
        {
            for (int s = 0; s < slots; ++s)
            {
                for (int m = 0; m < n_t; ++m)
                    F(m, s) = draw_complex_gaussian(rng, 1.0);
                F.col(s).normalize();
            }
        }
        return F;
    }

    double noise_variance_for_snr(const CMatrix &H, const CMatrix &F, const CMatrix &X, double snr_db)
    {
        require(std::isfinite(snr_db), ErrorCode::invalid_argument, "noise_variance_for_snr: SNR must be finite");
        const double signal = (H * F * X).squaredNorm();
        require(signal > 0.0, ErrorCode::invalid_argument, "noise_variance_for_snr: zero received signal");
        const double samples = static_cast<double>(H.rows() * F.cols());
        return signal / (samples * std::pow(10.0, snr_db / 10.0));
    }

    FrequencyInterval angle_prior_to_interval(double center_angle, double width, double d_over_lambda)
    {
        require(std::isfinite(center_angle), ErrorCode::invalid_argument, "angle prior: center must be finite");
        require(width > 0.0 && width <= two_pi + 1e-12, ErrorCode::invalid_argument,
                "angle prior: width must be in (0, 2pi]");
        require(d_over_lambda > 0.0, ErrorCode::invalid_argument, "angle prior: d/lambda must be positive");

        const double a = center_angle - 0.5 * width;
        const double b = center_angle + 0.5 * width;
        const auto arc_contains = [&](double phase)
        {
            const double k = std::ceil((a - phase) / two_pi);
            return phase + two_pi * k <= b;
        };
        double s_max = std::max(std::sin(a), std::sin(b));
        double s_min = std::min(std::sin(a), std::sin(b));
        if (arc_contains(0.5 * std::numbers::pi))
            s_max = 1.0;
        if (arc_contains(-0.5 * std::numbers::pi))
            s_min = -1.0;

        const double lo = std::clamp(d_over_lambda * s_min, -0.5, 0.5);
        const double hi = std::clamp(d_over_lambda * s_max, -0.5, 0.5);
        require(hi > lo, ErrorCode::infeasible, "angle prior maps to an empty frequency band");
        return {lo, hi};
    }

    std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept
    {
        auto splitmix = [](std::uint64_t z)
        {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        return splitmix(a ^ splitmix(b));
    }
}
