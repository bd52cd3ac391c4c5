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

#ifndef FSANM_CORE_BENCH_HPP
#define FSANM_CORE_BENCH_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "core/conic_solver.hpp"
#include "core/signal_model.hpp"

namespace fsanm
{
    enum class ExperimentMode
    {
        one_d,
        two_d
    };

    enum class PriorCenter
    {
        strongest, // prior centered on the true angle of the strongest path
        uniform    // prior center drawn uniformly in angle, all paths drawn inside it
    };

    struct ExperimentConfig
    {
        ExperimentMode mode = ExperimentMode::one_d;
        int n_t = 128;
        int n_r = 1;
        int S = 50;
        int L = 2;
        std::vector<double> snr_grid_db{-10, -5, 0, 5, 10};
        std::vector<double> prior_widths_deg{60};
        bool plain_anm = true;
        std::vector<double> omp_grids{0.5, 0.75, 1.0};
        int trials = 100;
        std::uint64_t base_seed = 1;
        std::vector<double> gain_variances{1.0, 0.1}; // one per path; padded with the last value
        std::optional<double> min_sep_tx;             // default 1/n_t (1D) or 1/(n_t n_r) (2D)
        std::optional<double> min_sep_rx;
        SensingKind sensing = SensingKind::gaussian;
        PriorCenter prior_center = PriorCenter::strongest;
        double mu_scale = 1.0;
        std::optional<double> mu; // fixed weight, overrides the noise-based rule
        SolverOptions solver;
        double max_failure_rate = 0.2;
        int jobs = 1;

        void validate() const;
    };

    ExperimentConfig default_config(ExperimentMode mode);

    // Flat "key = value" text; '#' starts a comment, lists are comma separated. The mode key,
    // when present, resets every other field to that mode's defaults before the rest apply.
    ExperimentConfig parse_config(std::istream &is);
    ExperimentConfig load_config(const std::string &path);
    void apply_setting(ExperimentConfig &cfg, const std::string &key, const std::string &value);

    struct ResultRow
    {
        std::string method; // fs-anm@<deg>, anm, omp@<mult>
        ExperimentMode mode = ExperimentMode::one_d;
        int n_t = 0;
        int n_r = 0;
        int S = 0;
        int L = 0;
        std::optional<double> prior_deg;
        std::optional<double> grid_mult;
        double snr_db = 0.0;
        int trial = 0;
        std::uint64_t seed = 0;
        double nmse_db = 0.0; // NaN when the method failed
        int iters = 0;
        double wall_ms = 0.0;
        bool failed = false;
    };

    struct SummaryEntry
    {
        std::string method;
        double snr_db = 0.0;
        double mean_nmse_db = 0.0; // 10 log10 of the linear mean; NaN if no successful trial
        int trials_ok = 0;
        int trials_failed = 0;
    };

    struct TrialChecksum
    {
        int trial = 0;
        double snr_db = 0.0;
        std::uint64_t measurement = 0; // hash of Y, F, X as seen by every method
        int consumers = 0;             // estimator calls that hashed the same data
        bool matched = true;           // every consumer saw the same hash
    };

    struct RunResult
    {
        std::vector<ResultRow> rows;
        std::vector<SummaryEntry> summary;
        std::vector<TrialChecksum> checksums;
        int failures = 0;
        bool aborted = false; // failure rate above the configured limit
    };

    using ProgressFn = std::function<void(int done, int total)>;

    RunResult run_experiment(const ExperimentConfig &cfg, const ProgressFn &progress = {});

    // Linear-scale mean per (method, snr), failed rows excluded; sorted by (method, snr).
    std::vector<SummaryEntry> summarize(const std::vector<ResultRow> &rows);

    enum class OutputFormat
    {
        csv,
        json
    };

    inline constexpr const char *csv_header = "method,mode,n_t,n_r,S,L,prior_deg,grid_mult,snr_db,trial,seed,nmse_db,iters,wall_ms";

    void write_csv(std::ostream &os, const std::vector<ResultRow> &rows);
    void write_json(std::ostream &os, const RunResult &result);
    void emit_results(const RunResult &result, const std::string &path, OutputFormat format);

    std::uint64_t hash_measurement(const MeasurementSet &m) noexcept;
    std::string mode_name(ExperimentMode mode);
}

#endif
