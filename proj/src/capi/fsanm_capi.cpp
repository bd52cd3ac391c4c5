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

#include "fsanm/fsanm.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "core/bench.hpp"
#include "core/conic_solver.hpp"
#include "core/error.hpp"
#include "core/fs_toeplitz.hpp"

struct fsanm_experiment
{
    fsanm::ExperimentConfig config;
    std::optional<fsanm::RunResult> result;
};

struct fsanm_decomposition
{
    fsanm::VandermondeDecomposition d;
};

namespace
{
    thread_local std::string last_error;

    fsanm_status to_status(fsanm::ErrorCode c)
    {
        return static_cast<fsanm_status>(static_cast<int>(c));
    }

    fsanm_status fail_with(fsanm_status s, std::string msg)
    {
        last_error = std::move(msg);
        return s;
    }

    // Runs f, translating exceptions into status codes.
    template <class F> fsanm_status guarded(F &&f) noexcept
    {
        try
        {
            last_error.clear();
            return f();
        }
        catch (const fsanm::Error &e)
        {
            return fail_with(to_status(e.code()), e.what());
        }
        catch (const std::bad_alloc &)
        {
            return fail_with(FSANM_ERR_INTERNAL, "out of memory");
        }
        catch (const std::exception &e)
        {
            return fail_with(FSANM_ERR_INTERNAL, e.what());
        }
        catch (...)
        {
            return fail_with(FSANM_ERR_INTERNAL, "unknown exception");
        }
    }

    void copy_tag(char (&dst)[32], const std::string &src)
    {
        std::strncpy(dst, src.c_str(), sizeof dst - 1);
        dst[sizeof dst - 1] = '\0';
    }

    fsanm::SolverOptions solver_options(const fsanm_solver_options *o)
    {
        fsanm::SolverOptions s;
        if (o)
        {
            s.rho = o->rho;
            s.adaptive_rho = o->adaptive_rho != 0;
            s.max_iter = o->max_iter;
            s.eps_abs = o->eps_abs;
            s.eps_rel = o->eps_rel;
        }
        fsanm::require(s.rho > 0.0 && s.max_iter >= 1 && s.eps_abs >= 0.0 && s.eps_rel >= 0.0,
                       fsanm::ErrorCode::invalid_argument, "bad solver options");
        return s;
    }
}

extern "C" {

const char *fsanm_version(void)
{
    return "0.1.0";
}

const char *fsanm_status_string(fsanm_status status)
{
    switch (status)
    {
    case FSANM_OK:
        return "ok";
    case FSANM_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case FSANM_ERR_DIMENSION_MISMATCH:
        return "dimension mismatch";
    case FSANM_ERR_NOT_CONVERGED:
        return "not converged";
    case FSANM_ERR_MODEL_ORDER:
        return "model order";
    case FSANM_ERR_IO:
        return "i/o error";
    case FSANM_ERR_ABORTED:
        return "aborted";
    case FSANM_ERR_INFEASIBLE:
        return "infeasible";
    case FSANM_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char *fsanm_last_error(void)
{
    return last_error.c_str();
}

void fsanm_solver_options_default(fsanm_solver_options *opts)
{
    if (!opts)
        return;
    const fsanm::SolverOptions s;
    opts->rho = s.rho;
    opts->adaptive_rho = s.adaptive_rho ? 1 : 0;
    opts->max_iter = s.max_iter;
    opts->eps_abs = s.eps_abs;
    opts->eps_rel = s.eps_rel;
}

fsanm_status fsanm_atomic_norm(const double *h, int n_t, int n_r, fsanm_constraint mode, const double *tx_band,
                               const double *rx_band, const fsanm_solver_options *opts, const char *trace_csv,
                               double *norm, int *iterations)
{
    return guarded([&] {
        using namespace fsanm;
        if (!h || !norm)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_atomic_norm: null pointer");
        if (n_t < 1 || n_r < 1 || (mode != FSANM_CONSTRAINT_FS && mode != FSANM_CONSTRAINT_PLAIN))
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_atomic_norm: bad dimensions or mode");

        SdpProblem pb;
        const Eigen::Index len = static_cast<Eigen::Index>(n_t) * n_r;
        pb.y.resize(len);
        for (Eigen::Index i = 0; i < len; ++i)
            pb.y[i] = cdouble(h[2 * i], h[2 * i + 1]);
        pb.n_t = n_t;
        pb.n_r = n_r;
        pb.fixed_h = true;
        pb.mode = mode == FSANM_CONSTRAINT_FS ? ConstraintMode::fs : ConstraintMode::plain;
        if (pb.mode == ConstraintMode::fs)
        {
            if (tx_band)
                pb.beta1 = beta_coeffs(FrequencyInterval(tx_band[0], tx_band[1]));
            if (rx_band && n_r > 1)
                pb.beta2 = beta_coeffs(FrequencyInterval(rx_band[0], rx_band[1]));
        }
        SolverOptions so = solver_options(opts);
        so.record_trace = trace_csv != nullptr;
        const SdpSolution sol = solve(pb, so);
        if (trace_csv)
        {
            std::ofstream out(trace_csv);
            require(static_cast<bool>(out), ErrorCode::io, std::string("cannot write '") + trace_csv + "'");
            write_trace_csv(out, sol.trace);
        }
        if (iterations)
            *iterations = sol.iterations;
        *norm = sol.norm_value;
        if (!sol.converged)
            return fail_with(FSANM_ERR_NOT_CONVERGED,
                             "fsanm_atomic_norm: stopped after " + std::to_string(sol.iterations) + " iterations");
        return FSANM_OK;
    });
}

fsanm_status fsanm_retrieve(const double *seq, size_t count, int n_t, int n_r, int order, fsanm_decomposition **out)
{
    return guarded([&] {
        using namespace fsanm;
        if (!seq || !out)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_retrieve: null pointer");
        *out = nullptr;
        if (n_t < 1 || n_r < 1 || order < 0)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_retrieve: bad dimensions or order");
        const std::size_t rows = static_cast<std::size_t>(2 * n_t - 1);
        const std::size_t cols = static_cast<std::size_t>(2 * n_r - 1);
        if (count != rows * cols)
            return fail_with(FSANM_ERR_DIMENSION_MISMATCH, "fsanm_retrieve: expected " + std::to_string(rows * cols) +
                                                               " values, got " + std::to_string(count));
        RetrieveOptions ro;
        ro.model_order = order;
        auto d = std::make_unique<fsanm_decomposition>();
        if (n_r == 1)
        {
            std::vector<cdouble> t(rows);
            for (std::size_t i = 0; i < rows; ++i)
                t[i] = cdouble(seq[2 * i], seq[2 * i + 1]);
            d->d = vandermonde_retrieve(ToeplitzSeq(n_t, std::move(t)), ro);
        }
        else
        {
            CMatrix V(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
            for (std::size_t k = 0; k < rows; ++k)
                for (std::size_t j = 0; j < cols; ++j)
                {
                    const std::size_t i = k * cols + j;
                    V(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = cdouble(seq[2 * i], seq[2 * i + 1]);
                }
            d->d = vandermonde_retrieve(TwoLevelToeplitzSeq(n_t, n_r, std::move(V)), ro);
        }
        *out = d.release();
        return FSANM_OK;
    });
}

size_t fsanm_decomposition_size(const fsanm_decomposition *d)
{
    return d ? d->d.atoms.size() : 0;
}

fsanm_status fsanm_decomposition_atom(const fsanm_decomposition *d, size_t index, double *coefficient, double *tx_freq,
                                      double *rx_freq)
{
    last_error.clear();
    if (!d)
        return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_decomposition_atom: null handle");
    if (index >= d->d.atoms.size())
        return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_decomposition_atom: index out of range");
    const auto &a = d->d.atoms[index];
    if (coefficient)
        *coefficient = a.coefficient;
    if (tx_freq)
        *tx_freq = a.tx_freq;
    if (rx_freq)
        *rx_freq = a.rx_freq.value_or(std::numeric_limits<double>::quiet_NaN());
    return FSANM_OK;
}

double fsanm_decomposition_residual(const fsanm_decomposition *d)
{
    return d ? d->d.residual_norm : std::numeric_limits<double>::quiet_NaN();
}

void fsanm_decomposition_free(fsanm_decomposition *d)
{
    delete d;
}

fsanm_status fsanm_experiment_create(const char *mode, fsanm_experiment **out)
{
    return guarded([&] {
        if (!mode || !out)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_create: null pointer");
        *out = nullptr;
        auto e = std::make_unique<fsanm_experiment>();
        fsanm::apply_setting(e->config, "mode", mode);
        *out = e.release();
        return FSANM_OK;
    });
}

fsanm_status fsanm_experiment_from_file(const char *path, fsanm_experiment **out)
{
    return guarded([&] {
        if (!path || !out)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_from_file: null pointer");
        *out = nullptr;
        auto e = std::make_unique<fsanm_experiment>();
        e->config = fsanm::load_config(path);
        *out = e.release();
        return FSANM_OK;
    });
}

fsanm_status fsanm_experiment_set(fsanm_experiment *e, const char *key, const char *value)
{
    return guarded([&] {
        if (!e || !key || !value)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_set: null pointer");
        fsanm::ExperimentConfig next = e->config;
        fsanm::apply_setting(next, key, value);
        e->config = std::move(next);
        e->result.reset();
        return FSANM_OK;
    });
}

fsanm_status fsanm_experiment_run(fsanm_experiment *e, fsanm_progress_fn progress, void *user)
{
    return guarded([&] {
        if (!e)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_run: null handle");
        e->result.reset();
        fsanm::ProgressFn cb;
        if (progress)
            cb = [progress, user](int done, int total) { progress(done, total, user); };
        e->result = fsanm::run_experiment(e->config, cb);
        if (e->result->aborted)
            return fail_with(FSANM_ERR_ABORTED, std::to_string(e->result->failures) + " of " +
                                                    std::to_string(e->result->rows.size()) +
                                                    " estimates failed; above the configured limit");
        return FSANM_OK;
    });
}

fsanm_status fsanm_experiment_write(const fsanm_experiment *e, const char *path, const char *format)
{
    return guarded([&] {
        if (!e || !path || !format)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_write: null pointer");
        if (!e->result)
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_write: experiment has not run");
        const std::string f = format;
        if (f != "csv" && f != "json")
            return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_write: format must be csv or json");
        fsanm::emit_results(*e->result, path, f == "csv" ? fsanm::OutputFormat::csv : fsanm::OutputFormat::json);
        return FSANM_OK;
    });
}

size_t fsanm_experiment_row_count(const fsanm_experiment *e)
{
    return e && e->result ? e->result->rows.size() : 0;
}

fsanm_status fsanm_experiment_row(const fsanm_experiment *e, size_t index, fsanm_result_row *row)
{
    last_error.clear();
    if (!e || !row)
        return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_row: null pointer");
    if (!e->result || index >= e->result->rows.size())
        return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_row: index out of range");
    const auto &r = e->result->rows[index];
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    copy_tag(row->method, r.method);
    row->two_dim = r.mode == fsanm::ExperimentMode::two_d ? 1 : 0;
    row->n_t = r.n_t;
    row->n_r = r.n_r;
    row->S = r.S;
    row->L = r.L;
    row->prior_deg = r.prior_deg.value_or(nan);
    row->grid_mult = r.grid_mult.value_or(nan);
    row->snr_db = r.snr_db;
    row->trial = r.trial;
    row->seed = r.seed;
    row->nmse_db = r.failed ? nan : r.nmse_db;
    row->iters = r.iters;
    row->wall_ms = r.wall_ms;
    row->failed = r.failed ? 1 : 0;
    return FSANM_OK;
}

size_t fsanm_experiment_summary_count(const fsanm_experiment *e)
{
    return e && e->result ? e->result->summary.size() : 0;
}

fsanm_status fsanm_experiment_summary(const fsanm_experiment *e, size_t index, fsanm_summary_entry *entry)
{
    last_error.clear();
    if (!e || !entry)
        return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_summary: null pointer");
    if (!e->result || index >= e->result->summary.size())
        return fail_with(FSANM_ERR_INVALID_ARGUMENT, "fsanm_experiment_summary: index out of range");
    const auto &s = e->result->summary[index];
    copy_tag(entry->method, s.method);
    entry->snr_db = s.snr_db;
    entry->mean_nmse_db = s.mean_nmse_db;
    entry->trials_ok = s.trials_ok;
    entry->trials_failed = s.trials_failed;
    return FSANM_OK;
}

int fsanm_experiment_failures(const fsanm_experiment *e)
{
    return e && e->result ? e->result->failures : 0;
}

int fsanm_experiment_measurements_matched(const fsanm_experiment *e)
{
    if (!e || !e->result)
        return 0;
    for (const auto &c : e->result->checksums)
        if (!c.matched)
            return 0;
    return 1;
}

void fsanm_experiment_free(fsanm_experiment *e)
{
    delete e;
}

} // extern "C"
