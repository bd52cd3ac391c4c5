/* SPDX-License-Identifier: Apache-2.0
 *
 * fsanm - frequency-selective atomic norm channel estimation
 * Copyright (C) 2026 fsanm developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C interface of libfsanm. All functions return an fsanm_status; on failure
 * fsanm_last_error() holds a message for the calling thread. Complex vectors
 * are passed as interleaved (re, im) doubles.
 */

#ifndef FSANM_FSANM_H
#define FSANM_FSANM_H

#include <stddef.h>
#include <stdint.h>

#if defined(FSANM_BUILDING_LIBRARY)
#define FSANM_API __attribute__((visibility("default")))
#else
#define FSANM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fsanm_status
{
    FSANM_OK = 0,
    FSANM_ERR_INVALID_ARGUMENT = 1,
    FSANM_ERR_DIMENSION_MISMATCH = 2,
    FSANM_ERR_NOT_CONVERGED = 3,
    FSANM_ERR_MODEL_ORDER = 4,
    FSANM_ERR_IO = 5,
    FSANM_ERR_ABORTED = 6, /* experiment failure rate above the limit; results are still readable */
    FSANM_ERR_INFEASIBLE = 7,
    FSANM_ERR_INTERNAL = 99
} fsanm_status;

FSANM_API const char *fsanm_version(void);
FSANM_API const char *fsanm_status_string(fsanm_status status);
/* Message of the last failed call on this thread ("" if none). */
FSANM_API const char *fsanm_last_error(void);

/* ---- solver ---------------------------------------------------------- */

typedef enum fsanm_constraint
{
    FSANM_CONSTRAINT_FS = 0,
    FSANM_CONSTRAINT_PLAIN = 1
} fsanm_constraint;

typedef struct fsanm_solver_options
{
    double rho;
    int adaptive_rho;
    int max_iter;
    double eps_abs;
    double eps_rel;
} fsanm_solver_options;

FSANM_API void fsanm_solver_options_default(fsanm_solver_options *opts);

/* Atomic norm of h (length n_t * n_r, entry m * n_r + p for Tx m, Rx p) over atoms
 * a(n_t, theta) (x) a(n_r, phi). With FSANM_CONSTRAINT_FS, tx_band / rx_band point to
 * {lo, hi} pairs (either may be NULL for the full band; rx_band is ignored when n_r == 1).
 * opts and trace_csv may be NULL; iterations may be NULL. */
FSANM_API fsanm_status fsanm_atomic_norm(const double *h, int n_t, int n_r, fsanm_constraint mode,
                                         const double *tx_band, const double *rx_band,
                                         const fsanm_solver_options *opts, const char *trace_csv,
                                         double *norm, int *iterations);

/* ---- frequency retrieval ------------------------------------------------ */

typedef struct fsanm_decomposition fsanm_decomposition;

/* Vandermonde decomposition of a PSD (2-level) Toeplitz matrix from its generating
 * sequence. 1D (n_r == 1): 2 n_t - 1 values for lags -(n_t-1) .. n_t-1. 2D: the
 * (2 n_t - 1) x (2 n_r - 1) grid V(k, j), k outer, j inner, both from the most negative
 * lag. order 0 lets the numerical rank decide. */
FSANM_API fsanm_status fsanm_retrieve(const double *seq, size_t count, int n_t, int n_r, int order,
                                      fsanm_decomposition **out);
FSANM_API size_t fsanm_decomposition_size(const fsanm_decomposition *d);
FSANM_API fsanm_status fsanm_decomposition_atom(const fsanm_decomposition *d, size_t index, double *coefficient,
                                                double *tx_freq, double *rx_freq);
FSANM_API double fsanm_decomposition_residual(const fsanm_decomposition *d);
FSANM_API void fsanm_decomposition_free(fsanm_decomposition *d);

/* ---- Monte Carlo experiments ---------------------------------------- */

typedef struct fsanm_experiment fsanm_experiment;

typedef struct fsanm_result_row
{
    char method[32];
    int two_dim;
    int n_t, n_r, S, L;
    double prior_deg; /* NaN when not applicable */
    double grid_mult; /* NaN when not applicable */
    double snr_db;
    int trial;
    uint64_t seed;
    double nmse_db; /* NaN for failed rows */
    int iters;
    double wall_ms;
    int failed;
} fsanm_result_row;

typedef struct fsanm_summary_entry
{
    char method[32];
    double snr_db;
    double mean_nmse_db;
    int trials_ok;
    int trials_failed;
} fsanm_summary_entry;

typedef void (*fsanm_progress_fn)(int done, int total, void *user);

/* mode is "1d" or "2d"; the experiment starts from that mode's defaults. */
FSANM_API fsanm_status fsanm_experiment_create(const char *mode, fsanm_experiment **out);
FSANM_API fsanm_status fsanm_experiment_from_file(const char *path, fsanm_experiment **out);
/* Same keys as the config file. */
FSANM_API fsanm_status fsanm_experiment_set(fsanm_experiment *e, const char *key, const char *value);
FSANM_API fsanm_status fsanm_experiment_run(fsanm_experiment *e, fsanm_progress_fn progress, void *user);
/* format is "csv" or "json". */
FSANM_API fsanm_status fsanm_experiment_write(const fsanm_experiment *e, const char *path, const char *format);
FSANM_API size_t fsanm_experiment_row_count(const fsanm_experiment *e);
FSANM_API fsanm_status fsanm_experiment_row(const fsanm_experiment *e, size_t index, fsanm_result_row *row);
FSANM_API size_t fsanm_experiment_summary_count(const fsanm_experiment *e);
FSANM_API fsanm_status fsanm_experiment_summary(const fsanm_experiment *e, size_t index, fsanm_summary_entry *entry);
FSANM_API int fsanm_experiment_failures(const fsanm_experiment *e);
/* 1 when every estimator in every (trial, snr) consumed identical Y, F, X. */
FSANM_API int fsanm_experiment_measurements_matched(const fsanm_experiment *e);
FSANM_API void fsanm_experiment_free(fsanm_experiment *e);

#ifdef __cplusplus
}
#endif

#endif
