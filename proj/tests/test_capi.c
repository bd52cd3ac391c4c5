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
 * Exercises the shared library from plain C. Usage: test_capi <scratch-dir>
 */

#include <fsanm/fsanm.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                        \
    do                                                                      \
    {                                                                       \
        if (!(cond))                                                        \
        {                                                                   \
            fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                     \
        }                                                                   \
    } while (0)

static const double two_pi = 6.283185307179586;

static void steering(double *out, int n, double f, double scale)
{
    for (int k = 0; k < n; ++k)
    {
        out[2 * k] = scale * cos(two_pi * k * f);
        out[2 * k + 1] = scale * sin(two_pi * k * f);
    }
}

static void test_norm(void)
{
    double h[2 * 8];
    steering(h, 8, 0.12, 1.7);
    double value = 0.0;
    int iters = 0;

    EXPECT(fsanm_atomic_norm(h, 8, 1, FSANM_CONSTRAINT_PLAIN, NULL, NULL, NULL, NULL, &value, &iters) == FSANM_OK);
    EXPECT(fabs(value - 1.7) < 1.7e-3);
    EXPECT(iters > 0);

    const double band[2] = {0.0, 0.3};
    EXPECT(fsanm_atomic_norm(h, 8, 1, FSANM_CONSTRAINT_FS, band, NULL, NULL, NULL, &value, NULL) == FSANM_OK);
    EXPECT(fabs(value - 1.7) < 1.7e-3);

    /* an atom outside the band costs more than its magnitude */
    const double other[2] = {-0.4, -0.1};
    EXPECT(fsanm_atomic_norm(h, 8, 1, FSANM_CONSTRAINT_FS, other, NULL, NULL, NULL, &value, NULL) == FSANM_OK);
    EXPECT(value > 1.7 * 1.05);

    fsanm_solver_options opts;
    fsanm_solver_options_default(&opts);
    EXPECT(opts.rho > 0.0 && opts.max_iter > 0);
    opts.max_iter = 2;
    EXPECT(fsanm_atomic_norm(h, 8, 1, FSANM_CONSTRAINT_PLAIN, NULL, NULL, &opts, NULL, &value, NULL) ==
           FSANM_ERR_NOT_CONVERGED);
    EXPECT(strlen(fsanm_last_error()) > 0);

    const double bad_band[2] = {0.3, 0.1};
    EXPECT(fsanm_atomic_norm(h, 8, 1, FSANM_CONSTRAINT_FS, bad_band, NULL, NULL, NULL, &value, NULL) ==
           FSANM_ERR_INVALID_ARGUMENT);
    EXPECT(fsanm_atomic_norm(NULL, 8, 1, FSANM_CONSTRAINT_PLAIN, NULL, NULL, NULL, NULL, &value, NULL) ==
           FSANM_ERR_INVALID_ARGUMENT);
}

static void test_retrieve(void)
{
    /* t_k = 2 e^{i2pi 0.1 k} + 0.5 e^{-i2pi 0.3 k}, n = 6 */
    const int n = 6;
    double seq[2 * 11];
    for (int k = -(n - 1); k <= n - 1; ++k)
    {
        const int i = k + n - 1;
        seq[2 * i] = 2.0 * cos(two_pi * 0.1 * k) + 0.5 * cos(-two_pi * 0.3 * k);
        seq[2 * i + 1] = 2.0 * sin(two_pi * 0.1 * k) + 0.5 * sin(-two_pi * 0.3 * k);
    }
    fsanm_decomposition *d = NULL;
    EXPECT(fsanm_retrieve(seq, 11, n, 1, 0, &d) == FSANM_OK);
    if (!d)
        return;
    EXPECT(fsanm_decomposition_size(d) == 2);
    int found_a = 0, found_b = 0;
    for (size_t i = 0; i < fsanm_decomposition_size(d); ++i)
    {
        double c = 0.0, tx = 0.0, rx = 0.0;
        EXPECT(fsanm_decomposition_atom(d, i, &c, &tx, &rx) == FSANM_OK);
        EXPECT(isnan(rx));
        found_a |= fabs(tx - 0.1) < 1e-8 && fabs(c - 2.0) < 1e-8;
        found_b |= fabs(tx + 0.3) < 1e-8 && fabs(c - 0.5) < 1e-8;
    }
    EXPECT(found_a && found_b);
    EXPECT(fsanm_decomposition_residual(d) < 1e-10);
    double c, tx, rx;
    EXPECT(fsanm_decomposition_atom(d, 5, &c, &tx, &rx) == FSANM_ERR_INVALID_ARGUMENT);
    fsanm_decomposition_free(d);

    EXPECT(fsanm_retrieve(seq, 10, n, 1, 0, &d) == FSANM_ERR_DIMENSION_MISMATCH);
}

static int progress_calls = 0;

static void on_progress(int done, int total, void *user)
{
    (void)user;
    if (done >= 1 && done <= total)
        ++progress_calls;
}

static void test_experiment(const char *dir)
{
    fsanm_experiment *e = NULL;
    EXPECT(fsanm_experiment_create("3d", &e) == FSANM_ERR_INVALID_ARGUMENT);
    EXPECT(fsanm_experiment_create("1d", &e) == FSANM_OK);
    if (!e)
        return;
    EXPECT(fsanm_experiment_set(e, "n_t", "10") == FSANM_OK);
    EXPECT(fsanm_experiment_set(e, "S", "6") == FSANM_OK);
    EXPECT(fsanm_experiment_set(e, "trials", "2") == FSANM_OK);
    EXPECT(fsanm_experiment_set(e, "snr_grid_db", "10") == FSANM_OK);
    EXPECT(fsanm_experiment_set(e, "omp_grids", "1") == FSANM_OK);
    EXPECT(fsanm_experiment_set(e, "prior_widths_deg", "60") == FSANM_OK);
    EXPECT(fsanm_experiment_set(e, "nope", "1") == FSANM_ERR_INVALID_ARGUMENT);
    EXPECT(fsanm_experiment_row_count(e) == 0);

    EXPECT(fsanm_experiment_run(e, on_progress, NULL) == FSANM_OK);
    EXPECT(progress_calls == 2);
    /* fs-anm@60, anm, omp@1 */
    EXPECT(fsanm_experiment_row_count(e) == 6);
    EXPECT(fsanm_experiment_failures(e) == 0);
    EXPECT(fsanm_experiment_measurements_matched(e) == 1);

    fsanm_result_row row;
    EXPECT(fsanm_experiment_row(e, 0, &row) == FSANM_OK);
    EXPECT(strcmp(row.method, "anm") == 0);
    EXPECT(isnan(row.prior_deg) && isnan(row.grid_mult));
    EXPECT(row.n_t == 10 && row.n_r == 1 && row.two_dim == 0);
    EXPECT(!row.failed && isfinite(row.nmse_db));
    EXPECT(fsanm_experiment_row(e, 6, &row) == FSANM_ERR_INVALID_ARGUMENT);

    EXPECT(fsanm_experiment_summary_count(e) == 3);
    fsanm_summary_entry s;
    EXPECT(fsanm_experiment_summary(e, 1, &s) == FSANM_OK);
    EXPECT(strcmp(s.method, "fs-anm@60") == 0);
    EXPECT(s.trials_ok == 2 && s.trials_failed == 0);

    char path[512];
    snprintf(path, sizeof path, "%s/capi_rows.csv", dir);
    EXPECT(fsanm_experiment_write(e, path, "csv") == FSANM_OK);
    FILE *f = fopen(path, "r");
    EXPECT(f != NULL);
    if (f)
    {
        char line[256];
        EXPECT(fgets(line, sizeof line, f) != NULL);
        const char *header = "method,mode,n_t,n_r,S,L,prior_deg,grid_mult,snr_db,trial,seed,nmse_db,iters,wall_ms\n";
        EXPECT(strcmp(line, header) == 0);
        fclose(f);
    }
    snprintf(path, sizeof path, "%s/capi_rows.json", dir);
    EXPECT(fsanm_experiment_write(e, path, "json") == FSANM_OK);
    EXPECT(fsanm_experiment_write(e, path, "xml") == FSANM_ERR_INVALID_ARGUMENT);
    EXPECT(fsanm_experiment_write(e, "/nonexistent/dir/out.csv", "csv") == FSANM_ERR_IO);

    /* non-converging solves: rows stay readable, status reports the abort */
    EXPECT(fsanm_experiment_set(e, "max_iter", "2") == FSANM_OK);
    EXPECT(fsanm_experiment_run(e, NULL, NULL) == FSANM_ERR_ABORTED);
    EXPECT(fsanm_experiment_row_count(e) == 6);
    EXPECT(fsanm_experiment_failures(e) == 4);
    fsanm_experiment_free(e);

    EXPECT(fsanm_experiment_from_file("/nonexistent/x.cfg", &e) == FSANM_ERR_IO);
}

int main(int argc, char **argv)
{
    const char *dir = argc > 1 ? argv[1] : ".";
    EXPECT(strlen(fsanm_version()) > 0);
    EXPECT(strcmp(fsanm_status_string(FSANM_OK), fsanm_status_string(FSANM_ERR_IO)) != 0);
    test_norm();
    test_retrieve();
    test_experiment(dir);
    if (failures)
        fprintf(stderr, "%d check(s) failed\n", failures);
    else
        printf("C API checks passed\n");
    return failures ? 1 : 0;
}
