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
//
// fsanm command line: Monte Carlo runs, atomic norm evaluation and frequency
// retrieval. Uses the public C interface only.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsanm/fsanm.h"

namespace
{
    // Reads whitespace separated "re im" pairs; '#' starts a comment.
    std::vector<double> read_complex_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open '" + path + "'");
        std::vector<double> out;
        std::string line;
        while (std::getline(in, line))
        {
            if (const auto c = line.find('#'); c != std::string::npos)
                line.erase(c);
            std::istringstream ss(line);
            double v = 0.0;
            while (ss >> v)
                out.push_back(v);
            if (!ss.eof())
                throw std::runtime_error("'" + path + "': not a number: " + line);
        }
        if (out.size() % 2 != 0)
            throw std::runtime_error("'" + path + "': odd number of values, expected re im pairs");
        return out;
    }

    std::vector<double> parse_band(const std::string &text)
    {
        std::vector<double> v;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            v.push_back(std::stod(item));
        if (v.size() != 2)
            throw std::runtime_error("band must be lo,hi: '" + text + "'");
        return v;
    }

    int report(fsanm_status s)
    {
        if (s != FSANM_OK)
            std::fprintf(stderr, "fsanm: %s: %s\n", fsanm_status_string(s), fsanm_last_error());
        return s == FSANM_OK ? 0 : static_cast<int>(s);
    }

    void progress(int done, int total, void *)
    {
        std::fprintf(stderr, "\r%d/%d trials", done, total);
        if (done == total)
            std::fputc('\n', stderr);
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Frequency-selective atomic norm channel estimation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fsanm_version());

    // run
    std::string config_path, out_path, format = "csv";
    int trials = 0, jobs = 0;
    std::string seed;
    bool quiet = false;
    std::vector<std::string> overrides;
    auto *run = app.add_subcommand("run", "Run a Monte Carlo experiment from a config file");
    run->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--out", out_path, "output file")->required();
    run->add_option("-f,--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "override base_seed");
    run->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--set", overrides, "extra key=value settings");
    run->add_flag("-q,--quiet", quiet, "no progress output");

    // norm
    std::string vec_path, mode = "fs", tx_band_text, rx_band_text, trace_path;
    int n_t = 0, n_r = 1;
    auto *norm = app.add_subcommand("norm", "Atomic norm of a vector");
    norm->add_option("-i,--input", vec_path, "file of re im pairs, index m * n_r + p")->required()->check(CLI::ExistingFile);
    norm->add_option("--n-t", n_t, "transmit antennas")->required()->check(CLI::PositiveNumber);
    norm->add_option("--n-r", n_r, "receive antennas")->check(CLI::PositiveNumber);
    norm->add_option("--mode", mode, "fs or plain")->check(CLI::IsMember({"fs", "plain"}));
    norm->add_option("--interval", tx_band_text, "Tx band lo,hi");
    norm->add_option("--interval2", rx_band_text, "Rx band lo,hi");
    norm->add_option("--trace", trace_path, "write the solver trace as CSV");

    // retrieve
    std::string seq_path;
    int order = 0;
    auto *retrieve = app.add_subcommand("retrieve", "Vandermonde decomposition of a Toeplitz generating sequence");
    retrieve->add_option("-i,--input", seq_path, "file of re im pairs")->required()->check(CLI::ExistingFile);
    retrieve->add_option("--n-t", n_t, "size (outer level)")->required()->check(CLI::PositiveNumber);
    retrieve->add_option("--n-r", n_r, "size (inner level)")->check(CLI::PositiveNumber);
    retrieve->add_option("--order", order, "number of atoms (0: numerical rank)")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            fsanm_experiment *e = nullptr;
            if (int rc = report(fsanm_experiment_from_file(config_path.c_str(), &e)); rc != 0)
                return rc;
            struct Guard
            {
                fsanm_experiment *e;
                ~Guard() { fsanm_experiment_free(e); }
            } guard{e};

            std::vector<std::pair<std::string, std::string>> settings;
            if (trials > 0)
                settings.emplace_back("trials", std::to_string(trials));
            if (!seed.empty())
                settings.emplace_back("base_seed", seed);
            if (jobs > 0)
                settings.emplace_back("jobs", std::to_string(jobs));
            for (const auto &kv : overrides)
            {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw std::runtime_error("--set expects key=value, got '" + kv + "'");
                settings.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            }
            for (const auto &[k, v] : settings)
                if (int rc = report(fsanm_experiment_set(e, k.c_str(), v.c_str())); rc != 0)
                    return rc;

            const fsanm_status st = fsanm_experiment_run(e, quiet ? nullptr : progress, nullptr);
            if (st != FSANM_OK && st != FSANM_ERR_ABORTED)
                return report(st);
            const std::string run_error = fsanm_last_error();
            // Results are written even when the run is aborted, for inspection.
            if (int rc = report(fsanm_experiment_write(e, out_path.c_str(), format.c_str())); rc != 0)
                return rc;
            if (!quiet)
            {
                for (std::size_t i = 0; i < fsanm_experiment_summary_count(e); ++i)
                {
                    fsanm_summary_entry s;
                    fsanm_experiment_summary(e, i, &s);
                    std::fprintf(stderr, "%-14s snr %6g  nmse %9.3f dB  (%d ok, %d failed)\n", s.method, s.snr_db,
                                 s.mean_nmse_db, s.trials_ok, s.trials_failed);
                }
            }
            if (st == FSANM_ERR_ABORTED)
            {
                std::fprintf(stderr, "fsanm: aborted: %s\n", run_error.c_str());
                return static_cast<int>(st);
            }
            return 0;
        }

        if (*norm)
        {
            const std::vector<double> h = read_complex_file(vec_path);
            if (h.size() != 2 * static_cast<std::size_t>(n_t) * static_cast<std::size_t>(n_r))
                throw std::runtime_error("input has " + std::to_string(h.size() / 2) + " entries, expected n_t * n_r");
            std::vector<double> tx, rx;
            if (!tx_band_text.empty())
                tx = parse_band(tx_band_text);
            if (!rx_band_text.empty())
                rx = parse_band(rx_band_text);
            double value = 0.0;
            int iters = 0;
            const fsanm_status st = fsanm_atomic_norm(
                h.data(), n_t, n_r, mode == "fs" ? FSANM_CONSTRAINT_FS : FSANM_CONSTRAINT_PLAIN,
                tx.empty() ? nullptr : tx.data(), rx.empty() ? nullptr : rx.data(), nullptr,
                trace_path.empty() ? nullptr : trace_path.c_str(), &value, &iters);
            if (st != FSANM_OK)
                return report(st);
            std::printf("%.12g\n", value);
            std::fprintf(stderr, "%d iterations\n", iters);
            return 0;
        }

        if (*retrieve)
        {
            const std::vector<double> seq = read_complex_file(seq_path);
            fsanm_decomposition *d = nullptr;
            if (int rc = report(fsanm_retrieve(seq.data(), seq.size() / 2, n_t, n_r, order, &d)); rc != 0)
                return rc;
            std::printf("coefficient,tx_freq,rx_freq\n");
            for (std::size_t i = 0; i < fsanm_decomposition_size(d); ++i)
            {
                double c = 0, t = 0, r = 0;
                fsanm_decomposition_atom(d, i, &c, &t, &r);
                if (std::isnan(r))
                    std::printf("%.12g,%.12g,\n", c, t);
                else
                    std::printf("%.12g,%.12g,%.12g\n", c, t, r);
            }
            std::fprintf(stderr, "residual %.3g\n", fsanm_decomposition_residual(d));
            fsanm_decomposition_free(d);
            return 0;
        }
    }
    catch (const std::exception &ex)
    {
        std::fprintf(stderr, "fsanm: %s\n", ex.what());
        return 1;
    }
    return 0;
}
