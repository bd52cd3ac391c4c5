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

#include <doctest.h>
#include <json.hpp>

#include <map>
#include <set>
#include <sstream>

#include "core/bench.hpp"
#include "core/error.hpp"

using namespace fsanm;

namespace
{
    ExperimentConfig parse(const std::string &text)
    {
        std::istringstream is(text);
        return parse_config(is);
    }

    ExperimentConfig tiny_1d()
    {
        return parse("mode = 1d\n"
                     "n_t = 12\n"
                     "S = 8\n"
                     "snr_grid_db = 0, 10\n"
                     "prior_widths_deg = 60\n"
                     "omp_grids = 0.5, 1\n"
                     "trials = 3\n"
                     "base_seed = 9\n");
    }

    ExperimentConfig tiny_2d()
    {
        return parse("mode = 2d\n"
                     "n_t = 4\n"
                     "n_r = 3\n"
                     "S = 4\n"
                     "snr_grid_db = 5\n"
                     "prior_widths_deg = 180, 60\n"
                     "omp_grids = 1\n"
                     "trials = 2\n");
    }

    // CSV text with the trailing wall_ms column cut from every line.
    std::string without_timing(const std::vector<ResultRow> &rows)
    {
        std::ostringstream os;
        write_csv(os, rows);
        std::istringstream in(os.str());
        std::string line, out;
        while (std::getline(in, line))
            out += line.substr(0, line.rfind(',')) + '\n';
        return out;
    }

    std::vector<std::string> split(const std::string &line)
    {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream is(line);
        while (std::getline(is, cell, ','))
            out.push_back(cell);
        if (!line.empty() && line.back() == ',')
            out.emplace_back();
        return out;
    }
}

TEST_CASE("config parsing")
{
    const ExperimentConfig c = parse("# comment\n"
                                     "mode = 2d   # trailing comment\n"
                                     "trials = 7\n"
                                     "snr_grid_db = -10, 0 ,10\n"
                                     "plain_anm = false\n"
                                     "sensing = dft\n"
                                     "max_iter = 123\n");
    CHECK(c.mode == ExperimentMode::two_d);
    CHECK(c.n_t == 16);
    CHECK(c.n_r == 8);
    CHECK(c.S == 16);
    CHECK(c.trials == 7);
    CHECK(c.snr_grid_db == std::vector<double>{-10, 0, 10});
    CHECK_FALSE(c.plain_anm);
    CHECK(c.sensing == SensingKind::dft);
    CHECK(c.solver.max_iter == 123);

    // mode resets defaults regardless of where it appears
    const ExperimentConfig d = parse("n_t = 20\nmode = 2d\n");
    CHECK(d.n_t == 20);
    CHECK(d.n_r == 8);

    const ExperimentConfig one = default_config(ExperimentMode::one_d);
    CHECK(one.n_t == 128);
    CHECK(one.S == 50);
    CHECK(one.L == 2);
    CHECK(one.trials == 100);
    CHECK(one.gain_variances == std::vector<double>{1.0, 0.1});
}

TEST_CASE("config errors")
{
    auto code_of = [](const std::string &text) {
        try
        {
            parse(text);
        }
        catch (const Error &e)
        {
            return e.code();
        }
        return ErrorCode{};
    };
    CHECK(code_of("bogus = 1\n") == ErrorCode::invalid_argument);
    CHECK(code_of("n_t = twelve\n") == ErrorCode::invalid_argument);
    CHECK(code_of("n_t 12\n") == ErrorCode::invalid_argument);
    CHECK(code_of("mode = 3d\n") == ErrorCode::invalid_argument);
    CHECK(code_of("trials = 0\n") == ErrorCode::invalid_argument);
    CHECK(code_of("n_r = 4\n") == ErrorCode::invalid_argument); // 1d needs n_r = 1
    CHECK(code_of("prior_widths_deg = 400\n") == ErrorCode::invalid_argument);
    CHECK(code_of("snr_grid_db = \n") == ErrorCode::invalid_argument);
    CHECK(code_of("plain_anm = maybe\n") == ErrorCode::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), Error);

    ExperimentConfig cfg = default_config(ExperimentMode::one_d);
    apply_setting(cfg, "jobs", "3");
    CHECK(cfg.jobs == 3);
    CHECK_THROWS_AS(apply_setting(cfg, "nope", "1"), Error);
}

TEST_CASE("empty result writes only the header")
{
    std::ostringstream os;
    write_csv(os, {});
    CHECK(os.str() == std::string(csv_header) + "\n");
}

TEST_CASE("experiment rows, ordering and schema")
{
    const ExperimentConfig cfg = tiny_1d();
    const RunResult r = run_experiment(cfg);
    // fs-anm@60, anm, omp@0.5, omp@1 over 2 SNR points and 3 trials
    REQUIRE(r.rows.size() == 4u * 2u * 3u);
    CHECK(r.failures == 0);
    CHECK_FALSE(r.aborted);

    std::set<std::tuple<std::string, double, int>> keys;
    std::map<int, std::uint64_t> seed_of_trial;
    for (std::size_t i = 0; i < r.rows.size(); ++i)
    {
        const ResultRow &row = r.rows[i];
        keys.insert({row.method, row.snr_db, row.trial});
        if (i > 0)
        {
            const ResultRow &p = r.rows[i - 1];
            CHECK(std::tie(p.method, p.snr_db, p.trial) < std::tie(row.method, row.snr_db, row.trial));
        }
        CHECK(std::isfinite(row.nmse_db));
        CHECK(row.n_t == 12);
        CHECK(row.n_r == 1);
        if (row.method == "fs-anm@60")
        {
            CHECK(row.prior_deg == 60.0);
            CHECK_FALSE(row.grid_mult);
        }
        else if (row.method.rfind("omp@", 0) == 0)
        {
            CHECK(row.grid_mult);
            CHECK_FALSE(row.prior_deg);
        }
        else
            CHECK(row.method == "anm");
        // one seed per trial, shared by every method and SNR point
        auto [it, fresh] = seed_of_trial.emplace(row.trial, row.seed);
        if (!fresh)
            CHECK(it->second == row.seed);
    }
    CHECK(keys.size() == r.rows.size());
    CHECK(seed_of_trial.size() == 3);

    std::ostringstream os;
    write_csv(os, r.rows);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == csv_header);
    const std::size_t columns = split(line).size();
    int n = 0;
    while (std::getline(in, line))
    {
        CHECK(split(line).size() == columns);
        ++n;
    }
    CHECK(n == static_cast<int>(r.rows.size()));

    // every estimator saw the same measurement for a given (trial, snr)
    CHECK(r.checksums.size() == 6);
    for (const TrialChecksum &c : r.checksums)
    {
        CHECK(c.matched);
        CHECK(c.consumers == 4);
    }
}

TEST_CASE("summary is the linear mean of the rows")
{
    const RunResult r = run_experiment(tiny_1d());
    std::map<std::pair<std::string, double>, std::vector<double>> groups;
    for (const ResultRow &row : r.rows)
        groups[{row.method, row.snr_db}].push_back(row.nmse_db);
    REQUIRE(r.summary.size() == groups.size());
    for (const SummaryEntry &s : r.summary)
    {
        const auto &v = groups.at({s.method, s.snr_db});
        double lin = 0.0;
        for (double x : v)
            lin += std::pow(10.0, x / 10.0);
        CHECK(s.mean_nmse_db == doctest::Approx(10.0 * std::log10(lin / v.size())).epsilon(1e-12));
        CHECK(s.trials_ok == static_cast<int>(v.size()));
        CHECK(s.trials_failed == 0);
    }

    // failed rows are excluded and counted
    std::vector<ResultRow> rows(3);
    for (int i = 0; i < 3; ++i)
    {
        rows[i].method = "anm";
        rows[i].trial = i;
    }
    rows[0].nmse_db = -10.0;
    rows[1].nmse_db = -20.0;
    rows[2].failed = true;
    rows[2].nmse_db = std::nan("");
    const auto s = summarize(rows);
    REQUIRE(s.size() == 1);
    CHECK(s[0].mean_nmse_db == doctest::Approx(10.0 * std::log10(0.055)));
    CHECK(s[0].trials_ok == 2);
    CHECK(s[0].trials_failed == 1);
}

TEST_CASE("runs are reproducible apart from timing, with and without threads")
{
    ExperimentConfig cfg = tiny_2d();
    const RunResult a = run_experiment(cfg);
    const RunResult b = run_experiment(cfg);
    cfg.jobs = 2;
    const RunResult c = run_experiment(cfg);
    CHECK(without_timing(a.rows) == without_timing(b.rows));
    CHECK(without_timing(a.rows) == without_timing(c.rows));
    cfg.base_seed = 2;
    CHECK(without_timing(run_experiment(cfg).rows) != without_timing(a.rows));
    for (const ResultRow &row : a.rows)
    {
        CHECK(row.n_r == 3);
        CHECK(row.mode == ExperimentMode::two_d);
    }
}

TEST_CASE("JSON output")
{
    const RunResult r = run_experiment(tiny_2d());
    std::ostringstream os;
    write_json(os, r);
    const nlohmann::json doc = nlohmann::json::parse(os.str());
    REQUIRE(doc.at("rows").size() == r.rows.size());
    const auto &row = doc.at("rows").at(0);
    for (const char *key : {"method", "mode", "n_t", "n_r", "S", "L", "prior_deg", "grid_mult", "snr_db", "trial",
                            "seed", "nmse_db", "iters", "wall_ms"})
        CHECK(row.contains(key));
    CHECK(row.at("mode") == "2d");
    const auto &summary = doc.at("summary");
    CHECK(summary.at("rows") == r.rows.size());
    CHECK(summary.at("failures") == 0);
    CHECK(summary.at("aborted") == false);
    REQUIRE(summary.at("entries").size() == r.summary.size());
    for (std::size_t i = 0; i < r.summary.size(); ++i)
    {
        CHECK(summary.at("entries")[i].at("method") == r.summary[i].method);
        CHECK(summary.at("entries")[i].at("mean_nmse_db").get<double>() == r.summary[i].mean_nmse_db);
    }
}

TEST_CASE("non-converged solves become NaN rows and trip the failure limit")
{
    ExperimentConfig cfg = tiny_1d();
    cfg.trials = 2;
    cfg.solver.max_iter = 2;
    const RunResult r = run_experiment(cfg);
    int failed = 0;
    for (const ResultRow &row : r.rows)
    {
        const bool sdp = row.method.rfind("omp@", 0) != 0;
        CHECK(row.failed == sdp);
        if (row.failed)
        {
            ++failed;
            CHECK(std::isnan(row.nmse_db));
        }
    }
    CHECK(r.failures == failed);
    CHECK(r.aborted);

    std::ostringstream os;
    write_csv(os, r.rows);
    CHECK(os.str().find(",nan,") != std::string::npos);
    std::ostringstream js;
    write_json(js, r);
    const nlohmann::json doc = nlohmann::json::parse(js.str());
    CHECK(doc.at("summary").at("aborted") == true);
    bool saw_null = false;
    for (const auto &row : doc.at("rows"))
        saw_null = saw_null || row.at("nmse_db").is_null();
    CHECK(saw_null);
}

TEST_CASE("measurement hash sees every matrix")
{
    MeasurementSet m;
    m.Y = Eigen::MatrixXcd::Ones(2, 3);
    m.F = Eigen::MatrixXcd::Ones(4, 3);
    m.X = Eigen::MatrixXcd::Identity(3, 3);
    const std::uint64_t h = hash_measurement(m);
    CHECK(h == hash_measurement(m));
    MeasurementSet n = m;
    n.F(3, 2) = {1.0, 1e-15};
    CHECK(hash_measurement(n) != h);
    n = m;
    n.X(0, 0) = -1.0;
    CHECK(hash_measurement(n) != h);
}
