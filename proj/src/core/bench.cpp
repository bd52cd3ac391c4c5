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

#include "core/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "core/error.hpp"
#include "core/estimators.hpp"

namespace fsanm
{
    namespace
    {
        constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        double parse_double(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
                fail(ErrorCode::invalid_argument, "config: bad number for '" + key + "': '" + text + "'");
            return v;
        }

        long long parse_integer(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            long long v = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
                fail(ErrorCode::invalid_argument, "config: bad integer for '" + key + "': '" + text + "'");
            return v;
        }

        int parse_int(const std::string &key, const std::string &text)
        {
            const long long v = parse_integer(key, text);
            require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(),
                    ErrorCode::invalid_argument, "config: integer out of range for '" + key + "'");
            return static_cast<int>(v);
        }

        std::uint64_t parse_seed(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            std::uint64_t v = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
                fail(ErrorCode::invalid_argument, "config: bad seed for '" + key + "': '" + text + "'");
            return v;
        }

        bool parse_bool(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            if (t == "true" || t == "1" || t == "yes" || t == "on")
                return true;
            if (t == "false" || t == "0" || t == "no" || t == "off")
                return false;
            fail(ErrorCode::invalid_argument, "config: bad boolean for '" + key + "': '" + text + "'");
        }

        std::vector<double> parse_list(const std::string &key, const std::string &text)
        {
            std::vector<double> out;
            if (trim(text).empty())
                return out;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ','))
                out.push_back(parse_double(key, item));
            return out;
        }

        // %g-style short form for tags and echo columns.
        std::string short_num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            return buf;
        }

        // Round-trippable form for values the plots aggregate.
        std::string full_num(double v)
        {
            if (std::isnan(v))
                return "nan";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::uint64_t fnv1a(std::uint64_t h, const void *data, std::size_t n) noexcept
        {
            const auto *p = static_cast<const unsigned char *>(data);
            for (std::size_t i = 0; i < n; ++i)
            {
                h ^= p[i];
                h *= 1099511628211ULL;
            }
            return h;
        }

        std::uint64_t hash_matrix(std::uint64_t h, const CMatrix &M) noexcept
        {
            const Eigen::Index dims[2] = {M.rows(), M.cols()};
            h = fnv1a(h, dims, sizeof dims);
            return fnv1a(h, M.data(), sizeof(cdouble) * static_cast<std::size_t>(M.size()));
        }

        struct Method
        {
            enum class Kind
            {
                fs,
                plain,
                omp
            } kind;
            std::string tag;
            double param = 0.0; // prior width (deg) or grid multiplier
        };

        std::vector<Method> method_list(const ExperimentConfig &cfg)
        {
            std::vector<Method> out;
            for (double w : cfg.prior_widths_deg)
                out.push_back({Method::Kind::fs, "fs-anm@" + short_num(w), w});
            if (cfg.plain_anm)
                out.push_back({Method::Kind::plain, "anm", 0.0});
            for (double g : cfg.omp_grids)
                out.push_back({Method::Kind::omp, "omp@" + short_num(g), g});
            return out;
        }

        double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }

        // Frequency seen by a half-wavelength ULA at this angle, and back.
        double angle_of(double freq) { return std::asin(std::clamp(2.0 * freq, -1.0, 1.0)); }

        struct TrialSetup
        {
            Channel channel;
            CMatrix F;
            CMatrix X;
            std::uint64_t noise_seed = 0;
            double tx_center = 0.0; // prior center angles, radians
            double rx_center = 0.0;
        };

        TrialSetup draw_trial(const ExperimentConfig &cfg, std::uint64_t trial_seed)
        {
            const bool two = cfg.mode == ExperimentMode::two_d;
            const int n_r = two ? cfg.n_r : 1;
            const double sep_tx = cfg.min_sep_tx.value_or(two ? 1.0 / (cfg.n_t * cfg.n_r) : 1.0 / cfg.n_t);
            const double sep_rx = cfg.min_sep_rx.value_or(two ? 1.0 / (cfg.n_t * cfg.n_r) : 0.0);

            std::vector<double> variances(static_cast<std::size_t>(cfg.L));
            for (int l = 0; l < cfg.L; ++l)
                variances[static_cast<std::size_t>(l)] =
                    cfg.gain_variances[std::min<std::size_t>(static_cast<std::size_t>(l), cfg.gain_variances.size() - 1)];
            const auto anchor = static_cast<std::size_t>(
                std::max_element(variances.begin(), variances.end()) - variances.begin());

            TrialSetup setup;
            constexpr int max_redraws = 100;
            for (int attempt = 0; attempt < max_redraws; ++attempt)
            {
                std::mt19937_64 rng(mix_seed(mix_seed(trial_seed, 4), static_cast<std::uint64_t>(attempt)));
                std::uniform_real_distribution<double> freq(-0.5, 0.5);
                std::uniform_real_distribution<double> angle(-std::numbers::pi / 2, std::numbers::pi / 2);

                std::vector<PathSpec> spec(static_cast<std::size_t>(cfg.L));
                for (std::size_t l = 0; l < spec.size(); ++l)
                    spec[l].gain_variance = variances[l];

                if (!cfg.prior_widths_deg.empty())
                {
                    const double narrow = deg_to_rad(*std::min_element(cfg.prior_widths_deg.begin(),
                                                                       cfg.prior_widths_deg.end()));
                    if (cfg.prior_center == PriorCenter::strongest)
                    {
                        const double f_t = freq(rng);
                        const double f_r = two ? freq(rng) : 0.0;
                        spec[anchor].tx_freq = f_t;
                        if (two)
                            spec[anchor].rx_freq = f_r;
                        setup.tx_center = angle_of(f_t);
                        setup.rx_center = angle_of(f_r);
                    }
                    else
                    {
                        setup.tx_center = angle(rng);
                        setup.rx_center = two ? angle(rng) : 0.0;
                    }
                    const FrequencyInterval tx_band = angle_prior_to_interval(setup.tx_center, narrow);
                    const FrequencyInterval rx_band = angle_prior_to_interval(setup.rx_center, narrow);
                    for (std::size_t l = 0; l < spec.size(); ++l)
                    {
                        if (spec[l].tx_freq)
                            continue;
                        spec[l].tx_band = tx_band;
                        if (two)
                            spec[l].rx_band = rx_band;
                    }
                }

                try
                {
                    setup.channel = generate_channel(cfg.n_t, n_r, spec, sep_tx, sep_rx,
                                                     mix_seed(mix_seed(trial_seed, 1), static_cast<std::uint64_t>(attempt)),
                                                     2000);
                    break;
                }
                catch (const Error &e)
                {
                    if (e.code() != ErrorCode::infeasible || attempt + 1 == max_redraws)
                        throw;
                }
            }
            setup.F = sensing_matrix(cfg.n_t, cfg.S, cfg.sensing, mix_seed(trial_seed, 2));
            setup.X = CMatrix::Identity(cfg.S, cfg.S);
            setup.noise_seed = mix_seed(trial_seed, 3);
            return setup;
        }

        struct TrialOutput
        {
            std::vector<ResultRow> rows;
            std::vector<TrialChecksum> checksums;
        };

        TrialOutput run_trial(const ExperimentConfig &cfg, const std::vector<Method> &methods,
                              const std::vector<GridDictionary> &dicts, int trial)
        {
            const bool two = cfg.mode == ExperimentMode::two_d;
            const std::uint64_t seed = mix_seed(cfg.base_seed, static_cast<std::uint64_t>(trial));

            ResultRow base;
            base.mode = cfg.mode;
            base.n_t = cfg.n_t;
            base.n_r = two ? cfg.n_r : 1;
            base.S = cfg.S;
            base.L = cfg.L;
            base.trial = trial;
            base.seed = seed;

            TrialOutput out;
            std::optional<TrialSetup> setup;
            try
            {
                setup = draw_trial(cfg, seed);
            }
            catch (const Error &)
            {
                // No channel for this trial: every row is a failure.
            }

            for (double snr : cfg.snr_grid_db)
            {
                std::optional<MeasurementSet> m;
                TrialChecksum sum{trial, snr, 0, 0, true};
                if (setup)
                {
                    const double nv = noise_variance_for_snr(setup->channel.H, setup->F, setup->X, snr);
                    m = simulate_measurements(setup->channel.H, setup->F, setup->X, nv, setup->noise_seed);
                    sum.measurement = hash_measurement(*m);
                }
                std::size_t omp_index = 0;
                for (const Method &method : methods)
                {
                    ResultRow row = base;
                    row.method = method.tag;
                    row.snr_db = snr;
                    if (method.kind == Method::Kind::fs)
                        row.prior_deg = method.param;
                    if (method.kind == Method::Kind::omp)
                        row.grid_mult = method.param;
                    row.nmse_db = nan_v;
                    row.failed = true;
                    const GridDictionary *dict = method.kind == Method::Kind::omp ? &dicts[omp_index++] : nullptr;
                    if (!m)
                    {
                        out.rows.push_back(row);
                        continue;
                    }

                    if (hash_measurement(*m) != sum.measurement)
                        sum.matched = false;
                    ++sum.consumers;

                    EstimatorOptions opts;
                    opts.mu = cfg.mu;
                    opts.mu_scale = cfg.mu_scale;
                    opts.solver = cfg.solver;
                    opts.truth = setup->channel.H;

                    const auto t0 = std::chrono::steady_clock::now();
                    try
                    {
                        EstimateResult r;
                        switch (method.kind)
                        {
                        case Method::Kind::fs:
                        {
                            const double w = deg_to_rad(method.param);
                            const FrequencyInterval tx = angle_prior_to_interval(setup->tx_center, w);
                            if (two)
                                r = estimate_fs_anm_2d(*m, tx, angle_prior_to_interval(setup->rx_center, w), opts);
                            else
                                r = estimate_fs_anm_1d(*m, tx, opts);
                            break;
                        }
                        case Method::Kind::plain:
                            r = estimate_anm_plain(*m, opts);
                            break;
                        case Method::Kind::omp:
                            r = estimate_omp(*m, *dict, cfg.L, opts.truth);
                            break;
                        }
                        row.iters = r.solver ? r.solver->iterations : static_cast<int>(r.omp->support.size());
                        const bool ok = !r.solver || r.solver->converged;
                        if (ok && r.nmse_db && std::isfinite(*r.nmse_db))
                        {
                            row.nmse_db = *r.nmse_db;
                            row.failed = false;
                        }
                    }
                    catch (const Error &)
                    {
                        // recorded as a failed row
                    }
                    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                    out.rows.push_back(row);
                }
                out.checksums.push_back(sum);
            }
            return out;
        }
    }

    void ExperimentConfig::validate() const
    {
        const bool two = mode == ExperimentMode::two_d;
        require(n_t >= 2, ErrorCode::invalid_argument, "config: n_t must be >= 2");
        require(two ? n_r >= 2 : n_r == 1, ErrorCode::invalid_argument,
                two ? "config: 2d mode needs n_r >= 2" : "config: 1d mode needs n_r = 1");
        require(S >= 1, ErrorCode::invalid_argument, "config: S must be >= 1");
        require(L >= 1, ErrorCode::invalid_argument, "config: L must be >= 1");
        require(trials >= 1, ErrorCode::invalid_argument, "config: trials must be >= 1");
        require(!snr_grid_db.empty(), ErrorCode::invalid_argument, "config: snr_grid_db is empty");
        for (double w : prior_widths_deg)
            require(w > 0.0 && w <= 360.0, ErrorCode::invalid_argument, "config: prior widths must lie in (0, 360]");
        for (double g : omp_grids)
            require(g > 0.0, ErrorCode::invalid_argument, "config: omp grid multipliers must be positive");
        require(!prior_widths_deg.empty() || plain_anm || !omp_grids.empty(), ErrorCode::invalid_argument,
                "config: no estimator selected");
        require(!gain_variances.empty(), ErrorCode::invalid_argument, "config: gain_variances is empty");
        for (double v : gain_variances)
            require(v > 0.0, ErrorCode::invalid_argument, "config: gain variances must be positive");
        require(!min_sep_tx || *min_sep_tx >= 0.0, ErrorCode::invalid_argument, "config: min_sep_tx < 0");
        require(!min_sep_rx || *min_sep_rx >= 0.0, ErrorCode::invalid_argument, "config: min_sep_rx < 0");
        require(!mu || *mu > 0.0, ErrorCode::invalid_argument, "config: mu must be > 0");
        require(mu_scale > 0.0, ErrorCode::invalid_argument, "config: mu_scale must be > 0");
        require(max_failure_rate >= 0.0 && max_failure_rate <= 1.0, ErrorCode::invalid_argument,
                "config: max_failure_rate must lie in [0, 1]");
        require(jobs >= 1, ErrorCode::invalid_argument, "config: jobs must be >= 1");
        require(solver.rho > 0.0 && solver.max_iter >= 1 && solver.eps_abs >= 0.0 && solver.eps_rel >= 0.0,
                ErrorCode::invalid_argument, "config: bad solver options");
        require(solver.relaxation > 0.0 && solver.relaxation < 2.0, ErrorCode::invalid_argument,
                "config: relaxation must lie in (0, 2)");
    }

    ExperimentConfig default_config(ExperimentMode mode)
    {
        ExperimentConfig cfg;
        cfg.mode = mode;
        cfg.prior_widths_deg = {180, 120, 60, 30};
        if (mode == ExperimentMode::two_d)
        {
            cfg.n_t = 16;
            cfg.n_r = 8;
            cfg.S = 16;
            cfg.trials = 200;
        }
        return cfg;
    }

    void apply_setting(ExperimentConfig &cfg, const std::string &key, const std::string &value)
    {
        const std::string v = trim(value);
        if (key == "mode")
        {
            if (v == "1d" || v == "1D")
                cfg = default_config(ExperimentMode::one_d);
            else if (v == "2d" || v == "2D")
                cfg = default_config(ExperimentMode::two_d);
            else
                fail(ErrorCode::invalid_argument, "config: mode must be 1d or 2d");
        }
        else if (key == "n_t")
            cfg.n_t = parse_int(key, v);
        else if (key == "n_r")
            cfg.n_r = parse_int(key, v);
        else if (key == "S")
            cfg.S = parse_int(key, v);
        else if (key == "L")
            cfg.L = parse_int(key, v);
        else if (key == "snr_grid_db")
            cfg.snr_grid_db = parse_list(key, v);
        else if (key == "prior_widths_deg")
            cfg.prior_widths_deg = parse_list(key, v);
        else if (key == "plain_anm")
            cfg.plain_anm = parse_bool(key, v);
        else if (key == "omp_grids")
            cfg.omp_grids = parse_list(key, v);
        else if (key == "trials")
            cfg.trials = parse_int(key, v);
        else if (key == "base_seed")
            cfg.base_seed = parse_seed(key, v);
        else if (key == "gain_variances")
            cfg.gain_variances = parse_list(key, v);
        else if (key == "min_sep_tx")
            cfg.min_sep_tx = parse_double(key, v);
        else if (key == "min_sep_rx")
            cfg.min_sep_rx = parse_double(key, v);
        else if (key == "sensing")
        {
            if (v == "dft")
                cfg.sensing = SensingKind::dft;
            else if (v == "gaussian")
                cfg.sensing = SensingKind::gaussian;
            else
                fail(ErrorCode::invalid_argument, "config: sensing must be dft or gaussian");
        }
        else if (key == "prior_center")
        {
            if (v == "strongest")
                cfg.prior_center = PriorCenter::strongest;
            else if (v == "uniform")
                cfg.prior_center = PriorCenter::uniform;
            else
                fail(ErrorCode::invalid_argument, "config: prior_center must be strongest or uniform");
        }
        else if (key == "mu_scale")
            cfg.mu_scale = parse_double(key, v);
        else if (key == "mu")
            cfg.mu = parse_double(key, v);
        else if (key == "rho")
            cfg.solver.rho = parse_double(key, v);
        else if (key == "adaptive_rho")
            cfg.solver.adaptive_rho = parse_bool(key, v);
        else if (key == "adapt_interval")
            cfg.solver.adapt_interval = parse_int(key, v);
        else if (key == "adapt_factor")
            cfg.solver.adapt_factor = parse_double(key, v);
        else if (key == "adapt_ratio")
            cfg.solver.adapt_ratio = parse_double(key, v);
        else if (key == "max_iter")
            cfg.solver.max_iter = parse_int(key, v);
        else if (key == "eps_abs")
            cfg.solver.eps_abs = parse_double(key, v);
        else if (key == "eps_rel")
            cfg.solver.eps_rel = parse_double(key, v);
        else if (key == "relaxation")
            cfg.solver.relaxation = parse_double(key, v);
        else if (key == "max_failure_rate")
            cfg.max_failure_rate = parse_double(key, v);
        else if (key == "jobs")
            cfg.jobs = parse_int(key, v);
        else
            fail(ErrorCode::invalid_argument, "config: unknown key '" + key + "'");
    }

    ExperimentConfig parse_config(std::istream &is)
    {
        std::vector<std::pair<std::string, std::string>> entries;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line))
        {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            if (trim(line).empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                fail(ErrorCode::invalid_argument, "config line " + std::to_string(lineno) + ": expected key = value");
            entries.emplace_back(trim(line.substr(0, eq)), line.substr(eq + 1));
        }

        ExperimentConfig cfg = default_config(ExperimentMode::one_d);
        // mode first, so it can reset the defaults without clobbering later keys
        for (const auto &[k, v] : entries)
            if (k == "mode")
                apply_setting(cfg, k, v);
        for (const auto &[k, v] : entries)
            if (k != "mode")
                apply_setting(cfg, k, v);
        cfg.validate();
        return cfg;
    }

    ExperimentConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        require(static_cast<bool>(in), ErrorCode::io, "cannot open config '" + path + "'");
        return parse_config(in);
    }

    std::uint64_t hash_measurement(const MeasurementSet &m) noexcept
    {
        std::uint64_t h = 1469598103934665603ULL;
        h = hash_matrix(h, m.Y);
        h = hash_matrix(h, m.F);
        h = hash_matrix(h, m.X);
        return h;
    }

    std::string mode_name(ExperimentMode mode)
    {
        return mode == ExperimentMode::two_d ? "2d" : "1d";
    }

    RunResult run_experiment(const ExperimentConfig &cfg, const ProgressFn &progress)
    {
        cfg.validate();
        const std::vector<Method> methods = method_list(cfg);
        std::vector<GridDictionary> dicts;
        const int n_r = cfg.mode == ExperimentMode::two_d ? cfg.n_r : 1;
        for (double g : cfg.omp_grids)
            dicts.push_back(grid_for_multiplier(cfg.n_t, n_r, g));

        std::vector<TrialOutput> outputs(static_cast<std::size_t>(cfg.trials));
        std::atomic<int> next{0};
        std::mutex mtx;
        int done = 0;
        std::exception_ptr first_error;

        auto worker = [&] {
            for (int t = next++; t < cfg.trials; t = next++)
            {
                try
                {
                    outputs[static_cast<std::size_t>(t)] = run_trial(cfg, methods, dicts, t);
                }
                catch (...)
                {
                    const std::lock_guard lock(mtx);
                    if (!first_error)
                        first_error = std::current_exception();
                }
                const std::lock_guard lock(mtx);
                ++done;
                if (progress)
                    progress(done, cfg.trials);
            }
        };

        const int jobs = std::min(cfg.jobs, cfg.trials);
        if (jobs <= 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (int j = 0; j < jobs; ++j)
                pool.emplace_back(worker);
        }
        if (first_error)
            std::rethrow_exception(first_error);

        RunResult result;
        for (auto &o : outputs)
        {
            result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
            result.checksums.insert(result.checksums.end(), o.checksums.begin(), o.checksums.end());
        }
        std::stable_sort(result.rows.begin(), result.rows.end(), [](const ResultRow &a, const ResultRow &b) {
            return std::tie(a.method, a.snr_db, a.trial) < std::tie(b.method, b.snr_db, b.trial);
        });
        result.failures = static_cast<int>(std::count_if(result.rows.begin(), result.rows.end(),
                                                         [](const ResultRow &r) { return r.failed; }));
        result.summary = summarize(result.rows);
        result.aborted = !result.rows.empty() &&
                         static_cast<double>(result.failures) > cfg.max_failure_rate * static_cast<double>(result.rows.size());
        return result;
    }

    std::vector<SummaryEntry> summarize(const std::vector<ResultRow> &rows)
    {
        struct Acc
        {
            double sum = 0.0;
            int ok = 0;
            int failed = 0;
        };
        std::map<std::pair<std::string, double>, Acc> acc;
        for (const ResultRow &r : rows)
        {
            Acc &a = acc[{r.method, r.snr_db}];
            if (r.failed || !std::isfinite(r.nmse_db))
                ++a.failed;
            else
            {
                a.sum += std::pow(10.0, r.nmse_db / 10.0);
                ++a.ok;
            }
        }
        std::vector<SummaryEntry> out;
        for (const auto &[key, a] : acc)
            out.push_back({key.first, key.second, a.ok > 0 ? 10.0 * std::log10(a.sum / a.ok) : nan_v, a.ok, a.failed});
        return out;
    }

    void write_csv(std::ostream &os, const std::vector<ResultRow> &rows)
    {
        os << csv_header << '\n';
        char wall[32];
        for (const ResultRow &r : rows)
        {
            std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
            os << r.method << ',' << mode_name(r.mode) << ',' << r.n_t << ',' << r.n_r << ',' << r.S << ',' << r.L << ','
               << (r.prior_deg ? short_num(*r.prior_deg) : "") << ',' << (r.grid_mult ? short_num(*r.grid_mult) : "")
               << ',' << short_num(r.snr_db) << ',' << r.trial << ',' << r.seed << ','
               << full_num(r.failed ? nan_v : r.nmse_db) << ',' << r.iters << ',' << wall << '\n';
        }
    }

    void write_json(std::ostream &os, const RunResult &result)
    {
        using nlohmann::json;
        auto num_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
        json rows = json::array();
        for (const ResultRow &r : result.rows)
        {
            rows.push_back({{"method", r.method},
                            {"mode", mode_name(r.mode)},
                            {"n_t", r.n_t},
                            {"n_r", r.n_r},
                            {"S", r.S},
                            {"L", r.L},
                            {"prior_deg", r.prior_deg ? json(*r.prior_deg) : json(nullptr)},
                            {"grid_mult", r.grid_mult ? json(*r.grid_mult) : json(nullptr)},
                            {"snr_db", r.snr_db},
                            {"trial", r.trial},
                            {"seed", r.seed},
                            {"nmse_db", num_or_null(r.failed ? nan_v : r.nmse_db)},
                            {"iters", r.iters},
                            {"wall_ms", r.wall_ms}});
        }
        json entries = json::array();
        for (const SummaryEntry &s : result.summary)
            entries.push_back({{"method", s.method},
                               {"snr_db", s.snr_db},
                               {"mean_nmse_db", num_or_null(s.mean_nmse_db)},
                               {"trials_ok", s.trials_ok},
                               {"trials_failed", s.trials_failed}});
        const json doc = {{"rows", rows},
                          {"summary",
                           {{"entries", entries},
                            {"rows", result.rows.size()},
                            {"failures", result.failures},
                            {"aborted", result.aborted}}}};
        os << doc.dump(2) << '\n';
    }

    void emit_results(const RunResult &result, const std::string &path, OutputFormat format)
    {
        std::ofstream out(path, std::ios::binary);
        require(static_cast<bool>(out), ErrorCode::io, "cannot open '" + path + "' for writing");
        if (format == OutputFormat::csv)
            write_csv(out, result.rows);
        else
            write_json(out, result);
        out.flush();
        require(static_cast<bool>(out), ErrorCode::io, "write to '" + path + "' failed");
    }
}
