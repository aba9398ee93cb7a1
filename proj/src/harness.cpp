// SPDX-License-Identifier: Apache-2.0
//
// hpb: hierarchical passive beamforming for RIS-aided downlinks
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

#include "hpb/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace hpb
{
    namespace
    {
        constexpr std::array<std::pair<Algorithm, std::string_view>, 5> algorithm_names{{
            {Algorithm::pb_sca, "pb-sca"},
            {Algorithm::hpb_ao, "hpb-ao"},
            {Algorithm::hpb_es, "hpb-es"},
            {Algorithm::hpb_spp, "hpb-spp"},
            {Algorithm::random, "random"},
        }};

        constexpr std::array<std::pair<SweepVariable, std::string_view>, 3> sweep_names{{
            {SweepVariable::paths, "paths"},
            {SweepVariable::elements, "elements"},
            {SweepVariable::ris, "ris"},
        }};

        int as_positive_int(double value, const char *what)
        {
            const double rounded = std::round(value);
            if (rounded != value || rounded < 1.0)
                throw std::invalid_argument(std::string(what) + " must be a positive integer, got " +
                                            std::to_string(value));
            return static_cast<int>(rounded);
        }

        std::string format_double(double x)
        {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.9g", x);
            return buf;
        }

        // Field parse with the offending text in the message.
        double parse_number(const std::string &field, std::size_t line)
        {
            std::size_t used = 0;
            double value = 0.0;
            try
            {
                value = std::stod(field, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used == 0 || used != field.size())
                throw std::invalid_argument("results line " + std::to_string(line) + ": bad number '" + field + "'");
            return value;
        }
    }

    double achievable_rate(const Eigen::RowVectorXcd &channel_row, const Eigen::VectorXcd &w, double sigma2)
    {
        if (!(sigma2 > 0.0))
            throw std::invalid_argument("achievable_rate: sigma2 must be positive");
        const double power = std::norm((channel_row * w)(0));
        return std::log2(1.0 + power / sigma2);
    }

    std::string_view algorithm_name(Algorithm algorithm)
    {
        for (const auto &[id, name] : algorithm_names)
            if (id == algorithm)
                return name;
        throw std::invalid_argument("algorithm_name: unknown algorithm");
    }

    Algorithm parse_algorithm(std::string_view name)
    {
        for (const auto &[id, text] : algorithm_names)
            if (text == name)
                return id;
        throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                                    "' (expected pb-sca, hpb-ao, hpb-es, hpb-spp or random)");
    }

    std::string_view sweep_name(SweepVariable sweep)
    {
        for (const auto &[id, name] : sweep_names)
            if (id == sweep)
                return name;
        throw std::invalid_argument("sweep_name: unknown sweep variable");
    }

    SweepVariable parse_sweep(std::string_view name)
    {
        for (const auto &[id, text] : sweep_names)
            if (text == name)
                return id;
        throw std::invalid_argument("unknown sweep variable '" + std::string(name) +
                                    "' (expected paths, elements or ris)");
    }

    SystemConfig apply_sweep(SystemConfig base, SweepVariable sweep, double value)
    {
        switch (sweep)
        {
        case SweepVariable::paths:
            base.P = as_positive_int(value, "path count");
            break;
        case SweepVariable::ris:
            base.N = as_positive_int(value, "RIS count");
            if (base.d1.size() != 1 || base.d2.size() != 1)
                throw std::invalid_argument("sweeping the RIS count requires scalar d1 and d2");
            break;
        case SweepVariable::elements:
        {
            const int count = as_positive_int(value, "element count");
            const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
            if (side * side != count || side % 2 != 0)
                throw std::invalid_argument("element count " + std::to_string(count) +
                                            " is not the square of an even integer");
            base.L = side;
            break;
        }
        }
        base.validate();
        return base;
    }

    void ExperimentSpec::validate() const
    {
        if (values.empty())
            throw std::invalid_argument("ExperimentSpec: sweep value list is empty");
        if (algorithms.empty())
            throw std::invalid_argument("ExperimentSpec: algorithm list is empty");
        if (realizations < 1)
            throw std::invalid_argument("ExperimentSpec: realizations must be >= 1");
        if (threads < 0)
            throw std::invalid_argument("ExperimentSpec: threads must be >= 0");
        params.validate();
        for (double value : values)
        {
            const SystemConfig config = apply_sweep(base, sweep, value);
            for (Algorithm algorithm : algorithms)
                if (algorithm == Algorithm::hpb_es && config.N != 1)
                    throw std::invalid_argument("hpb-es requires N = 1 (sweep value " + format_double(value) + ")");
        }
    }

    std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) { return master ^ index; }

    RunResult run_trial(const SystemConfig &config, Algorithm algorithm, std::uint64_t seed,
                        const OptimizerParams &params)
    {
        if (algorithm == Algorithm::hpb_es && config.N != 1)
            throw std::invalid_argument("run_trial: hpb-es requires N = 1");

        auto rng = make_rng(seed);
        const ChannelRealization realization = sample_realization(config, rng);

        OptimizerParams local = params;
        local.seed = seed;
        switch (algorithm)
        {
        case Algorithm::pb_sca:
            return pb_sca(realization, config, local);
        case Algorithm::hpb_ao:
            return hpb_ao(realization, config, local);
        case Algorithm::hpb_es:
            return hpb_es(realization, config, local.es_grid);
        case Algorithm::hpb_spp:
            return hpb_spp(realization, config, local);
        case Algorithm::random:
            return random_phases(realization, config, rng, local.random_trials);
        }
        throw std::invalid_argument("run_trial: unknown algorithm");
    }

    std::vector<SweepRow> run_sweep(const ExperimentSpec &spec)
    {
        spec.validate();

        const std::size_t n_values = spec.values.size();
        const std::size_t n_algos = spec.algorithms.size();
        const std::size_t n_trials = static_cast<std::size_t>(spec.realizations);
        const std::size_t n_jobs = n_values * n_algos * n_trials;

        std::vector<SystemConfig> configs;
        for (double value : spec.values)
            configs.push_back(apply_sweep(spec.base, spec.sweep, value));

        struct Sample
        {
            double rate = 0.0;
            double time = 0.0;
        };
        std::vector<Sample> samples(n_jobs);
        std::vector<std::exception_ptr> errors(n_jobs);
        std::atomic<std::size_t> next{0};

        auto worker = [&]()
        {
            for (std::size_t job = next++; job < n_jobs; job = next++)
            {
                const std::size_t trial = job % n_trials;
                const std::size_t algo = (job / n_trials) % n_algos;
                const std::size_t value = job / (n_trials * n_algos);
                try
                {
                    const RunResult result = run_trial(configs[value], spec.algorithms[algo],
                                                       trial_seed(spec.master_seed, trial), spec.params);
                    samples[job] = {result.rate, result.wall_time};
                }
                catch (...)
                {
                    errors[job] = std::current_exception();
                }
            }
        };

        unsigned n_threads = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                               : static_cast<unsigned>(spec.threads);
        n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(n_jobs, 1)));
        if (n_threads <= 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < n_threads; ++t)
                pool.emplace_back(worker);
            for (auto &thread : pool)
                thread.join();
        }

        // Lowest failing job wins so the reported error does not depend on scheduling.
        for (const auto &error : errors)
            if (error)
                std::rethrow_exception(error);

        std::vector<SweepRow> rows;
        rows.reserve(n_values * n_algos);
        for (std::size_t value = 0; value < n_values; ++value)
            for (std::size_t algo = 0; algo < n_algos; ++algo)
            {
                const std::size_t base = (value * n_algos + algo) * n_trials;
                double sum_rate = 0.0, sum_time = 0.0;
                for (std::size_t t = 0; t < n_trials; ++t)
                {
                    sum_rate += samples[base + t].rate;
                    sum_time += samples[base + t].time;
                }
                const double mean = sum_rate / n_trials;
                double ss = 0.0;
                for (std::size_t t = 0; t < n_trials; ++t)
                    ss += (samples[base + t].rate - mean) * (samples[base + t].rate - mean);

                SweepRow row;
                row.sweep_var = std::string(sweep_name(spec.sweep));
                row.sweep_value = spec.values[value];
                row.algorithm = std::string(algorithm_name(spec.algorithms[algo]));
                row.mean_rate = mean;
                row.std_rate = n_trials > 1 ? std::sqrt(ss / (n_trials - 1)) : 0.0;
                row.mean_time = spec.record_timing ? sum_time / n_trials : 0.0;
                row.n_realizations = spec.realizations;
                rows.push_back(std::move(row));
            }

        std::stable_sort(rows.begin(), rows.end(), [](const SweepRow &a, const SweepRow &b)
                         {
                             if (a.sweep_value != b.sweep_value)
                                 return a.sweep_value < b.sweep_value;
                             return a.algorithm < b.algorithm;
                         });
        return rows;
    }

    std::string format_results(const std::vector<SweepRow> &rows)
    {
        std::string out(csv_header);
        out += '\n';
        for (const auto &row : rows)
        {
            out += row.sweep_var + ',' + format_double(row.sweep_value) + ',' + row.algorithm + ',' +
                   format_double(row.mean_rate) + ',' + format_double(row.std_rate) + ',' +
                   format_double(row.mean_time) + ',' + std::to_string(row.n_realizations) + '\n';
        }
        return out;
    }

    std::vector<SweepRow> parse_results(std::string_view csv)
    {
        std::istringstream in{std::string(csv)};
        std::string line;
        if (!std::getline(in, line) || line != csv_header)
            throw std::invalid_argument("results: missing or unexpected header");

        std::vector<SweepRow> rows;
        std::size_t line_no = 1;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ','))
                fields.push_back(field);
            if (fields.size() != 7)
                throw std::invalid_argument("results line " + std::to_string(line_no) + ": expected 7 fields, got " +
                                            std::to_string(fields.size()));
            SweepRow row;
            row.sweep_var = fields[0];
            row.sweep_value = parse_number(fields[1], line_no);
            row.algorithm = fields[2];
            row.mean_rate = parse_number(fields[3], line_no);
            row.std_rate = parse_number(fields[4], line_no);
            row.mean_time = parse_number(fields[5], line_no);
            row.n_realizations = static_cast<int>(parse_number(fields[6], line_no));
            rows.push_back(std::move(row));
        }
        return rows;
    }

    void write_results(const std::vector<SweepRow> &rows, const std::string &path)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("write_results: cannot open '" + path + "' for writing");
        out << format_results(rows);
        out.flush();
        if (!out)
            throw std::runtime_error("write_results: failed writing '" + path + "'");
    }

    std::vector<SweepRow> read_results(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("read_results: cannot open '" + path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse_results(buffer.str());
    }
}
