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

#ifndef HPB_HARNESS_HPP
#define HPB_HARNESS_HPP

#include "hpb/channel_model.hpp"
#include "hpb/optimizers.hpp"
#include "hpb/rate.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hpb
{
    enum class Algorithm
    {
        pb_sca,
        hpb_ao,
        hpb_es,
        hpb_spp,
        random,
    };

    // CLI spelling: "pb-sca", "hpb-ao", "hpb-es", "hpb-spp", "random".
    std::string_view algorithm_name(Algorithm algorithm);
    Algorithm parse_algorithm(std::string_view name);

    enum class SweepVariable
    {
        paths,    // P
        elements, // L^2
        ris,      // N
    };

    std::string_view sweep_name(SweepVariable sweep);
    SweepVariable parse_sweep(std::string_view name);

    // Copy of `base` with the swept field set. Element counts must be squares of even integers.
    SystemConfig apply_sweep(SystemConfig base, SweepVariable sweep, double value);

    struct ExperimentSpec
    {
        SystemConfig base;
        OptimizerParams params;
        SweepVariable sweep = SweepVariable::paths;
        std::vector<double> values;
        std::vector<Algorithm> algorithms;
        int realizations = 200;
        std::uint64_t master_seed = 42;
        std::string output_path;
        int threads = 1;           // 0 selects std::thread::hardware_concurrency()
        bool record_timing = true; // false writes zero times so the CSV is byte-reproducible

        void validate() const;
    };

    struct SweepRow
    {
        std::string sweep_var;
        double sweep_value = 0.0;
        std::string algorithm;
        double mean_rate = 0.0;
        double std_rate = 0.0;
        double mean_time = 0.0;
        int n_realizations = 0;
    };

    // Seed of realization `index`: master XOR index. The engine's seed_seq does the mixing.
    std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

    // Samples one realization from `seed`, runs `algorithm` on it, and reports the optimizer-only wall time.
    RunResult run_trial(const SystemConfig &config, Algorithm algorithm, std::uint64_t seed,
                        const OptimizerParams &params = {});

    // Rows sorted by (sweep value, algorithm name). Realization i of every point and algorithm uses trial_seed(master, i).
    std::vector<SweepRow> run_sweep(const ExperimentSpec &spec);

    inline constexpr std::string_view csv_header =
        "sweep_var,sweep_value,algorithm,mean_rate_bps_hz,std_rate,mean_time_s,n_realizations";

    std::string format_results(const std::vector<SweepRow> &rows);
    std::vector<SweepRow> parse_results(std::string_view csv);

    // Throws std::runtime_error naming `path` on I/O failure.
    void write_results(const std::vector<SweepRow> &rows, const std::string &path);
    std::vector<SweepRow> read_results(const std::string &path);
}

#endif
