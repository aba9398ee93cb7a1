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

#ifndef HPB_OPTIMIZERS_HPP
#define HPB_OPTIMIZERS_HPP

#include "hpb/channel_model.hpp"
#include "hpb/phase_synthesis.hpp"

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

namespace hpb
{
    // MRT is undefined for a channel that vanishes in every direction.
    class DegenerateChannelError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class InitMode
    {
        ones,       // v0 = 1 (SCA reference phases)
        warm_start, // PB-SCA: expand the HPB-SPP profile
        random,     // seeded uniform phases
    };

    // Tuning knobs that are not part of the scenario. SCA limits come from SystemConfig.
    struct OptimizerParams
    {
        int sa_iters = 500;          // SA proposals per AO round
        double sa_t0 = 0.0;          // initial temperature; <= 0 uses the objective at round start
        double sa_cooling = 0.95;    // geometric factor applied after every sweep of 2N proposals
        double sa_step = 0.0;        // proposal std in q units; <= 0 uses 0.1 * q_bar
        int ao_outer_iters = 5;
        int es_grid = 400;
        int random_trials = 1000;
        InitMode v_init = InitMode::ones;
        InitMode pb_init = InitMode::warm_start;
        std::uint64_t seed = 0;      // SA moves and random initializations
        bool record_history = false; // keep the SCA objective trajectory in RunResult::history

        void validate() const;
    };

    struct RunResult
    {
        std::variant<PhaseProfile, ElementPhases> profile;
        Eigen::VectorXcd w;
        double objective = 0.0; // ||v^H H||^2, or ||h||^2 for per-element PB
        double rate = 0.0;      // bits/s/Hz
        double wall_time = 0.0; // seconds
        int iterations = 0;
        std::vector<double> history;
    };

    // ||v^H H||^2
    double objective(const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v);

    // w = sqrt(p) H^H v / ||v^H H||. Throws DegenerateChannelError if v^H H = 0.
    Eigen::VectorXcd mrt(const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v, double p);

    // v_next = exp(j arg(H H^H v_prev)); entries whose coefficient is exactly zero keep their phase.
    Eigen::VectorXcd sca_v_step(const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v_prev);

    struct ScaOutcome
    {
        Eigen::VectorXcd v;
        double objective = 0.0;
        int iterations = 0;
        std::vector<double> history; // objective at v0, v1, ... when recorded
    };

    // Repeats sca_v_step until |f_t - f_{t-1}| / f_{t-1} < eps or max_iters steps were taken.
    // A step that lowers f (rounding noise near a fixed point) is discarded and ends the loop.
    ScaOutcome sca_maximize(const Eigen::MatrixXcd &H, Eigen::VectorXcd v0, int max_iters, double eps,
                            bool record_history = false);

    struct StrongestPaths
    {
        int d = 0; // strongest BS-RIS path
        int k = 0; // strongest RIS-user path
    };

    // argmax |alpha| and argmax |beta|, lowest index on ties.
    StrongestPaths strongest_paths(const RisChannel &ris);

    // Stage I: gradients that steer the strongest incoming path into the strongest outgoing path, wrapped into range.
    std::vector<Gradient> strongest_path_gradients(const ChannelRealization &realization, const SystemConfig &config);

    RunResult hpb_spp(const ChannelRealization &realization, const SystemConfig &config,
                      const OptimizerParams &params = {});

    RunResult hpb_ao(const ChannelRealization &realization, const SystemConfig &config, const OptimizerParams &params);

    // Exhaustive grid x grid search over [-q_bar, q_bar]^2. Single RIS only.
    RunResult hpb_es(const ChannelRealization &realization, const SystemConfig &config, int grid);

    // Per-element stacked channel: row block n is sqrt(PL_n) diag(f_n^H) G_n, size N*L^2 x M.
    Eigen::MatrixXcd element_channel_matrix(const ChannelRealization &realization, const SystemConfig &config);

    RunResult pb_sca(const ChannelRealization &realization, const SystemConfig &config,
                     const OptimizerParams &params = {});

    // Average over `trials` i.i.d. uniform per-element phase draws, each followed by MRT.
    RunResult random_phases(const ChannelRealization &realization, const SystemConfig &config, std::mt19937_64 &rng,
                            int trials);
}

#endif
