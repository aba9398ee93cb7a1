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

#include "hpb/optimizers.hpp"
#include "hpb/rate.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <string>

namespace hpb
{
    namespace
    {
        using clock_type = std::chrono::steady_clock;

        double seconds_since(clock_type::time_point start)
        {
            return std::chrono::duration<double>(clock_type::now() - start).count();
        }

        Eigen::VectorXcd random_unit_modulus(Eigen::Index size, std::mt19937_64 &rng)
        {
            std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
            Eigen::VectorXcd v(size);
            for (Eigen::Index i = 0; i < size; ++i)
                v[i] = std::polar(1.0, phase(rng));
            return v;
        }

        bool converged(double f_new, double f_old, double eps)
        {
            const double scale = std::max(f_old, std::numeric_limits<double>::min());
            return std::abs(f_new - f_old) / scale < eps;
        }

        // MRT plus rate for the compact form h^H = v^H H.
        void finish_compact(RunResult &result, const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v,
                            const SystemConfig &config)
        {
            result.w = mrt(H, v, config.p);
            result.objective = objective(H, v);
            result.rate = achievable_rate(v.adjoint() * H, result.w, config.sigma2);
        }

        // Element phasor vector theta (compact convention theta^H A = h^H) -> per-RIS phase matrices.
        ElementPhases phases_from_vector(const Eigen::VectorXcd &theta, const SystemConfig &config)
        {
            const int L = config.L;
            ElementPhases phases;
            phases.theta.assign(config.N, Eigen::MatrixXd(L, L));
            for (int n = 0; n < config.N; ++n)
                for (int i = 0; i < L; ++i)
                    for (int j = 0; j < L; ++j)
                        phases.theta[n](i, j) = -std::arg(theta[static_cast<Eigen::Index>(n) * L * L + i * L + j]);
            return phases;
        }

        Eigen::VectorXcd vector_from_phases(const ElementPhases &phases, const SystemConfig &config)
        {
            const int L = config.L;
            Eigen::VectorXcd theta(static_cast<Eigen::Index>(config.N) * L * L);
            for (int n = 0; n < config.N; ++n)
                for (int i = 0; i < L; ++i)
                    for (int j = 0; j < L; ++j)
                        theta[static_cast<Eigen::Index>(n) * L * L + i * L + j] =
                            std::polar(1.0, -phases.theta[n](i, j));
            return theta;
        }

        // Stage II shared by HPB-SPP and HPB-AO.
        struct CompactSolution
        {
            PhaseProfile profile;
            Eigen::MatrixXcd H;
            Eigen::VectorXcd v;
            double objective = 0.0;
            int iterations = 0;
            std::vector<double> history;
        };

        CompactSolution spp_solution(const ChannelRealization &realization, const SystemConfig &config,
                                     const OptimizerParams &params, const CompactChannelModel &model)
        {
            CompactSolution sol;
            sol.profile = PhaseProfile::zeros(config.N);
            sol.profile.q = strongest_path_gradients(realization, config);
            sol.H = model.channel(sol.profile.q);

            Eigen::VectorXcd v0 = Eigen::VectorXcd::Ones(config.N);
            if (params.v_init == InitMode::random)
            {
                auto rng = make_rng(params.seed);
                v0 = random_unit_modulus(config.N, rng);
            }
            auto sca = sca_maximize(sol.H, v0, config.i_sca, config.eps_sca, params.record_history);
            sol.v = std::move(sca.v);
            sol.objective = sca.objective;
            sol.iterations = sca.iterations;
            sol.history = std::move(sca.history);
            sol.profile.set_reference_vector(sol.v);
            return sol;
        }
    }

    void OptimizerParams::validate() const
    {
        auto require = [](bool ok, const char *what)
        {
            if (!ok)
                throw std::invalid_argument(std::string("OptimizerParams: ") + what);
        };
        require(sa_iters >= 0, "sa_iters must be non-negative");
        require(sa_cooling > 0.0 && sa_cooling < 1.0, "sa_cooling must lie in (0, 1)");
        require(ao_outer_iters >= 1, "ao_outer_iters must be >= 1");
        require(es_grid >= 2, "es_grid must be >= 2");
        require(random_trials >= 1, "random_trials must be >= 1");
    }

    double objective(const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v)
    {
        if (H.rows() != v.size())
            throw std::invalid_argument("objective: H has " + std::to_string(H.rows()) + " rows, v has " +
                                        std::to_string(v.size()) + " entries");
        return (H.adjoint() * v).squaredNorm();
    }

    Eigen::VectorXcd mrt(const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v, double p)
    {
        const Eigen::VectorXcd g = H.adjoint() * v;
        const double norm = g.norm();
        if (!(norm > 0.0))
            throw DegenerateChannelError("mrt: effective channel v^H H is zero");
        return (std::sqrt(p) / norm) * g;
    }

    Eigen::VectorXcd sca_v_step(const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v_prev)
    {
        const Eigen::VectorXcd t = H * (H.adjoint() * v_prev);
        Eigen::VectorXcd v_next(v_prev.size());
        for (Eigen::Index n = 0; n < t.size(); ++n)
            v_next[n] = (t[n] == cplx(0.0, 0.0)) ? v_prev[n] : std::polar(1.0, std::arg(t[n]));
        return v_next;
    }

    ScaOutcome sca_maximize(const Eigen::MatrixXcd &H, Eigen::VectorXcd v0, int max_iters, double eps,
                            bool record_history)
    {
        ScaOutcome out;
        out.v = std::move(v0);
        out.objective = objective(H, out.v);
        if (record_history)
            out.history.push_back(out.objective);
        for (int t = 1; t <= max_iters; ++t)
        {
            Eigen::VectorXcd v = sca_v_step(H, out.v);
            const double f = objective(H, v);
            const double f_prev = out.objective;
            if (f < f_prev)
                break; // only rounding can lower f at a fixed point; keep the better iterate
            out.v = std::move(v);
            out.objective = f;
            out.iterations = t;
            if (record_history)
                out.history.push_back(f);
            if (converged(f, f_prev, eps))
                break;
        }
        return out;
    }

    StrongestPaths strongest_paths(const RisChannel &ris)
    {
        StrongestPaths best;
        double best_alpha = -1.0;
        for (std::size_t d = 0; d < ris.bs_ris_paths.size(); ++d)
        {
            const double mag = std::abs(ris.bs_ris_paths[d].alpha);
            if (mag > best_alpha)
            {
                best_alpha = mag;
                best.d = static_cast<int>(d);
            }
        }
        double best_beta = -1.0;
        for (std::size_t k = 0; k < ris.ris_user_paths.size(); ++k)
        {
            const double mag = std::abs(ris.ris_user_paths[k].beta);
            if (mag > best_beta)
            {
                best_beta = mag;
                best.k = static_cast<int>(k);
            }
        }
        return best;
    }

    std::vector<Gradient> strongest_path_gradients(const ChannelRealization &realization, const SystemConfig &config)
    {
        std::vector<Gradient> Q;
        Q.reserve(realization.ris.size());
        for (const auto &ris : realization.ris)
        {
            const auto [d, k] = strongest_paths(ris);
            const auto &in = ris.bs_ris_paths[d];
            const auto &out = ris.ris_user_paths[k];
            const Gradient q = q_from_angles({in.elev_aoa, in.azim_aoa}, {out.elev_aod, out.azim_aod});
            Q.push_back({wrap_q(q.x, config.delta), wrap_q(q.y, config.delta)});
        }
        return Q;
    }

    RunResult hpb_spp(const ChannelRealization &realization, const SystemConfig &config,
                      const OptimizerParams &params)
    {
        const auto start = clock_type::now();
        const CompactChannelModel model(realization, config);
        auto sol = spp_solution(realization, config, params, model);

        RunResult result;
        finish_compact(result, sol.H, sol.v, config);
        result.profile = std::move(sol.profile);
        result.iterations = sol.iterations;
        result.history = std::move(sol.history);
        result.wall_time = seconds_since(start);
        return result;
    }

    RunResult hpb_ao(const ChannelRealization &realization, const SystemConfig &config, const OptimizerParams &params)
    {
        params.validate();
        const auto start = clock_type::now();
        const CompactChannelModel model(realization, config);
        const CompactSolution warm = spp_solution(realization, config, params, model);

        const int N = config.N;
        const double q_bar = config.q_bar();
        const double step = params.sa_step > 0.0 ? params.sa_step : 0.1 * q_bar;
        const int sweep_len = 2 * N;

        auto rng = make_rng(params.seed);
        std::normal_distribution<double> proposal(0.0, step);
        std::uniform_int_distribution<int> pick(0, sweep_len - 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        std::vector<Gradient> Q = warm.profile.q;
        Eigen::VectorXcd v = warm.v;
        Eigen::MatrixXcd H = warm.H;

        std::vector<Gradient> best_Q = Q;
        Eigen::VectorXcd best_v = v;
        double best_f = warm.objective;
        int iterations = warm.iterations;
        std::vector<double> history = warm.history;

        for (int round = 0; round < params.ao_outer_iters; ++round)
        {
            // (a) SA over the 2N gradients with v fixed. g = H^H v tracks the effective channel.
            Eigen::VectorXcd g = H.adjoint() * v;
            double f = g.squaredNorm();
            double temperature = params.sa_t0 > 0.0 ? params.sa_t0 : f;
            std::vector<Gradient> round_best_Q = Q;
            double round_best_f = f;
            bool moved = false;

            for (int it = 0; it < params.sa_iters; ++it)
            {
                const int coord = pick(rng);
                const int n = coord / 2;
                Gradient q = Q[n];
                double &component = (coord % 2 == 0) ? q.x : q.y;
                component = std::clamp(component + proposal(rng), -q_bar, q_bar);

                const Eigen::RowVectorXcd row = model.row(n, q);
                const Eigen::VectorXcd g_new = g + v[n] * (row - H.row(n)).adjoint();
                const double f_new = g_new.squaredNorm();
                const bool accept = f_new >= f || (temperature > 0.0 && unit(rng) < std::exp((f_new - f) / temperature));
                if (accept)
                {
                    Q[n] = q;
                    H.row(n) = row;
                    g = g_new;
                    f = f_new;
                    if (f > round_best_f)
                    {
                        round_best_f = f;
                        round_best_Q = Q;
                        moved = true;
                    }
                }
                ++iterations;
                if ((it + 1) % sweep_len == 0)
                    temperature *= params.sa_cooling;
            }

            Q = round_best_Q;
            H = model.channel(Q);
            if (!moved)
                continue; // v is already SCA-converged for this Q

            // (b) SCA over v for the new gradients.
            auto sca = sca_maximize(H, v, config.i_sca, config.eps_sca, params.record_history);
            v = sca.v;
            iterations += sca.iterations;
            history.insert(history.end(), sca.history.begin(), sca.history.end());
            if (sca.objective > best_f)
            {
                best_f = sca.objective;
                best_Q = Q;
                best_v = v;
            }
        }

        PhaseProfile profile = PhaseProfile::zeros(N);
        profile.q = best_Q;
        profile.set_reference_vector(best_v);
        const Eigen::MatrixXcd best_H = model.channel(best_Q);

        RunResult result;
        finish_compact(result, best_H, best_v, config);
        result.profile = std::move(profile);
        result.iterations = iterations;
        result.history = std::move(history);
        result.wall_time = seconds_since(start);
        return result;
    }

    RunResult hpb_es(const ChannelRealization &realization, const SystemConfig &config, int grid)
    {
        if (config.N != 1)
            throw std::invalid_argument("hpb_es: exhaustive search supports a single RIS only (N=" +
                                        std::to_string(config.N) + ")");
        if (grid < 2)
            throw std::invalid_argument("hpb_es: grid must be >= 2");

        const auto start = clock_type::now();
        const CompactChannelModel model(realization, config);
        const int K = model.paths_out(0);
        const int D = model.paths_in(0);
        const double q_bar = config.q_bar();

        std::vector<double> axis(grid);
        for (int i = 0; i < grid; ++i)
            axis[i] = -q_bar + 2.0 * q_bar * i / (grid - 1);

        // The Dirichlet product separates per axis: tabulate both factors once per (k, d).
        const int pairs = K * D;
        std::vector<double> gx(static_cast<std::size_t>(pairs) * grid);
        std::vector<double> gy(static_cast<std::size_t>(pairs) * grid);
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < D; ++d)
            {
                const int pair = k * D + d;
                for (int i = 0; i < grid; ++i)
                {
                    gx[static_cast<std::size_t>(pair) * grid + i] =
                        dirichlet_gain(model.cx(0, k, d) - axis[i], config.L, config.delta);
                    gy[static_cast<std::size_t>(pair) * grid + i] =
                        dirichlet_gain(model.cy(0, k, d) - axis[i], config.L, config.delta);
                }
            }

        // With v = 1 the objective is PL * r^T (B B^H) conj(r).
        const Eigen::MatrixXcd &B = model.steering_rows(0);
        const Eigen::MatrixXcd gram = B * B.adjoint();
        std::vector<cplx> ab(static_cast<std::size_t>(pairs)); // alpha_d * beta_k
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < D; ++d)
                ab[k * D + d] = model.alpha(0)[d] * model.beta(0)[k];
        const double pl = model.sqrt_path_loss(0) * model.sqrt_path_loss(0);

        std::vector<cplx> r(D);
        double best_f = -1.0;
        int best_i = 0, best_j = 0;
        for (int i = 0; i < grid; ++i)
        {
            for (int j = 0; j < grid; ++j)
            {
                std::fill(r.begin(), r.end(), cplx(0.0, 0.0));
                for (int k = 0; k < K; ++k)
                    for (int d = 0; d < D; ++d)
                    {
                        const std::size_t pair = static_cast<std::size_t>(k) * D + d;
                        r[d] += ab[pair] * (gx[pair * grid + i] * gy[pair * grid + j]);
                    }
                double f = 0.0;
                for (int d = 0; d < D; ++d)
                {
                    cplx acc = 0.0;
                    for (int e = 0; e < D; ++e)
                        acc += gram(d, e) * std::conj(r[e]);
                    f += std::real(r[d] * acc);
                }
                f *= pl;
                if (f > best_f)
                {
                    best_f = f;
                    best_i = i;
                    best_j = j;
                }
            }
        }

        PhaseProfile profile = PhaseProfile::zeros(1);
        profile.q[0] = {axis[best_i], axis[best_j]};
        const Eigen::MatrixXcd H = model.channel(profile.q);
        const Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);

        RunResult result;
        finish_compact(result, H, v, config);
        result.profile = std::move(profile);
        result.iterations = grid * grid;
        result.wall_time = seconds_since(start);
        return result;
    }

    Eigen::MatrixXcd element_channel_matrix(const ChannelRealization &realization, const SystemConfig &config)
    {
        const Eigen::Index E = config.elements();
        Eigen::MatrixXcd A(static_cast<Eigen::Index>(config.N) * E, config.M);
        for (int n = 0; n < config.N; ++n)
        {
            const Eigen::RowVectorXcd f = assemble_ris_user_channel(realization, n, config);
            const Eigen::MatrixXcd G = assemble_bs_ris_channel(realization, n, config);
            A.middleRows(n * E, E) = std::sqrt(path_loss(config, n)) * (f.transpose().asDiagonal() * G);
        }
        return A;
    }

    RunResult pb_sca(const ChannelRealization &realization, const SystemConfig &config, const OptimizerParams &params)
    {
        const auto start = clock_type::now();
        Eigen::VectorXcd theta0;
        if (params.pb_init == InitMode::random)
        {
            auto rng = make_rng(params.seed);
            theta0 = random_unit_modulus(static_cast<Eigen::Index>(config.N) * config.elements(), rng);
        }
        else
        {
            const RunResult spp = hpb_spp(realization, config, params);
            theta0 = vector_from_phases(expand_profile(std::get<PhaseProfile>(spp.profile), config), config);
        }

        const Eigen::MatrixXcd A = element_channel_matrix(realization, config);
        auto sca = sca_maximize(A, std::move(theta0), config.i_sca, config.eps_sca, params.record_history);

        RunResult result;
        result.w = mrt(A, sca.v, config.p);
        result.objective = sca.objective;
        result.rate = achievable_rate(sca.v.adjoint() * A, result.w, config.sigma2);
        result.profile = phases_from_vector(sca.v, config);
        result.iterations = sca.iterations;
        result.history = std::move(sca.history);
        result.wall_time = seconds_since(start);
        return result;
    }

    RunResult random_phases(const ChannelRealization &realization, const SystemConfig &config, std::mt19937_64 &rng,
                            int trials)
    {
        if (trials < 1)
            throw std::invalid_argument("random_phases: trials must be >= 1");
        const auto start = clock_type::now();
        const Eigen::MatrixXcd A = element_channel_matrix(realization, config);

        RunResult result;
        double sum_objective = 0.0;
        double sum_rate = 0.0;
        Eigen::VectorXcd theta;
        for (int t = 0; t < trials; ++t)
        {
            theta = random_unit_modulus(A.rows(), rng);
            const Eigen::RowVectorXcd h = theta.adjoint() * A;
            result.w = mrt(A, theta, config.p);
            sum_objective += h.squaredNorm();
            sum_rate += achievable_rate(h, result.w, config.sigma2);
        }
        result.objective = sum_objective / trials;
        result.rate = sum_rate / trials;
        result.profile = phases_from_vector(theta, config);
        result.iterations = trials;
        result.wall_time = seconds_since(start);
        return result;
    }
}
