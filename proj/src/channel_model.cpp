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

#include "hpb/channel_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hpb
{
    namespace
    {
        constexpr double max_cluster_elevation = 80.0 * pi / 180.0;
        constexpr double max_cluster_bs_aod = 80.0 * pi / 180.0;

        void require(bool ok, const std::string &what)
        {
            if (!ok)
                throw std::invalid_argument("SystemConfig: " + what);
        }

        double clip_elevation(double x)
        {
            return std::clamp(x, 0.0, std::nextafter(pi / 2.0, 0.0));
        }

        double wrap_azimuth(double x)
        {
            double w = std::fmod(x, 2.0 * pi);
            if (w < 0.0)
                w += 2.0 * pi;
            return w >= 2.0 * pi ? 0.0 : w;
        }

        double clip_bs_aod(double x)
        {
            const double lim = std::nextafter(pi / 2.0, 0.0);
            return std::clamp(x, -lim, lim);
        }

        // Exponential powers normalized to unit sum.
        std::vector<double> path_variances(int count, std::mt19937_64 &rng)
        {
            std::exponential_distribution<double> expo(1.0);
            std::vector<double> var(count);
            double total = 0.0;
            for (auto &v : var)
            {
                v = expo(rng);
                total += v;
            }
            for (auto &v : var)
                v /= total;
            return var;
        }

        cplx cscg(double variance, std::mt19937_64 &rng)
        {
            std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
            const double re = gauss(rng);
            const double im = gauss(rng);
            return {re, im};
        }

        void check_index(const ChannelRealization &realization, int n)
        {
            if (n < 0 || n >= realization.num_ris())
                throw std::out_of_range("RIS index " + std::to_string(n) + " out of range [0, " +
                                        std::to_string(realization.num_ris()) + ")");
        }
    }

    void SystemConfig::validate() const
    {
        require(M >= 1, "M must be >= 1");
        require(N >= 1, "N must be >= 1");
        require(L >= 2 && L % 2 == 0, "L must be an even integer >= 2");
        require(delta > 0.0, "delta must be positive");
        require(lambda > 0.0, "lambda must be positive");
        require(p > 0.0, "p must be positive");
        require(sigma2 > 0.0, "sigma2 must be positive");
        require(g_bs > 0.0 && g_ris > 0.0 && g_user > 0.0, "antenna gains must be positive");
        require(P >= 1, "P must be >= 1");
        require(sigma_as >= 0.0, "sigma_as must be non-negative");
        require(i_sca >= 1, "i_sca must be >= 1");
        require(eps_sca > 0.0, "eps_sca must be positive");
        require(d1.size() == 1 || static_cast<int>(d1.size()) == N, "d1 must hold 1 or N entries");
        require(d2.size() == 1 || static_cast<int>(d2.size()) == N, "d2 must hold 1 or N entries");
        for (double d : d1)
            require(d > 0.0, "d1 entries must be positive");
        for (double d : d2)
            require(d > 0.0, "d2 entries must be positive");
    }

    double SystemConfig::q_bar() const { return std::min(2.0, 1.0 / (2.0 * delta)); }

    double SystemConfig::d1_of(int n) const { return d1.size() == 1 ? d1.front() : d1.at(n); }
    double SystemConfig::d2_of(int n) const { return d2.size() == 1 ? d2.front() : d2.at(n); }

    Eigen::VectorXcd ula_steering(double angle, int M)
    {
        Eigen::VectorXcd b(M);
        const double scale = 1.0 / std::sqrt(static_cast<double>(M));
        const double s = std::sin(angle);
        for (int m = 0; m < M; ++m)
            b[m] = std::polar(scale, -pi * m * s);
        return b;
    }

    Eigen::VectorXcd ura_axis_factor(double direction_cosine, int L, double delta)
    {
        Eigen::VectorXcd f(L);
        const double scale = 1.0 / std::sqrt(static_cast<double>(L));
        for (int i = 0; i < L; ++i)
        {
            const double offset = (i + 1 - L / 2) - 0.5; // l - 1/2 with l = 1 - L/2 + i
            f[i] = std::polar(scale, -2.0 * pi * delta * offset * direction_cosine);
        }
        return f;
    }

    Eigen::VectorXcd ura_steering(double elev, double azim, int L, double delta)
    {
        const Eigen::VectorXcd ax = ura_axis_factor(std::sin(elev) * std::cos(azim), L, delta);
        const Eigen::VectorXcd ay = ura_axis_factor(std::sin(elev) * std::sin(azim), L, delta);
        Eigen::VectorXcd a(L * L);
        for (int i = 0; i < L; ++i)
            a.segment(i * L, L) = ax[i] * ay;
        return a;
    }

    Eigen::VectorXcd ura_departure_steering(double elev, double azim, int L, double delta)
    {
        return ura_steering(elev, azim, L, delta).conjugate();
    }

    double laplace_offset(std::mt19937_64 &rng, double std_dev)
    {
        // Difference of two unit exponentials is Laplace(0, 1) with variance 2.
        std::exponential_distribution<double> expo(1.0);
        const double e1 = expo(rng);
        const double e2 = expo(rng);
        return std_dev / std::sqrt(2.0) * (e1 - e2);
    }

    ChannelRealization sample_realization(const SystemConfig &config, std::mt19937_64 &rng)
    {
        if (config.P < 1)
            throw std::invalid_argument("sample_realization: P must be >= 1");
        config.validate();

        std::uniform_real_distribution<double> elev_mean(0.0, max_cluster_elevation);
        std::uniform_real_distribution<double> azim_mean(0.0, 2.0 * pi);
        std::uniform_real_distribution<double> bs_mean(-max_cluster_bs_aod, max_cluster_bs_aod);
        const double spread = config.sigma_as;

        ChannelRealization out;
        out.ris.resize(config.N);
        for (auto &ris : out.ris)
        {
            // BS -> RIS link: one cluster, P paths.
            const double mu_elev = elev_mean(rng);
            const double mu_azim = azim_mean(rng);
            const double mu_bs = bs_mean(rng);
            const auto var_d = path_variances(config.P, rng);
            ris.bs_ris_paths.resize(config.P);
            for (int d = 0; d < config.P; ++d)
            {
                auto &path = ris.bs_ris_paths[d];
                path.elev_aoa = clip_elevation(mu_elev + laplace_offset(rng, spread));
                path.azim_aoa = wrap_azimuth(mu_azim + laplace_offset(rng, spread));
                path.aod_bs = clip_bs_aod(mu_bs + laplace_offset(rng, spread));
                path.variance = var_d[d];
                path.alpha = cscg(var_d[d], rng);
            }

            // RIS -> user link.
            const double mu_elev_u = elev_mean(rng);
            const double mu_azim_u = azim_mean(rng);
            const auto var_k = path_variances(config.P, rng);
            ris.ris_user_paths.resize(config.P);
            for (int k = 0; k < config.P; ++k)
            {
                auto &path = ris.ris_user_paths[k];
                path.elev_aod = clip_elevation(mu_elev_u + laplace_offset(rng, spread));
                path.azim_aod = wrap_azimuth(mu_azim_u + laplace_offset(rng, spread));
                path.variance = var_k[k];
                path.beta = cscg(var_k[k], rng);
            }
        }
        return out;
    }

    Eigen::MatrixXcd assemble_bs_ris_channel(const ChannelRealization &realization, int n, const SystemConfig &config)
    {
        check_index(realization, n);
        Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(config.elements(), config.M);
        for (const auto &path : realization.ris[n].bs_ris_paths)
        {
            const Eigen::VectorXcd a = ura_steering(path.elev_aoa, path.azim_aoa, config.L, config.delta);
            const Eigen::VectorXcd b = ula_steering(path.aod_bs, config.M);
            G.noalias() += path.alpha * a * b.adjoint();
        }
        return G;
    }

    Eigen::RowVectorXcd assemble_ris_user_channel(const ChannelRealization &realization, int n, const SystemConfig &config)
    {
        check_index(realization, n);
        Eigen::RowVectorXcd f = Eigen::RowVectorXcd::Zero(config.elements());
        for (const auto &path : realization.ris[n].ris_user_paths)
            f += path.beta * ura_departure_steering(path.elev_aod, path.azim_aod, config.L, config.delta).adjoint();
        return f;
    }

    double path_loss(const SystemConfig &config, int n)
    {
        const double d1 = config.d1_of(n);
        const double d2 = config.d2_of(n);
        const double L2 = static_cast<double>(config.L) * config.L;
        const double num = config.g_bs * config.g_ris * config.g_user * config.delta * config.delta * L2 * L2 *
                           std::pow(config.lambda, 4);
        return num / (64.0 * pi * pi * pi * d1 * d1 * d2 * d2);
    }

    std::mt19937_64 make_rng(std::uint64_t seed)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        return std::mt19937_64(seq);
    }
}
