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

#include "hpb/phase_synthesis.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hpb
{
    namespace
    {
        // Below this |sin(pi*delta*s)| the closed form is replaced by the explicit sum.
        constexpr double singularity_threshold = 1e-9;

        void check_dims(const ChannelRealization &realization, int num_profile, const SystemConfig &config,
                        const char *who)
        {
            if (realization.num_ris() != config.N || num_profile != config.N)
                throw std::invalid_argument(std::string(who) + ": dimension mismatch (realization has " +
                                            std::to_string(realization.num_ris()) + " RIS, profile " +
                                            std::to_string(num_profile) + ", config N=" + std::to_string(config.N) +
                                            ")");
        }

        double direction_cosine_x(double elev, double azim) { return std::sin(elev) * std::cos(azim); }
        double direction_cosine_y(double elev, double azim) { return std::sin(elev) * std::sin(azim); }
    }

    Eigen::VectorXcd PhaseProfile::reference_vector() const
    {
        Eigen::VectorXcd v(phi.size());
        for (std::size_t n = 0; n < phi.size(); ++n)
            v[n] = std::polar(1.0, -phi[n]);
        return v;
    }

    void PhaseProfile::set_reference_vector(const Eigen::VectorXcd &v)
    {
        phi.resize(v.size());
        for (Eigen::Index n = 0; n < v.size(); ++n)
            phi[n] = -std::arg(v[n]);
    }

    PhaseProfile PhaseProfile::zeros(int N)
    {
        PhaseProfile profile;
        profile.q.assign(N, Gradient{});
        profile.phi.assign(N, 0.0);
        return profile;
    }

    Gradient q_from_angles(Direction incident, Direction reflected)
    {
        return {direction_cosine_x(reflected.elev, reflected.azim) + direction_cosine_x(incident.elev, incident.azim),
                direction_cosine_y(reflected.elev, reflected.azim) + direction_cosine_y(incident.elev, incident.azim)};
    }

    long wrap_periods(double q, double delta)
    {
        const double q_bar = std::min(2.0, 1.0 / (2.0 * delta));
        if (std::abs(q) <= q_bar)
            return 0;
        return std::lround(q * delta);
    }

    double wrap_q(double q, double delta)
    {
        return q - static_cast<double>(wrap_periods(q, delta)) / delta;
    }

    PhaseProfile wrap_profile(const PhaseProfile &profile, double delta)
    {
        PhaseProfile out = profile;
        for (int n = 0; n < profile.num_ris(); ++n)
        {
            const long kx = wrap_periods(profile.q[n].x, delta);
            const long ky = wrap_periods(profile.q[n].y, delta);
            out.q[n] = {wrap_q(profile.q[n].x, delta), wrap_q(profile.q[n].y, delta)};
            if ((kx + ky) % 2 != 0)
                out.phi[n] = std::remainder(out.phi[n] + pi, 2.0 * pi);
        }
        return out;
    }

    Eigen::MatrixXd snell_element_phases(Gradient q, double phi, int L, double delta)
    {
        Eigen::MatrixXd theta(L, L);
        for (int i = 0; i < L; ++i)
        {
            const double xi = (i + 1 - L / 2) - 0.5;
            for (int j = 0; j < L; ++j)
            {
                const double yj = (j + 1 - L / 2) - 0.5;
                theta(i, j) = 2.0 * pi * delta * xi * q.x + 2.0 * pi * delta * yj * q.y + phi;
            }
        }
        return theta;
    }

    ElementPhases expand_profile(const PhaseProfile &profile, const SystemConfig &config)
    {
        ElementPhases phases;
        phases.theta.reserve(profile.num_ris());
        for (int n = 0; n < profile.num_ris(); ++n)
            phases.theta.push_back(snell_element_phases(profile.q[n], profile.phi[n], config.L, config.delta));
        return phases;
    }

    double dirichlet_gain(double s, int L, double delta)
    {
        // The kernel is anti-periodic with period 1/delta for even L: reduce to |delta*s| <= 1/2 first
        // so the closed form is evaluated away from the k/delta singularities.
        const double k = std::round(delta * s);
        const double reduced = s - k / delta;
        const double sign = (std::fmod(std::abs(k), 2.0) == 1.0) ? -1.0 : 1.0;

        const double x = pi * delta * reduced;
        const double den = std::sin(x);
        double value;
        if (std::abs(den) < singularity_threshold)
        {
            double sum = 0.0;
            for (int l = 1 - L / 2; l <= L / 2; ++l)
                sum += std::cos(2.0 * pi * delta * (l - 0.5) * reduced);
            value = sum / L;
        }
        else
        {
            value = std::sin(L * x) / (L * den);
        }
        return sign * value;
    }

    GainFactor gain_factor(const ChannelRealization &realization, const SystemConfig &config, int n, int k, int d,
                           const PhaseProfile &profile)
    {
        if (n < 0 || n >= realization.num_ris() || n >= profile.num_ris())
            throw std::out_of_range("gain_factor: RIS index " + std::to_string(n) + " out of range");
        const auto &ris = realization.ris[n];
        if (k < 0 || k >= static_cast<int>(ris.ris_user_paths.size()))
            throw std::out_of_range("gain_factor: path index k=" + std::to_string(k) + " out of range");
        if (d < 0 || d >= static_cast<int>(ris.bs_ris_paths.size()))
            throw std::out_of_range("gain_factor: path index d=" + std::to_string(d) + " out of range");

        const auto &out = ris.ris_user_paths[k];
        const auto &in = ris.bs_ris_paths[d];
        const Gradient q = profile.q[n];

        GainFactor g;
        g.sx = direction_cosine_x(out.elev_aod, out.azim_aod) + direction_cosine_x(in.elev_aoa, in.azim_aoa) - q.x;
        g.sy = direction_cosine_y(out.elev_aod, out.azim_aod) + direction_cosine_y(in.elev_aoa, in.azim_aoa) - q.y;
        g.p_tilde = dirichlet_gain(g.sx, config.L, config.delta) * dirichlet_gain(g.sy, config.L, config.delta);
        g.p = std::polar(1.0, profile.phi[n]) * g.p_tilde;
        return g;
    }

    CompactChannelModel::CompactChannelModel(const ChannelRealization &realization, const SystemConfig &config)
        : L_(config.L), delta_(config.delta)
    {
        if (realization.num_ris() != config.N)
            throw std::invalid_argument("CompactChannelModel: realization has " +
                                        std::to_string(realization.num_ris()) + " RIS, config N=" +
                                        std::to_string(config.N));
        ris_.resize(config.N);
        for (int n = 0; n < config.N; ++n)
        {
            const auto &src = realization.ris[n];
            const int D = static_cast<int>(src.bs_ris_paths.size());
            const int K = static_cast<int>(src.ris_user_paths.size());
            auto &dst = ris_[n];
            dst.alpha.resize(D);
            dst.beta.resize(K);
            dst.cx.resize(K, D);
            dst.cy.resize(K, D);
            dst.B.resize(D, config.M);
            dst.sqrt_pl = std::sqrt(path_loss(config, n));
            for (int d = 0; d < D; ++d)
            {
                const auto &in = src.bs_ris_paths[d];
                dst.alpha[d] = in.alpha;
                dst.B.row(d) = ula_steering(in.aod_bs, config.M).adjoint();
            }
            for (int k = 0; k < K; ++k)
            {
                const auto &out = src.ris_user_paths[k];
                dst.beta[k] = out.beta;
                for (int d = 0; d < D; ++d)
                {
                    const auto &in = src.bs_ris_paths[d];
                    dst.cx(k, d) = direction_cosine_x(out.elev_aod, out.azim_aod) +
                                   direction_cosine_x(in.elev_aoa, in.azim_aoa);
                    dst.cy(k, d) = direction_cosine_y(out.elev_aod, out.azim_aod) +
                                   direction_cosine_y(in.elev_aoa, in.azim_aoa);
                }
            }
        }
    }

    Eigen::RowVectorXcd CompactChannelModel::row_from_gains(int n, const Eigen::MatrixXd &p_tilde) const
    {
        const auto &ris = ris_[n];
        // r_d = alpha_d * sum_k beta_k p_tilde(k, d)
        const Eigen::VectorXcd r = ris.alpha.cwiseProduct(p_tilde.cast<cplx>().transpose() * ris.beta);
        return ris.sqrt_pl * (r.transpose() * ris.B);
    }

    Eigen::RowVectorXcd CompactChannelModel::row(int n, Gradient q) const
    {
        const auto &ris = ris_[n];
        Eigen::MatrixXd p_tilde(ris.cx.rows(), ris.cx.cols());
        for (Eigen::Index d = 0; d < p_tilde.cols(); ++d)
            for (Eigen::Index k = 0; k < p_tilde.rows(); ++k)
                p_tilde(k, d) = dirichlet_gain(ris.cx(k, d) - q.x, L_, delta_) *
                                dirichlet_gain(ris.cy(k, d) - q.y, L_, delta_);
        return row_from_gains(n, p_tilde);
    }

    Eigen::MatrixXcd CompactChannelModel::channel(const std::vector<Gradient> &Q) const
    {
        if (static_cast<int>(Q.size()) != num_ris())
            throw std::invalid_argument("CompactChannelModel::channel: expected " + std::to_string(num_ris()) +
                                        " gradients, got " + std::to_string(Q.size()));
        const Eigen::Index M = ris_.empty() ? 0 : ris_.front().B.cols();
        Eigen::MatrixXcd H(num_ris(), M);
        for (int n = 0; n < num_ris(); ++n)
            H.row(n) = row(n, Q[n]);
        return H;
    }

    CascadedChannel compact_channel(const ChannelRealization &realization, const PhaseProfile &profile,
                                    const SystemConfig &config)
    {
        check_dims(realization, profile.num_ris(), config, "compact_channel");

        CascadedChannel out;
        out.H.resize(config.N, config.M);
        out.ris.resize(config.N);
        for (int n = 0; n < config.N; ++n)
        {
            const auto &src = realization.ris[n];
            const int D = static_cast<int>(src.bs_ris_paths.size());
            const int K = static_cast<int>(src.ris_user_paths.size());
            auto &dst = out.ris[n];
            dst.path_loss = path_loss(config, n);
            dst.B.resize(D, config.M);
            dst.r = Eigen::VectorXcd::Zero(D);
            dst.gains.reserve(static_cast<std::size_t>(K) * D);
            for (int k = 0; k < K; ++k)
                for (int d = 0; d < D; ++d)
                    dst.gains.push_back(gain_factor(realization, config, n, k, d, profile));
            for (int d = 0; d < D; ++d)
            {
                dst.B.row(d) = ula_steering(src.bs_ris_paths[d].aod_bs, config.M).adjoint();
                cplx acc = 0.0;
                for (int k = 0; k < K; ++k)
                    acc += src.ris_user_paths[k].beta * dst.gain(k, d).p_tilde;
                dst.r[d] = src.bs_ris_paths[d].alpha * acc;
            }
            out.H.row(n) = std::sqrt(dst.path_loss) * (dst.r.transpose() * dst.B);
        }
        return out;
    }

    Eigen::RowVectorXcd direct_cascaded_channel(const ChannelRealization &realization, const ElementPhases &phases,
                                                const SystemConfig &config)
    {
        check_dims(realization, phases.num_ris(), config, "direct_cascaded_channel");
        Eigen::RowVectorXcd h = Eigen::RowVectorXcd::Zero(config.M);
        const int L = config.L;
        for (int n = 0; n < config.N; ++n)
        {
            const auto &theta = phases.theta[n];
            if (theta.rows() != L || theta.cols() != L)
                throw std::invalid_argument("direct_cascaded_channel: element phase matrix of RIS " +
                                            std::to_string(n) + " is not L x L");
            Eigen::RowVectorXcd f = assemble_ris_user_channel(realization, n, config);
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < L; ++j)
                    f[i * L + j] *= std::polar(1.0, theta(i, j));
            h.noalias() += std::sqrt(path_loss(config, n)) * (f * assemble_bs_ris_channel(realization, n, config));
        }
        return h;
    }
}
