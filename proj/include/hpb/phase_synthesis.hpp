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

#ifndef HPB_PHASE_SYNTHESIS_HPP
#define HPB_PHASE_SYNTHESIS_HPP

#include "hpb/channel_model.hpp"

#include <vector>

namespace hpb
{
    struct Direction
    {
        double elev; // [rad]
        double azim; // [rad]
    };

    // Phase gradient of one RIS along the x and y axes of the URA.
    struct Gradient
    {
        double x = 0.0;
        double y = 0.0;
    };

    /*!
    Structured RIS configuration: one phase gradient and one reference phase per surface.

    The reference vector follows the compact channel convention h^H = v^H H, i.e.
    v_n = exp(-j*phi_n), so that conj(v_n) multiplies row n of H.
    */
    struct PhaseProfile
    {
        std::vector<Gradient> q;
        std::vector<double> phi;

        int num_ris() const { return static_cast<int>(q.size()); }
        Eigen::VectorXcd reference_vector() const;
        void set_reference_vector(const Eigen::VectorXcd &v);

        static PhaseProfile zeros(int N);
    };

    // Free per-element phases; theta[n](i, j) with i, j = 0..L-1 mapping to element indices 1-L/2+i, 1-L/2+j.
    struct ElementPhases
    {
        std::vector<Eigen::MatrixXd> theta;
        int num_ris() const { return static_cast<int>(theta.size()); }
    };

    struct GainFactor
    {
        cplx p;          // exp(j*phi_n) * p_tilde
        double p_tilde;  // real, signed Dirichlet product
        double sx;       // direction offset along x
        double sy;       // direction offset along y
    };

    struct RisCascade
    {
        Eigen::VectorXcd r;         // r_{n,d} = alpha_d * sum_k beta_k * p_tilde_{k,d}
        Eigen::MatrixXcd B;         // D x M, row d = b_d^H
        double path_loss = 1.0;
        std::vector<GainFactor> gains; // K x D, k-major
        const GainFactor &gain(int k, int d) const { return gains[static_cast<std::size_t>(k) * r.size() + d]; }
    };

    struct CascadedChannel
    {
        Eigen::MatrixXcd H;         // N x M, row n = sqrt(PL_n) * r_n^H B_n
        std::vector<RisCascade> ris;
    };

    // Generalized Snell's law gradient steering `incident` into `reflected`.
    Gradient q_from_angles(Direction incident, Direction reflected);

    // Shifts q by a multiple of 1/delta into [-q_bar, q_bar]. Values already in range are returned unchanged.
    double wrap_q(double q, double delta);

    // Number of 1/delta periods removed by wrap_q, i.e. q = wrap_q(q) + periods / delta.
    long wrap_periods(double q, double delta);

    // Wraps every gradient of `profile` into range. An odd period shift negates the element phasors along
    // that axis (the offsets i - 1/2 are half-integers), so phi is advanced by pi per odd shift and the
    // expanded element phases stay identical modulo 2*pi.
    PhaseProfile wrap_profile(const PhaseProfile &profile, double delta);

    // theta(i, j) = 2*pi*delta*((i-1/2)*q.x + (j-1/2)*q.y) + phi.
    Eigen::MatrixXd snell_element_phases(Gradient q, double phi, int L, double delta);

    ElementPhases expand_profile(const PhaseProfile &profile, const SystemConfig &config);

    // sinc(delta*L*s) / sinc(delta*s), the normalized geometric sum (1/L) sum_l exp(-j*2*pi*delta*(l-1/2)*s).
    double dirichlet_gain(double s, int L, double delta);

    GainFactor gain_factor(const ChannelRealization &realization, const SystemConfig &config, int n, int k, int d,
                           const PhaseProfile &profile);

    /*!
    Precomputed angular data for fast evaluation of the compact channel as a function of Q.

    The direction sums c_{k,d} (offset s = c - q) and the BS steering rows are cached per RIS, so a row of H
    costs O(K*D*(1 + M)) regardless of the surface size.
    */
    class CompactChannelModel
    {
    public:
        CompactChannelModel(const ChannelRealization &realization, const SystemConfig &config);

        int num_ris() const { return static_cast<int>(ris_.size()); }
        int paths_in(int n) const { return static_cast<int>(ris_[n].alpha.size()); }
        int paths_out(int n) const { return static_cast<int>(ris_[n].beta.size()); }

        // Direction sum along x / y for pair (k, d) of RIS n.
        double cx(int n, int k, int d) const { return ris_[n].cx(k, d); }
        double cy(int n, int k, int d) const { return ris_[n].cy(k, d); }

        // Row n of H for gradient q, path loss included.
        Eigen::RowVectorXcd row(int n, Gradient q) const;

        // Row n of H from precomputed Dirichlet products (K x D table of p_tilde).
        Eigen::RowVectorXcd row_from_gains(int n, const Eigen::MatrixXd &p_tilde) const;

        Eigen::MatrixXcd channel(const std::vector<Gradient> &Q) const;

        const Eigen::VectorXcd &alpha(int n) const { return ris_[n].alpha; }
        const Eigen::VectorXcd &beta(int n) const { return ris_[n].beta; }
        const Eigen::MatrixXcd &steering_rows(int n) const { return ris_[n].B; }
        double sqrt_path_loss(int n) const { return ris_[n].sqrt_pl; }

        int L() const { return L_; }
        double delta() const { return delta_; }

    private:
        struct Ris
        {
            Eigen::VectorXcd alpha;
            Eigen::VectorXcd beta;
            Eigen::MatrixXd cx;     // K x D
            Eigen::MatrixXd cy;     // K x D
            Eigen::MatrixXcd B;     // D x M
            double sqrt_pl = 1.0;
        };
        std::vector<Ris> ris_;
        int L_;
        double delta_;
    };

    CascadedChannel compact_channel(const ChannelRealization &realization, const PhaseProfile &profile,
                                    const SystemConfig &config);

    // h^H = sum_n sqrt(PL_n) f_n^H Theta_n G_n.
    Eigen::RowVectorXcd direct_cascaded_channel(const ChannelRealization &realization, const ElementPhases &phases,
                                                const SystemConfig &config);
}

#endif
