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

#ifndef HPB_CHANNEL_MODEL_HPP
#define HPB_CHANNEL_MODEL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hpb
{
    using cplx = std::complex<double>;

    inline constexpr double pi = 3.14159265358979323846;

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double deg_to_rad(double deg) { return deg * pi / 180.0; }

    // Static scenario parameters. Distances are per RIS; a single entry is broadcast to all N surfaces.
    struct SystemConfig
    {
        int M = 8;                     // BS antennas (ULA, half-wavelength)
        int N = 1;                     // number of RISs
        int L = 30;                    // elements per URA side, even
        double delta = 0.5;            // element spacing in wavelengths
        double lambda = 0.1;           // carrier wavelength [m]
        double p = 0.01;               // max transmit power [W]
        double sigma2 = 1e-13;         // noise power [W]
        std::vector<double> d1{50.0};  // BS-RIS distance [m]
        std::vector<double> d2{50.0};  // RIS-user distance [m]
        double g_bs = db_to_linear(5.0);
        double g_ris = db_to_linear(5.0);
        double g_user = 1.0;
        int P = 8;                     // paths per link (D_n = K_n = P)
        double sigma_as = deg_to_rad(10.0); // angular spread [rad]
        int i_sca = 1000;
        double eps_sca = 1e-6;

        // Throws std::invalid_argument on any violated field constraint.
        void validate() const;

        // Upper bound of the phase-gradient range, min{2, 1/(2*delta)}.
        double q_bar() const;

        double d1_of(int n) const;
        double d2_of(int n) const;
        int elements() const { return L * L; }
    };

    struct BsRisPath
    {
        cplx alpha;         // complex path gain
        double variance;    // E|alpha|^2, unit sum over the link
        double elev_aoa;    // RIS elevation AoA [rad], [0, pi/2)
        double azim_aoa;    // RIS azimuth AoA [rad], [0, 2pi)
        double aod_bs;      // BS AoD [rad], (-pi/2, pi/2)
    };

    struct RisUserPath
    {
        cplx beta;          // complex path gain
        double variance;    // E|beta|^2, unit sum over the link
        double elev_aod;    // RIS elevation AoD [rad], [0, pi/2)
        double azim_aod;    // RIS azimuth AoD [rad], [0, 2pi)
    };

    struct RisChannel
    {
        std::vector<BsRisPath> bs_ris_paths;
        std::vector<RisUserPath> ris_user_paths;
    };

    struct ChannelRealization
    {
        std::vector<RisChannel> ris;
        int num_ris() const { return static_cast<int>(ris.size()); }
    };

    // BS ULA response, entry m = exp(-j*pi*m*sin(angle)) / sqrt(M), m = 0..M-1.
    Eigen::VectorXcd ula_steering(double angle, int M);

    // Per-axis URA factors. Index l runs over [1-L/2, L/2]; entry = exp(-j*2*pi*delta*(l-1/2)*u) / sqrt(L).
    Eigen::VectorXcd ura_axis_factor(double direction_cosine, int L, double delta);

    // RIS arrival response a(elev, azim) = a^x (x) a^y.
    Eigen::VectorXcd ura_steering(double elev, double azim, int L, double delta);

    // RIS departure response u(elev, azim). The exponent carries the opposite sign of the
    // arrival response, so u(elev, azim) = a(elev, azim + pi) = conj(a(elev, azim)).
    Eigen::VectorXcd ura_departure_steering(double elev, double azim, int L, double delta);

    // Zero-mean Laplacian sample with standard deviation `std_dev` (scale std_dev / sqrt(2)).
    double laplace_offset(std::mt19937_64 &rng, double std_dev);

    // Random geometric multipath realization for every RIS in `config`.
    ChannelRealization sample_realization(const SystemConfig &config, std::mt19937_64 &rng);

    // G_n = sum_d alpha_d a(elev, azim) b^H(aod), size L^2 x M.
    Eigen::MatrixXcd assemble_bs_ris_channel(const ChannelRealization &realization, int n, const SystemConfig &config);

    // f_n^H = sum_k beta_k u^H(elev, azim), size 1 x L^2.
    Eigen::RowVectorXcd assemble_ris_user_channel(const ChannelRealization &realization, int n, const SystemConfig &config);

    // Cascaded-link power gain of RIS n, gains in linear scale.
    double path_loss(const SystemConfig &config, int n);

    // Seeded engine. Seeds pass through std::seed_seq so neighbouring integers give unrelated streams.
    std::mt19937_64 make_rng(std::uint64_t seed);
}

#endif
