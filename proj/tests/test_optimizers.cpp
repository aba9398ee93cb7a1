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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hpb/optimizers.hpp"

using namespace hpb;

namespace
{
    SystemConfig small_config(int N, int L, int P, int M = 4)
    {
        SystemConfig c;
        c.N = N;
        c.L = L;
        c.P = P;
        c.M = M;
        return c;
    }

    Eigen::MatrixXcd random_matrix(int rows, int cols, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::MatrixXcd H(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                H(i, j) = cplx(g(rng), g(rng));
        return H;
    }

    Eigen::VectorXcd random_phasors(int n, std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> u(-pi, pi);
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i)
            v[i] = std::polar(1.0, u(rng));
        return v;
    }

    double received_power(const Eigen::MatrixXcd &H, const Eigen::VectorXcd &v, const Eigen::VectorXcd &w)
    {
        return std::norm((v.adjoint() * H * w)(0, 0));
    }
}

TEST_CASE("objective")
{
    Eigen::MatrixXcd H(2, 2);
    H << cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(0, 1);
    Eigen::VectorXcd v(2);
    v << 1.0, 1.0;
    CHECK(objective(H, v) == doctest::Approx(2.0));
    CHECK(objective(Eigen::MatrixXcd::Zero(3, 2), Eigen::VectorXcd::Ones(3)) == 0.0);
    CHECK_THROWS_AS(objective(H, Eigen::VectorXcd::Ones(3)), std::invalid_argument);
}

TEST_CASE("mrt")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 50; ++t)
    {
        const auto H = random_matrix(3, 5, rng);
        const auto v = random_phasors(3, rng);
        const double p = 0.01 * (1 + t);
        const auto w = mrt(H, v, p);
        CHECK(w.squaredNorm() == doctest::Approx(p).epsilon(1e-12));
        CHECK(received_power(H, v, w) == doctest::Approx(p * objective(H, v)).epsilon(1e-12));

        // No other beamformer of the same power does better.
        for (int r = 0; r < 100; ++r)
        {
            Eigen::VectorXcd x(5);
            for (int m = 0; m < 5; ++m)
                x[m] = cplx(g(rng), g(rng));
            x *= std::sqrt(p) / x.norm();
            CHECK(received_power(H, v, x) <= received_power(H, v, w) * (1 + 1e-12));
        }
    }

    CHECK_THROWS_AS(mrt(Eigen::MatrixXcd::Zero(2, 3), Eigen::VectorXcd::Ones(2), 1.0), DegenerateChannelError);
}

TEST_CASE("sca_v_step")
{
    SUBCASE("single row is a fixed point")
    {
        std::mt19937_64 rng(5);
        const auto H = random_matrix(1, 4, rng);
        Eigen::VectorXcd v(1);
        v[0] = std::polar(1.0, 0.3);
        const auto next = sca_v_step(H, v);
        CHECK(std::abs(next[0] - v[0]) < 1e-15);
    }

    SUBCASE("unit modulus and monotone")
    {
        std::mt19937_64 rng(6);
        for (int t = 0; t < 100; ++t)
        {
            const int N = 1 + t % 6;
            const auto H = random_matrix(N, 1 + t % 5, rng);
            Eigen::VectorXcd v = random_phasors(N, rng);
            double f = objective(H, v);
            for (int s = 0; s < 30; ++s)
            {
                v = sca_v_step(H, v);
                for (int n = 0; n < N; ++n)
                    CHECK(std::abs(std::abs(v[n]) - 1.0) < 1e-14);
                const double f_next = objective(H, v);
                CHECK(f_next >= f * (1 - 1e-14));
                f = f_next;
            }
        }
    }

    SUBCASE("zero coefficient keeps the previous phase")
    {
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2, 2);
        H(0, 0) = 1.0;
        Eigen::VectorXcd v(2);
        v << std::polar(1.0, 0.4), std::polar(1.0, -1.2);
        const auto next = sca_v_step(H, v);
        CHECK(std::abs(next[0] - std::polar(1.0, 0.4)) < 1e-15);
        CHECK(next[1] == v[1]);
    }
}

TEST_CASE("sca_maximize")
{
    SUBCASE("three RIS: reaches the best point of a dense random search")
    {
        std::mt19937_64 rng(21);
        for (int t = 0; t < 5; ++t)
        {
            const auto H = random_matrix(3, 2, rng);
            const auto sca = sca_maximize(H, Eigen::VectorXcd::Ones(3), 1000, 1e-12, true);
            for (std::size_t i = 1; i < sca.history.size(); ++i)
                CHECK(sca.history[i] >= sca.history[i - 1] * (1 - 1e-14));

            // The objective is invariant to a common phase, so search v = (1, e^{ja}, e^{jb}).
            double best = 0.0;
            const int grid = 1000;
            Eigen::VectorXcd v(3);
            for (int a = 0; a < grid; ++a)
                for (int b = 0; b < grid; ++b)
                {
                    v << 1.0, std::polar(1.0, 2 * pi * a / grid), std::polar(1.0, 2 * pi * b / grid);
                    best = std::max(best, objective(H, v));
                }
            // SCA is a local method; a random 3x2 instance usually has one maximum, allow grid resolution.
            CHECK(sca.objective >= best * (1 - 1e-4));
        }
    }

    SUBCASE("recorded trajectory never decreases")
    {
        std::mt19937_64 rng(23);
        for (int t = 0; t < 200; ++t)
        {
            const auto H = random_matrix(1 + t % 5, 1 + t % 4, rng);
            const auto sca = sca_maximize(H, random_phasors(1 + t % 5, rng), 1000, 1e-15, true);
            for (std::size_t i = 1; i < sca.history.size(); ++i)
                CHECK(sca.history[i] >= sca.history[i - 1]);
            CHECK(sca.objective == sca.history.back());
            CHECK(sca.objective == objective(H, sca.v));
        }
    }

    SUBCASE("stops early and counts iterations")
    {
        std::mt19937_64 rng(22);
        const auto H = random_matrix(1, 3, rng);
        const auto sca = sca_maximize(H, Eigen::VectorXcd::Ones(1), 50, 1e-6, true);
        CHECK(sca.iterations == 1);
        CHECK(sca.history.size() == 2);

        const auto H3 = random_matrix(4, 3, rng);
        const auto capped = sca_maximize(H3, random_phasors(4, rng), 2, 0.0, true);
        CHECK(capped.iterations == 2);
        CHECK(capped.history.size() == 3);
    }
}

TEST_CASE("strongest paths")
{
    RisChannel ris;
    ris.bs_ris_paths = {{cplx(0.5, 0), 1, 0, 0, 0}, {cplx(0, -0.9), 1, 0, 0, 0}, {cplx(0.9, 0), 1, 0, 0, 0}};
    ris.ris_user_paths = {{cplx(2, 0), 1, 0, 0}, {cplx(0, 0.1), 1, 0, 0}};
    const auto s = strongest_paths(ris);
    CHECK(s.d == 1);
    CHECK(s.k == 0);

    auto rng = make_rng(17);
    const auto cfg = small_config(3, 8, 6);
    const auto r = sample_realization(cfg, rng);
    const auto Q = strongest_path_gradients(r, cfg);
    for (int n = 0; n < 3; ++n)
    {
        int d = 0, k = 0;
        for (int i = 1; i < cfg.P; ++i)
        {
            if (std::abs(r.ris[n].bs_ris_paths[i].alpha) > std::abs(r.ris[n].bs_ris_paths[d].alpha))
                d = i;
            if (std::abs(r.ris[n].ris_user_paths[i].beta) > std::abs(r.ris[n].ris_user_paths[k].beta))
                k = i;
        }
        const auto &in = r.ris[n].bs_ris_paths[d];
        const auto &out = r.ris[n].ris_user_paths[k];
        const double qx = std::sin(in.elev_aoa) * std::cos(in.azim_aoa) + std::sin(out.elev_aod) * std::cos(out.azim_aod);
        const double qy = std::sin(in.elev_aoa) * std::sin(in.azim_aoa) + std::sin(out.elev_aod) * std::sin(out.azim_aod);
        CHECK(Q[n].x == doctest::Approx(wrap_q(qx, cfg.delta)));
        CHECK(Q[n].y == doctest::Approx(wrap_q(qy, cfg.delta)));
    }
}

TEST_CASE("hpb_spp")
{
    SUBCASE("single path gets the full array gain")
    {
        auto rng = make_rng(101);
        const auto cfg = small_config(1, 10, 1, 6);
        for (int t = 0; t < 20; ++t)
        {
            const auto r = sample_realization(cfg, rng);
            const auto res = hpb_spp(r, cfg);
            const cplx ab = r.ris[0].bs_ris_paths[0].alpha * r.ris[0].ris_user_paths[0].beta;
            CHECK(res.objective == doctest::Approx(path_loss(cfg, 0) * std::norm(ab)).epsilon(1e-10));
            CHECK(res.rate == doctest::Approx(std::log2(1 + cfg.p * res.objective / cfg.sigma2)).epsilon(1e-12));
            CHECK(res.w.squaredNorm() == doctest::Approx(cfg.p));
        }
    }

    SUBCASE("invariant to a common scaling of the path gains")
    {
        auto rng = make_rng(102);
        const auto cfg = small_config(2, 8, 4);
        auto r = sample_realization(cfg, rng);
        const auto a = hpb_spp(r, cfg);
        for (auto &ris : r.ris)
            for (auto &path : ris.bs_ris_paths)
                path.alpha *= 3.0;
        const auto b = hpb_spp(r, cfg);
        const auto &pa = std::get<PhaseProfile>(a.profile);
        const auto &pb = std::get<PhaseProfile>(b.profile);
        for (int n = 0; n < 2; ++n)
        {
            CHECK(pa.q[n].x == pb.q[n].x);
            CHECK(pa.q[n].y == pb.q[n].y);
        }
        CHECK(b.objective == doctest::Approx(9.0 * a.objective).epsilon(1e-9));
    }

    SUBCASE("profile reproduces the reported objective")
    {
        auto rng = make_rng(103);
        const auto cfg = small_config(3, 6, 5);
        const auto r = sample_realization(cfg, rng);
        const auto res = hpb_spp(r, cfg);
        const auto &prof = std::get<PhaseProfile>(res.profile);
        const auto h = direct_cascaded_channel(r, expand_profile(prof, cfg), cfg);
        CHECK(h.squaredNorm() == doctest::Approx(res.objective).epsilon(1e-9));
        CHECK(res.iterations >= 1);
    }
}

TEST_CASE("hpb_ao")
{
    auto rng = make_rng(201);
    const auto cfg = small_config(2, 8, 4);

    SUBCASE("no annealing moves reduce to HPB-SPP")
    {
        const auto r = sample_realization(cfg, rng);
        OptimizerParams params;
        params.sa_iters = 0;
        const auto ao = hpb_ao(r, cfg, params);
        const auto spp = hpb_spp(r, cfg, params);
        CHECK(ao.objective == spp.objective);
        CHECK(ao.rate == spp.rate);
    }

    SUBCASE("never worse than its warm start")
    {
        OptimizerParams params;
        params.sa_iters = 200;
        params.ao_outer_iters = 3;
        for (int t = 0; t < 10; ++t)
        {
            const auto r = sample_realization(cfg, rng);
            params.seed = t;
            const auto ao = hpb_ao(r, cfg, params);
            const auto spp = hpb_spp(r, cfg, params);
            CHECK(ao.objective >= spp.objective);
            const auto &prof = std::get<PhaseProfile>(ao.profile);
            for (const auto &q : prof.q)
            {
                CHECK(std::abs(q.x) <= cfg.q_bar());
                CHECK(std::abs(q.y) <= cfg.q_bar());
            }
            const auto h = direct_cascaded_channel(r, expand_profile(prof, cfg), cfg);
            CHECK(h.squaredNorm() == doctest::Approx(ao.objective).epsilon(1e-9));
        }
    }

    SUBCASE("same seed, same answer")
    {
        const auto r = sample_realization(cfg, rng);
        OptimizerParams params;
        params.sa_iters = 100;
        params.seed = 9;
        CHECK(hpb_ao(r, cfg, params).objective == hpb_ao(r, cfg, params).objective);
    }

    SUBCASE("bad parameters")
    {
        const auto r = sample_realization(cfg, rng);
        OptimizerParams params;
        params.sa_cooling = 1.0;
        CHECK_THROWS_AS(hpb_ao(r, cfg, params), std::invalid_argument);
    }
}

TEST_CASE("hpb_es")
{
    auto rng = make_rng(301);
    const auto cfg = small_config(1, 8, 3);
    const auto r = sample_realization(cfg, rng);

    SUBCASE("grid of two visits the four corners")
    {
        const auto res = hpb_es(r, cfg, 2);
        CHECK(res.iterations == 4);
        const auto &q = std::get<PhaseProfile>(res.profile).q[0];
        CHECK(std::abs(q.x) == cfg.q_bar());
        CHECK(std::abs(q.y) == cfg.q_bar());
        double best = 0.0;
        for (double x : {-cfg.q_bar(), cfg.q_bar()})
            for (double y : {-cfg.q_bar(), cfg.q_bar()})
            {
                PhaseProfile p = PhaseProfile::zeros(1);
                p.q[0] = {x, y};
                best = std::max(best, compact_channel(r, p, cfg).H.squaredNorm());
            }
        CHECK(res.objective == doctest::Approx(best).epsilon(1e-12));
    }

    SUBCASE("matches a brute-force scan of the same lattice")
    {
        const int grid = 25;
        const auto res = hpb_es(r, cfg, grid);
        double best = 0.0;
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j)
            {
                PhaseProfile p = PhaseProfile::zeros(1);
                p.q[0] = {-cfg.q_bar() + 2 * cfg.q_bar() * i / (grid - 1),
                          -cfg.q_bar() + 2 * cfg.q_bar() * j / (grid - 1)};
                const auto h = direct_cascaded_channel(r, expand_profile(p, cfg), cfg);
                best = std::max(best, h.squaredNorm());
            }
        CHECK(res.objective == doctest::Approx(best).epsilon(1e-9));
    }

    SUBCASE("single path peaks at the steering gradient")
    {
        const auto cfg1 = small_config(1, 10, 1);
        const auto r1 = sample_realization(cfg1, rng);
        const auto es = hpb_es(r1, cfg1, 401);
        const auto spp = hpb_spp(r1, cfg1);
        // a lattice point lies within half a cell of the optimum, where the loss is second order
        CHECK(es.objective >= spp.objective * 0.99);
        CHECK(es.objective <= spp.objective * (1 + 1e-12));
    }

    SUBCASE("rejects more than one RIS and tiny grids")
    {
        const auto cfg2 = small_config(2, 4, 2);
        const auto r2 = sample_realization(cfg2, rng);
        CHECK_THROWS_AS(hpb_es(r2, cfg2, 10), std::invalid_argument);
        CHECK_THROWS_AS(hpb_es(r, cfg, 1), std::invalid_argument);
    }
}

TEST_CASE("pb_sca")
{
    SUBCASE("monotone and consistent with the direct channel")
    {
        auto rng = make_rng(401);
        const auto cfg = small_config(2, 6, 4);
        OptimizerParams params;
        params.record_history = true;
        for (int t = 0; t < 10; ++t)
        {
            const auto r = sample_realization(cfg, rng);
            const auto res = pb_sca(r, cfg, params);
            for (std::size_t i = 1; i < res.history.size(); ++i)
                CHECK(res.history[i] >= res.history[i - 1] * (1 - 1e-14));
            const auto h = direct_cascaded_channel(r, std::get<ElementPhases>(res.profile), cfg);
            CHECK(h.squaredNorm() == doctest::Approx(res.objective).epsilon(1e-9));
            CHECK(res.objective >= hpb_spp(r, cfg).objective * (1 - 1e-12));
        }
    }

    SUBCASE("single path: nothing left to gain over HPB-SPP")
    {
        auto rng = make_rng(402);
        const auto cfg = small_config(1, 8, 1);
        for (int t = 0; t < 10; ++t)
        {
            const auto r = sample_realization(cfg, rng);
            const auto a = pb_sca(r, cfg);
            const auto b = hpb_spp(r, cfg);
            CHECK(a.rate == doctest::Approx(b.rate).epsilon(1e-4));
        }
    }

    SUBCASE("random initialization also climbs")
    {
        auto rng = make_rng(403);
        const auto cfg = small_config(1, 6, 3);
        const auto r = sample_realization(cfg, rng);
        OptimizerParams params;
        params.pb_init = InitMode::random;
        params.record_history = true;
        const auto res = pb_sca(r, cfg, params);
        CHECK(res.history.back() >= res.history.front());
    }
}

TEST_CASE("random_phases")
{
    SUBCASE("below the structured optimizers on average")
    {
        auto rng = make_rng(501);
        const auto cfg = small_config(1, 10, 4);
        double spp = 0.0, rnd = 0.0;
        for (int t = 0; t < 20; ++t)
        {
            const auto r = sample_realization(cfg, rng);
            spp += hpb_spp(r, cfg).rate;
            rnd += random_phases(r, cfg, rng, 50).rate;
        }
        CHECK(rnd < spp);
    }

    SUBCASE("mean power of random phases is the element power sum")
    {
        // E|theta^H a|^2 over i.i.d. phases equals ||a||^2 for every column a.
        auto rng = make_rng(502);
        const auto cfg = small_config(1, 4, 2, 2);
        const auto r = sample_realization(cfg, rng);
        const auto A = element_channel_matrix(r, cfg);
        const auto res = random_phases(r, cfg, rng, 200000);
        CHECK(res.objective == doctest::Approx(A.squaredNorm()).epsilon(0.02));
        CHECK(res.iterations == 200000);
    }

    SUBCASE("validation")
    {
        auto rng = make_rng(503);
        const auto cfg = small_config(1, 4, 2);
        const auto r = sample_realization(cfg, rng);
        CHECK_THROWS_AS(random_phases(r, cfg, rng, 0), std::invalid_argument);
    }
}

TEST_CASE("element_channel_matrix")
{
    auto rng = make_rng(601);
    const auto cfg = small_config(2, 4, 3, 3);
    const auto r = sample_realization(cfg, rng);
    const auto A = element_channel_matrix(r, cfg);
    CHECK(A.rows() == 2 * 16);
    CHECK(A.cols() == 3);
    // Rows sum to the zero-phase direct channel.
    ElementPhases zero;
    zero.theta.assign(2, Eigen::MatrixXd::Zero(4, 4));
    const auto h = direct_cascaded_channel(r, zero, cfg);
    CHECK((A.colwise().sum() - h).norm() < 1e-12 * h.norm());
}
