// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field wideband secure beamfocusing library
// Copyright (C) 2026 nfsec contributors
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

#include "nfsec/semidigital.hpp"

#include <doctest.h>

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

using namespace nfsec;

namespace
{
    Eigen::VectorXcd random_channel(std::mt19937_64 &rng, int n, double scale)
    {
        std::normal_distribution<double> nd;
        Eigen::VectorXcd h(n);
        for (int i = 0; i < n; ++i)
            h(i) = scale * std::complex<double>(nd(rng), nd(rng));
        return h;
    }

    // exhaustive search over the free phase of v = (1, e^{j a}) for N = 2
    double phase_grid_best(const Eigen::VectorXcd &hb, const Eigen::VectorXcd &he, double p,
                           double sigma2, int grid_points)
    {
        double best = -1e300;
        for (int k = 0; k < grid_points; ++k)
        {
            const double a = 2.0 * M_PI * k / grid_points;
            Eigen::VectorXcd v(2);
            v << std::complex<double>(1.0, 0.0), std::polar(1.0, a);
            best = std::max(best, carrier_log_ratio(v, hb, he, p, sigma2, 2));
        }
        return best;
    }
}

TEST_SUITE_BEGIN("semidigital");

TEST_CASE("matched-filter initialization")
{
    std::mt19937_64 rng(17);
    ChannelSet cs;
    cs.bob = {random_channel(rng, 4, 1.0)};
    cs.eve = {random_channel(rng, 4, 1.0)};
    auto bf = init_semi_digital(cs);

    SUBCASE("unit modulus everywhere")
    {
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(std::abs(bf.v[0](i)) - 1.0) < 1e-14);
    }
    SUBCASE("coherent combining toward Bob")
    {
        double bound = 0.0;
        for (int i = 0; i < 4; ++i)
            bound += std::abs(cs.bob[0](i));
        CHECK(array_gain(cs.bob[0], bf.v[0]) == doctest::Approx(bound * bound).epsilon(1e-12));
    }
    SUBCASE("two-antenna hand oracle")
    {
        ChannelSet two;
        Eigen::VectorXcd h(2);
        h << std::complex<double>(0.3, 0.4), std::complex<double>(-1.0, 1.0);
        two.bob = {h};
        two.eve = {h};
        auto v = init_semi_digital(two).v[0];
        CHECK(std::arg(v(0)) == doctest::Approx(std::atan2(0.4, 0.3)).epsilon(1e-14));
        CHECK(std::arg(v(1)) == doctest::Approx(std::atan2(1.0, -1.0)).epsilon(1e-14));
    }
}

TEST_CASE("lambda update")
{
    SUBCASE("arithmetic instance x = 4, y = 2 gives 1")
    {
        // N = 1, sigma^2 = 1: x = 1 + 3 * 1 = 4 with |h_B| = 1, P = 3;
        // y = 1 + 3 |h_E|^2 = 2 with |h_E|^2 = 1/3
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(1, 1);
        Eigen::VectorXcd hb(1), he(1);
        hb << std::complex<double>(1.0, 0.0);
        he << std::complex<double>(std::sqrt(1.0 / 3.0), 0.0);
        CHECK(update_lambda(v, hb, he, 3.0, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero power gives 1/sqrt(N sigma^2)")
    {
        std::mt19937_64 rng(23);
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(3, 3);
        auto hb = random_channel(rng, 3, 1.0);
        auto he = random_channel(rng, 3, 1.0);
        CHECK(update_lambda(v, hb, he, 0.0, 0.2, 3) ==
              doctest::Approx(1.0 / std::sqrt(3.0 * 0.2)).epsilon(1e-12));
    }
    SUBCASE("surrogate is tight at the optimal lambda")
    {
        std::mt19937_64 rng(29);
        auto hb = random_channel(rng, 3, 1.0);
        auto he = random_channel(rng, 3, 0.5);
        Eigen::VectorXcd v0 = random_channel(rng, 3, 1.0);
        Eigen::MatrixXcd v = v0 * v0.adjoint() + Eigen::MatrixXcd::Identity(3, 3);
        const double p = 0.7, s2 = 0.05;
        const double lam = update_lambda(v, hb, he, p, s2, 3);
        const double x = 3 * s2 + p * lifted_gain(v, hb);
        const double y = 3 * s2 + p * lifted_gain(v, he);
        CHECK(fp_surrogate(v, lam, hb, he, p, s2, 3) == doctest::Approx(x / y).epsilon(1e-12));
    }
}

TEST_CASE("lifting consistency")
{
    std::mt19937_64 rng(41);
    for (int t = 0; t < 20; ++t)
    {
        const int n = 4;
        Eigen::VectorXcd v(n);
        std::uniform_real_distribution<double> up(-M_PI, M_PI);
        for (int i = 0; i < n; ++i)
            v(i) = std::polar(1.0, up(rng));
        auto h = random_channel(rng, n, 1.0);
        Eigen::MatrixXcd lifted = v * v.adjoint();
        CHECK(lifted_gain(lifted, h) ==
              doctest::Approx(array_gain(h, v)).epsilon(1e-10));
    }
}

TEST_CASE("relaxed per-carrier solve")
{
    SUBCASE("single antenna pins V to [1]")
    {
        Eigen::VectorXcd hb(1), he(1);
        hb << std::complex<double>(0.8, 0.1);
        he << std::complex<double>(0.1, 0.0);
        auto v = solve_relaxed(1.0, hb, he, 0.5, 0.3, 1);
        CHECK(v.rows() == 1);
        CHECK(std::abs(v(0, 0) - std::complex<double>(1.0, 0.0)) < 1e-9);
    }
    SUBCASE("no eavesdropper: relaxation is tight and matched to Bob")
    {
        std::mt19937_64 rng(47);
        auto hb = random_channel(rng, 2, 1.0);
        Eigen::VectorXcd he = Eigen::VectorXcd::Zero(2);
        const double p = 1.0, s2 = 0.1;
        const double lam = update_lambda(Eigen::MatrixXcd::Identity(2, 2), hb, he, p, s2, 2);
        auto v = solve_relaxed(lam, hb, he, p, s2, 2);
        // rank-one with the off-diagonal phase matching the channel phase gap
        CHECK(rankone_ratio(v) < 1e-6);
        const double want = std::arg(hb(0)) - std::arg(hb(1));
        CHECK(std::remainder(std::arg(v(0, 1)) - want, 2.0 * M_PI) ==
              doctest::Approx(0.0).epsilon(1e-6));
        // beats a fine phase grid on the lifted surrogate objective
        double best_grid = -1e300;
        for (int k = 0; k < 10000; ++k)
        {
            Eigen::VectorXcd vv(2);
            vv << std::complex<double>(1.0, 0.0), std::polar(1.0, 2.0 * M_PI * k / 10000.0);
            best_grid = std::max(best_grid, fp_surrogate(vv * vv.adjoint(), lam, hb, he, p, s2, 2));
        }
        CHECK(fp_surrogate(v, lam, hb, he, p, s2, 2) >= best_grid - 1e-6 * std::abs(best_grid));
    }
    SUBCASE("objective dominates the lifted initializer")
    {
        std::mt19937_64 rng(53);
        auto hb = random_channel(rng, 3, 1.0);
        auto he = random_channel(rng, 3, 0.4);
        ChannelSet cs;
        cs.bob = {hb};
        cs.eve = {he};
        Eigen::VectorXcd v0 = init_semi_digital(cs).v[0];
        const double p = 0.8, s2 = 0.07;
        const double lam = update_lambda(v0 * v0.adjoint(), hb, he, p, s2, 3);
        auto v = solve_relaxed(lam, hb, he, p, s2, 3);
        CHECK(fp_surrogate(v, lam, hb, he, p, s2, 3) >=
              fp_surrogate(v0 * v0.adjoint(), lam, hb, he, p, s2, 3) - 1e-7);
        // unit diagonal within solver tolerance
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(v(i, i) - std::complex<double>(1.0, 0.0)) < 1e-7);
    }
}

TEST_CASE("rank-one tightening")
{
    std::mt19937_64 rng(59);

    SUBCASE("tight relaxation is a fixed point")
    {
        // for N = 2 the relaxed optimum is generically rank-one already
        auto hb = random_channel(rng, 2, 1.0);
        auto he = random_channel(rng, 2, 0.3);
        const double p = 1.0, s2 = 0.05;
        const double lam = update_lambda(Eigen::MatrixXcd::Identity(2, 2), hb, he, p, s2, 2);
        auto v0 = solve_relaxed(lam, hb, he, p, s2, 2);
        REQUIRE(rankone_ratio(v0) < 1e-5);
        auto v1 = rankone_iteration(v0, lam, hb, he, p, s2, 2);
        CHECK((v1 - v0).norm() < 1e-5);
    }
    SUBCASE("loop drives the second eigenvalue down")
    {
        auto hb = random_channel(rng, 3, 1.0);
        auto he = random_channel(rng, 3, 0.6);
        const double p = 1.0, s2 = 0.02;
        const double lam = update_lambda(Eigen::MatrixXcd::Identity(3, 3), hb, he, p, s2, 3);
        auto v = solve_relaxed(lam, hb, he, p, s2, 3);
        for (int it = 0; it < 30; ++it)
        {
            auto vn = rankone_iteration(v, lam, hb, he, p, s2, 3);
            const double dv = (vn - v).norm();
            v = vn;
            if (dv < 1e-5)
                break;
        }
        CHECK(rankone_ratio(v) < 1e-3);
    }
}

TEST_CASE("rank-one extraction")
{
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> up(-M_PI, M_PI);

    SUBCASE("recovers a unit-modulus vector up to global phase")
    {
        Eigen::VectorXcd v(4);
        for (int i = 0; i < 4; ++i)
            v(i) = std::polar(1.0, up(rng));
        auto out = extract_rank_one(v * v.adjoint());
        const std::complex<double> rot = v(0) / out(0);
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(out(i) * rot - v(i)) < 1e-9);
    }
    SUBCASE("near-rank-one projection keeps 99% of the ratio objective")
    {
        for (int t = 0; t < 20; ++t)
        {
            const int n = 4;
            Eigen::VectorXcd v(n);
            for (int i = 0; i < n; ++i)
                v(i) = std::polar(1.0, up(rng));
            Eigen::VectorXcd noise = random_channel(rng, n, 1.0);
            noise.normalize();
            Eigen::MatrixXcd lifted =
                v * v.adjoint() + 1e-4 * static_cast<double>(n) * noise * noise.adjoint();
            auto hb = random_channel(rng, n, 1.0);
            auto he = random_channel(rng, n, 0.5);
            const double p = 1.0, s2 = 0.05;
            const double ns2 = n * s2;
            const double lifted_ratio = (ns2 + p * lifted_gain(lifted, hb)) /
                                        (ns2 + p * lifted_gain(lifted, he));
            auto projected = extract_rank_one(lifted);
            const double proj_ratio = (ns2 + p * array_gain(hb, projected)) /
                                      (ns2 + p * array_gain(he, projected));
            CHECK(proj_ratio >= 0.99 * lifted_ratio);
        }
    }
}

TEST_CASE("beamformer design for one carrier")
{
    std::mt19937_64 rng(67);
    BeamformerDesignOptions opts;

    SUBCASE("no eavesdropper converges to the coherent bound")
    {
        auto hb = random_channel(rng, 3, 1.0);
        Eigen::VectorXcd he = Eigen::VectorXcd::Zero(3);
        const double p = 1.0, s2 = 0.05;
        auto res = optimize_beamformer_single(hb, he, p, s2, 3, opts);
        double bound = 0.0;
        for (int i = 0; i < 3; ++i)
            bound += std::abs(hb(i));
        const double best = std::log2(1.0 + p * bound * bound / (3.0 * s2));
        CHECK(res.objective_log2 >= best - 1e-3);
    }
    SUBCASE("objective trace is nondecreasing within 1e-6")
    {
        auto hb = random_channel(rng, 3, 1.0);
        auto he = random_channel(rng, 3, 0.7);
        auto res = optimize_beamformer_single(hb, he, 1.0, 0.02, 3, opts);
        for (size_t i = 1; i < res.objective_trace.size(); ++i)
            CHECK(res.objective_trace[i] >= res.objective_trace[i - 1] - 1e-6);
    }
    SUBCASE("N=2 matches the exhaustive phase grid")
    {
        for (int t = 0; t < 3; ++t)
        {
            auto hb = random_channel(rng, 2, 1.0);
            auto he = random_channel(rng, 2, 0.5);
            const double p = 1.0, s2 = 0.05;
            auto res = optimize_beamformer_single(hb, he, p, s2, 2, opts);
            const double oracle = phase_grid_best(hb, he, p, s2, 10000);
            CHECK(res.objective_log2 >= oracle - 1e-3);
        }
    }
}

TEST_CASE("semi-digital alternating optimization")
{
    ScenarioConfig cfg;
    cfg.num_antennas = 4;
    cfg.num_ttds = 2;
    cfg.num_carriers = 3;
    cfg.bandwidth_hz = 8e9;
    cfg.f_c_hz = 24e9;
    cfg.power_budget_w = 0.1;
    const double dr = cfg.rayleigh_distance();
    cfg.bob = {0.5 * dr, M_PI / 3.0};
    cfg.eve = {0.4 * dr, M_PI / 2.7};

    SUBCASE("co-located eavesdropper yields zero rate and power")
    {
        ScenarioConfig cfg2 = cfg;
        cfg2.eve = cfg2.bob;
        const ChannelSet cs = cfg2.channels();
        auto res = semi_digital_solve(cfg2, cs);
        CHECK(res.secrecy_rate == doctest::Approx(0.0));
        for (double p : res.power_w)
            CHECK(p == doctest::Approx(0.0));
        CHECK(res.active.empty());
    }
    SUBCASE("AO dominates the initializer with water-filling alone")
    {
        const ChannelSet cs = cfg.channels();
        auto res = semi_digital_solve(cfg, cs);
        // score the plain matched filter + waterfill start
        auto init = init_semi_digital(cs);
        std::vector<GainPair> g(3);
        for (int m = 0; m < 3; ++m)
            g[static_cast<size_t>(m)] = {array_gain(cs.bob[static_cast<size_t>(m)], init.v[static_cast<size_t>(m)]),
                                         array_gain(cs.eve[static_cast<size_t>(m)], init.v[static_cast<size_t>(m)])};
        auto pa = waterfill_secure(g, cfg.power_budget_w, cfg.noise_per_carrier(), 4);
        double base = 0.0;
        for (int m = 0; m < 3; ++m)
            if (pa.power_w[static_cast<size_t>(m)] > 0.0)
                base += std::max(0.0, carrier_log_ratio(init.v[static_cast<size_t>(m)],
                                                        cs.bob[static_cast<size_t>(m)],
                                                        cs.eve[static_cast<size_t>(m)],
                                                        pa.power_w[static_cast<size_t>(m)],
                                                        cfg.noise_per_carrier(), 4));
        CHECK(res.secrecy_rate >= base - 1e-9);
        // trace is monotone nondecreasing
        for (size_t i = 1; i < res.rate_trace.size(); ++i)
            CHECK(res.rate_trace[i] >= res.rate_trace[i - 1] - 1e-6);
        // budget respected
        double total = 0.0;
        for (double p : res.power_w)
            total += p;
        CHECK(total <= cfg.power_budget_w * (1.0 + 1e-9));
    }
    SUBCASE("close to the multi-start best")
    {
        const ChannelSet cs = cfg.channels();
        auto res = semi_digital_solve(cfg, cs);
        std::mt19937_64 rng(71);
        std::uniform_real_distribution<double> up(-M_PI, M_PI);
        double best = res.secrecy_rate;
        for (int restart = 0; restart < 6; ++restart)
        {
            // random unit-modulus targets as alternative AO starting points
            SemiDigitalBeamformer bf;
            for (int m = 0; m < 3; ++m)
            {
                Eigen::VectorXcd v(4);
                for (int i = 0; i < 4; ++i)
                    v(i) = std::polar(1.0, up(rng));
                bf.v.push_back(v);
            }
            std::vector<GainPair> g(3);
            for (int m = 0; m < 3; ++m)
                g[static_cast<size_t>(m)] = {array_gain(cs.bob[static_cast<size_t>(m)], bf.v[static_cast<size_t>(m)]),
                                             array_gain(cs.eve[static_cast<size_t>(m)], bf.v[static_cast<size_t>(m)])};
            auto pa = waterfill_secure(g, cfg.power_budget_w, cfg.noise_per_carrier(), 4);
            BeamformerDesignOptions opts{cfg.tol_lambda, cfg.tol_v, cfg.max_fp_outer, cfg.max_rankone_inner};
            auto designs = optimize_beamformer(cs, pa.active, pa.power_w, cfg.noise_per_carrier(), 4,
                                               opts, &bf.v);
            double rate = 0.0;
            for (size_t k = 0; k < pa.active.size(); ++k)
                rate += std::max(0.0, designs[k].objective_log2);
            best = std::max(best, rate);
        }
        CHECK(res.secrecy_rate >= 0.98 * best - 1e-9);
    }
}

TEST_CASE("fully-digital counterpart")
{
    std::mt19937_64 rng(73);

    SUBCASE("no eavesdropper gives the scaled matched filter")
    {
        ScenarioConfig cfg;
        cfg.num_antennas = 4;
        cfg.num_ttds = 4;
        cfg.num_carriers = 2;
        const double dr = cfg.rayleigh_distance();
        cfg.bob = {0.5 * dr, M_PI / 3.0};
        cfg.eve = {1e6 * dr, M_PI / 2.9}; // effectively absent
        const ChannelSet cs = cfg.channels();
        auto res = fully_digital_solve(cfg, cs);
        for (int m = 0; m < 2; ++m)
        {
            const auto &v = res.beamformer.v[static_cast<size_t>(m)];
            const auto &h = cs.bob[static_cast<size_t>(m)];
            CHECK(v.norm() == doctest::Approx(2.0).epsilon(1e-9)); // sqrt(N)
            // collinearity: |h^H v| close to ||h|| ||v||
            CHECK(std::abs(h.dot(v)) == doctest::Approx(h.norm() * v.norm()).epsilon(1e-6));
        }
    }
    SUBCASE("generalized eigenvector dominates random unit vectors")
    {
        const int n = 4;
        auto hb = random_channel(rng, n, 1.0);
        auto he = random_channel(rng, n, 0.8);
        const double p = 0.3, s2 = 0.05;
        Eigen::MatrixXcd num = s2 * Eigen::MatrixXcd::Identity(n, n) + p * hb * hb.adjoint();
        Eigen::MatrixXcd den = s2 * Eigen::MatrixXcd::Identity(n, n) + p * he * he.adjoint();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(num, den);
        Eigen::VectorXcd v = ges.eigenvectors().col(n - 1);
        v *= std::sqrt(static_cast<double>(n)) / v.norm();
        const double ours = carrier_log_ratio(v, hb, he, p, s2, n);
        for (int t = 0; t < 10000; ++t)
        {
            Eigen::VectorXcd u = random_channel(rng, n, 1.0);
            u *= std::sqrt(static_cast<double>(n)) / u.norm();
            CHECK(ours >= carrier_log_ratio(u, hb, he, p, s2, n) - 1e-9);
        }
    }
    SUBCASE("fully-digital dominates semi-digital")
    {
        ScenarioConfig cfg;
        cfg.num_antennas = 4;
        cfg.num_ttds = 2;
        cfg.num_carriers = 3;
        const double dr = cfg.rayleigh_distance();
        cfg.bob = {0.5 * dr, M_PI / 3.0};
        cfg.eve = {0.4 * dr, M_PI / 2.7};
        const ChannelSet cs = cfg.channels();
        auto sd = semi_digital_solve(cfg, cs);
        auto fd = fully_digital_solve(cfg, cs);
        CHECK(fd.secrecy_rate >= sd.secrecy_rate - 1e-6);
    }
}

TEST_SUITE_END();
