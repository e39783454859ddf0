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

#include "nfsec/analogapprox.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

using namespace nfsec;

TEST_SUITE_BEGIN("analogapprox");

TEST_CASE("ps update")
{
    std::mt19937_64 rng(81);
    std::uniform_real_distribution<double> up(-M_PI, M_PI);

    SUBCASE("single carrier with zero delays matches the target exactly")
    {
        Eigen::VectorXcd v(6);
        for (int i = 0; i < 6; ++i)
            v(i) = std::polar(1.0, up(rng));
        Eigen::VectorXd tau = Eigen::VectorXd::Zero(3);
        auto w = ps_update({v}, {24e9}, tau, 2);
        const double re = std::real(v.dot(w)); // Re[v^H w], t = 1
        CHECK(re == doctest::Approx(6.0).epsilon(1e-12));
    }
    SUBCASE("per-entry alignment identity Re[q_n w_n] = |q_n|")
    {
        std::vector<Eigen::VectorXcd> vs;
        std::vector<double> fs{20e9, 24e9, 28e9};
        for (int m = 0; m < 3; ++m)
        {
            Eigen::VectorXcd v(4);
            for (int i = 0; i < 4; ++i)
                v(i) = std::polar(1.0, up(rng));
            vs.push_back(v);
        }
        Eigen::VectorXd tau(2);
        tau << 1e-9, 3e-9;
        auto w = ps_update(vs, fs, tau, 2);
        Eigen::VectorXcd q = Eigen::VectorXcd::Zero(4);
        for (int m = 0; m < 3; ++m)
            q += vs[static_cast<size_t>(m)].conjugate().cwiseProduct(ttd_response(tau, fs[static_cast<size_t>(m)], 2));
        for (int i = 0; i < 4; ++i)
            CHECK(std::real(q(i) * w(i)) == doctest::Approx(std::abs(q(i))).epsilon(1e-12));
    }
    SUBCASE("dominates random unit-modulus competitors")
    {
        std::vector<Eigen::VectorXcd> vs;
        std::vector<double> fs{20e9, 28e9};
        for (int m = 0; m < 2; ++m)
        {
            Eigen::VectorXcd v(4);
            for (int i = 0; i < 4; ++i)
                v(i) = std::polar(1.0, up(rng));
            vs.push_back(v);
        }
        Eigen::VectorXd tau(2);
        tau << 2e-9, 4e-9;
        auto w = ps_update(vs, fs, tau, 2);
        auto objective = [&](const Eigen::VectorXcd &ww) {
            double total = 0.0;
            for (int m = 0; m < 2; ++m)
            {
                const auto t = ttd_response(tau, fs[static_cast<size_t>(m)], 2);
                total += std::real(vs[static_cast<size_t>(m)].dot(ww.cwiseProduct(t)));
            }
            return total;
        };
        const double ours = objective(w);
        for (int t = 0; t < 2000; ++t)
        {
            Eigen::VectorXcd ww(4);
            for (int i = 0; i < 4; ++i)
                ww(i) = std::polar(1.0, up(rng));
            CHECK(ours >= objective(ww) - 1e-9);
        }
    }
}

TEST_CASE("surrogate coefficients")
{
    SUBCASE("critical peak: flat majorizer")
    {
        // tau = 0, zeta = 0: gamma(0) = 1, gamma'(0) = 0
        auto sc = surrogate_coeffs(0.0, 1.0, 0.0);
        CHECK(sc.a == doctest::Approx(0.0));
        CHECK(sc.c == doctest::Approx(1.0));
    }
    SUBCASE("critical valley: curvature-matched parabola")
    {
        // tau = 0, zeta = pi: gamma(0) = cos(-pi) = -1, gamma'(0) = 0
        auto sc = surrogate_coeffs(0.0, 2.0, M_PI);
        CHECK(sc.a == doctest::Approx(2.0 * M_PI * M_PI * 4.0).epsilon(1e-12));
        CHECK(sc.b == doctest::Approx(0.0));
        CHECK(sc.c == doctest::Approx(-1.0));
    }
    SUBCASE("descending-slope case, direct evaluation")
    {
        // f = 1, zeta = 0, tau = 0.3: u = 0.6, gamma' < 0 -> right valley at 0.5
        auto sc = surrogate_coeffs(0.3, 1.0, 0.0);
        CHECK(sc.b == doctest::Approx(0.5).epsilon(1e-14));
        const double a_expect = -M_PI * std::sin(0.6 * M_PI) / (0.3 - 0.5);
        CHECK(sc.a == doctest::Approx(a_expect).epsilon(1e-13));
        CHECK(a_expect == doctest::Approx(14.939).epsilon(1e-3));
        const double c_expect = std::cos(0.6 * M_PI) - a_expect * 0.04;
        CHECK(sc.c == doctest::Approx(c_expect).epsilon(1e-12));
        // the parabola stays above the cosine on a fine grid
        for (int k = 0; k <= 10000; ++k)
        {
            const double t = k / 10000.0;
            CHECK(sc.eval(t) >= std::cos(2.0 * M_PI * t) - 1e-9);
        }
    }
    SUBCASE("majorization, tangency and valley parity on random draws")
    {
        std::mt19937_64 rng(97);
        std::uniform_real_distribution<double> uz(-M_PI, M_PI), u01(0.0, 1.0);
        for (int t = 0; t < 300; ++t)
        {
            const double f = std::pow(10.0, 8.0 + 2.7 * u01(rng));
            const double chi = std::pow(10.0, -10.5 + 2.5 * u01(rng));
            const double zeta = uz(rng);
            const double tau = chi * u01(rng);
            auto sc = surrogate_coeffs(tau, f, zeta);
            CHECK(sc.a >= 0.0);
            // tangency of value and slope
            const double gamma_v = std::cos(2.0 * M_PI * f * tau - zeta);
            const double gamma_d = -2.0 * M_PI * f * std::sin(2.0 * M_PI * f * tau - zeta);
            CHECK(std::abs(sc.eval(tau) - gamma_v) <= 1e-9);
            CHECK(std::abs(2.0 * sc.a * (tau - sc.b) - gamma_d) <= 1e-7 * (1.0 + 2.0 * M_PI * f));
            // global upper bound on [0, chi]
            for (int k = 0; k <= 2000; ++k)
            {
                const double x = chi * k / 2000.0;
                CHECK(sc.eval(x) >= std::cos(2.0 * M_PI * f * x - zeta) - 1e-9);
            }
            // case 1/2 anchors sit on true valleys: 2 f b - zeta/pi odd
            if (sc.a > 0.0 && std::abs(std::sin(2.0 * M_PI * f * tau - zeta)) >= 1e-14)
            {
                const double parity = 2.0 * f * sc.b - zeta / M_PI;
                const double rounded = std::round(parity);
                CHECK(std::abs(parity - rounded) < 1e-6);
                CHECK(std::abs(std::remainder(rounded, 2.0)) == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("ttd update step")
{
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> up(-M_PI, M_PI);

    SUBCASE("flat majorizers leave the delay unchanged")
    {
        // one carrier, psi phases arranged so every term sits at a peak:
        // zeta = arg(psi) - pi and tau = 0 give gamma(0) = cos(-zeta) = 1 iff arg(psi) = pi
        Eigen::MatrixXcd psi(1, 2);
        psi(0, 0) = std::polar(0.7, M_PI);
        psi(0, 1) = std::polar(0.2, M_PI);
        Eigen::VectorXd tau = Eigen::VectorXd::Zero(1);
        auto next = ttd_update_step(psi, tau, {24e9}, 5e-9, 2);
        CHECK(next(0) == doctest::Approx(0.0));
    }
    SUBCASE("single term jumps to the valley, clipped to the budget")
    {
        Eigen::MatrixXcd psi(1, 1);
        psi(0, 0) = std::polar(1.0, 0.3);
        const double f = 24e9;
        Eigen::VectorXd tau(1);
        tau << 1e-10;
        auto sc = surrogate_coeffs(tau(0), f, 0.3 - M_PI);
        auto next = ttd_update_step(psi, tau, {f}, 5e-9, 1);
        CHECK(next(0) == doctest::Approx(std::min(5e-9, std::max(0.0, sc.b))).epsilon(1e-12));
    }
    SUBCASE("converged BSUM matches a fine grid search (N_T = 1, two carriers)")
    {
        for (int trial = 0; trial < 3; ++trial)
        {
            Eigen::MatrixXcd psi(2, 1);
            psi(0, 0) = std::polar(0.4 + 0.6 * trial / 2.0, up(rng));
            psi(1, 0) = std::polar(1.0, up(rng));
            std::vector<double> fs{20e9, 28e9};
            const double chi = 5e-9;
            Eigen::VectorXd tau(1);
            tau << 0.0;
            double obj_prev = ttd_objective(psi, fs, tau, 1);
            for (int sweep = 0; sweep < 200; ++sweep)
            {
                auto next = ttd_update_step(psi, tau, fs, chi, 1);
                const double obj = ttd_objective(psi, fs, next, 1);
                CHECK(obj <= obj_prev + 1e-9); // per-sweep descent
                if ((next - tau).norm() < 1e-16)
                {
                    tau = next;
                    break;
                }
                tau = next;
                obj_prev = obj;
            }
            double best = 1e300;
            for (int k = 0; k <= 100000; ++k)
            {
                Eigen::VectorXd probe(1);
                probe << chi * k / 100000.0;
                best = std::min(best, ttd_objective(psi, fs, probe, 1));
            }
            const double ours = ttd_objective(psi, fs, tau, 1);
            CHECK(ours <= best + 1e-4 * std::abs(best) + 1e-12);
        }
    }
}

TEST_CASE("analog approximation")
{
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> up(-M_PI, M_PI), u01(0.0, 1.0);

    SUBCASE("identical representable target reaches zero error")
    {
        // all carriers share a target generated at tau = 0
        Eigen::VectorXcd v(8);
        for (int i = 0; i < 8; ++i)
            v(i) = std::polar(1.0, up(rng));
        std::vector<Eigen::VectorXcd> targets{v, v, v};
        std::vector<double> fs{20e9, 24e9, 28e9};
        ApproxOptions opts;
        auto res = approximate(targets, fs, 5e-9, 4, Eigen::VectorXd::Zero(4), opts);
        CHECK(approximation_error(targets, fs, res.beamformer) <= 1e-9 * 3 * 8);
    }
    SUBCASE("representable ATP target recovered from its own delays")
    {
        const int n = 8, nt = 4, ng = 2;
        const double chi = 5e-9;
        Eigen::VectorXd tau_true(nt);
        for (int i = 0; i < nt; ++i)
            tau_true(i) = chi * u01(rng);
        Eigen::VectorXcd w_true(n);
        for (int i = 0; i < n; ++i)
            w_true(i) = std::polar(1.0, up(rng));
        AnalogBeamformer truth{w_true, tau_true, ng};
        std::vector<double> fs{20e9, 22e9, 24e9, 26e9, 28e9};
        std::vector<Eigen::VectorXcd> targets;
        for (double f : fs)
            targets.push_back(synthesize(truth, f));
        ApproxOptions opts;
        auto res = approximate(targets, fs, chi, nt, tau_true, opts);
        CHECK(approximation_error(targets, fs, res.beamformer) <=
              1e-6 * static_cast<double>(fs.size()) * n);
    }
    SUBCASE("eta trace is nonincreasing and below the starting point")
    {
        const int n = 8, nt = 4;
        std::vector<double> fs{20e9, 24e9, 28e9};
        std::vector<Eigen::VectorXcd> targets;
        for (size_t m = 0; m < fs.size(); ++m)
        {
            Eigen::VectorXcd v(n);
            for (int i = 0; i < n; ++i)
                v(i) = std::polar(1.0, up(rng));
            targets.push_back(v);
        }
        ApproxOptions opts;
        std::vector<EtaTraceRow> trace;
        auto res = approximate(targets, fs, 5e-9, nt, Eigen::VectorXd::Zero(nt), opts, &trace);
        REQUIRE(res.eta_trace.size() >= 2);
        for (size_t i = 1; i < res.eta_trace.size(); ++i)
            CHECK(res.eta_trace[i] <= res.eta_trace[i - 1] + 1e-6);
        CHECK(res.eta_trace.back() <= res.eta_trace.front() + 1e-9);
        CHECK(trace.size() == res.eta_trace.size());
    }
}

TEST_CASE("power refinement after the analog stage")
{
    ScenarioConfig cfg;
    cfg.num_antennas = 4;
    cfg.num_ttds = 2;
    cfg.num_carriers = 3;
    const double dr = cfg.rayleigh_distance();
    cfg.bob = {0.5 * dr, M_PI / 3.0};
    cfg.eve = {0.4 * dr, M_PI / 2.5};
    const ChannelSet cs = cfg.channels();
    const FrequencyGrid grid = cfg.grid();

    AnalogBeamformer bf;
    bf.group_size = 2;
    bf.delays_s = Eigen::VectorXd::Zero(2);
    bf.delays_s << 1e-9, 2e-9;
    bf.ps_weights = init_semi_digital(cs).v.front();

    auto [active, pa] = refine_power_after_analog(cs, bf, cfg);

    SUBCASE("matches an independent recomputation")
    {
        std::vector<GainPair> gains(3);
        for (int m = 0; m < 3; ++m)
        {
            auto u = synthesize(bf, grid.carriers_hz[static_cast<size_t>(m)]);
            gains[static_cast<size_t>(m)] = {array_gain(cs.bob[static_cast<size_t>(m)], u),
                                             array_gain(cs.eve[static_cast<size_t>(m)], u)};
        }
        auto expect = waterfill_secure(gains, cfg.power_budget_w, cfg.noise_per_carrier(), 4);
        REQUIRE(active == expect.active);
        for (size_t m = 0; m < 3; ++m)
            CHECK(pa.power_w[m] == doctest::Approx(expect.power_w[m]).epsilon(1e-12));
    }
    SUBCASE("refined powers dominate stale powers on the analog beamformer")
    {
        // stale allocation: waterfill against different (digital) gains
        auto init = init_semi_digital(cs);
        std::vector<GainPair> stale_gains(3);
        for (int m = 0; m < 3; ++m)
            stale_gains[static_cast<size_t>(m)] = {
                array_gain(cs.bob[static_cast<size_t>(m)], init.v[static_cast<size_t>(m)]),
                array_gain(cs.eve[static_cast<size_t>(m)], init.v[static_cast<size_t>(m)])};
        auto stale = waterfill_secure(stale_gains, cfg.power_budget_w, cfg.noise_per_carrier(), 4);

        auto score = [&](const std::vector<double> &power) {
            double total = 0.0;
            for (int m = 0; m < 3; ++m)
            {
                auto u = synthesize(bf, grid.carriers_hz[static_cast<size_t>(m)]);
                const double ns2 = 4.0 * cfg.noise_per_carrier();
                const double x = ns2 + power[static_cast<size_t>(m)] * array_gain(cs.bob[static_cast<size_t>(m)], u);
                const double y = ns2 + power[static_cast<size_t>(m)] * array_gain(cs.eve[static_cast<size_t>(m)], u);
                total += std::max(0.0, std::log2(x / y));
            }
            return total;
        };
        CHECK(score(pa.power_w) >= score(stale.power_w) - 1e-9);
    }
}

TEST_SUITE_END();
