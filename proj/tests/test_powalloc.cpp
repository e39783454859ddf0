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

#include "nfsec/powalloc.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

using namespace nfsec;

namespace
{
    double clipped_objective(const std::vector<double> &power, const std::vector<GainPair> &g,
                             double sigma2, int n)
    {
        double total = 0.0;
        for (size_t m = 0; m < g.size(); ++m)
        {
            const double ns2 = n * sigma2;
            total += std::max(0.0, std::log2((ns2 + power[m] * g[m].bob) / (ns2 + power[m] * g[m].eve)));
        }
        return total;
    }

    // exhaustive simplex grid over three carriers with step P/200
    double grid_oracle(const std::vector<GainPair> &g, double p, double sigma2, int n)
    {
        const double step = p / 200.0;
        double best = 0.0;
        for (int i = 0; i <= 200; ++i)
            for (int j = 0; j <= 200 - i; ++j)
            {
                const std::vector<double> powers{i * step, j * step, p - i * step - j * step};
                best = std::max(best, clipped_objective(powers, g, sigma2, n));
            }
        return best;
    }
}

TEST_SUITE_BEGIN("powalloc");

TEST_CASE("partition carriers")
{
    SUBCASE("dominant Bob everywhere")
    {
        std::vector<GainPair> g{{2.0, 1.0}, {4.0, 2.0}, {1.0, 0.5}};
        auto [plus, minus] = partition_carriers(g);
        CHECK(plus.size() == 3);
        CHECK(minus.empty());
    }
    SUBCASE("ties go inactive")
    {
        std::vector<GainPair> g{{1.0, 1.0}, {2.0, 2.0}};
        auto [plus, minus] = partition_carriers(g);
        CHECK(plus.empty());
        CHECK(minus.size() == 2);
    }
    SUBCASE("mixed selection")
    {
        std::vector<GainPair> g{{3.0, 1.0}, {1.0, 2.0}, {2.0, 2.0}};
        auto [plus, minus] = partition_carriers(g);
        REQUIRE(plus.size() == 1);
        CHECK(plus[0] == 0);
        CHECK(minus == std::vector<int>{1, 2});
    }
}

TEST_CASE("closed-form power")
{
    // a = N s2 / beta_B, b = N s2 / beta_E chosen directly
    SUBCASE("large mu clips to zero")
    {
        // a = 1, b = 2, mu = 4: -(3)/2 + sqrt(1 + 1)/2 < 0
        CHECK(power_closed_form(1.0, 0.5, 0.25, 4, 4.0) == doctest::Approx(0.0));
    }
    SUBCASE("direct evaluation a=0.01 b=1")
    {
        // N s2 = 1: beta_B = 100, beta_E = 1, mu = 0.1
        const double expect = -0.505 + 0.5 * std::sqrt(0.99 * 0.99 + 40.0 * 0.99);
        CHECK(power_closed_form(100.0, 1.0, 0.25, 4, 0.1) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(expect == doctest::Approx(2.680).epsilon(1e-3));
    }
    SUBCASE("vanishing mu sends power to infinity")
    {
        CHECK(power_closed_form(100.0, 1.0, 0.25, 4, 1e-9) > 1e4);
    }
    SUBCASE("nonincreasing in mu")
    {
        double prev = power_closed_form(10.0, 2.0, 0.25, 4, 1e-4);
        for (double mu : {1e-3, 1e-2, 1e-1, 1.0})
        {
            const double cur = power_closed_form(10.0, 2.0, 0.25, 4, mu);
            CHECK(cur <= prev + 1e-15);
            prev = cur;
        }
    }
    SUBCASE("zero eavesdropper gain reduces to standard water-filling")
    {
        // [1/mu - a]^+ with a = N s2 / beta_B
        const double ns2 = 4 * 0.25;
        CHECK(power_closed_form(2.0, 0.0, 0.25, 4, 0.8) ==
              doctest::Approx(std::max(0.0, 1.0 / 0.8 - ns2 / 2.0)).epsilon(1e-12));
    }
    SUBCASE("caller contract: beta_B must exceed beta_E")
    {
        CHECK_THROWS_AS(power_closed_form(1.0, 2.0, 0.25, 4, 1.0), std::invalid_argument);
    }
}

TEST_CASE("secure water-filling")
{
    const double sigma2 = 0.01;
    const int n = 4;

    SUBCASE("empty active set allocates nothing")
    {
        std::vector<GainPair> g{{1.0, 1.0}, {0.5, 0.7}};
        auto pa = waterfill_secure(g, 1.0, sigma2, n);
        CHECK(pa.active.empty());
        CHECK(pa.power_w[0] == doctest::Approx(0.0));
        CHECK(pa.power_w[1] == doctest::Approx(0.0));
    }
    SUBCASE("single active carrier gets the whole budget")
    {
        std::vector<GainPair> g{{2.0, 0.5}, {0.5, 0.7}};
        auto pa = waterfill_secure(g, 1.0, sigma2, n);
        REQUIRE(pa.active == std::vector<int>{0});
        CHECK(pa.power_w[0] == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("budget met within 1e-8 P")
    {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> ub(0.1, 10.0);
        for (int t = 0; t < 30; ++t)
        {
            std::vector<GainPair> g(5);
            for (auto &x : g)
            {
                x.bob = ub(rng);
                x.eve = x.bob * std::uniform_real_distribution<double>(0.05, 0.95)(rng);
            }
            auto pa = waterfill_secure(g, 2.0, sigma2, n);
            double total = 0.0;
            for (double p : pa.power_w)
            {
                CHECK(p >= 0.0);
                total += p;
            }
            CHECK(std::abs(total - 2.0) <= 1e-8 * 2.0);
        }
    }
    SUBCASE("random instances beat the simplex grid oracle")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> ub(0.05, 5.0), ur(0.05, 1.3);
        for (int t = 0; t < 20; ++t)
        {
            std::vector<GainPair> g(3);
            for (auto &x : g)
            {
                x.bob = ub(rng);
                x.eve = x.bob * ur(rng);
            }
            const double p = 1.0;
            auto pa = waterfill_secure(g, p, sigma2, n);
            const double ours = clipped_objective(pa.power_w, g, sigma2, n);
            const double oracle = grid_oracle(g, p, sigma2, n);
            CHECK(ours >= oracle - 1e-4 * std::abs(oracle) - 1e-12);
        }
    }
    SUBCASE("KKT: marginal secrecy derivative equal across funded carriers")
    {
        std::vector<GainPair> g{{4.0, 1.0}, {3.0, 0.5}, {5.0, 2.0}};
        auto pa = waterfill_secure(g, 1.5, sigma2, n);
        const double ns2 = n * sigma2;
        double ref = -1.0;
        for (int m : pa.active)
        {
            const double p = pa.power_w[static_cast<size_t>(m)];
            if (p <= 1e-12)
                continue;
            const double d = (g[static_cast<size_t>(m)].bob / (ns2 + p * g[static_cast<size_t>(m)].bob) -
                              g[static_cast<size_t>(m)].eve / (ns2 + p * g[static_cast<size_t>(m)].eve)) /
                             std::log(2.0);
            if (ref < 0.0)
                ref = d;
            else
                CHECK(d == doctest::Approx(ref).epsilon(1e-6));
        }
    }
    SUBCASE("total allocation decreases with mu")
    {
        std::vector<GainPair> g{{4.0, 1.0}, {3.0, 0.5}};
        double prev = -1.0;
        for (double mu : {1e-3, 1e-2, 1e-1, 1.0, 10.0})
        {
            double total = 0.0;
            for (const auto &x : g)
                total += power_closed_form(x.bob, x.eve, sigma2, n, mu);
            if (prev >= 0.0)
                CHECK(total < prev + 1e-15);
            prev = total;
        }
    }
}

TEST_SUITE_END();
