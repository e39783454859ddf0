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

#include "nfsec/metrics.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace nfsec;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("carrier rate")
{
    Eigen::VectorXcd h(2), u(2);
    h << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0);
    u << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0);

    SUBCASE("zero power gives zero rate")
    {
        CHECK(carrier_rate(h, u, 0.0, 1e-3, 2) == doctest::Approx(0.0));
    }
    SUBCASE("unit SNR gives one bit")
    {
        // |h^H u|^2 = 4; choose P so that P*4/(2 sigma^2) = 1
        const double sigma2 = 1e-3;
        const double p = 2.0 * sigma2 / 4.0;
        CHECK(carrier_rate(h, u, p, sigma2, 2) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("hand-computed toy")
    {
        Eigen::VectorXcd h2(2), u2(2);
        h2 << std::complex<double>(0.3, 0.4), std::complex<double>(-0.2, 0.1);
        u2 << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, -1.0);
        const std::complex<double> inner = std::conj(h2(0)) * u2(0) + std::conj(h2(1)) * u2(1);
        const double expect = std::log2(1.0 + 0.05 * std::norm(inner) / (2.0 * 1e-4));
        CHECK(carrier_rate(h2, u2, 0.05, 1e-4, 2) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("monotone in power")
    {
        double prev = 0.0;
        for (double p : {0.01, 0.02, 0.05, 0.1})
        {
            const double r = carrier_rate(h, u, p, 1e-3, 2);
            CHECK(r > prev);
            prev = r;
        }
    }
    SUBCASE("invalid noise throws")
    {
        CHECK_THROWS_AS(carrier_rate(h, u, 0.1, 0.0, 2), std::invalid_argument);
    }
}

TEST_CASE("secrecy rate clips per carrier")
{
    SUBCASE("identical rates give zero")
    {
        CHECK(secrecy_rate({1.0, 2.0}, {1.0, 2.0}) == doctest::Approx(0.0));
    }
    SUBCASE("zero eavesdropper rate sums Bob's")
    {
        CHECK(secrecy_rate({1.0, 2.5}, {0.0, 0.0}) == doctest::Approx(3.5));
    }
    SUBCASE("two-carrier clipped oracle")
    {
        CHECK(secrecy_rate({1.0, 0.5}, {0.2, 0.9}) ==
              doctest::Approx(std::max(0.0, 0.8) + std::max(0.0, -0.4)));
    }
}

TEST_CASE("sse")
{
    CHECK(sse(10.0, 10) == doctest::Approx(1.0));
    CHECK(sse(35.2, 10) == doctest::Approx(3.52));
    CHECK(sse(2.0 * 35.2, 10) == doctest::Approx(2.0 * 3.52));
}

TEST_CASE("see and the power model")
{
    PowerModel pm; // 25/23/20/15 dBm defaults
    CHECK(pm.p_bb_w == doctest::Approx(dbm_to_watts(25.0)).epsilon(1e-12));
    CHECK(pm.p_rf_w == doctest::Approx(dbm_to_watts(23.0)).epsilon(1e-12));
    CHECK(pm.p_ttd_w == doctest::Approx(dbm_to_watts(20.0)).epsilon(1e-12));
    CHECK(pm.p_ps_w == doctest::Approx(dbm_to_watts(15.0)).epsilon(1e-12));

    SUBCASE("analog denominator, N=64 N_T=32")
    {
        const double denom = consumed_power(0.1, pm, 1, 32, 64);
        CHECK(denom == doctest::Approx(5.84).epsilon(1e-3));
        CHECK(see(1.0, 0.1, pm, 64, 32) == doctest::Approx(1.0 / denom).epsilon(1e-12));
    }
    SUBCASE("fully-digital denominator uses N RF chains and no analog parts")
    {
        const double denom = consumed_power(0.1, pm, 64, 0, 0);
        CHECK(denom == doctest::Approx(0.1 + pm.p_bb_w + 64.0 * pm.p_rf_w).epsilon(1e-12));
        CHECK(see_fully_digital(1.0, 0.1, pm, 64) == doctest::Approx(1.0 / denom).epsilon(1e-12));
    }
    SUBCASE("zero SSE gives zero SEE")
    {
        CHECK(see(0.0, 0.1, pm, 64, 32) == doctest::Approx(0.0));
    }
    SUBCASE("denominator does not depend on the achieved rate")
    {
        CHECK(see(2.0, 0.1, pm, 64, 32) == doctest::Approx(2.0 * see(1.0, 0.1, pm, 64, 32)));
    }
}

TEST_SUITE_END();
