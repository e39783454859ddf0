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

#include <cmath>
#include <stdexcept>

namespace nfsec
{
    std::pair<std::vector<int>, std::vector<int>> partition_carriers(const std::vector<GainPair> &gains)
    {
        std::vector<int> plus, minus;
        for (size_t m = 0; m < gains.size(); ++m)
        {
            if (gains[m].bob > gains[m].eve)
                plus.push_back(static_cast<int>(m));
            else
                minus.push_back(static_cast<int>(m));
        }
        return {plus, minus};
    }

    double power_closed_form(double beta_bob, double beta_eve, double sigma2_w, int num_antennas, double mu)
    {
        if (!(mu > 0.0))
            throw std::invalid_argument("power_closed_form: mu must be > 0");
        if (!(beta_bob > beta_eve) || !(beta_bob > 0.0))
            throw std::invalid_argument("power_closed_form: requires beta_B > beta_E (active carrier)");
        const double ns2 = num_antennas * sigma2_w;
        const double a = ns2 / beta_bob;
        if (beta_eve <= 0.0)
            return std::max(0.0, 1.0 / mu - a); // b -> inf limit of the KKT solution
        const double b = ns2 / beta_eve;
        const double d = b - a; // > 0 on the active set
        return std::max(0.0, -(a + b) / 2.0 + 0.5 * std::sqrt(d * d + (4.0 / mu) * d));
    }

    PowerAllocation waterfill_secure(const std::vector<GainPair> &gains, double power_budget_w,
                                     double sigma2_w, int num_antennas)
    {
        if (!(power_budget_w > 0.0))
            throw std::invalid_argument("waterfill_secure: P must be > 0");

        PowerAllocation out;
        out.power_w.assign(gains.size(), 0.0);
        out.active = partition_carriers(gains).first;
        if (out.active.empty())
            return out;

        auto total = [&](double mu) {
            double s = 0.0;
            for (int m : out.active)
                s += power_closed_form(gains[static_cast<size_t>(m)].bob,
                                       gains[static_cast<size_t>(m)].eve,
                                       sigma2_w, num_antennas, mu);
            return s;
        };

        // sum P(mu) is strictly decreasing; grow the bracket until it straddles P
        double lo = 1e-12;
        double hi = 1.0;
        while (total(hi) > power_budget_w)
        {
            hi *= 2.0;
            if (hi > 1e30)
                break;
        }
        for (int it = 0; it < 200; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            if (total(mid) > power_budget_w)
                lo = mid;
            else
                hi = mid;
        }
        out.mu = 0.5 * (lo + hi);
        for (int m : out.active)
            out.power_w[static_cast<size_t>(m)] =
                power_closed_form(gains[static_cast<size_t>(m)].bob,
                                  gains[static_cast<size_t>(m)].eve,
                                  sigma2_w, num_antennas, out.mu);
        return out;
    }
}
