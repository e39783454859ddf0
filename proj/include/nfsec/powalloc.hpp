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

#ifndef NFSEC_POWALLOC_HPP
#define NFSEC_POWALLOC_HPP

#include <utility>
#include <vector>

namespace nfsec
{
    // Effective channel gains |h_B^H u|^2 and |h_E^H u|^2 for one carrier
    struct GainPair
    {
        double bob = 0.0;
        double eve = 0.0;
    };

    struct PowerAllocation
    {
        std::vector<double> power_w;  // all M carriers, zero outside the active set
        double mu = 0.0;              // water-level dual (0 when the active set is empty)
        std::vector<int> active;      // M+ indices, ascending
    };

    // M+ = { m : beta_B > beta_E }, ties go inactive
    std::pair<std::vector<int>, std::vector<int>> partition_carriers(const std::vector<GainPair> &gains);

    // Closed-form water-filling power for an active carrier at water level mu.
    // With a = N sigma^2 / beta_B and b = N sigma^2 / beta_E:
    //   P = [ -(a+b)/2 + sqrt((b-a)^2 + (4/mu)(b-a)) / 2 ]^+
    // beta_E = 0 degenerates to standard water-filling [1/mu - a]^+.
    double power_closed_form(double beta_bob, double beta_eve, double sigma2_w, int num_antennas, double mu);

    // Secure water-filling: bisection on mu until |sum P_m - P| <= 1e-8 P.
    PowerAllocation waterfill_secure(const std::vector<GainPair> &gains, double power_budget_w,
                                     double sigma2_w, int num_antennas);
}

#endif
