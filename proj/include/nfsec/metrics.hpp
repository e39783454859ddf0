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

#ifndef NFSEC_METRICS_HPP
#define NFSEC_METRICS_HPP

#include "nfsec/scenario.hpp"

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace nfsec
{
    // Per-carrier powers/rates plus the summary metrics of one method run.
    struct SecrecyReport
    {
        std::string method;
        std::vector<double> carrier_hz;
        std::vector<double> power_w;     // P_m
        std::vector<double> rate_bob;    // R_{B,m}, bits/s/Hz
        std::vector<double> rate_eve;    // R_{E,m}
        std::vector<double> secrecy;     // [R_B - R_E]^+
        double secrecy_rate = 0.0;       // R_S
        double sse = 0.0;                // R_S / M
        double see = 0.0;                // SSE / consumed power
        double consumed_power_w = 0.0;

        void write_csv(std::ostream &out) const; // per-carrier rows + summary row
    };

    // R = log2(1 + P |h^H u|^2 / (N sigma^2)) for one node at one carrier
    double carrier_rate(const Eigen::VectorXcd &h, const Eigen::VectorXcd &u,
                        double power_w, double sigma2_w, int num_antennas);

    // Both nodes, all carriers; u holds the effective beamformer per carrier
    // (diag(w) t_m for analog, v_m for (semi-)digital).
    std::pair<std::vector<double>, std::vector<double>>
    per_carrier_rates(const ChannelSet &channels, const std::vector<Eigen::VectorXcd> &u,
                      const std::vector<double> &power_w, double sigma2_w, int num_antennas);

    // R_S = sum_m [R_B,m - R_E,m]^+
    double secrecy_rate(const std::vector<double> &rate_bob, const std::vector<double> &rate_eve);

    double sse(double secrecy_rate_total, int num_carriers);

    // Total consumed power P + P_BB + n_rf P_RF + n_ttd P_TTD + n_ps P_PS
    double consumed_power(double transmit_power_w, const PowerModel &pm,
                          int n_rf, int n_ttd, int n_ps);

    // Analog front end: n_rf from the model, N_T TTDs, N PSs
    double see(double sse_value, double transmit_power_w, const PowerModel &pm,
               int num_antennas, int num_ttds);

    // Fully-digital counterpart: N RF chains, no TTDs or PSs
    double see_fully_digital(double sse_value, double transmit_power_w, const PowerModel &pm,
                             int num_antennas);
}

#endif
