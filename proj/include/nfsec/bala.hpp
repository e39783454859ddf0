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

#ifndef NFSEC_BALA_HPP
#define NFSEC_BALA_HPP

#include "nfsec/beamforming.hpp"
#include "nfsec/powalloc.hpp"
#include "nfsec/scenario.hpp"

#include <Eigen/Dense>
#include <vector>

namespace nfsec
{
    // Focus drift of the TTD-free beamformer matched to Bob at f_1:
    //   theta(f) = arccos((f_1/f) cos theta_B)
    //   R(f)     = (f/(f_1 sin^2 theta_B) - f_1/(f tan^2 theta_B)) R_B
    PolarPosition ttdfree_focus(double f_hz, const PolarPosition &bob, double f1_hz);

    // Per-antenna ATP configuration anchoring f_1 at Bob and f_M at the target:
    //   tau_n = (f_M D~_n - f_1 D_B,n) / (c B),  phi_n = 2 pi f_1 f_M (D~_n - D_B,n) / (c B)
    // PS weights are taken as w_n = exp(+j phi_n).
    struct AtpConfig
    {
        Eigen::VectorXd delays_s;   // length N, unclamped
        Eigen::VectorXd phases_rad; // length N
    };

    AtpConfig atp_config(const PolarPosition &bob, const PolarPosition &target,
                         const FrequencyGrid &grid, const ArrayGeometry &geometry);

    // Focus trace of the ATP configuration between its two anchors
    PolarPosition atp_focus(double f_hz, const PolarPosition &bob, const PolarPosition &target,
                            const FrequencyGrid &grid);

    // Arithmetic mean of the per-antenna delays within each TTD group
    Eigen::VectorXd group_delays(const Eigen::VectorXd &delays_s, int num_ttds);

    struct BalaCandidate
    {
        int index = 0; // l
        double x = 0.0, y = 0.0;
        PolarPosition target;
        double secrecy_rate = 0.0;
        int clamped_count = 0;
    };

    struct BalaResult
    {
        AnalogBeamformer beamformer;
        std::vector<int> active;
        std::vector<double> power_w;
        double secrecy_rate = 0.0;
        int selected_index = 0;
        std::vector<BalaCandidate> candidates;
    };

    // Line search over focus targets between the drifted endpoint and Bob;
    // deterministic argmax with lowest-l tie break.
    BalaResult bala_search(const ScenarioConfig &cfg, const ChannelSet &channels);
}

#endif
