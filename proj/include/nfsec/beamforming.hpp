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

#ifndef NFSEC_BEAMFORMING_HPP
#define NFSEC_BEAMFORMING_HPP

#include "nfsec/scenario.hpp"

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace nfsec
{
    // TTD + PS analog front-end: N unit-modulus PS weights, N_T delays,
    // each TTD feeding a contiguous group of N_G = N/N_T phase shifters.
    struct AnalogBeamformer
    {
        Eigen::VectorXcd ps_weights; // length N, |w_n| = 1
        Eigen::VectorXd delays_s;    // length N_T
        int group_size = 1;          // N_G

        int num_antennas() const { return static_cast<int>(ps_weights.size()); }
        int num_ttds() const { return static_cast<int>(delays_s.size()); }
        void validate(double delay_budget_s) const; // throws std::invalid_argument
    };

    // Per-carrier unit-modulus target beamformers v_m
    struct SemiDigitalBeamformer
    {
        std::vector<Eigen::VectorXcd> v; // M vectors of length N
    };

    // TTD response at frequency f: entry (i-1)N_G + j = exp(-j 2 pi f tau_i)
    Eigen::VectorXcd ttd_response(const Eigen::VectorXd &delays_s, double f_hz, int group_size);

    // Effective analog beamformer at frequency f: u = diag(w) t(f)
    Eigen::VectorXcd synthesize(const AnalogBeamformer &b, double f_hz);

    // |h^H u|^2 (the 1/N normalization lives in the rate formulas)
    double array_gain(const Eigen::VectorXcd &h, const Eigen::VectorXcd &u);

    // Polar raster for beampattern export
    struct BeampatternGridSpec
    {
        double r_over_dr_min = 0.001;
        double r_over_dr_max = 0.05;
        double theta_min_rad = 0.6981317007977318; // 40 deg
        double theta_max_rad = 1.5707963267948966; // 90 deg
        int num_ranges = 200;
        int num_angles = 200;
    };

    struct BeampatternResult
    {
        std::vector<double> r_over_dr;          // row coordinates
        std::vector<double> theta_rad;          // column coordinates
        std::vector<double> freqs_hz;           // one per frequency layer
        std::vector<Eigen::MatrixXd> layers;    // per-frequency, normalized to max 1 over the grid
        Eigen::MatrixXd synthesized;            // sum of the normalized per-frequency layers
    };

    // Per-frequency gain map |h(f,p)^H u(f)|^2 / N, normalized by its grid maximum,
    // plus the synthesized (summed) layer.
    BeampatternResult beampattern_grid(const ArrayGeometry &g, double rayleigh_m,
                                       const std::vector<double> &freqs_hz,
                                       const std::vector<Eigen::VectorXcd> &effective,
                                       const BeampatternGridSpec &spec);

    BeampatternResult beampattern_grid(const ArrayGeometry &g, double rayleigh_m,
                                       const AnalogBeamformer &b,
                                       const std::vector<double> &freqs_hz,
                                       const BeampatternGridSpec &spec);

    // CSV columns: R_over_Dr, theta_deg, freq_hz_or_SYNTH, normalized_gain
    void write_beampattern_csv(const BeampatternResult &r, std::ostream &out);
}

#endif
