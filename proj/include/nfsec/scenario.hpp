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

#ifndef NFSEC_SCENARIO_HPP
#define NFSEC_SCENARIO_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace nfsec
{
    inline constexpr double speed_of_light = 299792458.0; // m/s, exact

    double dbm_to_watts(double dbm);
    double watts_to_dbm(double watts);

    // Node position in the array's polar frame: range > 0, angle in (0, pi).
    // The array lies on the x-axis with broadside along +y.
    struct PolarPosition
    {
        double range_m = 1.0;
        double angle_rad = 1.5707963267948966;

        void validate() const; // throws std::invalid_argument
        double x() const;      // range * cos(angle)
        double y() const;      // range * sin(angle)
    };

    PolarPosition polar_from_cartesian(double x, double y);

    // Uniform linear array on the x-axis, centered at the origin.
    class ArrayGeometry
    {
    public:
        // Half-central-wavelength ULA: element n at (n - (N-1)/2) * lambda_c/2, n = 0..N-1
        static ArrayGeometry ula(int num_elements, double f_c_hz);

        int size() const { return static_cast<int>(element_x_.size()); }
        double element_x(int n) const { return element_x_.at(static_cast<size_t>(n)); }
        const std::vector<double> &elements() const { return element_x_; }
        double spacing_m() const { return spacing_m_; }
        double aperture_m() const { return aperture_m_; } // element_x[N-1] - element_x[0]

        // Rayleigh distance 2 A^2 / lambda_c
        double rayleigh_distance(double f_c_hz) const;

    private:
        std::vector<double> element_x_;
        double spacing_m_ = 0.0;
        double aperture_m_ = 0.0;
    };

    // Exact distance from element n to a node, D_n = sqrt(a_n^2 + R^2 - 2 a_n R cos(theta))
    double element_distance(const ArrayGeometry &g, int n, const PolarPosition &p);

    // OFDM carrier grid: f_m = f_c - B/2 + (m-1) B/(M-1), m = 1..M
    struct FrequencyGrid
    {
        double f_c_hz = 0.0;
        double bandwidth_hz = 0.0;
        int num_carriers = 0; // M >= 2
        std::vector<double> carriers_hz;

        static FrequencyGrid make(double f_c_hz, double bandwidth_hz, int num_carriers);
        double f_low() const { return carriers_hz.front(); }  // f_1
        double f_high() const { return carriers_hz.back(); }  // f_M
    };

    // Spherical-wave channel vector, entry n = c/(4 pi f D_n) * exp(-j 2 pi f D_n / c)
    Eigen::VectorXcd channel_vector(const ArrayGeometry &g, double f_hz, const PolarPosition &p);

    // Per-subcarrier channels for Bob and Eve
    struct ChannelSet
    {
        std::vector<Eigen::VectorXcd> bob;
        std::vector<Eigen::VectorXcd> eve;

        int num_carriers() const { return static_cast<int>(bob.size()); }
        int num_antennas() const { return bob.empty() ? 0 : static_cast<int>(bob.front().size()); }
    };

    ChannelSet make_channels(const ArrayGeometry &g, const FrequencyGrid &grid,
                             const PolarPosition &bob, const PolarPosition &eve);

    // Hardware power-consumption model for the SEE denominator
    struct PowerModel
    {
        double p_bb_w = 0.31622776601683794;  // 25 dBm
        double p_rf_w = 0.19952623149688797;  // 23 dBm
        double p_ttd_w = 0.1;                 // 20 dBm
        double p_ps_w = 0.03162277660168379;  // 15 dBm
        int n_rf = 1;
    };

    // Full experiment description. All quantities SI; dBm only at parse/format time.
    struct ScenarioConfig
    {
        // array / band
        int num_antennas = 64;   // N
        double f_c_hz = 24e9;
        double bandwidth_hz = 8e9;
        int num_carriers = 10;   // M
        int num_ttds = 32;       // N_T, must divide N

        // nodes (absolute positions; fractions of D_r are resolved at parse time)
        PolarPosition bob{1.0, 1.0471975511965976};  // 60 deg
        PolarPosition eve{1.0, 1.1344640137963142};  // 65 deg

        // budgets and noise
        double power_budget_w = 0.1;               // P, 20 dBm
        double noise_psd_w_per_hz = 1e-13;         // -100 dBm/Hz
        std::optional<double> noise_per_carrier_w; // direct sigma^2 override
        double delay_budget_s = 5e-9;              // chi

        // iterative tolerances
        double tol_lambda = 1e-3;  // delta, FP outer loop
        double tol_v = 1e-3;       // epsilon, rank-one inner loop (Frobenius)
        double tol_rate = 1e-3;    // kappa, AO on the digitized secrecy rate
        double tol_delay = 1e-4;   // vartheta, BSUM stop as a fraction of chi
        double tol_eta = 1e-4;     // varsigma, analog AO on eta

        // BALA
        int bala_segments = 100;       // L
        bool bala_delay_offset = false; // shift delays to min 0 before clamping

        PowerModel power_model;

        // iteration caps (best iterate returned on hitting a cap)
        int max_fp_outer = 50;
        int max_rankone_inner = 50;
        int max_ao = 30;
        int max_bsum_sweeps = 100;
        int max_analog_ao = 50;

        int group_size() const { return num_antennas / num_ttds; } // N_G
        double noise_per_carrier() const;                          // sigma^2 in watts
        void validate() const; // throws std::invalid_argument

        ArrayGeometry geometry() const;
        FrequencyGrid grid() const;
        ChannelSet channels() const;
        double rayleigh_distance() const;
    };

    // sigma^2 = PSD * (B / M)
    double noise_power_per_carrier(const ScenarioConfig &cfg);

    // Scenario files: "[section]" headers, "key = value" lines, '#' comments.
    // Powers accept explicit *_dbm keys; node ranges accept *_r_over_dr fractions.
    ScenarioConfig parse_scenario(const std::string &text);
    ScenarioConfig load_scenario(const std::string &path);
}

#endif
