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

#ifndef NFSEC_ANALOGAPPROX_HPP
#define NFSEC_ANALOGAPPROX_HPP

#include "nfsec/beamforming.hpp"
#include "nfsec/powalloc.hpp"
#include "nfsec/scenario.hpp"

#include <Eigen/Dense>
#include <vector>

namespace nfsec
{
    // Closed-form PS update: w_n = exp(-j arg(q_n)) with
    // q = sum_m v_m^H diag(t_m); zero entries get w_n = 1.
    Eigen::VectorXcd ps_update(const std::vector<Eigen::VectorXcd> &targets,
                               const std::vector<double> &freqs_hz,
                               const Eigen::VectorXd &delays_s, int group_size);

    // rows indexed by the active carriers: row m = v_m^H diag(w)
    Eigen::MatrixXcd psi_matrix(const std::vector<Eigen::VectorXcd> &targets,
                                const Eigen::VectorXcd &ps_weights);

    // quadratic majorizer g(tau) = a (tau - b)^2 + c of
    // gamma(tau) = cos(2 pi f tau - zeta), tangent at tau_prev
    struct SurrogateCoeffs
    {
        double a = 0.0;
        double b = 0.0;
        double c = 0.0;

        double eval(double tau) const { return a * (tau - b) * (tau - b) + c; }
    };

    SurrogateCoeffs surrogate_coeffs(double tau_prev, double f_hz, double zeta);

    // objective of the per-TTD cosine-sum subproblem at a given delay vector
    double ttd_objective(const Eigen::MatrixXcd &psi, const std::vector<double> &freqs_hz,
                         const Eigen::VectorXd &delays_s, int group_size);

    // one simultaneous BSUM sweep over all TTDs, clipped to [0, chi]
    Eigen::VectorXd ttd_update_step(const Eigen::MatrixXcd &psi, const Eigen::VectorXd &delays_prev_s,
                                    const std::vector<double> &freqs_hz, double delay_budget_s,
                                    int group_size);

    // eta = 2 card(M+) N - 2 sum_m Re[v_m^H diag(w) t_m]; valid while ||v_m||^2 = N
    double approximation_error(const std::vector<Eigen::VectorXcd> &targets,
                               const std::vector<double> &freqs_hz, const AnalogBeamformer &b);

    struct ApproxOptions
    {
        double tol_delay = 1e-4; // vartheta, on ||d tau|| as a fraction of chi
        double tol_eta = 1e-4;   // varsigma
        int max_bsum_sweeps = 100;
        int max_ao = 50;
    };

    struct EtaTraceRow
    {
        int iteration = 0;
        double eta = 0.0;
        double dtau_norm = 0.0;
    };

    struct ApproxResult
    {
        AnalogBeamformer beamformer;
        std::vector<double> eta_trace; // eta per AO iteration (starting point first)
        bool converged = false;
    };

    // Alternating optimization between the PS closed form and the BSUM delay
    // updates, minimizing the squared mismatch to the target beamformers.
    ApproxResult approximate(const std::vector<Eigen::VectorXcd> &targets,
                             const std::vector<double> &freqs_hz, double delay_budget_s,
                             int num_ttds, const Eigen::VectorXd &delays_init_s,
                             const ApproxOptions &opts,
                             std::vector<EtaTraceRow> *trace = nullptr);

    // Re-partition M+ and re-run secure water-filling on the synthesized
    // analog beamformer.
    std::pair<std::vector<int>, PowerAllocation>
    refine_power_after_analog(const ChannelSet &channels, const AnalogBeamformer &b,
                              const ScenarioConfig &cfg);
}

#endif
