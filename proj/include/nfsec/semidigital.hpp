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

#ifndef NFSEC_SEMIDIGITAL_HPP
#define NFSEC_SEMIDIGITAL_HPP

#include "nfsec/beamforming.hpp"
#include "nfsec/conic.hpp"
#include "nfsec/powalloc.hpp"
#include "nfsec/scenario.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace nfsec
{
    // Unit-modulus matched filter to Bob per carrier
    SemiDigitalBeamformer init_semi_digital(const ChannelSet &channels);

    // tr(h h^H V) = h^H V h; real for Hermitian V
    double lifted_gain(const Eigen::MatrixXcd &v, const Eigen::VectorXcd &h);

    // lambda* = sqrt(N s2 + P tr(H_B V)) / (N s2 + P tr(H_E V))
    double update_lambda(const Eigen::MatrixXcd &v, const Eigen::VectorXcd &h_bob,
                         const Eigen::VectorXcd &h_eve, double power_w, double sigma2_w,
                         int num_antennas);

    // Per-carrier FP surrogate 2 lambda sqrt(x) - lambda^2 y
    double fp_surrogate(const Eigen::MatrixXcd &v, double lambda, const Eigen::VectorXcd &h_bob,
                        const Eigen::VectorXcd &h_eve, double power_w, double sigma2_w,
                        int num_antennas);

    // log2((N s2 + P |h_B^H v|^2) / (N s2 + P |h_E^H v|^2))
    double carrier_log_ratio(const Eigen::VectorXcd &v, const Eigen::VectorXcd &h_bob,
                             const Eigen::VectorXcd &h_eve, double power_w, double sigma2_w,
                             int num_antennas);

    // SDR of the per-carrier surrogate problem at fixed lambda:
    // maximize 2 lambda s - lambda^2 (N s2 + P tr(H_E V))
    //   s.t. s^2 <= N s2 + P tr(H_B V), diag(V) = 1, V >= 0
    Eigen::MatrixXcd solve_relaxed(double lambda, const Eigen::VectorXcd &h_bob,
                                   const Eigen::VectorXcd &h_eve, double power_w,
                                   double sigma2_w, int num_antennas,
                                   conic::SolveStatus *status = nullptr);

    // One convex step of the rank-one tightening: the same program plus the
    // lifted rank-one block with tr(V_prev A) frozen through its top eigenvalue.
    Eigen::MatrixXcd rankone_iteration(const Eigen::MatrixXcd &v_prev, double lambda,
                                       const Eigen::VectorXcd &h_bob, const Eigen::VectorXcd &h_eve,
                                       double power_w, double sigma2_w, int num_antennas,
                                       conic::SolveStatus *status = nullptr);

    // Principal eigenvector scaled to sqrt(N), entries projected to unit modulus
    Eigen::VectorXcd extract_rank_one(const Eigen::MatrixXcd &v);

    double rankone_ratio(const Eigen::MatrixXcd &v); // lambda_2 / lambda_1

    struct BeamformerDesignOptions
    {
        double tol_lambda = 1e-3; // delta, on the noise-normalized lambda
        double tol_v = 1e-3;      // epsilon, Frobenius
        int max_outer = 50;
        int max_inner = 50;
    };

    struct BeamformerDesignResult
    {
        Eigen::VectorXcd v;
        double objective_log2 = 0.0;        // carrier_log_ratio at v
        std::vector<double> objective_trace; // per outer iteration, extracted iterate
        double last_dlambda = 0.0;
        double last_dv = 0.0;
        double rankone_ratio = 0.0;
        bool hit_cap = false;
        bool rankone_flagged = false; // lambda_2/lambda_1 > 1e-3 at exit
    };

    // Algorithm "beamformer design given power allocation" for one carrier.
    // init_v defaults to the matched filter to Bob; the best iterate (including
    // the initializer) is returned.
    BeamformerDesignResult optimize_beamformer_single(const Eigen::VectorXcd &h_bob,
                                                      const Eigen::VectorXcd &h_eve,
                                                      double power_w, double sigma2_w,
                                                      int num_antennas,
                                                      const BeamformerDesignOptions &opts,
                                                      const Eigen::VectorXcd *init_v = nullptr);

    // All active carriers, independent subproblems run in parallel.
    std::vector<BeamformerDesignResult>
    optimize_beamformer(const ChannelSet &channels, const std::vector<int> &active,
                        const std::vector<double> &power_w, double sigma2_w, int num_antennas,
                        const BeamformerDesignOptions &opts,
                        const std::vector<Eigen::VectorXcd> *init_v = nullptr);

    struct AoTraceRow
    {
        int iteration = 0;
        double rate = 0.0;       // digitized secrecy rate after the iteration
        double max_dlambda = 0.0;
        double max_dv = 0.0;
    };

    struct SemiDigitalResult
    {
        std::vector<int> active;          // M+
        std::vector<double> power_w;      // all M carriers
        SemiDigitalBeamformer beamformer; // all M carriers
        double secrecy_rate = 0.0;        // digitized R_S
        std::vector<double> rate_trace;   // per AO iteration
        bool converged = false;
        bool rankone_flagged = false;
    };

    // Alternating optimization between secure water-filling and beamformer design
    SemiDigitalResult semi_digital_solve(const ScenarioConfig &cfg, const ChannelSet &channels,
                                         std::vector<AoTraceRow> *trace = nullptr);

    // Fully-digital counterpart: ||v_m|| = sqrt(N); the beamformer step is the
    // dominant generalized eigenvector of (s2 I + P H_B, s2 I + P H_E).
    SemiDigitalResult fully_digital_solve(const ScenarioConfig &cfg, const ChannelSet &channels,
                                          std::vector<AoTraceRow> *trace = nullptr);
}

#endif
