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
//
// Analog approximation stage: fit the ATP front-end (PS phases + TTD delays)
// to the target beamformers by alternating the closed-form PS update with
// block successive upper-bound minimization over the delays. Each cosine term
// is majorized by a quadratic anchored at the adjacent valley, so every sweep
// has a closed-form minimizer.

#include "nfsec/analogapprox.hpp"

#include <cmath>
#include <stdexcept>

namespace nfsec
{
    Eigen::VectorXcd ps_update(const std::vector<Eigen::VectorXcd> &targets,
                               const std::vector<double> &freqs_hz,
                               const Eigen::VectorXd &delays_s, int group_size)
    {
        if (targets.empty() || targets.size() != freqs_hz.size())
            throw std::invalid_argument("ps_update: need one target per frequency");
        const int n = static_cast<int>(targets.front().size());
        Eigen::VectorXcd q = Eigen::VectorXcd::Zero(n);
        for (size_t m = 0; m < targets.size(); ++m)
        {
            const Eigen::VectorXcd t = ttd_response(delays_s, freqs_hz[m], group_size);
            q += targets[m].conjugate().cwiseProduct(t); // row of v^H diag(t)
        }
        Eigen::VectorXcd w(n);
        for (int i = 0; i < n; ++i)
            w(i) = q(i) == std::complex<double>(0.0, 0.0)
                       ? std::complex<double>(1.0, 0.0)
                       : std::polar(1.0, -std::arg(q(i)));
        return w;
    }

    Eigen::MatrixXcd psi_matrix(const std::vector<Eigen::VectorXcd> &targets,
                                const Eigen::VectorXcd &ps_weights)
    {
        const int rows = static_cast<int>(targets.size());
        const int n = static_cast<int>(ps_weights.size());
        Eigen::MatrixXcd psi(rows, n);
        for (int m = 0; m < rows; ++m)
            psi.row(m) = targets[static_cast<size_t>(m)].conjugate().cwiseProduct(ps_weights).transpose();
        return psi;
    }

    SurrogateCoeffs surrogate_coeffs(double tau_prev, double f_hz, double zeta)
    {
        SurrogateCoeffs sc;
        const double phase = 2.0 * M_PI * f_hz * tau_prev - zeta;
        const double sin_p = std::sin(phase);
        const double cos_p = std::cos(phase);
        if (std::abs(sin_p) < 1e-14)
        {
            // critical point: flat majorizer at a peak, curvature-matched at a valley
            if (cos_p > 0.0)
            {
                sc.a = 0.0;
                sc.b = tau_prev;
            }
            else
            {
                sc.a = 2.0 * M_PI * M_PI * f_hz * f_hz;
                sc.b = tau_prev;
            }
        }
        else
        {
            // gamma' = -2 pi f sin(phase); anchor at the adjacent valley
            const double u = 2.0 * f_hz * tau_prev - zeta / M_PI;
            const double k = sin_p < 0.0 ? std::floor(u) : std::ceil(u); // gamma' > 0 <=> sin < 0
            sc.b = (k + zeta / M_PI) / (2.0 * f_hz);
            sc.a = -M_PI * f_hz * sin_p / (tau_prev - sc.b);
        }
        sc.c = cos_p - sc.a * (tau_prev - sc.b) * (tau_prev - sc.b); // tangency
        return sc;
    }

    double ttd_objective(const Eigen::MatrixXcd &psi, const std::vector<double> &freqs_hz,
                         const Eigen::VectorXd &delays_s, int group_size)
    {
        const int nt = static_cast<int>(delays_s.size());
        double total = 0.0;
        for (int m = 0; m < psi.rows(); ++m)
            for (int i = 0; i < nt; ++i)
                for (int j = 0; j < group_size; ++j)
                {
                    const std::complex<double> p = psi(m, i * group_size + j);
                    const double zeta = std::arg(p) - M_PI;
                    total += std::abs(p) * std::cos(2.0 * M_PI * freqs_hz[static_cast<size_t>(m)] * delays_s(i) - zeta);
                }
        return total;
    }

    Eigen::VectorXd ttd_update_step(const Eigen::MatrixXcd &psi, const Eigen::VectorXd &delays_prev_s,
                                    const std::vector<double> &freqs_hz, double delay_budget_s,
                                    int group_size)
    {
        const int nt = static_cast<int>(delays_prev_s.size());
        if (psi.cols() != nt * group_size || static_cast<size_t>(psi.rows()) != freqs_hz.size())
            throw std::invalid_argument("ttd_update_step: dimension mismatch");
        Eigen::VectorXd next(nt);
        for (int i = 0; i < nt; ++i)
        {
            double num = 0.0, den = 0.0;
            for (int m = 0; m < psi.rows(); ++m)
            {
                const double f = freqs_hz[static_cast<size_t>(m)];
                for (int j = 0; j < group_size; ++j)
                {
                    const std::complex<double> p = psi(m, i * group_size + j);
                    const double weight = std::abs(p);
                    if (weight == 0.0)
                        continue;
                    const double zeta = std::arg(p) - M_PI;
                    const SurrogateCoeffs sc = surrogate_coeffs(delays_prev_s(i), f, zeta);
                    num += weight * sc.a * sc.b;
                    den += weight * sc.a;
                }
            }
            if (den == 0.0)
                next(i) = delays_prev_s(i); // all majorizers flat
            else
                next(i) = std::min(delay_budget_s, std::max(0.0, num / den));
        }
        return next;
    }

    double approximation_error(const std::vector<Eigen::VectorXcd> &targets,
                               const std::vector<double> &freqs_hz, const AnalogBeamformer &b)
    {
        const int n = b.num_antennas();
        double re_sum = 0.0;
        for (size_t m = 0; m < targets.size(); ++m)
        {
            const Eigen::VectorXcd u = synthesize(b, freqs_hz[m]);
            re_sum += std::real(targets[m].dot(u)); // Re[v^H diag(w) t]
        }
        return 2.0 * static_cast<double>(targets.size()) * n - 2.0 * re_sum;
    }

    ApproxResult approximate(const std::vector<Eigen::VectorXcd> &targets,
                             const std::vector<double> &freqs_hz, double delay_budget_s,
                             int num_ttds, const Eigen::VectorXd &delays_init_s,
                             const ApproxOptions &opts, std::vector<EtaTraceRow> *trace)
    {
        if (targets.size() != freqs_hz.size())
            throw std::invalid_argument("approximate: need one target per frequency");
        if (delays_init_s.size() != num_ttds)
            throw std::invalid_argument("approximate: delay initializer has wrong length");

        ApproxResult res;
        const int n = targets.empty() ? num_ttds : static_cast<int>(targets.front().size());
        if (n % num_ttds != 0)
            throw std::invalid_argument("approximate: N must be divisible by N_T");
        const int ng = n / num_ttds;

        Eigen::VectorXd tau = delays_init_s.cwiseMax(0.0).cwiseMin(delay_budget_s);
        if (targets.empty())
        {
            res.beamformer = {Eigen::VectorXcd::Ones(n), tau, ng};
            res.converged = true;
            return res;
        }

        Eigen::VectorXcd w = ps_update(targets, freqs_hz, tau, ng);
        double eta = approximation_error(targets, freqs_hz, {w, tau, ng});
        res.eta_trace.push_back(eta);
        if (trace)
            trace->push_back({0, eta, 0.0});

        const double dtau_tol = opts.tol_delay * delay_budget_s;
        for (int it = 1; it <= opts.max_ao; ++it)
        {
            w = ps_update(targets, freqs_hz, tau, ng);
            const Eigen::MatrixXcd psi = psi_matrix(targets, w);
            double dtau = 0.0;
            if (delay_budget_s > 0.0)
            {
                for (int sweep = 0; sweep < opts.max_bsum_sweeps; ++sweep)
                {
                    const Eigen::VectorXd tau_next = ttd_update_step(psi, tau, freqs_hz, delay_budget_s, ng);
                    dtau = (tau_next - tau).norm();
                    tau = tau_next;
                    if (dtau <= dtau_tol)
                        break;
                }
            }
            const double eta_next = approximation_error(targets, freqs_hz, {w, tau, ng});
            res.eta_trace.push_back(eta_next);
            if (trace)
                trace->push_back({it, eta_next, dtau});
            if (std::abs(eta_next - eta) <= opts.tol_eta)
            {
                eta = eta_next;
                res.converged = true;
                break;
            }
            eta = eta_next;
        }
        // final PS refresh against the converged delays
        w = ps_update(targets, freqs_hz, tau, ng);
        res.beamformer = {w, tau, ng};
        return res;
    }

    std::pair<std::vector<int>, PowerAllocation>
    refine_power_after_analog(const ChannelSet &channels, const AnalogBeamformer &b,
                              const ScenarioConfig &cfg)
    {
        const FrequencyGrid grid = cfg.grid();
        std::vector<GainPair> gains(static_cast<size_t>(channels.num_carriers()));
        for (int m = 0; m < channels.num_carriers(); ++m)
        {
            const Eigen::VectorXcd u = synthesize(b, grid.carriers_hz[static_cast<size_t>(m)]);
            gains[static_cast<size_t>(m)] = {array_gain(channels.bob[static_cast<size_t>(m)], u),
                                             array_gain(channels.eve[static_cast<size_t>(m)], u)};
        }
        PowerAllocation pa =
            waterfill_secure(gains, cfg.power_budget_w, cfg.noise_per_carrier(), cfg.num_antennas);
        return {pa.active, pa};
    }
}
