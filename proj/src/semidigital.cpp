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
// Semi-digital stage: alternating optimization between secure water-filling
// and per-carrier beamformer design via fractional programming with a
// rank-one-tightened semidefinite relaxation, plus the fully-digital
// counterpart solved through generalized eigenvectors.

#include "nfsec/semidigital.hpp"

#include "parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace nfsec
{
    SemiDigitalBeamformer init_semi_digital(const ChannelSet &channels)
    {
        SemiDigitalBeamformer bf;
        bf.v.reserve(channels.bob.size());
        for (const auto &h : channels.bob)
        {
            Eigen::VectorXcd v(h.size());
            for (int i = 0; i < h.size(); ++i)
                v(i) = h(i) == std::complex<double>(0.0, 0.0)
                           ? std::complex<double>(1.0, 0.0)
                           : std::polar(1.0, std::arg(h(i)));
            bf.v.push_back(std::move(v));
        }
        return bf;
    }

    double lifted_gain(const Eigen::MatrixXcd &v, const Eigen::VectorXcd &h)
    {
        return std::real(h.dot(v * h)); // h^H V h
    }

    double update_lambda(const Eigen::MatrixXcd &v, const Eigen::VectorXcd &h_bob,
                         const Eigen::VectorXcd &h_eve, double power_w, double sigma2_w,
                         int num_antennas)
    {
        const double ns2 = num_antennas * sigma2_w;
        const double x = ns2 + power_w * lifted_gain(v, h_bob);
        const double y = ns2 + power_w * lifted_gain(v, h_eve);
        return std::sqrt(x) / y;
    }

    double fp_surrogate(const Eigen::MatrixXcd &v, double lambda, const Eigen::VectorXcd &h_bob,
                        const Eigen::VectorXcd &h_eve, double power_w, double sigma2_w,
                        int num_antennas)
    {
        const double ns2 = num_antennas * sigma2_w;
        const double x = ns2 + power_w * lifted_gain(v, h_bob);
        const double y = ns2 + power_w * lifted_gain(v, h_eve);
        return 2.0 * lambda * std::sqrt(x) - lambda * lambda * y;
    }

    double carrier_log_ratio(const Eigen::VectorXcd &v, const Eigen::VectorXcd &h_bob,
                             const Eigen::VectorXcd &h_eve, double power_w, double sigma2_w,
                             int num_antennas)
    {
        const double ns2 = num_antennas * sigma2_w;
        const double x = ns2 + power_w * array_gain(h_bob, v);
        const double y = ns2 + power_w * array_gain(h_eve, v);
        return std::log2(x / y);
    }

    namespace
    {
        // Per-carrier conic encodings. Everything is pre-normalized so that
        // N sigma^2 = 1 and P = 1 (channels scaled by sqrt(P / (N sigma^2))),
        // keeping the solver data well conditioned. Hermitian unknowns are
        // realified to 2N x 2N symmetric PSD blocks; the unit diagonal of V is
        // substituted out, so V contributes N(N-1) real variables.
        struct CarrierEncoder
        {
            int n;                // antennas
            double lam;           // normalized lambda
            Eigen::VectorXcd hb, he;
            bool rankone = false;
            double top_eig = 0.0; // lambda_max(V_prev) for the rank-one block

            int nv;               // V off-diagonal variables
            int nb = 0;           // B variables (diag + off-diagonal)
            int col_w = -1;       // varpi column
            int col_s = -1;       // epigraph of sqrt(...)
            int num_cols = 0;

            int sv;               // svec length of a realified block
            int rows = 0;

            CarrierEncoder(double lambda, const Eigen::VectorXcd &h_bob, const Eigen::VectorXcd &h_eve,
                           bool with_rankone, double top_eig_v_prev)
                : n(static_cast<int>(h_bob.size())), lam(lambda), hb(h_bob), he(h_eve),
                  rankone(with_rankone), top_eig(top_eig_v_prev)
            {
                nv = n * (n - 1);
                sv = (2 * n) * (2 * n + 1) / 2;
                if (rankone)
                {
                    nb = n * n;
                    col_w = nv + nb;
                    col_s = col_w + 1;
                }
                else
                {
                    col_s = nv;
                }
                num_cols = col_s + 1;
                rows = rankone ? (3 * sv + 3 + 1) : (sv + 3);
            }

            // variable column of Re/Im V_{c,r}, c < r
            int v_col(int c, int r, bool imag) const
            {
                // pairs laid out column-major over the upper triangle
                int idx = 0;
                for (int cc = 0; cc < c; ++cc)
                    idx += (n - 1 - cc);
                idx += (r - c - 1);
                return 2 * idx + (imag ? 1 : 0);
            }

            int b_col(int c, int r, bool imag) const { return nv + n + 2 * up_index(c, r) + (imag ? 1 : 0); }
            int b_diag_col(int i) const { return nv + i; }

            int up_index(int c, int r) const
            {
                int idx = 0;
                for (int cc = 0; cc < c; ++cc)
                    idx += (n - 1 - cc);
                return idx + (r - c - 1);
            }

            // coefficients of tr(H V) over the off-diagonal variables plus the
            // pinned-diagonal constant
            void trace_coeffs(const Eigen::VectorXcd &h, Eigen::VectorXd &coef, double &constant) const
            {
                coef = Eigen::VectorXd::Zero(num_cols);
                constant = 0.0;
                const Eigen::MatrixXcd hm = h * h.adjoint();
                for (int i = 0; i < n; ++i)
                    constant += std::real(hm(i, i));
                for (int c = 0; c < n; ++c)
                    for (int r = c + 1; r < n; ++r)
                    {
                        coef(v_col(c, r, false)) = 2.0 * std::real(hm(c, r));
                        coef(v_col(c, r, true)) = 2.0 * std::imag(hm(c, r));
                    }
            }

            // realified embedding of the V off-diagonal variables into a PSD
            // block, with `sign` +1 for +V and -1 for -V contributions
            void fill_v_embedding(Eigen::MatrixXd &g, int row0, double sign) const
            {
                const double rt2 = std::sqrt(2.0);
                const int d = 2 * n;
                for (int c = 0; c < n; ++c)
                    for (int r = c + 1; r < n; ++r)
                    {
                        const int cre = v_col(c, r, false);
                        const int cim = v_col(c, r, true);
                        // G = -(slack coefficient)
                        g(row0 + conic::svec_index(r, c, d), cre) = -sign * rt2;
                        g(row0 + conic::svec_index(n + r, n + c, d), cre) = -sign * rt2;
                        g(row0 + conic::svec_index(n + c, r, d), cim) = -sign * rt2;
                        g(row0 + conic::svec_index(n + r, c, d), cim) = sign * rt2;
                    }
            }

            void fill_b_embedding(Eigen::MatrixXd &g, int row0) const
            {
                const double rt2 = std::sqrt(2.0);
                const int d = 2 * n;
                for (int i = 0; i < n; ++i)
                {
                    g(row0 + conic::svec_index(i, i, d), b_diag_col(i)) = -1.0;
                    g(row0 + conic::svec_index(n + i, n + i, d), b_diag_col(i)) = -1.0;
                }
                for (int c = 0; c < n; ++c)
                    for (int r = c + 1; r < n; ++r)
                    {
                        const int cre = b_col(c, r, false);
                        const int cim = b_col(c, r, true);
                        g(row0 + conic::svec_index(r, c, d), cre) = -rt2;
                        g(row0 + conic::svec_index(n + r, n + c, d), cre) = -rt2;
                        g(row0 + conic::svec_index(n + c, r, d), cim) = -rt2;
                        g(row0 + conic::svec_index(n + r, c, d), cim) = rt2;
                    }
            }

            conic::Problem build() const
            {
                conic::Problem p;
                p.c = Eigen::VectorXd::Zero(num_cols);
                p.g = Eigen::MatrixXd::Zero(rows, num_cols);
                p.h = Eigen::VectorXd::Zero(rows);
                const int d = 2 * n;

                Eigen::VectorXd cb, ce;
                double kb = 0.0, ke = 0.0;
                trace_coeffs(hb, cb, kb);
                trace_coeffs(he, ce, ke);

                // objective: minimize -2 lam s + lam^2 tr(H_E V) (variable part)
                p.c = lam * lam * ce;
                p.c(col_s) = -2.0 * lam;

                int row = 0;
                // V PSD block; pinned unit diagonal goes to h
                fill_v_embedding(p.g, row, +1.0);
                for (int i = 0; i < d; ++i)
                    p.h(row + conic::svec_index(i, i, d)) = 1.0;
                p.cones.push_back({conic::ConeKind::PositiveSemidefinite, d});
                row += sv;

                if (rankone)
                {
                    // B PSD block
                    fill_b_embedding(p.g, row);
                    p.cones.push_back({conic::ConeKind::PositiveSemidefinite, d});
                    row += sv;

                    // B - V + varpi I PSD block
                    fill_v_embedding(p.g, row, -1.0);
                    {
                        Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(sv, num_cols);
                        fill_b_embedding(tmp, 0);
                        p.g.block(row, 0, sv, num_cols) += tmp;
                    }
                    for (int i = 0; i < d; ++i)
                    {
                        p.g(row + conic::svec_index(i, i, d), col_w) = -1.0;
                        p.h(row + conic::svec_index(i, i, d)) = -1.0; // -diag(V) constants
                    }
                    p.cones.push_back({conic::ConeKind::PositiveSemidefinite, d});
                    row += sv;
                }

                // rotated-cone epigraph s^2 <= 1 + tr(H_B V), as a 3-dim SOC
                const double rt2 = std::sqrt(2.0);
                const double u0 = 1.0 + kb;
                p.g.row(row + 0) = (-cb / rt2).transpose();
                p.h(row + 0) = (u0 + 0.5) / rt2;
                p.g.row(row + 1) = (-cb / rt2).transpose();
                p.h(row + 1) = (u0 - 0.5) / rt2;
                p.g(row + 2, col_s) = -1.0;
                p.cones.push_back({conic::ConeKind::SecondOrder, 3});
                row += 3;

                if (rankone)
                {
                    // tr(V_prev A) enters through its exact maximum lambda_max(V_prev):
                    // lambda_max - 2 varpi - tr(B) >= 0
                    p.g(row, col_w) = 2.0;
                    for (int i = 0; i < n; ++i)
                        p.g(row, b_diag_col(i)) = 1.0;
                    p.h(row) = top_eig;
                    p.cones.push_back({conic::ConeKind::NonNegative, 1});
                    row += 1;
                }
                return p;
            }

            Eigen::MatrixXcd v_from(const Eigen::VectorXd &x) const
            {
                Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
                for (int c = 0; c < n; ++c)
                    for (int r = c + 1; r < n; ++r)
                    {
                        const std::complex<double> val(x(v_col(c, r, false)), x(v_col(c, r, true)));
                        v(c, r) = val;
                        v(r, c) = std::conj(val);
                    }
                return v;
            }
        };

        struct NormalizedCarrier
        {
            Eigen::VectorXcd hb, he;
            int n;
            double sigma2; // 1/N so that N sigma^2 = 1
        };

        NormalizedCarrier normalize_carrier(const Eigen::VectorXcd &h_bob, const Eigen::VectorXcd &h_eve,
                                            double power_w, double sigma2_w, int num_antennas)
        {
            const double ns2 = num_antennas * sigma2_w;
            const double scale = std::sqrt(power_w / ns2);
            return {scale * h_bob, scale * h_eve, num_antennas, 1.0 / num_antennas};
        }
    }

    Eigen::MatrixXcd solve_relaxed(double lambda, const Eigen::VectorXcd &h_bob,
                                   const Eigen::VectorXcd &h_eve, double power_w,
                                   double sigma2_w, int num_antennas, conic::SolveStatus *status)
    {
        const double ns2 = num_antennas * sigma2_w;
        NormalizedCarrier nc = normalize_carrier(h_bob, h_eve, power_w, sigma2_w, num_antennas);
        CarrierEncoder enc(lambda * std::sqrt(ns2), nc.hb, nc.he, false, 0.0);
        conic::Solution sol = conic::solve(enc.build());
        if (status)
            *status = sol.status;
        if (sol.status != conic::SolveStatus::Optimal && sol.status != conic::SolveStatus::MaxIterations)
            throw std::runtime_error("solve_relaxed: conic solver failed (" + conic::to_string(sol.status) + ")");
        return enc.v_from(sol.x);
    }

    Eigen::MatrixXcd rankone_iteration(const Eigen::MatrixXcd &v_prev, double lambda,
                                       const Eigen::VectorXcd &h_bob, const Eigen::VectorXcd &h_eve,
                                       double power_w, double sigma2_w, int num_antennas,
                                       conic::SolveStatus *status)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v_prev, Eigen::EigenvaluesOnly);
        const double top = es.eigenvalues().maxCoeff();
        const double ns2 = num_antennas * sigma2_w;
        NormalizedCarrier nc = normalize_carrier(h_bob, h_eve, power_w, sigma2_w, num_antennas);
        CarrierEncoder enc(lambda * std::sqrt(ns2), nc.hb, nc.he, true, top);
        conic::Solution sol = conic::solve(enc.build());
        if (status)
            *status = sol.status;
        if (sol.status != conic::SolveStatus::Optimal && sol.status != conic::SolveStatus::MaxIterations)
            throw std::runtime_error("rankone_iteration: conic solver failed (" + conic::to_string(sol.status) + ")");
        return enc.v_from(sol.x);
    }

    Eigen::VectorXcd extract_rank_one(const Eigen::MatrixXcd &v)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v);
        const int n = static_cast<int>(v.rows());
        Eigen::VectorXcd top = es.eigenvectors().col(n - 1);
        Eigen::VectorXcd out(n);
        for (int i = 0; i < n; ++i)
            out(i) = top(i) == std::complex<double>(0.0, 0.0)
                         ? std::complex<double>(1.0, 0.0)
                         : std::polar(1.0, std::arg(top(i)));
        return out;
    }

    double rankone_ratio(const Eigen::MatrixXcd &v)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v, Eigen::EigenvaluesOnly);
        const int n = static_cast<int>(v.rows());
        if (n < 2)
            return 0.0;
        const double l1 = es.eigenvalues()(n - 1);
        const double l2 = std::max(0.0, es.eigenvalues()(n - 2));
        return l1 > 0.0 ? l2 / l1 : 0.0;
    }

    BeamformerDesignResult optimize_beamformer_single(const Eigen::VectorXcd &h_bob,
                                                      const Eigen::VectorXcd &h_eve,
                                                      double power_w, double sigma2_w,
                                                      int num_antennas,
                                                      const BeamformerDesignOptions &opts,
                                                      const Eigen::VectorXcd *init_v)
    {
        BeamformerDesignResult res;
        Eigen::VectorXcd v0;
        if (init_v)
            v0 = *init_v;
        else
        {
            ChannelSet one;
            one.bob = {h_bob};
            one.eve = {h_eve};
            v0 = init_semi_digital(one).v.front();
        }
        res.v = v0;
        res.objective_log2 = carrier_log_ratio(v0, h_bob, h_eve, power_w, sigma2_w, num_antennas);

        if (num_antennas == 1 || power_w <= 0.0)
            return res; // the unit-modulus scalar (or zero power) leaves nothing to optimize

        // work in noise-normalized units: N sigma^2 = 1, P = 1
        NormalizedCarrier nc = normalize_carrier(h_bob, h_eve, power_w, sigma2_w, num_antennas);

        Eigen::MatrixXcd v_lift = v0 * v0.adjoint();
        double lambda = update_lambda(v_lift, nc.hb, nc.he, 1.0, nc.sigma2, nc.n);
        res.hit_cap = true;
        Eigen::MatrixXcd v_mat;
        for (int outer = 0; outer < opts.max_outer; ++outer)
        {
            v_mat = solve_relaxed(lambda, nc.hb, nc.he, 1.0, nc.sigma2, nc.n);
            double dv = 0.0;
            for (int inner = 0; inner < opts.max_inner; ++inner)
            {
                Eigen::MatrixXcd v_next =
                    rankone_iteration(v_mat, lambda, nc.hb, nc.he, 1.0, nc.sigma2, nc.n);
                dv = (v_next - v_mat).norm();
                v_mat = v_next;
                if (dv <= opts.tol_v)
                    break;
            }
            res.last_dv = dv;

            Eigen::VectorXcd v_cand = extract_rank_one(v_mat);
            const double obj =
                carrier_log_ratio(v_cand, h_bob, h_eve, power_w, sigma2_w, num_antennas);
            res.objective_trace.push_back(obj);
            if (obj > res.objective_log2)
            {
                res.objective_log2 = obj;
                res.v = v_cand;
            }

            const double lambda_next = update_lambda(v_mat, nc.hb, nc.he, 1.0, nc.sigma2, nc.n);
            res.last_dlambda = std::abs(lambda_next - lambda);
            lambda = lambda_next;
            if (res.last_dlambda <= opts.tol_lambda)
            {
                res.hit_cap = false;
                break;
            }
        }
        res.rankone_ratio = rankone_ratio(v_mat);
        res.rankone_flagged = res.rankone_ratio > 1e-3;
        return res;
    }

    std::vector<BeamformerDesignResult>
    optimize_beamformer(const ChannelSet &channels, const std::vector<int> &active,
                        const std::vector<double> &power_w, double sigma2_w, int num_antennas,
                        const BeamformerDesignOptions &opts,
                        const std::vector<Eigen::VectorXcd> *init_v)
    {
        std::vector<BeamformerDesignResult> out(active.size());
        detail::parallel_for(static_cast<int>(active.size()), [&](int k) {
            const int m = active[static_cast<size_t>(k)];
            const Eigen::VectorXcd *init =
                init_v ? &(*init_v)[static_cast<size_t>(m)] : nullptr;
            out[static_cast<size_t>(k)] = optimize_beamformer_single(
                channels.bob[static_cast<size_t>(m)], channels.eve[static_cast<size_t>(m)],
                power_w[static_cast<size_t>(m)], sigma2_w, num_antennas, opts, init);
        });
        return out;
    }

    namespace
    {
        std::vector<GainPair> gains_for(const ChannelSet &channels,
                                        const std::vector<Eigen::VectorXcd> &v)
        {
            std::vector<GainPair> g(v.size());
            for (size_t m = 0; m < v.size(); ++m)
                g[m] = {array_gain(channels.bob[m], v[m]), array_gain(channels.eve[m], v[m])};
            return g;
        }

        double digitized_rate(const ChannelSet &channels, const std::vector<Eigen::VectorXcd> &v,
                              const std::vector<double> &power, double sigma2, int n)
        {
            double total = 0.0;
            for (size_t m = 0; m < v.size(); ++m)
                if (power[m] > 0.0)
                    total += std::max(0.0, carrier_log_ratio(v[m], channels.bob[m], channels.eve[m],
                                                             power[m], sigma2, n));
            return total;
        }

        // shared AO driver; the step callback updates v[m] for all active m
        template <typename BeamStep>
        SemiDigitalResult ao_drive(const ScenarioConfig &cfg, const ChannelSet &channels,
                                   SemiDigitalBeamformer init, BeamStep &&step,
                                   std::vector<AoTraceRow> *trace)
        {
            cfg.validate();
            const double sigma2 = cfg.noise_per_carrier();
            const int n = cfg.num_antennas;

            SemiDigitalResult res;
            res.beamformer = std::move(init);
            res.power_w.assign(channels.bob.size(), 0.0);

            double rate_prev = 0.0;
            for (int t = 0; t < cfg.max_ao; ++t)
            {
                PowerAllocation pa =
                    waterfill_secure(gains_for(channels, res.beamformer.v), cfg.power_budget_w, sigma2, n);
                res.active = pa.active;
                res.power_w = pa.power_w;
                if (pa.active.empty())
                {
                    res.secrecy_rate = 0.0;
                    res.rate_trace.push_back(0.0);
                    res.converged = true;
                    if (trace)
                        trace->push_back({t, 0.0, 0.0, 0.0});
                    break;
                }

                AoTraceRow row{t, 0.0, 0.0, 0.0};
                step(res, pa, row);

                const double rate = digitized_rate(channels, res.beamformer.v, res.power_w, sigma2, n);
                res.secrecy_rate = rate;
                res.rate_trace.push_back(rate);
                row.rate = rate;
                if (trace)
                    trace->push_back(row);
                if (std::abs(rate - rate_prev) <= cfg.tol_rate)
                {
                    res.converged = true;
                    break;
                }
                rate_prev = rate;
            }
            return res;
        }
    }

    SemiDigitalResult semi_digital_solve(const ScenarioConfig &cfg, const ChannelSet &channels,
                                         std::vector<AoTraceRow> *trace)
    {
        const double sigma2 = cfg.noise_per_carrier();
        const int n = cfg.num_antennas;
        BeamformerDesignOptions opts{cfg.tol_lambda, cfg.tol_v, cfg.max_fp_outer, cfg.max_rankone_inner};

        bool flagged = false;
        auto result = ao_drive(
            cfg, channels, init_semi_digital(channels),
            [&](SemiDigitalResult &res, const PowerAllocation &pa, AoTraceRow &row) {
                auto designs = optimize_beamformer(channels, pa.active, pa.power_w, sigma2, n, opts,
                                                   &res.beamformer.v);
                for (size_t k = 0; k < pa.active.size(); ++k)
                {
                    const int m = pa.active[k];
                    res.beamformer.v[static_cast<size_t>(m)] = designs[k].v;
                    row.max_dlambda = std::max(row.max_dlambda, designs[k].last_dlambda);
                    row.max_dv = std::max(row.max_dv, designs[k].last_dv);
                    flagged = flagged || designs[k].rankone_flagged;
                }
            },
            trace);
        result.rankone_flagged = flagged;
        return result;
    }

    SemiDigitalResult fully_digital_solve(const ScenarioConfig &cfg, const ChannelSet &channels,
                                          std::vector<AoTraceRow> *trace)
    {
        const double sigma2 = cfg.noise_per_carrier();
        const int n = cfg.num_antennas;
        const double rootn = std::sqrt(static_cast<double>(n));

        // matched filter scaled to ||v|| = sqrt(N) as the starting point
        SemiDigitalBeamformer init = init_semi_digital(channels);

        return ao_drive(
            cfg, channels, std::move(init),
            [&](SemiDigitalResult &res, const PowerAllocation &pa, AoTraceRow &row) {
                for (int m : pa.active)
                {
                    const auto &hb = channels.bob[static_cast<size_t>(m)];
                    const auto &he = channels.eve[static_cast<size_t>(m)];
                    const double p = pa.power_w[static_cast<size_t>(m)];
                    Eigen::MatrixXcd num = sigma2 * Eigen::MatrixXcd::Identity(n, n) + p * hb * hb.adjoint();
                    Eigen::MatrixXcd den = sigma2 * Eigen::MatrixXcd::Identity(n, n) + p * he * he.adjoint();
                    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(num, den);
                    Eigen::VectorXcd v = ges.eigenvectors().col(n - 1);
                    v *= rootn / v.norm();
                    auto &cur = res.beamformer.v[static_cast<size_t>(m)];
                    const double obj_new = carrier_log_ratio(v, hb, he, p, sigma2, n);
                    const double obj_old = carrier_log_ratio(cur, hb, he, p, sigma2, n);
                    if (obj_new >= obj_old)
                    {
                        row.max_dv = std::max(row.max_dv, (v - cur).norm());
                        cur = v;
                    }
                }
            },
            trace);
    }
}
