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

#include "nfsec/beamforming.hpp"

#include "parallel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace nfsec
{
    void AnalogBeamformer::validate(double delay_budget_s) const
    {
        const int n = num_antennas();
        const int nt = num_ttds();
        if (nt < 1 || group_size < 1 || n != nt * group_size)
            throw std::invalid_argument("AnalogBeamformer: N must equal N_T * N_G");
        for (int i = 0; i < n; ++i)
            if (std::abs(std::abs(ps_weights(i)) - 1.0) > 1e-9)
                throw std::invalid_argument("AnalogBeamformer: PS weights must be unit modulus");
        for (int i = 0; i < nt; ++i)
            if (delays_s(i) < -1e-18 || delays_s(i) > delay_budget_s + 1e-18)
                throw std::invalid_argument("AnalogBeamformer: delay outside [0, chi]");
    }

    Eigen::VectorXcd ttd_response(const Eigen::VectorXd &delays_s, double f_hz, int group_size)
    {
        if (group_size < 1)
            throw std::invalid_argument("ttd_response: group size must be >= 1");
        const int nt = static_cast<int>(delays_s.size());
        Eigen::VectorXcd t(nt * group_size);
        for (int i = 0; i < nt; ++i)
        {
            const std::complex<double> e = std::polar(1.0, -2.0 * M_PI * f_hz * delays_s(i));
            for (int j = 0; j < group_size; ++j)
                t(i * group_size + j) = e;
        }
        return t;
    }

    Eigen::VectorXcd synthesize(const AnalogBeamformer &b, double f_hz)
    {
        return b.ps_weights.cwiseProduct(ttd_response(b.delays_s, f_hz, b.group_size));
    }

    double array_gain(const Eigen::VectorXcd &h, const Eigen::VectorXcd &u)
    {
        if (h.size() != u.size())
            throw std::invalid_argument("array_gain: length mismatch");
        const std::complex<double> inner = h.dot(u); // h^H u
        return std::norm(inner);
    }

    BeampatternResult beampattern_grid(const ArrayGeometry &g, double rayleigh_m,
                                       const std::vector<double> &freqs_hz,
                                       const std::vector<Eigen::VectorXcd> &effective,
                                       const BeampatternGridSpec &spec)
    {
        if (freqs_hz.empty() || freqs_hz.size() != effective.size())
            throw std::invalid_argument("beampattern_grid: need one effective vector per frequency");
        if (spec.num_ranges < 1 || spec.num_angles < 1)
            throw std::invalid_argument("beampattern_grid: empty grid");

        BeampatternResult res;
        res.freqs_hz = freqs_hz;
        res.r_over_dr.resize(static_cast<size_t>(spec.num_ranges));
        res.theta_rad.resize(static_cast<size_t>(spec.num_angles));
        for (int i = 0; i < spec.num_ranges; ++i)
            res.r_over_dr[static_cast<size_t>(i)] =
                spec.num_ranges == 1 ? spec.r_over_dr_min
                                     : spec.r_over_dr_min + (spec.r_over_dr_max - spec.r_over_dr_min) * i / (spec.num_ranges - 1);
        for (int j = 0; j < spec.num_angles; ++j)
            res.theta_rad[static_cast<size_t>(j)] =
                spec.num_angles == 1 ? spec.theta_min_rad
                                     : spec.theta_min_rad + (spec.theta_max_rad - spec.theta_min_rad) * j / (spec.num_angles - 1);

        const int n = g.size();
        const size_t nf = freqs_hz.size();
        res.layers.assign(nf, Eigen::MatrixXd::Zero(spec.num_ranges, spec.num_angles));

        detail::parallel_for(spec.num_ranges, [&](int i) {
            for (int j = 0; j < spec.num_angles; ++j)
            {
                PolarPosition p{res.r_over_dr[static_cast<size_t>(i)] * rayleigh_m,
                                res.theta_rad[static_cast<size_t>(j)]};
                for (size_t k = 0; k < nf; ++k)
                {
                    const Eigen::VectorXcd h = channel_vector(g, freqs_hz[k], p);
                    res.layers[k](i, j) = array_gain(h, effective[k]) / n;
                }
            }
        });

        res.synthesized = Eigen::MatrixXd::Zero(spec.num_ranges, spec.num_angles);
        for (size_t k = 0; k < nf; ++k)
        {
            const double peak = res.layers[k].maxCoeff();
            if (peak > 0.0)
                res.layers[k] /= peak;
            res.synthesized += res.layers[k];
        }
        return res;
    }

    BeampatternResult beampattern_grid(const ArrayGeometry &g, double rayleigh_m,
                                       const AnalogBeamformer &b,
                                       const std::vector<double> &freqs_hz,
                                       const BeampatternGridSpec &spec)
    {
        std::vector<Eigen::VectorXcd> eff;
        eff.reserve(freqs_hz.size());
        for (double f : freqs_hz)
            eff.push_back(synthesize(b, f));
        return beampattern_grid(g, rayleigh_m, freqs_hz, eff, spec);
    }

    void write_beampattern_csv(const BeampatternResult &r, std::ostream &out)
    {
        out << "R_over_Dr,theta_deg,freq_hz_or_SYNTH,normalized_gain\n";
        char buf[256];
        auto emit = [&](double rr, double th_deg, const char *layer, double val) {
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%s,%.9g\n", rr, th_deg, layer, val);
            out << buf;
        };
        for (size_t k = 0; k < r.layers.size(); ++k)
        {
            char fl[64];
            std::snprintf(fl, sizeof(fl), "%.9g", r.freqs_hz[k]);
            for (size_t i = 0; i < r.r_over_dr.size(); ++i)
                for (size_t j = 0; j < r.theta_rad.size(); ++j)
                    emit(r.r_over_dr[i], r.theta_rad[j] * 180.0 / M_PI, fl,
                         r.layers[k](static_cast<int>(i), static_cast<int>(j)));
        }
        for (size_t i = 0; i < r.r_over_dr.size(); ++i)
            for (size_t j = 0; j < r.theta_rad.size(); ++j)
                emit(r.r_over_dr[i], r.theta_rad[j] * 180.0 / M_PI, "SYNTH",
                     r.synthesized(static_cast<int>(i), static_cast<int>(j)));
    }
}
