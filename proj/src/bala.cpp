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
// Beamsplit-aware low-complexity beamfocusing: the TTD-free focus trace gives
// the drifted endpoint at f_M; candidate ATP configurations are generated on
// the Cartesian segment from that endpoint back to Bob and scored by the
// secrecy rate after secure water-filling.

#include "nfsec/bala.hpp"

#include "nfsec/metrics.hpp"
#include "parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace nfsec
{
    PolarPosition ttdfree_focus(double f_hz, const PolarPosition &bob, double f1_hz)
    {
        if (!(f_hz > 0.0) || !(f1_hz > 0.0))
            throw std::invalid_argument("ttdfree_focus: frequencies must be > 0");
        bob.validate();
        const double ratio = f1_hz / f_hz;
        const double arg = ratio * std::cos(bob.angle_rad);
        if (std::abs(arg) > 1.0)
            throw std::invalid_argument("ttdfree_focus: arccos argument outside [-1, 1]");
        const double sin2 = std::sin(bob.angle_rad) * std::sin(bob.angle_rad);
        const double tan2 = std::tan(bob.angle_rad) * std::tan(bob.angle_rad);
        PolarPosition out;
        out.angle_rad = std::acos(arg);
        out.range_m = (f_hz / (f1_hz * sin2) - f1_hz / (f_hz * tan2)) * bob.range_m;
        return out;
    }

    AtpConfig atp_config(const PolarPosition &bob, const PolarPosition &target,
                         const FrequencyGrid &grid, const ArrayGeometry &geometry)
    {
        bob.validate();
        target.validate();
        const int n = geometry.size();
        const double f1 = grid.f_low();
        const double fm = grid.f_high();
        const double b = grid.bandwidth_hz;
        AtpConfig cfg;
        cfg.delays_s.resize(n);
        cfg.phases_rad.resize(n);
        for (int i = 0; i < n; ++i)
        {
            const double d_bob = element_distance(geometry, i, bob);
            const double d_tgt = element_distance(geometry, i, target);
            cfg.delays_s(i) = (fm * d_tgt - f1 * d_bob) / (speed_of_light * b);
            cfg.phases_rad(i) = 2.0 * M_PI * f1 * fm * (d_tgt - d_bob) / (speed_of_light * b);
        }
        return cfg;
    }

    PolarPosition atp_focus(double f_hz, const PolarPosition &bob, const PolarPosition &target,
                            const FrequencyGrid &grid)
    {
        bob.validate();
        target.validate();
        const double f1 = grid.f_low();
        const double fm = grid.f_high();
        const double b = grid.bandwidth_hz;
        const double num = (f_hz - f1) * fm * std::cos(target.angle_rad) -
                           (f_hz - fm) * f1 * std::cos(bob.angle_rad);
        const double arg = num / (b * f_hz);
        if (std::abs(arg) > 1.0)
            throw std::invalid_argument("atp_focus: arccos argument outside [-1, 1]");
        PolarPosition out;
        out.angle_rad = std::acos(arg);
        const double sin2 = std::sin(out.angle_rad) * std::sin(out.angle_rad);
        const double sin2_t = std::sin(target.angle_rad) * std::sin(target.angle_rad);
        const double sin2_b = std::sin(bob.angle_rad) * std::sin(bob.angle_rad);
        const double inv = (f_hz - f1) * fm * sin2_t / (b * f_hz * target.range_m * sin2) -
                           (f_hz - fm) * f1 * sin2_b / (b * f_hz * bob.range_m * sin2);
        out.range_m = 1.0 / inv;
        return out;
    }

    Eigen::VectorXd group_delays(const Eigen::VectorXd &delays_s, int num_ttds)
    {
        const int n = static_cast<int>(delays_s.size());
        if (num_ttds < 1 || n % num_ttds != 0)
            throw std::invalid_argument("group_delays: N must be divisible by N_T");
        const int ng = n / num_ttds;
        Eigen::VectorXd out(num_ttds);
        for (int i = 0; i < num_ttds; ++i)
            out(i) = delays_s.segment(i * ng, ng).mean();
        return out;
    }

    BalaResult bala_search(const ScenarioConfig &cfg, const ChannelSet &channels)
    {
        cfg.validate();
        const ArrayGeometry geometry = cfg.geometry();
        const FrequencyGrid grid = cfg.grid();
        const double sigma2 = cfg.noise_per_carrier();
        const int big_l = cfg.bala_segments;

        const PolarPosition endpoint = ttdfree_focus(grid.f_high(), cfg.bob, grid.f_low());
        const double x_bar = endpoint.x(), y_bar = endpoint.y();
        const double x_bob = cfg.bob.x(), y_bob = cfg.bob.y();

        struct Scored
        {
            BalaCandidate cand;
            AnalogBeamformer beamformer;
            PowerAllocation alloc;
        };
        std::vector<Scored> scored(static_cast<size_t>(big_l));

        detail::parallel_for(big_l, [&](int k) {
            const int l = k + 1;
            Scored &sc = scored[static_cast<size_t>(k)];
            const double x = x_bar + l * (x_bob - x_bar) / big_l;
            const double y = y_bar + l * (y_bob - y_bar) / big_l;
            const PolarPosition target = polar_from_cartesian(x, y);

            AtpConfig atp = atp_config(cfg.bob, target, grid, geometry);
            if (cfg.bala_delay_offset)
                atp.delays_s.array() -= atp.delays_s.minCoeff(); // gain-neutral shift
            int clamped = 0;
            for (int i = 0; i < atp.delays_s.size(); ++i)
            {
                const double t = atp.delays_s(i);
                const double c = std::min(cfg.delay_budget_s, std::max(0.0, t));
                if (c != t)
                    ++clamped;
                atp.delays_s(i) = c;
            }

            AnalogBeamformer bf;
            bf.ps_weights.resize(atp.phases_rad.size());
            for (int i = 0; i < atp.phases_rad.size(); ++i)
                bf.ps_weights(i) = std::polar(1.0, atp.phases_rad(i));
            bf.delays_s = group_delays(atp.delays_s, cfg.num_ttds);
            bf.group_size = cfg.group_size();

            std::vector<GainPair> gains(static_cast<size_t>(channels.num_carriers()));
            for (int m = 0; m < channels.num_carriers(); ++m)
            {
                const Eigen::VectorXcd u = synthesize(bf, grid.carriers_hz[static_cast<size_t>(m)]);
                gains[static_cast<size_t>(m)] = {array_gain(channels.bob[static_cast<size_t>(m)], u),
                                                 array_gain(channels.eve[static_cast<size_t>(m)], u)};
            }
            PowerAllocation pa = waterfill_secure(gains, cfg.power_budget_w, sigma2, cfg.num_antennas);
            std::vector<Eigen::VectorXcd> us;
            us.reserve(grid.carriers_hz.size());
            for (double f : grid.carriers_hz)
                us.push_back(synthesize(bf, f));
            auto [rb, re] = per_carrier_rates(channels, us, pa.power_w, sigma2, cfg.num_antennas);

            sc.cand.index = l;
            sc.cand.x = x;
            sc.cand.y = y;
            sc.cand.target = target;
            sc.cand.clamped_count = clamped;
            sc.cand.secrecy_rate = secrecy_rate(rb, re);
            sc.beamformer = std::move(bf);
            sc.alloc = std::move(pa);
        });

        // deterministic argmax, lowest l wins on ties
        int best = 0;
        for (int k = 1; k < big_l; ++k)
            if (scored[static_cast<size_t>(k)].cand.secrecy_rate >
                scored[static_cast<size_t>(best)].cand.secrecy_rate)
                best = k;

        BalaResult res;
        res.beamformer = scored[static_cast<size_t>(best)].beamformer;
        res.active = scored[static_cast<size_t>(best)].alloc.active;
        res.power_w = scored[static_cast<size_t>(best)].alloc.power_w;
        res.secrecy_rate = scored[static_cast<size_t>(best)].cand.secrecy_rate;
        res.selected_index = scored[static_cast<size_t>(best)].cand.index;
        res.candidates.reserve(scored.size());
        for (auto &sc : scored)
            res.candidates.push_back(sc.cand);
        return res;
    }
}
