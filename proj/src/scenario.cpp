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

#include "nfsec/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace nfsec
{
    double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

    void PolarPosition::validate() const
    {
        if (!(range_m > 0.0))
            throw std::invalid_argument("PolarPosition: range must be > 0");
        if (!(angle_rad > 0.0 && angle_rad < M_PI))
            throw std::invalid_argument("PolarPosition: angle must be in (0, pi)");
    }

    double PolarPosition::x() const { return range_m * std::cos(angle_rad); }
    double PolarPosition::y() const { return range_m * std::sin(angle_rad); }

    PolarPosition polar_from_cartesian(double x, double y)
    {
        PolarPosition p;
        p.range_m = std::hypot(x, y);
        p.angle_rad = std::atan2(y, x);
        return p;
    }

    ArrayGeometry ArrayGeometry::ula(int num_elements, double f_c_hz)
    {
        if (num_elements < 1)
            throw std::invalid_argument("ArrayGeometry::ula: N must be >= 1");
        if (!(f_c_hz > 0.0))
            throw std::invalid_argument("ArrayGeometry::ula: f_c must be > 0");

        ArrayGeometry g;
        const double lambda_c = speed_of_light / f_c_hz;
        g.spacing_m_ = lambda_c / 2.0;
        g.element_x_.resize(static_cast<size_t>(num_elements));
        for (int n = 0; n < num_elements; ++n)
            g.element_x_[static_cast<size_t>(n)] = (n - (num_elements - 1) / 2.0) * g.spacing_m_;
        g.aperture_m_ = g.element_x_.back() - g.element_x_.front();
        return g;
    }

    double ArrayGeometry::rayleigh_distance(double f_c_hz) const
    {
        const double lambda_c = speed_of_light / f_c_hz;
        return 2.0 * aperture_m_ * aperture_m_ / lambda_c;
    }

    double element_distance(const ArrayGeometry &g, int n, const PolarPosition &p)
    {
        if (n < 0 || n >= g.size())
            throw std::invalid_argument("element_distance: index out of range");
        p.validate();
        const double a = g.element_x(n);
        const double r = p.range_m;
        return std::sqrt(a * a + r * r - 2.0 * a * r * std::cos(p.angle_rad));
    }

    FrequencyGrid FrequencyGrid::make(double f_c_hz, double bandwidth_hz, int num_carriers)
    {
        if (!(f_c_hz > 0.0) || !(bandwidth_hz > 0.0))
            throw std::invalid_argument("FrequencyGrid: f_c and B must be > 0");
        if (num_carriers < 2)
            throw std::invalid_argument("FrequencyGrid: M must be >= 2");
        if (bandwidth_hz >= 2.0 * f_c_hz)
            throw std::invalid_argument("FrequencyGrid: B must be < 2 f_c (positive carriers)");

        FrequencyGrid grid;
        grid.f_c_hz = f_c_hz;
        grid.bandwidth_hz = bandwidth_hz;
        grid.num_carriers = num_carriers;
        grid.carriers_hz.resize(static_cast<size_t>(num_carriers));
        for (int m = 0; m < num_carriers; ++m)
            grid.carriers_hz[static_cast<size_t>(m)] =
                f_c_hz - bandwidth_hz / 2.0 + static_cast<double>(m) * bandwidth_hz / (num_carriers - 1);
        return grid;
    }

    Eigen::VectorXcd channel_vector(const ArrayGeometry &g, double f_hz, const PolarPosition &p)
    {
        if (!(f_hz > 0.0))
            throw std::invalid_argument("channel_vector: f must be > 0");
        p.validate();

        const int n = g.size();
        Eigen::VectorXcd h(n);
        for (int i = 0; i < n; ++i)
        {
            const double d = element_distance(g, i, p);
            const double mag = speed_of_light / (4.0 * M_PI * f_hz * d);
            const double phase = -2.0 * M_PI * f_hz * d / speed_of_light;
            h(i) = std::polar(mag, phase);
        }
        return h;
    }

    ChannelSet make_channels(const ArrayGeometry &g, const FrequencyGrid &grid,
                             const PolarPosition &bob, const PolarPosition &eve)
    {
        ChannelSet cs;
        cs.bob.reserve(grid.carriers_hz.size());
        cs.eve.reserve(grid.carriers_hz.size());
        for (double f : grid.carriers_hz)
        {
            cs.bob.push_back(channel_vector(g, f, bob));
            cs.eve.push_back(channel_vector(g, f, eve));
        }
        return cs;
    }

    double ScenarioConfig::noise_per_carrier() const
    {
        if (noise_per_carrier_w)
            return *noise_per_carrier_w;
        return noise_psd_w_per_hz * (bandwidth_hz / num_carriers);
    }

    double noise_power_per_carrier(const ScenarioConfig &cfg) { return cfg.noise_per_carrier(); }

    void ScenarioConfig::validate() const
    {
        if (num_antennas < 1)
            throw std::invalid_argument("scenario: N must be >= 1");
        if (num_ttds < 1 || num_antennas % num_ttds != 0)
            throw std::invalid_argument("scenario: N must be divisible by N_T");
        if (num_carriers < 2)
            throw std::invalid_argument("scenario: M must be >= 2");
        if (!(f_c_hz > 0.0) || !(bandwidth_hz > 0.0))
            throw std::invalid_argument("scenario: f_c and B must be > 0");
        if (!(power_budget_w > 0.0))
            throw std::invalid_argument("scenario: P must be > 0");
        if (delay_budget_s < 0.0)
            throw std::invalid_argument("scenario: chi must be >= 0");
        if (!(noise_per_carrier() > 0.0))
            throw std::invalid_argument("scenario: noise power must be > 0");
        if (!(tol_lambda > 0.0 && tol_v > 0.0 && tol_rate > 0.0 && tol_delay > 0.0 && tol_eta > 0.0))
            throw std::invalid_argument("scenario: tolerances must be > 0");
        if (bala_segments < 1)
            throw std::invalid_argument("scenario: BALA segments L must be >= 1");
        if (power_model.p_bb_w < 0.0 || power_model.p_rf_w < 0.0 ||
            power_model.p_ttd_w < 0.0 || power_model.p_ps_w < 0.0 || power_model.n_rf < 0)
            throw std::invalid_argument("scenario: power model entries must be nonnegative");
        bob.validate();
        eve.validate();
    }

    ArrayGeometry ScenarioConfig::geometry() const { return ArrayGeometry::ula(num_antennas, f_c_hz); }
    FrequencyGrid ScenarioConfig::grid() const { return FrequencyGrid::make(f_c_hz, bandwidth_hz, num_carriers); }
    ChannelSet ScenarioConfig::channels() const { return make_channels(geometry(), grid(), bob, eve); }
    double ScenarioConfig::rayleigh_distance() const { return geometry().rayleigh_distance(f_c_hz); }

    namespace
    {
        std::string trim(const std::string &s)
        {
            size_t b = s.find_first_not_of(" \t\r\n");
            size_t e = s.find_last_not_of(" \t\r\n");
            if (b == std::string::npos)
                return "";
            return s.substr(b, e - b + 1);
        }

        std::string lower(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            return s;
        }

        struct KvMap
        {
            std::map<std::string, std::string> entries; // "section.key" -> value

            bool has(const std::string &k) const { return entries.count(k) > 0; }

            double num(const std::string &k) const
            {
                const std::string &v = entries.at(k);
                size_t pos = 0;
                double x = std::stod(v, &pos);
                if (trim(v.substr(pos)) != "")
                    throw std::invalid_argument("scenario: bad numeric value for '" + k + "': " + v);
                return x;
            }

            int integer(const std::string &k) const
            {
                double x = num(k);
                int i = static_cast<int>(std::llround(x));
                if (std::abs(x - i) > 1e-9)
                    throw std::invalid_argument("scenario: expected integer for '" + k + "'");
                return i;
            }

            bool boolean(const std::string &k) const
            {
                std::string v = lower(trim(entries.at(k)));
                if (v == "true" || v == "1" || v == "yes" || v == "on")
                    return true;
                if (v == "false" || v == "0" || v == "no" || v == "off")
                    return false;
                throw std::invalid_argument("scenario: expected boolean for '" + k + "'");
            }
        };

        KvMap parse_kv(const std::string &text)
        {
            KvMap kv;
            std::istringstream in(text);
            std::string line;
            std::string section;
            int lineno = 0;
            while (std::getline(in, line))
            {
                ++lineno;
                size_t hash = line.find('#');
                if (hash != std::string::npos)
                    line = line.substr(0, hash);
                line = trim(line);
                if (line.empty())
                    continue;
                if (line.front() == '[')
                {
                    if (line.back() != ']')
                        throw std::invalid_argument("scenario: malformed section at line " + std::to_string(lineno));
                    section = lower(trim(line.substr(1, line.size() - 2)));
                    continue;
                }
                size_t eq = line.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("scenario: expected 'key = value' at line " + std::to_string(lineno));
                std::string key = lower(trim(line.substr(0, eq)));
                std::string val = trim(line.substr(eq + 1));
                if (key.empty() || val.empty())
                    throw std::invalid_argument("scenario: empty key or value at line " + std::to_string(lineno));
                std::string full = section.empty() ? key : section + "." + key;
                kv.entries[full] = val;
            }
            return kv;
        }

        // power in watts from either "<key>_w" / "<key>_dbm"
        void read_power(const KvMap &kv, const std::string &base, double &out_w)
        {
            if (kv.has(base + "_w") && kv.has(base + "_dbm"))
                throw std::invalid_argument("scenario: give only one of " + base + "_w / " + base + "_dbm");
            if (kv.has(base + "_w"))
                out_w = kv.num(base + "_w");
            else if (kv.has(base + "_dbm"))
                out_w = dbm_to_watts(kv.num(base + "_dbm"));
        }

        void read_position(const KvMap &kv, const std::string &node, double rayleigh_m, PolarPosition &out)
        {
            const std::string r_m = "nodes." + node + "_r_m";
            const std::string r_frac = "nodes." + node + "_r_over_dr";
            const std::string t_deg = "nodes." + node + "_theta_deg";
            const std::string t_rad = "nodes." + node + "_theta_rad";
            if (kv.has(r_m) && kv.has(r_frac))
                throw std::invalid_argument("scenario: give only one of " + r_m + " / " + r_frac);
            if (kv.has(r_m))
                out.range_m = kv.num(r_m);
            else if (kv.has(r_frac))
                out.range_m = kv.num(r_frac) * rayleigh_m;
            if (kv.has(t_deg) && kv.has(t_rad))
                throw std::invalid_argument("scenario: give only one of " + t_deg + " / " + t_rad);
            if (kv.has(t_deg))
                out.angle_rad = kv.num(t_deg) * M_PI / 180.0;
            else if (kv.has(t_rad))
                out.angle_rad = kv.num(t_rad);
        }
    }

    ScenarioConfig parse_scenario(const std::string &text)
    {
        KvMap kv = parse_kv(text);
        ScenarioConfig cfg;

        if (kv.has("array.n"))
            cfg.num_antennas = kv.integer("array.n");
        if (kv.has("array.f_c_hz"))
            cfg.f_c_hz = kv.num("array.f_c_hz");
        if (kv.has("array.n_t"))
            cfg.num_ttds = kv.integer("array.n_t");

        if (kv.has("band.bandwidth_hz"))
            cfg.bandwidth_hz = kv.num("band.bandwidth_hz");
        if (kv.has("band.m"))
            cfg.num_carriers = kv.integer("band.m");

        // node ranges may be fractions of the Rayleigh distance of this geometry
        const double dr = ArrayGeometry::ula(cfg.num_antennas, cfg.f_c_hz).rayleigh_distance(cfg.f_c_hz);
        read_position(kv, "bob", dr, cfg.bob);
        read_position(kv, "eve", dr, cfg.eve);

        read_power(kv, "budget.p", cfg.power_budget_w);
        if (kv.has("budget.noise_psd_dbm_hz") && kv.has("budget.noise_psd_w_hz"))
            throw std::invalid_argument("scenario: give only one noise PSD key");
        if (kv.has("budget.noise_psd_dbm_hz"))
            cfg.noise_psd_w_per_hz = dbm_to_watts(kv.num("budget.noise_psd_dbm_hz"));
        else if (kv.has("budget.noise_psd_w_hz"))
            cfg.noise_psd_w_per_hz = kv.num("budget.noise_psd_w_hz");
        if (kv.has("budget.noise_per_carrier_w"))
            cfg.noise_per_carrier_w = kv.num("budget.noise_per_carrier_w");
        if (kv.has("budget.chi_s"))
            cfg.delay_budget_s = kv.num("budget.chi_s");

        if (kv.has("tolerances.delta"))
            cfg.tol_lambda = kv.num("tolerances.delta");
        if (kv.has("tolerances.epsilon"))
            cfg.tol_v = kv.num("tolerances.epsilon");
        if (kv.has("tolerances.kappa"))
            cfg.tol_rate = kv.num("tolerances.kappa");
        if (kv.has("tolerances.vartheta"))
            cfg.tol_delay = kv.num("tolerances.vartheta");
        if (kv.has("tolerances.varsigma"))
            cfg.tol_eta = kv.num("tolerances.varsigma");

        if (kv.has("bala.segments"))
            cfg.bala_segments = kv.integer("bala.segments");
        if (kv.has("bala.delay_offset"))
            cfg.bala_delay_offset = kv.boolean("bala.delay_offset");

        read_power(kv, "power_model.p_bb", cfg.power_model.p_bb_w);
        read_power(kv, "power_model.p_rf", cfg.power_model.p_rf_w);
        read_power(kv, "power_model.p_ttd", cfg.power_model.p_ttd_w);
        read_power(kv, "power_model.p_ps", cfg.power_model.p_ps_w);
        if (kv.has("power_model.n_rf"))
            cfg.power_model.n_rf = kv.integer("power_model.n_rf");

        if (kv.has("caps.max_fp_outer"))
            cfg.max_fp_outer = kv.integer("caps.max_fp_outer");
        if (kv.has("caps.max_rankone_inner"))
            cfg.max_rankone_inner = kv.integer("caps.max_rankone_inner");
        if (kv.has("caps.max_ao"))
            cfg.max_ao = kv.integer("caps.max_ao");
        if (kv.has("caps.max_bsum_sweeps"))
            cfg.max_bsum_sweeps = kv.integer("caps.max_bsum_sweeps");
        if (kv.has("caps.max_analog_ao"))
            cfg.max_analog_ao = kv.integer("caps.max_analog_ao");

        cfg.validate();
        return cfg;
    }

    ScenarioConfig load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open scenario file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_scenario(buf.str());
    }
}
