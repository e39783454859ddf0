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

#include "nfsec/metrics.hpp"

#include "nfsec/beamforming.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace nfsec
{
    double carrier_rate(const Eigen::VectorXcd &h, const Eigen::VectorXcd &u,
                        double power_w, double sigma2_w, int num_antennas)
    {
        if (!(sigma2_w > 0.0))
            throw std::invalid_argument("carrier_rate: sigma^2 must be > 0");
        if (power_w < 0.0)
            throw std::invalid_argument("carrier_rate: power must be >= 0");
        const double snr = power_w * array_gain(h, u) / (num_antennas * sigma2_w);
        return std::log2(1.0 + snr);
    }

    std::pair<std::vector<double>, std::vector<double>>
    per_carrier_rates(const ChannelSet &channels, const std::vector<Eigen::VectorXcd> &u,
                      const std::vector<double> &power_w, double sigma2_w, int num_antennas)
    {
        const size_t m = channels.bob.size();
        if (channels.eve.size() != m || u.size() != m || power_w.size() != m)
            throw std::invalid_argument("per_carrier_rates: inconsistent lengths");
        std::vector<double> rb(m), re(m);
        for (size_t i = 0; i < m; ++i)
        {
            rb[i] = carrier_rate(channels.bob[i], u[i], power_w[i], sigma2_w, num_antennas);
            re[i] = carrier_rate(channels.eve[i], u[i], power_w[i], sigma2_w, num_antennas);
        }
        return {rb, re};
    }

    double secrecy_rate(const std::vector<double> &rate_bob, const std::vector<double> &rate_eve)
    {
        if (rate_bob.size() != rate_eve.size())
            throw std::invalid_argument("secrecy_rate: length mismatch");
        double rs = 0.0;
        for (size_t i = 0; i < rate_bob.size(); ++i)
            rs += std::max(0.0, rate_bob[i] - rate_eve[i]);
        return rs;
    }

    double sse(double secrecy_rate_total, int num_carriers)
    {
        if (num_carriers < 1)
            throw std::invalid_argument("sse: M must be >= 1");
        return secrecy_rate_total / num_carriers;
    }

    double consumed_power(double transmit_power_w, const PowerModel &pm,
                          int n_rf, int n_ttd, int n_ps)
    {
        return transmit_power_w + pm.p_bb_w + n_rf * pm.p_rf_w + n_ttd * pm.p_ttd_w + n_ps * pm.p_ps_w;
    }

    double see(double sse_value, double transmit_power_w, const PowerModel &pm,
               int num_antennas, int num_ttds)
    {
        const double total = consumed_power(transmit_power_w, pm, pm.n_rf, num_ttds, num_antennas);
        if (!(total > 0.0))
            throw std::invalid_argument("see: total power must be > 0");
        return sse_value / total;
    }

    double see_fully_digital(double sse_value, double transmit_power_w, const PowerModel &pm,
                             int num_antennas)
    {
        const double total = consumed_power(transmit_power_w, pm, num_antennas, 0, 0);
        if (!(total > 0.0))
            throw std::invalid_argument("see: total power must be > 0");
        return sse_value / total;
    }

    void SecrecyReport::write_csv(std::ostream &out) const
    {
        out << "row,carrier_hz,P_w,R_B_bpshz,R_E_bpshz,secrecy_bpshz\n";
        char buf[256];
        for (size_t i = 0; i < carrier_hz.size(); ++i)
        {
            std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                          i + 1, carrier_hz[i], power_w[i], rate_bob[i], rate_eve[i], secrecy[i]);
            out << buf;
        }
        out << "summary,R_S,SSE,SEE,consumed_W\n";
        std::snprintf(buf, sizeof(buf), "summary,%.9g,%.9g,%.9g,%.9g\n",
                      secrecy_rate, sse, see, consumed_power_w);
        out << buf;
    }
}
