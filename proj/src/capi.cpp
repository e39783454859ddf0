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

#include "nfsec/nfsec.h"

#include "nfsec/beamforming.hpp"
#include "nfsec/experiments.hpp"
#include "nfsec/metrics.hpp"
#include "nfsec/scenario.hpp"

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

struct nfsec_scenario
{
    nfsec::ScenarioConfig cfg;
    nfsec::ChannelSet channels;
};

struct nfsec_report
{
    nfsec::SecrecyReport rep;
};

namespace
{
    thread_local std::string g_last_error;

    void set_error(const std::string &msg) { g_last_error = msg; }

    template <typename Fn>
    nfsec_status guarded(Fn &&fn)
    {
        try
        {
            fn();
            return NFSEC_OK;
        }
        catch (const std::invalid_argument &e)
        {
            set_error(e.what());
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        catch (const std::ios_base::failure &e)
        {
            set_error(e.what());
            return NFSEC_ERR_IO;
        }
        catch (const std::exception &e)
        {
            set_error(e.what());
            return NFSEC_ERR_RUNTIME;
        }
    }
}

extern "C"
{
    const char *nfsec_version(void) { return "0.1.0"; }

    const char *nfsec_last_error(void) { return g_last_error.c_str(); }

    nfsec_status nfsec_scenario_load(const char *path, nfsec_scenario **out)
    {
        if (!path || !out)
        {
            set_error("null argument");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        return guarded([&] {
            auto sc = std::make_unique<nfsec_scenario>();
            sc->cfg = nfsec::load_scenario(path);
            sc->channels = sc->cfg.channels();
            *out = sc.release();
        });
    }

    nfsec_status nfsec_scenario_parse(const char *text, nfsec_scenario **out)
    {
        if (!text || !out)
        {
            set_error("null argument");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        return guarded([&] {
            auto sc = std::make_unique<nfsec_scenario>();
            sc->cfg = nfsec::parse_scenario(text);
            sc->channels = sc->cfg.channels();
            *out = sc.release();
        });
    }

    void nfsec_scenario_free(nfsec_scenario *scenario) { delete scenario; }

    nfsec_status nfsec_scenario_get_info(const nfsec_scenario *scenario, nfsec_scenario_info *out)
    {
        if (!scenario || !out)
        {
            set_error("null argument");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        const auto &c = scenario->cfg;
        out->num_antennas = c.num_antennas;
        out->num_carriers = c.num_carriers;
        out->num_ttds = c.num_ttds;
        out->f_c_hz = c.f_c_hz;
        out->bandwidth_hz = c.bandwidth_hz;
        out->power_budget_w = c.power_budget_w;
        out->noise_per_carrier_w = c.noise_per_carrier();
        out->delay_budget_s = c.delay_budget_s;
        out->rayleigh_distance_m = c.rayleigh_distance();
        out->bob_range_m = c.bob.range_m;
        out->bob_angle_rad = c.bob.angle_rad;
        out->eve_range_m = c.eve.range_m;
        out->eve_angle_rad = c.eve.angle_rad;
        return NFSEC_OK;
    }

    nfsec_status nfsec_run(const nfsec_scenario *scenario, const char *method,
                           const char *trace_prefix, nfsec_report **out)
    {
        if (!scenario || !method || !out)
        {
            set_error("null argument");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        return guarded([&] {
            nfsec::TraceOptions trace;
            const nfsec::TraceOptions *trace_ptr = nullptr;
            if (trace_prefix && trace_prefix[0] != '\0')
            {
                trace.prefix = trace_prefix;
                trace_ptr = &trace;
            }
            auto rep = std::make_unique<nfsec_report>();
            rep->rep = nfsec::run_method(nfsec::parse_method(method), scenario->cfg,
                                         scenario->channels, trace_ptr);
            *out = rep.release();
        });
    }

    int nfsec_report_num_carriers(const nfsec_report *report)
    {
        return report ? static_cast<int>(report->rep.carrier_hz.size()) : 0;
    }

    nfsec_status nfsec_report_carrier(const nfsec_report *report, int index, nfsec_carrier_row *out)
    {
        if (!report || !out || index < 0 ||
            index >= static_cast<int>(report->rep.carrier_hz.size()))
        {
            set_error("bad report/index");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        const auto &r = report->rep;
        const size_t i = static_cast<size_t>(index);
        out->carrier_hz = r.carrier_hz[i];
        out->power_w = r.power_w[i];
        out->rate_bob = r.rate_bob[i];
        out->rate_eve = r.rate_eve[i];
        out->secrecy = r.secrecy[i];
        return NFSEC_OK;
    }

    nfsec_status nfsec_report_summary_get(const nfsec_report *report, nfsec_report_summary *out)
    {
        if (!report || !out)
        {
            set_error("null argument");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        out->secrecy_rate = report->rep.secrecy_rate;
        out->sse = report->rep.sse;
        out->see = report->rep.see;
        out->consumed_power_w = report->rep.consumed_power_w;
        return NFSEC_OK;
    }

    nfsec_status nfsec_report_write_csv(const nfsec_report *report, const char *path)
    {
        if (!report || !path)
        {
            set_error("null argument");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        return guarded([&] {
            std::ofstream out(path);
            if (!out)
                throw std::ios_base::failure(std::string("cannot open ") + path);
            report->rep.write_csv(out);
        });
    }

    void nfsec_report_free(nfsec_report *report) { delete report; }

    nfsec_status nfsec_sweep(const nfsec_scenario *scenario, const char *param,
                             const double *values, int num_values, const char *const *methods,
                             int num_methods, const char *out_csv_path, unsigned long long seed)
    {
        if (!scenario || !param || !values || num_values < 1 || !methods || num_methods < 1 ||
            !out_csv_path)
        {
            set_error("null/empty argument");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        return guarded([&] {
            nfsec::SweepSpec spec;
            spec.param = param;
            spec.values.assign(values, values + num_values);
            for (int i = 0; i < num_methods; ++i)
                spec.methods.push_back(nfsec::parse_method(methods[i]));
            spec.seed = seed;
            auto rows = nfsec::sweep(spec, scenario->cfg);
            std::ofstream out(out_csv_path);
            if (!out)
                throw std::ios_base::failure(std::string("cannot open ") + out_csv_path);
            nfsec::write_sweep_csv(rows, out);
        });
    }

    nfsec_status nfsec_beampattern(const nfsec_scenario *scenario, const char *method,
                                   const char *out_csv_path, int num_ranges, int num_angles)
    {
        if (!scenario || !method || !out_csv_path)
        {
            set_error("null argument");
            return NFSEC_ERR_INVALID_ARGUMENT;
        }
        return guarded([&] {
            nfsec::BeampatternGridSpec spec;
            if (num_ranges > 0)
                spec.num_ranges = num_ranges;
            if (num_angles > 0)
                spec.num_angles = num_angles;
            const auto effective = nfsec::method_effective_beamformers(
                nfsec::parse_method(method), scenario->cfg, scenario->channels);
            nfsec::BeampatternResult bp =
                nfsec::beampattern_grid(scenario->cfg.geometry(), scenario->cfg.rayleigh_distance(),
                                        scenario->cfg.grid().carriers_hz, effective, spec);
            std::ofstream out(out_csv_path);
            if (!out)
                throw std::ios_base::failure(std::string("cannot open ") + out_csv_path);
            nfsec::write_beampattern_csv(bp, out);
        });
    }

    int nfsec_cli_main(int argc, const char *const *argv) { return nfsec::cli_main(argc, argv); }
}
