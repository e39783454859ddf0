/* SPDX-License-Identifier: Apache-2.0
 *
 * nfsec - near-field wideband secure beamfocusing library
 * Copyright (C) 2026 nfsec contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C interface of the shared library. Handles are opaque; every call that can
 * fail returns an nfsec_status, with a thread-local message available from
 * nfsec_last_error().
 */

#ifndef NFSEC_NFSEC_H
#define NFSEC_NFSEC_H

#ifdef __cplusplus
extern "C"
{
#endif

    typedef enum nfsec_status
    {
        NFSEC_OK = 0,
        NFSEC_ERR_INVALID_ARGUMENT = 1,
        NFSEC_ERR_IO = 2,
        NFSEC_ERR_RUNTIME = 3,
    } nfsec_status;

    typedef struct nfsec_scenario nfsec_scenario;
    typedef struct nfsec_report nfsec_report;

    const char *nfsec_version(void);
    const char *nfsec_last_error(void);

    /* scenario lifecycle */
    nfsec_status nfsec_scenario_load(const char *path, nfsec_scenario **out);
    nfsec_status nfsec_scenario_parse(const char *text, nfsec_scenario **out);
    void nfsec_scenario_free(nfsec_scenario *scenario);

    typedef struct nfsec_scenario_info
    {
        int num_antennas;
        int num_carriers;
        int num_ttds;
        double f_c_hz;
        double bandwidth_hz;
        double power_budget_w;
        double noise_per_carrier_w;
        double delay_budget_s;
        double rayleigh_distance_m;
        double bob_range_m, bob_angle_rad;
        double eve_range_m, eve_angle_rad;
    } nfsec_scenario_info;

    nfsec_status nfsec_scenario_get_info(const nfsec_scenario *scenario, nfsec_scenario_info *out);

    /* method execution; method is one of
     * "ATP-I", "ATP-II", "ATP-BALA", "Baseline-A", "Baseline-B", "Fully-Digital".
     * trace_prefix may be NULL; when set, iterate traces are written to
     * <prefix>_semidigital.csv / _analog.csv / _bala.csv as applicable. */
    nfsec_status nfsec_run(const nfsec_scenario *scenario, const char *method,
                           const char *trace_prefix, nfsec_report **out);

    typedef struct nfsec_carrier_row
    {
        double carrier_hz;
        double power_w;
        double rate_bob;
        double rate_eve;
        double secrecy;
    } nfsec_carrier_row;

    typedef struct nfsec_report_summary
    {
        double secrecy_rate; /* bits/s/Hz summed over carriers */
        double sse;
        double see;
        double consumed_power_w;
    } nfsec_report_summary;

    int nfsec_report_num_carriers(const nfsec_report *report);
    nfsec_status nfsec_report_carrier(const nfsec_report *report, int index, nfsec_carrier_row *out);
    nfsec_status nfsec_report_summary_get(const nfsec_report *report, nfsec_report_summary *out);
    nfsec_status nfsec_report_write_csv(const nfsec_report *report, const char *path);
    void nfsec_report_free(nfsec_report *report);

    /* parameter sweep; param is one of "NT", "chi", "B", "P" (SI units) */
    nfsec_status nfsec_sweep(const nfsec_scenario *scenario, const char *param,
                             const double *values, int num_values, const char *const *methods,
                             int num_methods, const char *out_csv_path,
                             unsigned long long seed);

    /* beampattern raster export for one method */
    nfsec_status nfsec_beampattern(const nfsec_scenario *scenario, const char *method,
                                   const char *out_csv_path, int num_ranges, int num_angles);

    /* full command-line front end (argv style); returns the process exit code */
    int nfsec_cli_main(int argc, const char *const *argv);

#ifdef __cplusplus
}
#endif

#endif
