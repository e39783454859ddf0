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

#ifndef NFSEC_EXPERIMENTS_HPP
#define NFSEC_EXPERIMENTS_HPP

#include "nfsec/metrics.hpp"
#include "nfsec/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nfsec
{
    enum class Method
    {
        AtpI,         // semi-digital stage, analog approximation, power refinement
        AtpII,        // fully-digital stage, analog approximation, power refinement
        AtpBala,      // geometry-based line search
        BaselineA,    // TTD-free PS fit to the semi-digital targets
        BaselineB,    // TTD-free matched filter to Bob at f_1
        FullyDigital, // per-carrier digital beamformers, scored directly
    };

    Method parse_method(const std::string &name); // throws std::invalid_argument
    std::string method_name(Method m);
    std::vector<Method> all_methods();

    struct TraceOptions
    {
        std::string prefix; // files <prefix>_semidigital.csv / _analog.csv / _bala.csv
    };

    SecrecyReport run_method(Method method, const ScenarioConfig &cfg, const ChannelSet &channels,
                             const TraceOptions *trace = nullptr);

    // per-carrier effective beamformers produced by a method (beampattern export)
    std::vector<Eigen::VectorXcd> method_effective_beamformers(Method method,
                                                               const ScenarioConfig &cfg,
                                                               const ChannelSet &channels);

    struct SweepSpec
    {
        std::string param; // one of: NT, chi, B, P
        std::vector<double> values;
        std::vector<Method> methods;
        std::uint64_t seed = 0; // recorded for reproducibility; the pipeline is deterministic

        void validate() const;
    };

    // applies one sweep value to a copy of the base config
    ScenarioConfig apply_sweep_value(const ScenarioConfig &base, const std::string &param, double value);

    struct SweepRow
    {
        std::string param;
        double value = 0.0;
        Method method = Method::AtpBala;
        double secrecy_rate = 0.0;
        double sse = 0.0;
        double see = 0.0;
        double wall_s = 0.0;
    };

    std::vector<SweepRow> sweep(const SweepSpec &spec, const ScenarioConfig &base);

    // header: param,value,method,R_S_bpshz,SSE,SEE,wall_s (9 significant digits)
    void write_sweep_csv(const std::vector<SweepRow> &rows, std::ostream &out);

    int cli_main(int argc, const char *const *argv);
}

#endif
