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

#include "nfsec/experiments.hpp"

#include "nfsec/analogapprox.hpp"
#include "nfsec/bala.hpp"
#include "nfsec/beamforming.hpp"
#include "nfsec/semidigital.hpp"
#include "parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace nfsec
{
    Method parse_method(const std::string &name)
    {
        if (name == "ATP-I")
            return Method::AtpI;
        if (name == "ATP-II")
            return Method::AtpII;
        if (name == "ATP-BALA")
            return Method::AtpBala;
        if (name == "Baseline-A")
            return Method::BaselineA;
        if (name == "Baseline-B")
            return Method::BaselineB;
        if (name == "Fully-Digital")
            return Method::FullyDigital;
        throw std::invalid_argument("unknown method: " + name);
    }

    std::string method_name(Method m)
    {
        switch (m)
        {
        case Method::AtpI: return "ATP-I";
        case Method::AtpII: return "ATP-II";
        case Method::AtpBala: return "ATP-BALA";
        case Method::BaselineA: return "Baseline-A";
        case Method::BaselineB: return "Baseline-B";
        case Method::FullyDigital: return "Fully-Digital";
        }
        throw std::invalid_argument("unknown method enum");
    }

    std::vector<Method> all_methods()
    {
        return {Method::AtpI, Method::AtpII, Method::AtpBala,
                Method::BaselineA, Method::BaselineB, Method::FullyDigital};
    }

    namespace
    {
        enum class Hardware
        {
            Atp,     // N_RF RF chains, N_T TTDs, N PSs
            TtdFree, // N_RF RF chains, no TTDs, N PSs
            Digital, // N RF chains, nothing analog
        };

        struct MethodOutcome
        {
            std::vector<Eigen::VectorXcd> effective; // per carrier
            std::vector<double> power_w;
            Hardware hardware = Hardware::Atp;
        };

        std::vector<Eigen::VectorXcd> synthesize_all(const AnalogBeamformer &b, const FrequencyGrid &grid)
        {
            std::vector<Eigen::VectorXcd> out;
            out.reserve(grid.carriers_hz.size());
            for (double f : grid.carriers_hz)
                out.push_back(synthesize(b, f));
            return out;
        }

        void dump_semidigital_trace(const std::string &prefix, const std::vector<AoTraceRow> &rows)
        {
            std::ofstream out(prefix + "_semidigital.csv");
            out << "iteration,R_S,max_dlambda,max_dV_fro\n";
            char buf[160];
            for (const auto &r : rows)
            {
                std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", r.iteration, r.rate,
                              r.max_dlambda, r.max_dv);
                out << buf;
            }
        }

        void dump_eta_trace(const std::string &prefix, const std::vector<EtaTraceRow> &rows)
        {
            std::ofstream out(prefix + "_analog.csv");
            out << "iteration,eta,dtau_norm\n";
            char buf[120];
            for (const auto &r : rows)
            {
                std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g\n", r.iteration, r.eta, r.dtau_norm);
                out << buf;
            }
        }

        void dump_bala_trace(const std::string &prefix, const BalaResult &res)
        {
            std::ofstream out(prefix + "_bala.csv");
            out << "l,X,Y,R,theta_deg,R_S,clamped_count\n";
            char buf[220];
            for (const auto &c : res.candidates)
            {
                std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%d\n", c.index, c.x, c.y,
                              c.target.range_m, c.target.angle_rad * 180.0 / M_PI, c.secrecy_rate,
                              c.clamped_count);
                out << buf;
            }
        }

        // shared tail of ATP-I / ATP-II: approximate the stage-one targets with
        // the ATP structure starting from the BALA delays, then refine power
        MethodOutcome atp_pipeline(const ScenarioConfig &cfg, const ChannelSet &channels,
                                   const SemiDigitalResult &stage_one, const TraceOptions *trace)
        {
            const FrequencyGrid grid = cfg.grid();
            MethodOutcome out;
            out.hardware = Hardware::Atp;
            if (stage_one.active.empty())
            {
                AnalogBeamformer bf{Eigen::VectorXcd::Ones(cfg.num_antennas),
                                    Eigen::VectorXd::Zero(cfg.num_ttds), cfg.group_size()};
                out.effective = synthesize_all(bf, grid);
                out.power_w.assign(static_cast<size_t>(cfg.num_carriers), 0.0);
                return out;
            }

            BalaResult bala = bala_search(cfg, channels);
            if (trace)
                dump_bala_trace(trace->prefix, bala);

            std::vector<Eigen::VectorXcd> targets;
            std::vector<double> freqs;
            targets.reserve(stage_one.active.size());
            freqs.reserve(stage_one.active.size());
            for (int m : stage_one.active)
            {
                targets.push_back(stage_one.beamformer.v[static_cast<size_t>(m)]);
                freqs.push_back(grid.carriers_hz[static_cast<size_t>(m)]);
            }

            ApproxOptions opts{cfg.tol_delay, cfg.tol_eta, cfg.max_bsum_sweeps, cfg.max_analog_ao};
            std::vector<EtaTraceRow> eta_rows;
            ApproxResult approx = approximate(targets, freqs, cfg.delay_budget_s, cfg.num_ttds,
                                              bala.beamformer.delays_s, opts,
                                              trace ? &eta_rows : nullptr);
            if (trace)
                dump_eta_trace(trace->prefix, eta_rows);

            auto [active, pa] = refine_power_after_analog(channels, approx.beamformer, cfg);
            (void)active;
            out.effective = synthesize_all(approx.beamformer, grid);
            out.power_w = pa.power_w;
            return out;
        }

        MethodOutcome execute_method(Method method, const ScenarioConfig &cfg,
                                     const ChannelSet &channels, const TraceOptions *trace)
        {
            const FrequencyGrid grid = cfg.grid();
            switch (method)
            {
            case Method::AtpI:
            {
                std::vector<AoTraceRow> rows;
                SemiDigitalResult sd = semi_digital_solve(cfg, channels, trace ? &rows : nullptr);
                if (trace)
                    dump_semidigital_trace(trace->prefix, rows);
                return atp_pipeline(cfg, channels, sd, trace);
            }
            case Method::AtpII:
            {
                std::vector<AoTraceRow> rows;
                SemiDigitalResult fd = fully_digital_solve(cfg, channels, trace ? &rows : nullptr);
                if (trace)
                    dump_semidigital_trace(trace->prefix, rows);
                return atp_pipeline(cfg, channels, fd, trace);
            }
            case Method::AtpBala:
            {
                BalaResult bala = bala_search(cfg, channels);
                if (trace)
                    dump_bala_trace(trace->prefix, bala);
                return {synthesize_all(bala.beamformer, grid), bala.power_w, Hardware::Atp};
            }
            case Method::BaselineA:
            {
                std::vector<AoTraceRow> rows;
                SemiDigitalResult sd = semi_digital_solve(cfg, channels, trace ? &rows : nullptr);
                if (trace)
                    dump_semidigital_trace(trace->prefix, rows);
                AnalogBeamformer bf{Eigen::VectorXcd::Ones(cfg.num_antennas),
                                    Eigen::VectorXd::Zero(cfg.num_ttds), cfg.group_size()};
                if (!sd.active.empty())
                {
                    std::vector<Eigen::VectorXcd> targets;
                    std::vector<double> freqs;
                    for (int m : sd.active)
                    {
                        targets.push_back(sd.beamformer.v[static_cast<size_t>(m)]);
                        freqs.push_back(grid.carriers_hz[static_cast<size_t>(m)]);
                    }
                    bf.ps_weights = ps_update(targets, freqs, bf.delays_s, cfg.group_size());
                }
                auto [active, pa] = refine_power_after_analog(channels, bf, cfg);
                (void)active;
                return {synthesize_all(bf, grid), pa.power_w, Hardware::TtdFree};
            }
            case Method::BaselineB:
            {
                AnalogBeamformer bf{init_semi_digital(channels).v.front(),
                                    Eigen::VectorXd::Zero(cfg.num_ttds), cfg.group_size()};
                auto [active, pa] = refine_power_after_analog(channels, bf, cfg);
                (void)active;
                return {synthesize_all(bf, grid), pa.power_w, Hardware::TtdFree};
            }
            case Method::FullyDigital:
            {
                std::vector<AoTraceRow> rows;
                SemiDigitalResult fd = fully_digital_solve(cfg, channels, trace ? &rows : nullptr);
                if (trace)
                    dump_semidigital_trace(trace->prefix, rows);
                return {fd.beamformer.v, fd.power_w, Hardware::Digital};
            }
            }
            throw std::invalid_argument("unknown method enum");
        }

        SecrecyReport make_report(Method method, const ScenarioConfig &cfg, const ChannelSet &channels,
                                  const MethodOutcome &outcome)
        {
            const FrequencyGrid grid = cfg.grid();
            const double sigma2 = cfg.noise_per_carrier();
            SecrecyReport rep;
            rep.method = method_name(method);
            rep.carrier_hz = grid.carriers_hz;
            rep.power_w = outcome.power_w;
            auto [rb, re] =
                per_carrier_rates(channels, outcome.effective, outcome.power_w, sigma2, cfg.num_antennas);
            rep.rate_bob = std::move(rb);
            rep.rate_eve = std::move(re);
            rep.secrecy.resize(rep.rate_bob.size());
            for (size_t i = 0; i < rep.secrecy.size(); ++i)
                rep.secrecy[i] = std::max(0.0, rep.rate_bob[i] - rep.rate_eve[i]);
            rep.secrecy_rate = secrecy_rate(rep.rate_bob, rep.rate_eve);
            rep.sse = sse(rep.secrecy_rate, cfg.num_carriers);
            const PowerModel &pm = cfg.power_model;
            switch (outcome.hardware)
            {
            case Hardware::Atp:
                rep.consumed_power_w =
                    consumed_power(cfg.power_budget_w, pm, pm.n_rf, cfg.num_ttds, cfg.num_antennas);
                break;
            case Hardware::TtdFree:
                rep.consumed_power_w = consumed_power(cfg.power_budget_w, pm, pm.n_rf, 0, cfg.num_antennas);
                break;
            case Hardware::Digital:
                rep.consumed_power_w = consumed_power(cfg.power_budget_w, pm, cfg.num_antennas, 0, 0);
                break;
            }
            rep.see = rep.sse / rep.consumed_power_w;
            return rep;
        }
    }

    SecrecyReport run_method(Method method, const ScenarioConfig &cfg, const ChannelSet &channels,
                             const TraceOptions *trace)
    {
        cfg.validate();
        return make_report(method, cfg, channels, execute_method(method, cfg, channels, trace));
    }

    std::vector<Eigen::VectorXcd> method_effective_beamformers(Method method,
                                                               const ScenarioConfig &cfg,
                                                               const ChannelSet &channels)
    {
        cfg.validate();
        return execute_method(method, cfg, channels, nullptr).effective;
    }

    void SweepSpec::validate() const
    {
        if (values.empty() || methods.empty())
            throw std::invalid_argument("sweep: value and method lists must be nonempty");
        if (param != "NT" && param != "chi" && param != "B" && param != "P")
            throw std::invalid_argument("sweep: param must be one of NT, chi, B, P");
    }

    ScenarioConfig apply_sweep_value(const ScenarioConfig &base, const std::string &param, double value)
    {
        ScenarioConfig cfg = base;
        if (param == "NT")
            cfg.num_ttds = static_cast<int>(std::llround(value));
        else if (param == "chi")
            cfg.delay_budget_s = value;
        else if (param == "B")
            cfg.bandwidth_hz = value;
        else if (param == "P")
            cfg.power_budget_w = value;
        else
            throw std::invalid_argument("sweep: unknown param " + param);
        cfg.validate();
        return cfg;
    }

    std::vector<SweepRow> sweep(const SweepSpec &spec, const ScenarioConfig &base)
    {
        spec.validate();
        base.validate();
        const int total = static_cast<int>(spec.values.size() * spec.methods.size());
        std::vector<SweepRow> rows(static_cast<size_t>(total));
        detail::parallel_for(total, [&](int idx) {
            const size_t vi = static_cast<size_t>(idx) / spec.methods.size();
            const size_t mi = static_cast<size_t>(idx) % spec.methods.size();
            ScenarioConfig cfg = apply_sweep_value(base, spec.param, spec.values[vi]);
            const ChannelSet channels = cfg.channels();
            const auto t0 = std::chrono::steady_clock::now();
            SecrecyReport rep = run_method(spec.methods[mi], cfg, channels);
            const auto t1 = std::chrono::steady_clock::now();
            SweepRow &row = rows[static_cast<size_t>(idx)];
            row.param = spec.param;
            row.value = spec.values[vi];
            row.method = spec.methods[mi];
            row.secrecy_rate = rep.secrecy_rate;
            row.sse = rep.sse;
            row.see = rep.see;
            row.wall_s = std::chrono::duration<double>(t1 - t0).count();
        });
        return rows;
    }

    void write_sweep_csv(const std::vector<SweepRow> &rows, std::ostream &out)
    {
        out << "param,value,method,R_S_bpshz,SSE,SEE,wall_s\n";
        char buf[240];
        for (const auto &r : rows)
        {
            std::snprintf(buf, sizeof(buf), "%s,%.9g,%s,%.9g,%.9g,%.9g,%.9g\n", r.param.c_str(),
                          r.value, method_name(r.method).c_str(), r.secrecy_rate, r.sse, r.see,
                          r.wall_s);
            out << buf;
        }
    }

    namespace
    {
        std::vector<double> parse_value_list(const std::string &csv)
        {
            std::vector<double> out;
            std::stringstream ss(csv);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty())
                    out.push_back(std::stod(item));
            return out;
        }

        std::vector<Method> parse_method_list(const std::string &csv)
        {
            std::vector<Method> out;
            std::stringstream ss(csv);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty())
                    out.push_back(parse_method(item));
            return out;
        }
    }

    int cli_main(int argc, const char *const *argv)
    {
        CLI::App app{"near-field wideband secure beamfocusing simulator"};
        app.require_subcommand(1);
        std::uint64_t seed = 0;
        app.add_option("--seed", seed, "seed for randomized tooling (the pipeline is deterministic)");

        std::string scenario_path, method_str = "ATP-BALA", out_path, trace_prefix;

        auto *run_cmd = app.add_subcommand("run", "run one method on a scenario and print the report");
        run_cmd->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
        run_cmd->add_option("--method", method_str,
                            "ATP-I | ATP-II | ATP-BALA | Baseline-A | Baseline-B | Fully-Digital");
        run_cmd->add_option("--out", out_path, "write the per-carrier report CSV here");
        run_cmd->add_option("--trace", trace_prefix, "write iterate traces with this path prefix");

        std::string sweep_param, sweep_values, sweep_methods, sweep_out;
        auto *sweep_cmd = app.add_subcommand("sweep", "sweep a parameter over methods, write CSV");
        sweep_cmd->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
        sweep_cmd->add_option("--param", sweep_param, "NT | chi | B | P")->required();
        sweep_cmd->add_option("--values", sweep_values, "comma-separated values (SI units)")->required();
        sweep_cmd->add_option("--methods", sweep_methods, "comma-separated method names")->required();
        sweep_cmd->add_option("--out", sweep_out, "output CSV path")->required();

        std::string bp_out, bp_resolution;
        auto *bp_cmd = app.add_subcommand("beampattern", "export the beampattern raster of a method");
        bp_cmd->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
        bp_cmd->add_option("--method", method_str, "method whose beamformer is rendered");
        bp_cmd->add_option("--out", bp_out, "output CSV path")->required();
        bp_cmd->add_option("--resolution", bp_resolution, "RxC grid resolution (default 200x200)");

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        try
        {
            const ScenarioConfig cfg = load_scenario(scenario_path);
            const ChannelSet channels = cfg.channels();

            if (run_cmd->parsed())
            {
                const Method method = parse_method(method_str);
                TraceOptions trace{trace_prefix};
                SecrecyReport rep =
                    run_method(method, cfg, channels, trace_prefix.empty() ? nullptr : &trace);
                std::printf("method: %s\n", rep.method.c_str());
                std::printf("carriers: %d   antennas: %d   TTDs: %d\n", cfg.num_carriers,
                            cfg.num_antennas, cfg.num_ttds);
                std::printf("%-6s %-14s %-12s %-10s %-10s %-10s\n", "m", "f_Hz", "P_W", "R_B", "R_E",
                            "secrecy");
                for (size_t m = 0; m < rep.carrier_hz.size(); ++m)
                    std::printf("%-6zu %-14.6g %-12.6g %-10.6g %-10.6g %-10.6g\n", m + 1,
                                rep.carrier_hz[m], rep.power_w[m], rep.rate_bob[m], rep.rate_eve[m],
                                rep.secrecy[m]);
                std::printf("R_S = %.9g bits/s/Hz   SSE = %.9g   SEE = %.9g bits/s/Hz/W   consumed = %.9g W\n",
                            rep.secrecy_rate, rep.sse, rep.see, rep.consumed_power_w);
                if (!out_path.empty())
                {
                    std::ofstream out(out_path);
                    if (!out)
                        throw std::runtime_error("cannot open output file: " + out_path);
                    rep.write_csv(out);
                }
            }
            else if (sweep_cmd->parsed())
            {
                SweepSpec spec;
                spec.param = sweep_param;
                spec.values = parse_value_list(sweep_values);
                spec.methods = parse_method_list(sweep_methods);
                spec.seed = seed;
                auto rows = sweep(spec, cfg);
                std::ofstream out(sweep_out);
                if (!out)
                    throw std::runtime_error("cannot open output file: " + sweep_out);
                write_sweep_csv(rows, out);
                std::printf("wrote %zu rows to %s\n", rows.size(), sweep_out.c_str());
            }
            else if (bp_cmd->parsed())
            {
                const Method method = parse_method(method_str);
                BeampatternGridSpec grid_spec;
                if (!bp_resolution.empty())
                {
                    const size_t xpos = bp_resolution.find('x');
                    if (xpos == std::string::npos)
                        throw std::invalid_argument("resolution must look like 200x200");
                    grid_spec.num_ranges = std::stoi(bp_resolution.substr(0, xpos));
                    grid_spec.num_angles = std::stoi(bp_resolution.substr(xpos + 1));
                }
                std::vector<Eigen::VectorXcd> effective =
                    method_effective_beamformers(method, cfg, channels);
                BeampatternResult bp = beampattern_grid(cfg.geometry(), cfg.rayleigh_distance(),
                                                        cfg.grid().carriers_hz, effective, grid_spec);
                std::ofstream out(bp_out);
                if (!out)
                    throw std::runtime_error("cannot open output file: " + bp_out);
                write_beampattern_csv(bp, out);
                std::printf("wrote beampattern (%dx%d, %zu layers) to %s\n", grid_spec.num_ranges,
                            grid_spec.num_angles, bp.layers.size() + 1, bp_out.c_str());
            }
            return 0;
        }
        catch (const std::invalid_argument &e)
        {
            std::fprintf(stderr, "usage error: %s\n", e.what());
            return 2;
        }
        catch (const std::exception &e)
        {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    }
}
