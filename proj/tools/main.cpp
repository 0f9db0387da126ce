// This file is part of ROBMDP, a C++ library for analyzing robust Markov
// decision processes under the long-run average reward criterion.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to
// deal in the Software without restriction, including without limitation the
// rights to use, copy, modify, merge, publish, distribute, sublicense, and/or
// sell copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING
// FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
// DEALINGS IN THE SOFTWARE.

// Command-line front end. Exit codes: 0 success, 2 validation/parse error,
// 3 solver non-convergence (or a failed demo threshold), 4 precondition or
// capability failure. All randomness flows from --seed; outputs carry no
// wall-clock timestamps so reruns are byte-identical.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robmdp/bellman.hpp"
#include "robmdp/errors.hpp"
#include "robmdp/gain.hpp"
#include "robmdp/model.hpp"
#include "robmdp/oracle.hpp"
#include "robmdp/simulate.hpp"
#include "robmdp/structure.hpp"

using namespace robmdp;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt17(prec_t x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Print to stdout or, when --out was given, to that file.
void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw ValidationError("cannot open output file: " + out_path);
    f << text;
}

void emit_json(const ojson& j, const std::string& out_path) { emit_text(j.dump(2) + "\n", out_path); }

const char* orient_name(Orientation o) { return o == Orientation::SupInf ? "supinf" : "infsup"; }

Orientation parse_orientation(const std::string& s) {
    if (s == "supinf") return Orientation::SupInf;
    if (s == "infsup") return Orientation::InfSup;
    throw ValidationError("--orientation: expected supinf or infsup, got \"" + s + "\"");
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, ',')) out.push_back(tok);
    return out;
}

long to_long(const std::string& tok, const std::string& flag) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(flag + ": cannot parse integer \"" + tok + "\"");
    }
}

prec_t to_double(const std::string& tok, const std::string& flag) {
    try {
        std::size_t pos = 0;
        const prec_t v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(flag + ": cannot parse number \"" + tok + "\"");
    }
}

indvec parse_longs(const std::string& s, const std::string& flag) {
    indvec out;
    for (const std::string& tok : split_commas(s)) out.push_back(to_long(tok, flag));
    return out;
}

numvec parse_doubles(const std::string& s, const std::string& flag) {
    numvec out;
    for (const std::string& tok : split_commas(s)) out.push_back(to_double(tok, flag));
    return out;
}

/// "uniform" (default), "state:s" for a unit mass, or an explicit comma list.
numvec parse_mu(const std::string& spec, long n) {
    if (spec.empty() || spec == "uniform")
        return numvec(static_cast<std::size_t>(n), 1.0 / static_cast<prec_t>(n));
    if (spec.rfind("state:", 0) == 0) {
        const long s = to_long(spec.substr(6), "--mu");
        if (s < 0 || s >= n)
            throw ValidationError("--mu: state " + std::to_string(s) + " out of range [0, " +
                                  std::to_string(n) + ")");
        numvec mu(static_cast<std::size_t>(n), 0.0);
        mu[static_cast<std::size_t>(s)] = 1.0;
        return mu;
    }
    numvec mu = parse_doubles(spec, "--mu");
    check_probability_row(mu, n, "--mu");
    return mu;
}

/// "learner", "actions:a0,a1,...", or "dist:i0,i1,..." (indices into the
/// finite distribution list). Empty means the first action everywhere.
PolicySpec parse_controller(const std::string& spec, const RobustMdpInstance& inst) {
    PolicySpec out;
    if (spec == "learner") {
        out.kind = ControllerKind::ModelBasedLearner;
        return out;
    }
    if (spec.empty()) {
        out.stationary = dirac_policy(inst, indvec(static_cast<std::size_t>(inst.n_states), 0));
        return out;
    }
    if (spec.rfind("actions:", 0) == 0) {
        const indvec acts = parse_longs(spec.substr(8), "--controller");
        if (static_cast<long>(acts.size()) != inst.n_states)
            throw ValidationError("--controller: " + std::to_string(acts.size()) +
                                  " actions for " + std::to_string(inst.n_states) + " states");
        out.stationary = dirac_policy(inst, acts);
        return out;
    }
    if (spec.rfind("dist:", 0) == 0) {
        if (inst.controller_set.variant != QVariant::FiniteDistributions)
            throw ValidationError("--controller dist: needs a finite distribution set");
        const indvec ids = parse_longs(spec.substr(5), "--controller");
        if (static_cast<long>(ids.size()) != inst.n_states)
            throw ValidationError("--controller: " + std::to_string(ids.size()) +
                                  " indices for " + std::to_string(inst.n_states) + " states");
        const auto& ds = inst.controller_set.distributions;
        for (long i : ids)
            if (i < 0 || i >= static_cast<long>(ds.size()))
                throw ValidationError("--controller: distribution index " + std::to_string(i) +
                                      " out of range");
        for (long i : ids) out.stationary.rows.push_back(ds[static_cast<std::size_t>(i)]);
        return out;
    }
    throw ValidationError("--controller: expected 'learner', 'actions:a0,a1,...', or 'dist:i0,i1,...'");
}

/// "nominal" (kernel 0 / nominal rows, the default) or "kernels:k0,k1,...".
AdversarySpec parse_adversary(const std::string& spec, const RobustMdpInstance& inst) {
    AdversarySpec out;
    if (spec.empty() || spec == "nominal") {
        out.stationary = kernel_policy(inst, indvec(static_cast<std::size_t>(inst.n_states), 0));
        return out;
    }
    if (spec.rfind("kernels:", 0) == 0) {
        const indvec ids = parse_longs(spec.substr(8), "--adversary");
        if (static_cast<long>(ids.size()) != inst.n_states)
            throw ValidationError("--adversary: " + std::to_string(ids.size()) +
                                  " kernel indices for " + std::to_string(inst.n_states) + " states");
        out.stationary = kernel_policy(inst, ids);
        return out;
    }
    throw ValidationError("--adversary: expected 'nominal' or 'kernels:k0,k1,...'");
}

ojson gain_json(const GainSolution& g) {
    ojson out;
    out["orientation"] = orient_name(g.orientation);
    out["verdict"] = to_string(g.verdict);
    out["alpha"] = g.alpha;
    out["u"] = g.u;
    out["residual"] = g.residual;
    out["gamma_trace"] = g.gamma_trace;
    out["iterations"] = g.iterations;
    return out;
}

ojson opt_bool_json(const std::optional<bool>& v) { return v.has_value() ? ojson(*v) : ojson(nullptr); }

/// mu-aggregates recomputed from the oracle's value table.
std::pair<prec_t, prec_t> oracle_aggregates(const OracleResult& o, const numvec& mu) {
    prec_t supinf = -INFTY, infsup = INFTY;
    for (long c = 0; c < o.n_controller; ++c) {
        prec_t worst = INFTY;
        for (long a = 0; a < o.n_adversary; ++a)
            worst = std::min(worst, dot(mu, o.values[static_cast<std::size_t>(c * o.n_adversary + a)]));
        supinf = std::max(supinf, worst);
    }
    for (long a = 0; a < o.n_adversary; ++a) {
        prec_t best = -INFTY;
        for (long c = 0; c < o.n_controller; ++c)
            best = std::max(best, dot(mu, o.values[static_cast<std::size_t>(c * o.n_adversary + a)]));
        infsup = std::min(infsup, best);
    }
    return {supinf, infsup};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust average-reward MDP toolkit"};
    app.require_subcommand(1);

    std::string instance_path, out_path, orientation = "supinf", grid_spec, mu_spec;
    std::string controller_spec, adversary_spec, csv_out;
    prec_t tol = 1e-6, gamma = 0.9;
    long sim_steps = 10000, demo_steps = 100000, trajectories = 8;
    std::uint64_t seed = 0;
    bool rvi = false, witnesses = false, as_json = false;

    CLI::App* sc_validate = app.add_subcommand("validate", "Parse and validate an instance file");
    sc_validate->add_option("--instance", instance_path, "Instance JSON path")->required();
    sc_validate->add_option("--out", out_path, "Write output to a file instead of stdout");

    CLI::App* sc_disc = app.add_subcommand("solve-discounted", "Discounted robust value function");
    sc_disc->add_option("--instance", instance_path)->required();
    sc_disc->add_option("--gamma", gamma, "Discount factor in (0,1)")->required();
    sc_disc->add_option("--orientation", orientation, "supinf (default) or infsup");
    sc_disc->add_option("--tol", tol, "Value accuracy (default 1e-6)");
    sc_disc->add_option("--out", out_path);

    CLI::App* sc_gain = app.add_subcommand("solve-gain", "Constant-gain solution via vanishing discounts");
    sc_gain->add_option("--instance", instance_path)->required();
    sc_gain->add_option("--orientation", orientation, "supinf (default) or infsup");
    sc_gain->add_option("--tol", tol, "Verified residual target (default 1e-6)");
    sc_gain->add_flag("--experimental-rvi", rvi, "Use relative value iteration at gamma = 1");
    sc_gain->add_option("--out", out_path);

    CLI::App* sc_span = app.add_subcommand("span-curve", "Span of discounted values along a discount grid");
    sc_span->add_option("--instance", instance_path)->required();
    sc_span->add_option("--orientation", orientation, "supinf (default) or infsup");
    sc_span->add_option("--grid", grid_spec, "Comma list of discounts (default 0.9,0.99,0.999)");
    sc_span->add_option("--tol", tol, "Per-solve accuracy (default 1e-6)");
    sc_span->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI::App* sc_struct = app.add_subcommand("check-structure", "Communication / unichain / class-overlap checks");
    sc_struct->add_option("--instance", instance_path)->required();
    sc_struct->add_flag("--witnesses", witnesses, "Include witness strings in the report");
    sc_struct->add_option("--out", out_path);

    CLI::App* sc_sim = app.add_subcommand("simulate", "Monte Carlo trajectories under a policy pair");
    sc_sim->add_option("--instance", instance_path)->required();
    sc_sim->add_option("--controller", controller_spec, "'learner', 'actions:...', or 'dist:...'");
    sc_sim->add_option("--adversary", adversary_spec, "'nominal' or 'kernels:...'");
    sc_sim->add_option("--steps", sim_steps, "Steps per trajectory (default 10000)");
    sc_sim->add_option("--trajectories", trajectories, "Trajectory count (default 8)");
    sc_sim->add_option("--seed", seed, "RNG seed (default 0)");
    sc_sim->add_option("--mu", mu_spec, "'uniform', 'state:s', or a comma list");
    sc_sim->add_option("--csv-out", csv_out, "Write the thinned running-average series as CSV");
    sc_sim->add_option("--out", out_path);

    CLI::App* sc_oracle = app.add_subcommand("oracle-compare", "Solver gain vs exhaustive stationary oracle");
    sc_oracle->add_option("--instance", instance_path)->required();
    sc_oracle->add_option("--tol", tol, "Gain solver tolerance (default 1e-6)");
    sc_oracle->add_flag("--json", as_json, "Machine-readable output instead of the table");
    sc_oracle->add_option("--out", out_path);

    CLI::App* sc_demo = app.add_subcommand("hd-s-demo", "Learner-closes-the-gap demonstration");
    sc_demo->add_option("--instance", instance_path)->required();
    sc_demo->add_option("--tol", tol, "Gain solver tolerance (default 1e-6)");
    sc_demo->add_option("--steps", demo_steps, "Steps per trajectory (default 100000)");
    sc_demo->add_option("--trajectories", trajectories, "Trajectory count (default 8)");
    sc_demo->add_option("--seed", seed, "RNG seed (default 0)");
    sc_demo->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(sc_validate)) {
            const RobustMdpInstance inst = load_instance(instance_path);
            ojson out;
            out["valid"] = true;
            out["n_states"] = inst.n_states;
            out["n_actions"] = inst.n_actions;
            emit_json(out, out_path);
            return 0;
        }

        if (app.got_subcommand(sc_disc)) {
            const RobustMdpInstance inst = load_instance(instance_path);
            const Orientation orient = parse_orientation(orientation);
            const ValueFunction vf = solve_discounted(inst, gamma, orient, tol);
            ojson out;
            out["gamma"] = vf.gamma;
            out["orientation"] = orient_name(vf.orientation);
            out["values"] = vf.values;
            out["residual"] = vf.residual;
            out["iterations"] = vf.iterations;
            emit_json(out, out_path);
            return 0;
        }

        if (app.got_subcommand(sc_gain)) {
            const RobustMdpInstance inst = load_instance(instance_path);
            const Orientation orient = parse_orientation(orientation);
            const GainSolution g =
                rvi ? relative_value_iteration(inst, orient, tol) : solve_constant_gain(inst, orient, tol);
            emit_json(gain_json(g), out_path);
            return g.verdict == GainVerdict::Converged ? 0 : 3;
        }

        if (app.got_subcommand(sc_span)) {
            const RobustMdpInstance inst = load_instance(instance_path);
            const Orientation orient = parse_orientation(orientation);
            const numvec grid =
                grid_spec.empty() ? numvec{0.9, 0.99, 0.999} : parse_doubles(grid_spec, "--grid");
            std::string csv = "gamma,span,alpha_proxy\n";
            for (const SpanPoint& p : span_curve(inst, grid, orient, tol))
                csv += fmt17(p.gamma) + "," + fmt17(p.span_value) + "," + fmt17(p.alpha_proxy) + "\n";
            emit_text(csv, out_path);
            return 0;
        }

        if (app.got_subcommand(sc_struct)) {
            const RobustMdpInstance inst = load_instance(instance_path);
            const StructureReport rep = analyze_structure(inst);
            ojson out;
            out["controller_comm"] = to_string(rep.controller_comm.verdict);
            out["adversary_comm"] = to_string(rep.adversary_comm.verdict);
            out["all_unichain"] = opt_bool_json(rep.all_unichain.value);
            out["occcc_controller"] = opt_bool_json(rep.occcc_controller.value);
            out["occcc_adversary"] = opt_bool_json(rep.occcc_adversary.value);
            out["notes"] = rep.notes;
            if (witnesses) {
                out["controller_comm_witnesses"] = rep.controller_comm.witnesses;
                out["adversary_comm_witnesses"] = rep.adversary_comm.witnesses;
                out["unichain_witnesses"] = rep.all_unichain.witnesses;
                out["occcc_controller_witnesses"] = rep.occcc_controller.witnesses;
                out["occcc_adversary_witnesses"] = rep.occcc_adversary.witnesses;
            }
            emit_json(out, out_path);
            return 0;
        }

        if (app.got_subcommand(sc_sim)) {
            const RobustMdpInstance inst = load_instance(instance_path);
            const PolicySpec ctrl = parse_controller(controller_spec, inst);
            const AdversarySpec adv = parse_adversary(adversary_spec, inst);
            const numvec mu = parse_mu(mu_spec, inst.n_states);
            const RunStats stats = run(inst, mu, ctrl, adv, sim_steps, trajectories, seed);
            if (!csv_out.empty()) {
                std::string csv = "step,avg\n";
                for (const auto& [step, avg] : stats.series)
                    csv += std::to_string(step) + "," + fmt17(avg) + "\n";
                emit_text(csv, csv_out);
            }
            ojson out;
            out["steps"] = stats.n_steps;
            out["trajectories"] = stats.n_trajectories;
            out["seed"] = stats.seed;
            out["mean"] = stats.mean;
            out["std_error"] = stats.std_error;
            out["limsup_proxy"] = stats.limsup_proxy;
            out["liminf_proxy"] = stats.liminf_proxy;
            out["trajectory_means"] = stats.trajectory_means;
            if (!stats.hitting_times.empty()) out["hitting_times"] = stats.hitting_times;
            emit_json(out, out_path);
            return 0;
        }

        if (app.got_subcommand(sc_oracle)) {
            const RobustMdpInstance inst = load_instance(instance_path);
            const GainSolution gsup = solve_constant_gain(inst, Orientation::SupInf, tol);
            const GainSolution ginf = solve_constant_gain(inst, Orientation::InfSup, tol);
            const numvec uniform(static_cast<std::size_t>(inst.n_states),
                                 1.0 / static_cast<prec_t>(inst.n_states));
            const OracleResult oracle = exhaustive_values(inst, uniform);

            std::vector<std::pair<std::string, numvec>> mus;
            mus.emplace_back("uniform", uniform);
            for (long s = 0; s < inst.n_states; ++s) {
                numvec unit(static_cast<std::size_t>(inst.n_states), 0.0);
                unit[static_cast<std::size_t>(s)] = 1.0;
                mus.emplace_back("state:" + std::to_string(s), std::move(unit));
            }

            if (as_json) {
                ojson out;
                out["alpha_supinf"] = gsup.alpha;
                out["verdict_supinf"] = to_string(gsup.verdict);
                out["alpha_infsup"] = ginf.alpha;
                out["verdict_infsup"] = to_string(ginf.verdict);
                ojson rows = ojson::array();
                for (const auto& [name, mu] : mus) {
                    const auto [osup, oinf] = oracle_aggregates(oracle, mu);
                    ojson row;
                    row["mu"] = name;
                    row["oracle_supinf"] = osup;
                    row["oracle_infsup"] = oinf;
                    rows.push_back(row);
                }
                out["oracle"] = rows;
                emit_json(out, out_path);
            } else {
                std::ostringstream os;
                os << "solver gain (vanishing discount):\n";
                os << "  supinf alpha = " << fmt17(gsup.alpha) << "  (" << to_string(gsup.verdict) << ")\n";
                os << "  infsup alpha = " << fmt17(ginf.alpha) << "  (" << to_string(ginf.verdict) << ")\n";
                os << "oracle over stationary vertex policies (" << oracle.n_controller << " x "
                   << oracle.n_adversary << " pairs):\n";
                os << "  " << std::left << std::setw(12) << "mu" << std::setw(24) << "supinf"
                   << "infsup\n";
                for (const auto& [name, mu] : mus) {
                    const auto [osup, oinf] = oracle_aggregates(oracle, mu);
                    os << "  " << std::left << std::setw(12) << name << std::setw(24) << fmt17(osup)
                       << fmt17(oinf) << "\n";
                }
                emit_text(os.str(), out_path);
            }
            return gsup.verdict == GainVerdict::Converged && ginf.verdict == GainVerdict::Converged ? 0 : 3;
        }

        if (app.got_subcommand(sc_demo)) {
            const RobustMdpInstance inst = load_instance(instance_path);
            const GapDemoReport rep = hd_s_gap_demo(inst, tol, demo_steps, trajectories, seed);
            ojson out;
            out["alpha_star"] = rep.duality.alpha_supinf;
            out["alpha_prime"] = rep.duality.alpha_infsup;
            out["gap"] = rep.duality.gap;
            out["stationary_optimal"] = rep.duality.stationary_optimal;
            out["adversary_comm"] = to_string(rep.adversary_comm);
            out["adversary_means"] = rep.adversary_means;
            out["learner_min_mean"] = rep.learner_min_mean;
            out["se_at_min"] = rep.se_at_min;
            out["threshold"] = rep.threshold;
            out["pass"] = rep.pass;
            emit_json(out, out_path);
            return rep.pass ? 0 : 3;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const MaxItersExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ToleranceNotMet& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        // UnsupportedCombination, TargetUnreachable, SingularSystem,
        // PreconditionFailed, ExplosionGuard, EnumerationCapExceeded,
        // ExtractionFailed: capability / precondition failures.
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
