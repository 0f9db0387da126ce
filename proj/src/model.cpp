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

#include "robmdp/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "robmdp/errors.hpp"

namespace robmdp {

using ojson = nlohmann::ordered_json;

namespace {

std::string idx(long i) { return "[" + std::to_string(i) + "]"; }

const ojson& require_field(const ojson& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing required field \"" + key + "\"");
    return *it;
}

numvec as_numvec(const ojson& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
    numvec out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError(where + idx(static_cast<long>(i)) + ": expected a number");
        out.push_back(j[i].get<prec_t>());
    }
    return out;
}

} // namespace

void check_probability_row(const numvec& row, long expected_len, const std::string& field) {
    if (static_cast<long>(row.size()) != expected_len)
        throw ValidationError(field + ": length " + std::to_string(row.size()) + ", expected " +
                              std::to_string(expected_len));
    prec_t sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (!(row[j] >= 0.0))
            throw ValidationError(field + idx(static_cast<long>(j)) + " = " + std::to_string(row[j]) +
                                  " is negative (or NaN)");
        sum += row[j];
    }
    if (std::fabs(sum - 1.0) > ROW_SUM_TOL) {
        std::ostringstream msg;
        msg.precision(17);
        msg << field << ": row sums to " << sum << ", expected 1 within 1e-12; refusing to renormalize";
        throw ValidationError(msg.str());
    }
}

void validate_instance(const RobustMdpInstance& inst) {
    if (inst.n_states < 1) throw ValidationError("n_states = " + std::to_string(inst.n_states) + ", expected >= 1");
    if (inst.n_actions < 1)
        throw ValidationError("n_actions = " + std::to_string(inst.n_actions) + ", expected >= 1");

    if (static_cast<long>(inst.reward.size()) != inst.n_states)
        throw ValidationError("reward: " + std::to_string(inst.reward.size()) + " rows, expected n_states = " +
                              std::to_string(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s) {
        const numvec& row = inst.reward[static_cast<std::size_t>(s)];
        if (static_cast<long>(row.size()) != inst.n_actions)
            throw ValidationError("reward" + idx(s) + ": length " + std::to_string(row.size()) +
                                  ", expected n_actions = " + std::to_string(inst.n_actions));
        for (long a = 0; a < inst.n_actions; ++a) {
            const prec_t r = row[static_cast<std::size_t>(a)];
            if (!(r >= 0.0 && r <= 1.0))
                throw ValidationError("reward" + idx(s) + idx(a) + " = " + std::to_string(r) +
                                      " outside [0,1]");
        }
    }

    switch (inst.controller_set.variant) {
    case QVariant::DiracOnly:
    case QVariant::FullSimplex:
        if (!inst.controller_set.distributions.empty())
            throw ValidationError("controller_set.distributions: must be absent for this variant");
        break;
    case QVariant::FiniteDistributions: {
        const auto& ds = inst.controller_set.distributions;
        if (ds.empty()) throw ValidationError("controller_set.distributions: empty list");
        for (std::size_t i = 0; i < ds.size(); ++i)
            check_probability_row(ds[i], inst.n_actions,
                                  "controller_set.distributions" + idx(static_cast<long>(i)));
        break;
    }
    }

    if (static_cast<long>(inst.ambiguity.size()) != inst.n_states)
        throw ValidationError("ambiguity: " + std::to_string(inst.ambiguity.size()) +
                              " entries, expected n_states = " + std::to_string(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s) {
        const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
        const std::string where = "ambiguity" + idx(s);
        if (amb.variant == PVariant::FiniteKernels) {
            if (!amb.nominal.empty() || !amb.radius.empty())
                throw ValidationError(where + ": nominal/radius must be absent for finite_kernels");
            if (amb.kernels.empty()) throw ValidationError(where + ".kernels: empty list");
            for (std::size_t k = 0; k < amb.kernels.size(); ++k) {
                const auto& kern = amb.kernels[k];
                if (static_cast<long>(kern.size()) != inst.n_actions)
                    throw ValidationError(where + ".kernels" + idx(static_cast<long>(k)) + ": " +
                                          std::to_string(kern.size()) + " rows, expected n_actions = " +
                                          std::to_string(inst.n_actions));
                for (long a = 0; a < inst.n_actions; ++a)
                    check_probability_row(kern[static_cast<std::size_t>(a)], inst.n_states,
                                          where + ".kernels" + idx(static_cast<long>(k)) + idx(a));
            }
        } else {
            if (!amb.kernels.empty())
                throw ValidationError(where + ": kernels must be absent for sa_tv");
            if (static_cast<long>(amb.nominal.size()) != inst.n_actions)
                throw ValidationError(where + ".nominal: " + std::to_string(amb.nominal.size()) +
                                      " rows, expected n_actions = " + std::to_string(inst.n_actions));
            for (long a = 0; a < inst.n_actions; ++a)
                check_probability_row(amb.nominal[static_cast<std::size_t>(a)], inst.n_states,
                                      where + ".nominal" + idx(a));
            if (static_cast<long>(amb.radius.size()) != inst.n_actions)
                throw ValidationError(where + ".radius: length " + std::to_string(amb.radius.size()) +
                                      ", expected n_actions = " + std::to_string(inst.n_actions));
            for (long a = 0; a < inst.n_actions; ++a) {
                const prec_t th = amb.radius[static_cast<std::size_t>(a)];
                if (!(th >= 0.0 && th <= 1.0))
                    throw ValidationError(where + ".radius" + idx(a) + " = " + std::to_string(th) +
                                          " outside [0,1]");
            }
        }
    }

    if (!inst.state_labels.empty() && static_cast<long>(inst.state_labels.size()) != inst.n_states)
        throw ValidationError("labels.states: " + std::to_string(inst.state_labels.size()) +
                              " entries, expected n_states = " + std::to_string(inst.n_states));
    if (!inst.action_labels.empty() && static_cast<long>(inst.action_labels.size()) != inst.n_actions)
        throw ValidationError("labels.actions: " + std::to_string(inst.action_labels.size()) +
                              " entries, expected n_actions = " + std::to_string(inst.n_actions));
}

RobustMdpInstance parse_instance(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("instance JSON: top level must be an object");

    const ojson& fmt = require_field(j, "format", "instance");
    if (!fmt.is_number_integer() || fmt.get<long>() != 1)
        throw ParseError("format: expected the integer 1");

    RobustMdpInstance inst;
    inst.n_states = require_field(j, "n_states", "instance").get<long>();
    inst.n_actions = require_field(j, "n_actions", "instance").get<long>();

    const ojson& rew = require_field(j, "reward", "instance");
    if (!rew.is_array()) throw ParseError("reward: expected an array of arrays");
    for (std::size_t s = 0; s < rew.size(); ++s)
        inst.reward.push_back(as_numvec(rew[s], "reward" + idx(static_cast<long>(s))));

    const ojson& cs = require_field(j, "controller_set", "instance");
    const std::string qv = require_field(cs, "variant", "controller_set").get<std::string>();
    if (qv == "dirac_only") {
        inst.controller_set.variant = QVariant::DiracOnly;
    } else if (qv == "full_simplex") {
        inst.controller_set.variant = QVariant::FullSimplex;
    } else if (qv == "finite") {
        inst.controller_set.variant = QVariant::FiniteDistributions;
        const ojson& ds = require_field(cs, "distributions", "controller_set");
        if (!ds.is_array()) throw ParseError("controller_set.distributions: expected an array");
        for (std::size_t i = 0; i < ds.size(); ++i)
            inst.controller_set.distributions.push_back(
                as_numvec(ds[i], "controller_set.distributions" + idx(static_cast<long>(i))));
    } else {
        throw ParseError("controller_set.variant: unknown value \"" + qv + "\"");
    }

    const ojson& ambs = require_field(j, "ambiguity", "instance");
    if (!ambs.is_array()) throw ParseError("ambiguity: expected an array");
    for (std::size_t s = 0; s < ambs.size(); ++s) {
        const ojson& a = ambs[s];
        const std::string where = "ambiguity" + idx(static_cast<long>(s));
        StateAmbiguity amb;
        const std::string pv = require_field(a, "variant", where).get<std::string>();
        if (pv == "finite_kernels") {
            amb.variant = PVariant::FiniteKernels;
            const ojson& ks = require_field(a, "kernels", where);
            if (!ks.is_array()) throw ParseError(where + ".kernels: expected an array");
            for (std::size_t k = 0; k < ks.size(); ++k) {
                const ojson& kern = ks[k];
                if (!kern.is_array())
                    throw ParseError(where + ".kernels" + idx(static_cast<long>(k)) + ": expected an array");
                std::vector<numvec> rows;
                for (std::size_t r = 0; r < kern.size(); ++r)
                    rows.push_back(as_numvec(kern[r], where + ".kernels" + idx(static_cast<long>(k)) +
                                                          idx(static_cast<long>(r))));
                amb.kernels.push_back(std::move(rows));
            }
        } else if (pv == "sa_tv") {
            amb.variant = PVariant::SaTvBalls;
            const ojson& nom = require_field(a, "nominal", where);
            if (!nom.is_array()) throw ParseError(where + ".nominal: expected an array");
            for (std::size_t r = 0; r < nom.size(); ++r)
                amb.nominal.push_back(as_numvec(nom[r], where + ".nominal" + idx(static_cast<long>(r))));
            amb.radius = as_numvec(require_field(a, "radius", where), where + ".radius");
        } else {
            throw ParseError(where + ".variant: unknown value \"" + pv + "\"");
        }
        inst.ambiguity.push_back(std::move(amb));
    }

    if (j.contains("labels")) {
        const ojson& lab = j["labels"];
        if (!lab.is_object()) throw ParseError("labels: expected an object");
        if (lab.contains("states"))
            for (const auto& v : lab["states"]) inst.state_labels.push_back(v.get<std::string>());
        if (lab.contains("actions"))
            for (const auto& v : lab["actions"]) inst.action_labels.push_back(v.get<std::string>());
    }

    validate_instance(inst);
    return inst;
}

RobustMdpInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

std::string dump_instance(const RobustMdpInstance& inst) {
    ojson j;
    j["format"] = 1;
    j["n_states"] = inst.n_states;
    j["n_actions"] = inst.n_actions;
    j["reward"] = inst.reward;
    ojson cs;
    switch (inst.controller_set.variant) {
    case QVariant::DiracOnly: cs["variant"] = "dirac_only"; break;
    case QVariant::FullSimplex: cs["variant"] = "full_simplex"; break;
    case QVariant::FiniteDistributions:
        cs["variant"] = "finite";
        cs["distributions"] = inst.controller_set.distributions;
        break;
    }
    j["controller_set"] = cs;
    ojson ambs = ojson::array();
    for (const StateAmbiguity& amb : inst.ambiguity) {
        ojson a;
        if (amb.variant == PVariant::FiniteKernels) {
            a["variant"] = "finite_kernels";
            a["kernels"] = amb.kernels;
        } else {
            a["variant"] = "sa_tv";
            a["nominal"] = amb.nominal;
            a["radius"] = amb.radius;
        }
        ambs.push_back(a);
    }
    j["ambiguity"] = ambs;
    if (!inst.state_labels.empty() || !inst.action_labels.empty()) {
        ojson lab;
        if (!inst.state_labels.empty()) lab["states"] = inst.state_labels;
        if (!inst.action_labels.empty()) lab["actions"] = inst.action_labels;
        j["labels"] = lab;
    }
    return j.dump(2) + "\n";
}

void save_instance(const RobustMdpInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << dump_instance(inst);
}

void validate_controller_policy(const RobustMdpInstance& inst, const StationaryControllerPolicy& pol) {
    if (static_cast<long>(pol.rows.size()) != inst.n_states)
        throw ValidationError("controller policy: " + std::to_string(pol.rows.size()) +
                              " rows, expected n_states = " + std::to_string(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s) {
        const numvec& row = pol.rows[static_cast<std::size_t>(s)];
        check_probability_row(row, inst.n_actions, "controller policy row" + idx(s));
        if (inst.controller_set.variant == QVariant::DiracOnly) {
            for (prec_t v : row)
                if (v != 0.0 && v != 1.0)
                    throw ValidationError("controller policy row" + idx(s) +
                                          ": must be one-hot under dirac_only");
        } else if (inst.controller_set.variant == QVariant::FiniteDistributions) {
            bool found = false;
            for (const numvec& cand : inst.controller_set.distributions)
                if (linf_dist(cand, row) <= 1e-12) {
                    found = true;
                    break;
                }
            if (!found)
                throw ValidationError("controller policy row" + idx(s) +
                                      ": not a member of the finite distribution list");
        }
    }
}

void validate_adversary_policy(const RobustMdpInstance& inst, const StationaryAdversaryPolicy& pol) {
    if (static_cast<long>(pol.choices.size()) != inst.n_states)
        throw ValidationError("adversary policy: " + std::to_string(pol.choices.size()) +
                              " choices, expected n_states = " + std::to_string(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s) {
        const auto& ch = pol.choices[static_cast<std::size_t>(s)];
        const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
        const std::string where = "adversary policy choice" + idx(s);
        if (static_cast<long>(ch.rows.size()) != inst.n_actions)
            throw ValidationError(where + ": " + std::to_string(ch.rows.size()) +
                                  " rows, expected n_actions = " + std::to_string(inst.n_actions));
        for (long a = 0; a < inst.n_actions; ++a)
            check_probability_row(ch.rows[static_cast<std::size_t>(a)], inst.n_states, where + idx(a));

        if (amb.variant == PVariant::FiniteKernels) {
            if (ch.kernel_index >= 0) {
                if (ch.kernel_index >= static_cast<long>(amb.kernels.size()))
                    throw ValidationError(where + ".kernel_index = " + std::to_string(ch.kernel_index) +
                                          " out of range");
                for (long a = 0; a < inst.n_actions; ++a)
                    if (linf_dist(ch.rows[static_cast<std::size_t>(a)],
                                  amb.kernels[static_cast<std::size_t>(ch.kernel_index)]
                                             [static_cast<std::size_t>(a)]) > 1e-12)
                        throw ValidationError(where + ": rows disagree with kernel " +
                                              std::to_string(ch.kernel_index));
            } else {
                bool found = false;
                for (const auto& kern : amb.kernels) {
                    bool all = true;
                    for (long a = 0; a < inst.n_actions && all; ++a)
                        all = linf_dist(ch.rows[static_cast<std::size_t>(a)],
                                        kern[static_cast<std::size_t>(a)]) <= 1e-12;
                    if (all) {
                        found = true;
                        break;
                    }
                }
                if (!found) throw ValidationError(where + ": rows match no kernel in the list");
            }
        } else {
            for (long a = 0; a < inst.n_actions; ++a) {
                prec_t l1 = 0.0;
                for (long t = 0; t < inst.n_states; ++t)
                    l1 += std::fabs(ch.rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)] -
                                    amb.nominal[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)]);
                if (l1 / 2.0 > amb.radius[static_cast<std::size_t>(a)] + 1e-12)
                    throw ValidationError(where + idx(a) + ": TV distance " + std::to_string(l1 / 2.0) +
                                          " exceeds radius " +
                                          std::to_string(amb.radius[static_cast<std::size_t>(a)]));
            }
        }
    }
}

StationaryControllerPolicy dirac_policy(const RobustMdpInstance& inst, const indvec& actions) {
    if (static_cast<long>(actions.size()) != inst.n_states)
        throw DimensionMismatch("dirac_policy: " + std::to_string(actions.size()) +
                                " actions, expected n_states = " + std::to_string(inst.n_states));
    StationaryControllerPolicy pol;
    pol.rows.assign(static_cast<std::size_t>(inst.n_states),
                    numvec(static_cast<std::size_t>(inst.n_actions), 0.0));
    for (long s = 0; s < inst.n_states; ++s) {
        const long a = actions[static_cast<std::size_t>(s)];
        if (a < 0 || a >= inst.n_actions)
            throw ValidationError("dirac_policy: action " + std::to_string(a) + " out of range at state " +
                                  std::to_string(s));
        pol.rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = 1.0;
    }
    return pol;
}

StationaryAdversaryPolicy kernel_policy(const RobustMdpInstance& inst, const indvec& kernel_indices) {
    if (static_cast<long>(kernel_indices.size()) != inst.n_states)
        throw DimensionMismatch("kernel_policy: " + std::to_string(kernel_indices.size()) +
                                " indices, expected n_states = " + std::to_string(inst.n_states));
    StationaryAdversaryPolicy pol;
    for (long s = 0; s < inst.n_states; ++s) {
        const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
        const long k = kernel_indices[static_cast<std::size_t>(s)];
        StationaryAdversaryPolicy::StateChoice ch;
        if (amb.variant == PVariant::FiniteKernels) {
            if (k < 0 || k >= static_cast<long>(amb.kernels.size()))
                throw ValidationError("kernel_policy: kernel index " + std::to_string(k) +
                                      " out of range at state " + std::to_string(s));
            ch.kernel_index = k;
            ch.rows = amb.kernels[static_cast<std::size_t>(k)];
        } else {
            if (k != 0)
                throw ValidationError("kernel_policy: state " + std::to_string(s) +
                                      " has a TV ball; only index 0 (nominal) is addressable");
            ch.kernel_index = -1;
            ch.rows = amb.nominal;
        }
        pol.choices.push_back(std::move(ch));
    }
    return pol;
}

std::pair<std::vector<numvec>, numvec> induced_chain(const RobustMdpInstance& inst,
                                                     const StationaryControllerPolicy& ctrl,
                                                     const StationaryAdversaryPolicy& adv) {
    if (static_cast<long>(ctrl.rows.size()) != inst.n_states ||
        static_cast<long>(adv.choices.size()) != inst.n_states)
        throw DimensionMismatch("induced_chain: policy sizes do not match n_states");
    std::vector<numvec> rows(static_cast<std::size_t>(inst.n_states),
                             numvec(static_cast<std::size_t>(inst.n_states), 0.0));
    numvec rvec(static_cast<std::size_t>(inst.n_states), 0.0);
    for (long s = 0; s < inst.n_states; ++s) {
        prec_t rmix = 0.0;
        for (long a = 0; a < inst.n_actions; ++a) {
            const prec_t w = ctrl.rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
            if (w == 0.0) continue;
            rmix += w * inst.reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
            const numvec& prow = adv.choices[static_cast<std::size_t>(s)].rows[static_cast<std::size_t>(a)];
            for (long t = 0; t < inst.n_states; ++t)
                rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] +=
                    w * prow[static_cast<std::size_t>(t)];
        }
        rvec[static_cast<std::size_t>(s)] = rmix;
    }
    return {rows, rvec};
}

long controller_choice_count(const RobustMdpInstance& inst) {
    switch (inst.controller_set.variant) {
    case QVariant::DiracOnly: return inst.n_actions;
    case QVariant::FiniteDistributions:
        return static_cast<long>(inst.controller_set.distributions.size());
    case QVariant::FullSimplex:
        throw UnsupportedCombination("controller_choice_count: full_simplex is not enumerable");
    }
    return 0;
}

std::vector<numvec> controller_choices(const RobustMdpInstance& inst) {
    std::vector<numvec> out;
    if (inst.controller_set.variant == QVariant::DiracOnly) {
        for (long a = 0; a < inst.n_actions; ++a) {
            numvec row(static_cast<std::size_t>(inst.n_actions), 0.0);
            row[static_cast<std::size_t>(a)] = 1.0;
            out.push_back(std::move(row));
        }
    } else if (inst.controller_set.variant == QVariant::FiniteDistributions) {
        out = inst.controller_set.distributions;
    } else {
        throw UnsupportedCombination("controller_choices: full_simplex is not enumerable");
    }
    return out;
}

} // namespace robmdp
