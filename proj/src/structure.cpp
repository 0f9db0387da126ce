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

#include "robmdp/structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "robmdp/ambiguity.hpp"
#include "robmdp/enumerate.hpp"
#include "robmdp/errors.hpp"
#include "robmdp/linalg.hpp"

namespace robmdp {

namespace {

BoolMat make_graph(long n) { return BoolMat(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false)); }

/// Per-(state, action) mask of states receiving positive mass under some
/// admissible kernel. Exact for both variants: a positive-radius ball can
/// always route mass onto any receiver state.
std::vector<std::vector<std::vector<bool>>> action_support_unions(const RobustMdpInstance& inst) {
    std::vector<std::vector<std::vector<bool>>> out(static_cast<std::size_t>(inst.n_states));
    for (long s = 0; s < inst.n_states; ++s) {
        const StateAmbiguity& amb = inst.ambiguity[static_cast<std::size_t>(s)];
        out[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(inst.n_actions),
                                                std::vector<bool>(static_cast<std::size_t>(inst.n_states), false));
        for (long a = 0; a < inst.n_actions; ++a) {
            auto& mask = out[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
            if (amb.variant == PVariant::FiniteKernels) {
                for (const KernelBundle& k : amb.kernels)
                    for (long t = 0; t < inst.n_states; ++t)
                        if (k[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)] > 0.0)
                            mask[static_cast<std::size_t>(t)] = true;
            } else if (amb.radius[static_cast<std::size_t>(a)] > 0.0) {
                mask.assign(static_cast<std::size_t>(inst.n_states), true);
            } else {
                for (long t = 0; t < inst.n_states; ++t)
                    if (amb.nominal[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)] > 0.0)
                        mask[static_cast<std::size_t>(t)] = true;
            }
        }
    }
    return out;
}

std::vector<bool> allowed_action_mask(const RobustMdpInstance& inst) {
    std::vector<bool> allowed(static_cast<std::size_t>(inst.n_actions), true);
    if (inst.controller_set.variant == QVariant::FiniteDistributions) {
        allowed.assign(static_cast<std::size_t>(inst.n_actions), false);
        for (const numvec& phi : inst.controller_set.distributions)
            for (long a = 0; a < inst.n_actions; ++a)
                if (phi[static_cast<std::size_t>(a)] > 0.0) allowed[static_cast<std::size_t>(a)] = true;
    }
    return allowed;
}

/// Support graph of the chain induced by per-state action supports and a
/// fixed adversary product.
BoolMat chain_support_graph(const RobustMdpInstance& inst,
                            const std::vector<const std::vector<bool>*>& supports,
                            const StationaryAdversaryPolicy& adv) {
    BoolMat g = make_graph(inst.n_states);
    for (long s = 0; s < inst.n_states; ++s)
        for (long a = 0; a < inst.n_actions; ++a) {
            if (!(*supports[static_cast<std::size_t>(s)])[static_cast<std::size_t>(a)]) continue;
            const numvec& row = adv.choices[static_cast<std::size_t>(s)].rows[static_cast<std::size_t>(a)];
            for (long t = 0; t < inst.n_states; ++t)
                if (row[static_cast<std::size_t>(t)] > 0.0) g[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = true;
        }
    return g;
}

bool strongly_connected(const BoolMat& closure) {
    const std::size_t n = closure.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && !closure[i][j]) return false;
    return true;
}

/// States belonging to a closed strongly connected component of the chain.
std::vector<bool> recurrent_states(const BoolMat& adj) {
    const std::size_t n = adj.size();
    const BoolMat cl = transitive_closure(adj);
    std::vector<bool> rec(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        bool closed = true;
        for (std::size_t x = 0; x < n && closed; ++x) {
            const bool in_scc_x = x == i || (cl[i][x] && cl[x][i]);
            if (!in_scc_x) continue;
            for (std::size_t y = 0; y < n && closed; ++y)
                if (adj[x][y] && !(y == i || (cl[i][y] && cl[y][i]))) closed = false;
        }
        rec[i] = closed;
    }
    return rec;
}

std::vector<indvec> closed_classes(const BoolMat& adj) {
    const std::size_t n = adj.size();
    const BoolMat cl = transitive_closure(adj);
    const std::vector<bool> rec = recurrent_states(adj);
    std::vector<indvec> classes;
    for (std::size_t i = 0; i < n; ++i) {
        if (!rec[i]) continue;
        indvec cls;
        for (std::size_t j = 0; j < n; ++j)
            if (j == i || (cl[i][j] && cl[j][i])) cls.push_back(static_cast<long>(j));
        if (std::find(classes.begin(), classes.end(), cls) == classes.end())
            classes.push_back(std::move(cls));
    }
    return classes;
}

long capped_power(long base, long exp, long cap) {
    long prod = 1;
    for (long i = 0; i < exp; ++i) {
        if (base > 1 && prod > cap / base) return cap + 1;
        prod *= base;
        if (prod > cap) return cap + 1;
    }
    return prod;
}

std::string pattern_label(const indvec& digits) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < digits.size(); ++i) out << (i ? "," : "") << digits[i];
    out << "]";
    return out.str();
}

std::string state_set_label(const std::vector<bool>& member) {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (std::size_t i = 0; i < member.size(); ++i)
        if (member[i]) {
            out << (first ? "" : ",") << i;
            first = false;
        }
    out << "}";
    return out.str();
}

struct PatternIter {
    const ControllerPatterns& pats;
    indvec digits;
    indvec radix;
    explicit PatternIter(const RobustMdpInstance& inst, const ControllerPatterns& p, long cap)
        : pats(p), digits(static_cast<std::size_t>(inst.n_states), 0),
          radix(static_cast<std::size_t>(inst.n_states), static_cast<long>(p.supports.size())) {
        if (capped_power(static_cast<long>(p.supports.size()), inst.n_states, cap) > cap)
            throw EnumerationCapExceeded("structure check: " + std::to_string(p.supports.size()) + "^" +
                                         std::to_string(inst.n_states) +
                                         " controller patterns exceed the cap of " + std::to_string(cap));
    }
    std::vector<const std::vector<bool>*> supports() const {
        std::vector<const std::vector<bool>*> sup(digits.size());
        for (std::size_t s = 0; s < digits.size(); ++s)
            sup[s] = &pats.supports[static_cast<std::size_t>(digits[s])];
        return sup;
    }
    bool advance() { return next_odometer(digits, radix); }
};

/// Overlap-connectivity of a family of state sets via breadth-first search on
/// the shared-state relation.
bool overlap_connected(const std::vector<indvec>& classes) {
    if (classes.size() <= 1) return true;
    std::vector<bool> seen(classes.size(), false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        for (std::size_t j = 0; j < classes.size(); ++j) {
            if (seen[j]) continue;
            bool share = false;
            for (long x : classes[i])
                if (std::find(classes[j].begin(), classes[j].end(), x) != classes[j].end()) {
                    share = true;
                    break;
                }
            if (share) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

} // namespace

std::string to_string(CommClass c) {
    switch (c) {
    case CommClass::Communicating: return "Communicating";
    case CommClass::WeaklyCommunicating: return "WeaklyCommunicating";
    case CommClass::No: return "No";
    default: return "Inconclusive";
    }
}

BoolMat transitive_closure(const BoolMat& g) {
    const std::size_t n = g.size();
    BoolMat cl = g;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (!cl[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (cl[k][j]) cl[i][j] = true;
        }
    return cl;
}

bool tv_margin_ok(const RobustMdpInstance& inst) {
    for (const StateAmbiguity& amb : inst.ambiguity) {
        if (amb.variant != PVariant::SaTvBalls) continue;
        for (std::size_t a = 0; a < amb.nominal.size(); ++a) {
            const prec_t theta = amb.radius[a];
            if (theta == 0.0) continue;
            prec_t min_mass = INFTY;
            for (prec_t x : amb.nominal[a])
                if (x > 0.0) min_mass = std::min(min_mass, x);
            if (theta >= min_mass) return false;
        }
    }
    return true;
}

bool has_tv_ambiguity(const RobustMdpInstance& inst) {
    for (const StateAmbiguity& amb : inst.ambiguity) {
        if (amb.variant != PVariant::SaTvBalls) continue;
        for (prec_t theta : amb.radius)
            if (theta > 0.0) return true;
    }
    return false;
}

BoolMat reachability_graph(const RobustMdpInstance& inst, GraphSide side,
                           const StationaryControllerPolicy* delta,
                           const StationaryAdversaryPolicy* adv) {
    const auto unions = action_support_unions(inst);
    BoolMat g = make_graph(inst.n_states);
    if (side == GraphSide::ControllerFixed) {
        if (delta == nullptr) throw ValidationError("reachability_graph: ControllerFixed needs a policy");
        for (long s = 0; s < inst.n_states; ++s)
            for (long a = 0; a < inst.n_actions; ++a) {
                if (delta->rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] <= 0.0) continue;
                for (long t = 0; t < inst.n_states; ++t)
                    if (unions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)][static_cast<std::size_t>(t)])
                        g[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = true;
            }
        return g;
    }
    const std::vector<bool> allowed = allowed_action_mask(inst);
    if (side == GraphSide::AdversaryFixed) {
        if (adv == nullptr) throw ValidationError("reachability_graph: AdversaryFixed needs a policy");
        for (long s = 0; s < inst.n_states; ++s)
            for (long a = 0; a < inst.n_actions; ++a) {
                if (!allowed[static_cast<std::size_t>(a)]) continue;
                const numvec& row = adv->choices[static_cast<std::size_t>(s)].rows[static_cast<std::size_t>(a)];
                for (long t = 0; t < inst.n_states; ++t)
                    if (row[static_cast<std::size_t>(t)] > 0.0) g[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = true;
            }
        return g;
    }
    for (long s = 0; s < inst.n_states; ++s)
        for (long a = 0; a < inst.n_actions; ++a) {
            if (!allowed[static_cast<std::size_t>(a)]) continue;
            for (long t = 0; t < inst.n_states; ++t)
                if (unions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)][static_cast<std::size_t>(t)])
                    g[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = true;
        }
    return g;
}

CommReport check_controller_communication(const RobustMdpInstance& inst, long cap) {
    const ControllerPatterns pats = controller_support_patterns(inst);
    const auto unions = action_support_unions(inst);
    const long n = inst.n_states;
    // Only needed to separate weakly communicating from non-communicating
    // patterns; deferred so that instances whose pattern graphs are all
    // strongly connected never pay for (or blow up on) the enumeration.
    std::optional<std::vector<StationaryAdversaryPolicy>> products;

    CommReport rep;
    rep.verdict = CommClass::Communicating;
    PatternIter it(inst, pats, cap);
    do {
        const auto sup = it.supports();
        BoolMat g = make_graph(n);
        for (long s = 0; s < n; ++s)
            for (long a = 0; a < inst.n_actions; ++a) {
                if (!(*sup[static_cast<std::size_t>(s)])[static_cast<std::size_t>(a)]) continue;
                for (long t = 0; t < n; ++t)
                    if (unions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)][static_cast<std::size_t>(t)])
                        g[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = true;
            }
        const BoolMat cl = transitive_closure(g);
        if (strongly_connected(cl)) continue;

        if (!products) products = adversary_extreme_products(inst, cap);
        std::vector<bool> rec(static_cast<std::size_t>(n), false);
        for (const auto& p : *products) {
            const std::vector<bool> r = recurrent_states(chain_support_graph(inst, sup, p));
            for (std::size_t i = 0; i < r.size(); ++i)
                if (r[i]) rec[i] = true;
        }
        bool mutual = true;
        long wi = -1, wj = -1;
        for (long i = 0; i < n && mutual; ++i)
            for (long j = 0; j < n && mutual; ++j)
                if (i != j && rec[static_cast<std::size_t>(i)] && rec[static_cast<std::size_t>(j)] &&
                    !cl[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
                    mutual = false;
                    wi = i;
                    wj = j;
                }
        if (mutual) {
            rep.verdict = CommClass::WeaklyCommunicating;
            rep.witnesses.push_back("pattern " + pattern_label(it.digits) + ": class " + state_set_label(rec));
        } else {
            rep.verdict = CommClass::No;
            rep.witnesses.push_back("pattern " + pattern_label(it.digits) + ": recurrent state " +
                                    std::to_string(wi) + " cannot reach recurrent state " + std::to_string(wj));
            return rep;
        }
    } while (it.advance());

    if (rep.verdict == CommClass::WeaklyCommunicating && has_tv_ambiguity(inst) && !tv_margin_ok(inst)) {
        rep.verdict = CommClass::Inconclusive;
        rep.witnesses.push_back("margin condition fails: a ball radius reaches the smallest nominal mass, "
                                "so extreme kernels do not exhaust the transience check");
    }
    return rep;
}

CommReport check_adversary_communication(const RobustMdpInstance& inst, long cap) {
    const ControllerPatterns pats = controller_support_patterns(inst);
    const std::vector<StationaryAdversaryPolicy> products = adversary_extreme_products(inst, cap);
    const std::vector<bool> allowed = allowed_action_mask(inst);
    const long n = inst.n_states;

    CommReport rep;
    rep.verdict = CommClass::Communicating;
    for (std::size_t pi = 0; pi < products.size(); ++pi) {
        const StationaryAdversaryPolicy& p = products[pi];
        BoolMat g = make_graph(n);
        for (long s = 0; s < n; ++s)
            for (long a = 0; a < inst.n_actions; ++a) {
                if (!allowed[static_cast<std::size_t>(a)]) continue;
                const numvec& row = p.choices[static_cast<std::size_t>(s)].rows[static_cast<std::size_t>(a)];
                for (long t = 0; t < n; ++t)
                    if (row[static_cast<std::size_t>(t)] > 0.0) g[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = true;
            }
        const BoolMat cl = transitive_closure(g);
        if (strongly_connected(cl)) continue;

        std::vector<bool> rec(static_cast<std::size_t>(n), false);
        PatternIter it(inst, pats, cap);
        do {
            const std::vector<bool> r = recurrent_states(chain_support_graph(inst, it.supports(), p));
            for (std::size_t i = 0; i < r.size(); ++i)
                if (r[i]) rec[i] = true;
        } while (it.advance());
        bool mutual = true;
        long wi = -1, wj = -1;
        for (long i = 0; i < n && mutual; ++i)
            for (long j = 0; j < n && mutual; ++j)
                if (i != j && rec[static_cast<std::size_t>(i)] && rec[static_cast<std::size_t>(j)] &&
                    !cl[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
                    mutual = false;
                    wi = i;
                    wj = j;
                }
        if (mutual) {
            rep.verdict = CommClass::WeaklyCommunicating;
            rep.witnesses.push_back("product #" + std::to_string(pi) + ": class " + state_set_label(rec));
        } else {
            rep.verdict = CommClass::No;
            rep.witnesses.push_back("product #" + std::to_string(pi) + ": recurrent state " + std::to_string(wi) +
                                    " cannot reach recurrent state " + std::to_string(wj));
            return rep;
        }
    }

    // Both positive adversary verdicts quantify over the whole ambiguity set,
    // so they need the margin condition; No carries a feasible witness.
    if (rep.verdict != CommClass::No && has_tv_ambiguity(inst) && !tv_margin_ok(inst)) {
        rep.verdict = CommClass::Inconclusive;
        rep.witnesses.push_back("margin condition fails: a ball radius reaches the smallest nominal mass, "
                                "so extreme kernels do not exhaust the ambiguity set");
    }
    return rep;
}

BoolReport check_unichain(const RobustMdpInstance& inst, long cap) {
    const ControllerPatterns pats = controller_support_patterns(inst);
    const std::vector<StationaryAdversaryPolicy> products = adversary_extreme_products(inst, cap);
    BoolReport rep;
    PatternIter it(inst, pats, cap);
    do {
        const auto sup = it.supports();
        for (std::size_t pi = 0; pi < products.size(); ++pi) {
            const auto classes = closed_classes(chain_support_graph(inst, sup, products[pi]));
            if (classes.size() != 1) {
                rep.value = false;
                rep.witnesses.push_back("pattern " + pattern_label(it.digits) + ", product #" +
                                        std::to_string(pi) + ": " + std::to_string(classes.size()) +
                                        " closed recurrent classes");
                return rep;
            }
        }
    } while (it.advance());
    if (has_tv_ambiguity(inst) && !tv_margin_ok(inst)) {
        rep.value = std::nullopt;
        rep.witnesses.push_back("margin condition fails: a feasible kernel may drop support that every "
                                "extreme kernel keeps, so the unichain verdict is inconclusive");
        return rep;
    }
    rep.value = true;
    return rep;
}

BoolReport check_occcc(const RobustMdpInstance& inst, Side side, long cap) {
    const ControllerPatterns pats = controller_support_patterns(inst);
    const std::vector<StationaryAdversaryPolicy> products = adversary_extreme_products(inst, cap);
    const bool tv = has_tv_ambiguity(inst);
    BoolReport rep;

    bool connected = true;
    std::string witness;
    if (side == Side::Controller) {
        PatternIter it(inst, pats, cap);
        do {
            const auto sup = it.supports();
            std::vector<indvec> family;
            for (const auto& p : products)
                for (auto& cls : closed_classes(chain_support_graph(inst, sup, p)))
                    if (std::find(family.begin(), family.end(), cls) == family.end())
                        family.push_back(std::move(cls));
            if (!overlap_connected(family)) {
                connected = false;
                witness = "pattern " + pattern_label(it.digits) + ": " + std::to_string(family.size()) +
                          " closed classes are not overlap-connected";
                break;
            }
        } while (it.advance());
    } else {
        for (std::size_t pi = 0; pi < products.size() && connected; ++pi) {
            std::vector<indvec> family;
            PatternIter it(inst, pats, cap);
            do {
                for (auto& cls : closed_classes(chain_support_graph(inst, it.supports(), products[pi])))
                    if (std::find(family.begin(), family.end(), cls) == family.end())
                        family.push_back(std::move(cls));
            } while (it.advance());
            if (!overlap_connected(family)) {
                connected = false;
                witness = "product #" + std::to_string(pi) + ": " + std::to_string(family.size()) +
                          " closed classes are not overlap-connected";
            }
        }
    }

    if (connected) {
        if (tv && !tv_margin_ok(inst)) {
            rep.value = std::nullopt;
            rep.witnesses.push_back("margin condition fails: overlap-connectivity over extreme kernels "
                                    "may miss feasible classes");
        } else {
            rep.value = true;
        }
    } else {
        if (tv) {
            // A positive-radius ball can splice disjoint classes into one
            // bridging class, so a negative verdict is never conclusive here.
            rep.value = std::nullopt;
            rep.witnesses.push_back(witness + " over extreme kernels, but an interior kernel may bridge them");
        } else {
            rep.value = false;
            rep.witnesses.push_back(witness);
        }
    }
    return rep;
}

StructureReport analyze_structure(const RobustMdpInstance& inst, long cap) {
    StructureReport rep;
    // An enumeration blowup on one check must not take down the whole report;
    // the affected verdict degrades to Inconclusive with a note.
    const auto guarded = [&rep](const std::string& what, auto&& check, auto& slot,
                                auto inconclusive) {
        try {
            slot = check();
        } catch (const EnumerationCapExceeded& e) {
            slot = inconclusive;
            rep.notes.push_back(what + ": " + e.what());
        } catch (const ExplosionGuard& e) {
            slot = inconclusive;
            rep.notes.push_back(what + ": " + e.what());
        }
    };
    CommReport inconclusive_comm;
    inconclusive_comm.verdict = CommClass::Inconclusive;
    guarded("controller_comm", [&] { return check_controller_communication(inst, cap); },
            rep.controller_comm, inconclusive_comm);
    guarded("adversary_comm", [&] { return check_adversary_communication(inst, cap); },
            rep.adversary_comm, inconclusive_comm);
    guarded("all_unichain", [&] { return check_unichain(inst, cap); }, rep.all_unichain,
            BoolReport{});
    guarded("occcc_controller", [&] { return check_occcc(inst, Side::Controller, cap); },
            rep.occcc_controller, BoolReport{});
    guarded("occcc_adversary", [&] { return check_occcc(inst, Side::Adversary, cap); },
            rep.occcc_adversary, BoolReport{});
    if (has_tv_ambiguity(inst)) {
        rep.notes.push_back(tv_margin_ok(inst)
                                ? "margin condition holds: every ball radius is below the smallest positive "
                                  "nominal mass, extreme kernel enumeration is exhaustive"
                                : "margin condition fails: universally quantified verdicts degrade to "
                                  "Inconclusive");
    }
    return rep;
}

namespace {

struct BuiltAssignment {
    indvec choice;    // per state, index into the per-state choice list
    indvec next_hop;  // per state, successor toward the target (-1 at target)
};

/// Shared appendix-style construction: grow the assigned set V from the
/// target outward, assigning to each new state the lowest-index choice whose
/// induced row reaches its BFS successor with positive probability.
BuiltAssignment assign_paths(long n, long y, const std::vector<std::vector<indvec>>& edge_choice) {
    // edge_choice[s][t] nonempty iff some choice at s gives s -> t; [0] is the
    // lowest such choice index.
    BuiltAssignment out;
    out.choice.assign(static_cast<std::size_t>(n), -1);
    out.next_hop.assign(static_cast<std::size_t>(n), -1);
    out.choice[static_cast<std::size_t>(y)] = 0;
    std::vector<bool> assigned(static_cast<std::size_t>(n), false);
    assigned[static_cast<std::size_t>(y)] = true;
    long n_assigned = 1;
    while (n_assigned < n) {
        long s0 = -1;
        for (long s = 0; s < n; ++s)
            if (!assigned[static_cast<std::size_t>(s)]) {
                s0 = s;
                break;
            }
        // Breadth-first search from s0 into the assigned set, stopping at the
        // first assigned state hit; expansion in ascending state order keeps
        // the construction deterministic.
        indvec parent(static_cast<std::size_t>(n), -2);
        std::deque<long> queue{s0};
        parent[static_cast<std::size_t>(s0)] = -1;
        long hit = -1;
        while (!queue.empty() && hit < 0) {
            const long cur = queue.front();
            queue.pop_front();
            for (long t = 0; t < n; ++t) {
                if (edge_choice[static_cast<std::size_t>(cur)][static_cast<std::size_t>(t)].empty()) continue;
                if (parent[static_cast<std::size_t>(t)] != -2) continue;
                parent[static_cast<std::size_t>(t)] = cur;
                if (assigned[static_cast<std::size_t>(t)]) {
                    hit = t;
                    break;
                }
                queue.push_back(t);
            }
        }
        if (hit < 0)
            throw TargetUnreachable("state " + std::to_string(s0) + " has no admissible path to state " +
                                        std::to_string(y),
                                    s0);
        // Walk the parent chain back from the hit and assign each new state.
        indvec path;
        for (long cur = hit; cur != -1; cur = parent[static_cast<std::size_t>(cur)]) path.push_back(cur);
        std::reverse(path.begin(), path.end());
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const long s = path[i], t = path[i + 1];
            if (assigned[static_cast<std::size_t>(s)]) continue;
            out.choice[static_cast<std::size_t>(s)] = edge_choice[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)][0];
            out.next_hop[static_cast<std::size_t>(s)] = t;
            assigned[static_cast<std::size_t>(s)] = true;
            ++n_assigned;
        }
    }
    return out;
}

HittingCertificate make_certificate(long n, long y, const BuiltAssignment& built,
                                    const std::vector<numvec>& chain_rows) {
    HittingCertificate cert;
    cert.target = y;
    prec_t min_product = 1.0;
    prec_t min_edge = 1.0;
    long max_len = 0;
    for (long w = 0; w < n; ++w) {
        indvec path{w};
        prec_t product = 1.0;
        long cur = w;
        while (cur != y) {
            const long nxt = built.next_hop[static_cast<std::size_t>(cur)];
            product *= chain_rows[static_cast<std::size_t>(cur)][static_cast<std::size_t>(nxt)];
            path.push_back(nxt);
            cur = nxt;
        }
        max_len = std::max(max_len, static_cast<long>(path.size()) - 1);
        min_product = std::min(min_product, product);
        cert.paths.push_back(std::move(path));
    }
    for (long s = 0; s < n; ++s)
        if (built.next_hop[static_cast<std::size_t>(s)] >= 0)
            min_edge = std::min(min_edge,
                                chain_rows[static_cast<std::size_t>(s)]
                                          [static_cast<std::size_t>(built.next_hop[static_cast<std::size_t>(s)])]);
    cert.delta_prime = min_product;
    cert.bound = static_cast<prec_t>(n) / cert.delta_prime;
    cert.formula_delta_prime =
        std::pow(min_edge * std::pow(static_cast<prec_t>(n), static_cast<prec_t>(-max_len)),
                 static_cast<prec_t>(n));
    cert.formula_bound = static_cast<prec_t>(n) / cert.formula_delta_prime;
    return cert;
}

} // namespace

std::pair<StationaryAdversaryPolicy, HittingCertificate> build_adversary_to_target(
    const RobustMdpInstance& inst, const StationaryControllerPolicy& delta, long y) {
    validate_controller_policy(inst, delta);
    if (y < 0 || y >= inst.n_states)
        throw ValidationError("build_adversary_to_target: target state " + std::to_string(y) +
                              " out of range");
    const long n = inst.n_states;
    std::vector<std::vector<KernelBundle>> bundles;
    bundles.reserve(static_cast<std::size_t>(n));
    for (long s = 0; s < n; ++s) bundles.push_back(extreme_kernels(inst, s));

    // chain probability of s -> t when s plays bundle b: sum_a Delta(a|s) b[a][t]
    auto chain_prob = [&](long s, long b, long t) {
        prec_t v = 0.0;
        for (long a = 0; a < inst.n_actions; ++a)
            v += delta.rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] *
                 bundles[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]
                        [static_cast<std::size_t>(t)];
        return v;
    };

    std::vector<std::vector<indvec>> edge_choice(static_cast<std::size_t>(n),
                                                 std::vector<indvec>(static_cast<std::size_t>(n)));
    for (long s = 0; s < n; ++s)
        for (long t = 0; t < n; ++t)
            for (std::size_t b = 0; b < bundles[static_cast<std::size_t>(s)].size(); ++b)
                if (chain_prob(s, static_cast<long>(b), t) > 0.0) {
                    edge_choice[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)].push_back(static_cast<long>(b));
                    break;
                }

    const BuiltAssignment built = assign_paths(n, y, edge_choice);

    StationaryAdversaryPolicy q;
    std::vector<numvec> chain_rows(static_cast<std::size_t>(n), numvec(static_cast<std::size_t>(n), 0.0));
    for (long s = 0; s < n; ++s) {
        const bool finite = inst.ambiguity[static_cast<std::size_t>(s)].variant == PVariant::FiniteKernels;
        StationaryAdversaryPolicy::StateChoice ch;
        ch.kernel_index = finite ? built.choice[static_cast<std::size_t>(s)] : -1;
        ch.rows = bundles[static_cast<std::size_t>(s)][static_cast<std::size_t>(built.choice[static_cast<std::size_t>(s)])];
        q.choices.push_back(std::move(ch));
        for (long t = 0; t < n; ++t)
            chain_rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
                chain_prob(s, built.choice[static_cast<std::size_t>(s)], t);
    }
    return {std::move(q), make_certificate(n, y, built, chain_rows)};
}

std::pair<StationaryControllerPolicy, HittingCertificate> build_controller_to_target(
    const RobustMdpInstance& inst, const StationaryAdversaryPolicy& adv, long y) {
    validate_adversary_policy(inst, adv);
    if (y < 0 || y >= inst.n_states)
        throw ValidationError("build_controller_to_target: target state " + std::to_string(y) +
                              " out of range");
    const long n = inst.n_states;
    const std::vector<numvec> choices = controller_vertex_choices(inst);

    auto chain_prob = [&](long s, long c, long t) {
        prec_t v = 0.0;
        for (long a = 0; a < inst.n_actions; ++a)
            v += choices[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] *
                 adv.choices[static_cast<std::size_t>(s)].rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
        return v;
    };

    std::vector<std::vector<indvec>> edge_choice(static_cast<std::size_t>(n),
                                                 std::vector<indvec>(static_cast<std::size_t>(n)));
    for (long s = 0; s < n; ++s)
        for (long t = 0; t < n; ++t)
            for (std::size_t c = 0; c < choices.size(); ++c)
                if (chain_prob(s, static_cast<long>(c), t) > 0.0) {
                    edge_choice[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)].push_back(static_cast<long>(c));
                    break;
                }

    const BuiltAssignment built = assign_paths(n, y, edge_choice);

    StationaryControllerPolicy eta;
    std::vector<numvec> chain_rows(static_cast<std::size_t>(n), numvec(static_cast<std::size_t>(n), 0.0));
    for (long s = 0; s < n; ++s) {
        eta.rows.push_back(choices[static_cast<std::size_t>(built.choice[static_cast<std::size_t>(s)])]);
        for (long t = 0; t < n; ++t)
            chain_rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
                chain_prob(s, built.choice[static_cast<std::size_t>(s)], t);
    }
    return {std::move(eta), make_certificate(n, y, built, chain_rows)};
}

numvec expected_exit_time(const RobustMdpInstance& inst, const StationaryControllerPolicy& delta,
                          const StationaryAdversaryPolicy& adv, const indvec& C) {
    if (C.empty()) throw ValidationError("expected_exit_time: C must be non-empty");
    std::vector<bool> in_c(static_cast<std::size_t>(inst.n_states), false);
    for (long s : C) {
        if (s < 0 || s >= inst.n_states)
            throw ValidationError("expected_exit_time: state " + std::to_string(s) + " out of range");
        in_c[static_cast<std::size_t>(s)] = true;
    }
    indvec outside;
    for (long s = 0; s < inst.n_states; ++s)
        if (!in_c[static_cast<std::size_t>(s)]) outside.push_back(s);

    numvec result(static_cast<std::size_t>(inst.n_states), 0.0);
    if (outside.empty()) return result;

    const auto [rows, rewards] = induced_chain(inst, delta, adv);
    (void)rewards;
    const long m = static_cast<long>(outside.size());
    Matrix a(m, m);
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            a.at(i, j) = (i == j ? 1.0 : 0.0) - rows[static_cast<std::size_t>(outside[static_cast<std::size_t>(i)])]
                                                   [static_cast<std::size_t>(outside[static_cast<std::size_t>(j)])];
    const numvec x = solve_linear(a, numvec(static_cast<std::size_t>(m), 1.0));
    for (long i = 0; i < m; ++i) result[static_cast<std::size_t>(outside[static_cast<std::size_t>(i)])] = x[static_cast<std::size_t>(i)];
    return result;
}

} // namespace robmdp
