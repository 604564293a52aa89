// branch.hpp — Turns a signaling strategy plus a set of causal orders into
// per-branch global unitaries and the mass-entangled superposed state, and
// performs the mass measurement.

#pragma once

#include <icausal/qcore.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace icausal {

// ------------------------------ causal orders -------------------------------

struct OrderedEvent {
    std::string event;
    std::string party;
};

// Total order over labeled events; events of one party must keep their fixed
// local-time order in every causal order of a strategy.
struct CausalOrder {
    std::string label;
    std::vector<OrderedEvent> sequence;
};

// ------------------------------- strategies ---------------------------------

struct RuleAction {
    std::string unitary;                 // registry label
    std::vector<std::size_t> targets;    // subsystems the unitary acts on
    std::optional<std::string> message;  // broadcast to the other parties
};

// Rule keys encode the party's local message history: one window per local
// event, each window listing the messages that arrived since the previous
// event, sorted and comma-joined, windows joined by '|'. A flat received-set
// cannot distinguish "signal arrived before my first event" from "between my
// first and second", which the multi-event strategies depend on.
inline std::string history_key(const std::vector<std::vector<std::string>>& windows) {
    std::string key;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (i > 0) key += '|';
        std::vector<std::string> sorted = windows[i];
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t j = 0; j < sorted.size(); ++j) {
            if (j > 0) key += ',';
            key += sorted[j];
        }
    }
    return key;
}

struct PartySpec {
    std::string name;
    std::vector<std::string> events;             // in local-time order
    std::map<std::string, RuleAction> rules;     // "<event>@<history>" -> action
};

struct SignalingStrategy {
    std::vector<PartySpec> parties;
    std::map<std::string, Unitary> registry;
    std::vector<CausalOrder> orders;
};

struct strategy_incomplete_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One resolved action of the replay, with the registry unitary attached.
struct PlanStep {
    std::string party;
    std::string event;
    std::string unitary_label;
    Unitary unitary;
    std::vector<std::size_t> targets;
    std::optional<std::string> message;
};

using ApplicationPlan = std::vector<PlanStep>;

// Replays one causal order event by event: every message is delivered before
// each strictly later event of the other parties, the rule for the local
// message history resolves the action. Light-cone feasibility of the delivery
// model is certified separately by the spacetime module.
inline ApplicationPlan simulate_messages(const SignalingStrategy& strategy, const CausalOrder& order) {
    std::map<std::string, std::size_t> next_local;                         // party -> next event index
    std::map<std::string, std::vector<std::vector<std::string>>> closed;   // party -> closed windows
    std::map<std::string, std::vector<std::string>> open;                  // party -> messages since last event
    for (const auto& p : strategy.parties) {
        next_local[p.name] = 0;
        closed[p.name] = {};
        open[p.name] = {};
    }

    ApplicationPlan plan;
    for (const auto& oe : order.sequence) {
        const auto party_it =
            std::find_if(strategy.parties.begin(), strategy.parties.end(),
                         [&](const PartySpec& p) { return p.name == oe.party; });
        if (party_it == strategy.parties.end())
            throw std::invalid_argument("simulate_messages: unknown party " + oe.party);
        const PartySpec& party = *party_it;

        std::size_t& local = next_local[party.name];
        if (local >= party.events.size() || party.events[local] != oe.event)
            throw std::invalid_argument("simulate_messages: order violates " + party.name +
                                        "'s local event sequence at " + oe.event);
        ++local;

        auto& windows = closed[party.name];
        windows.push_back(open[party.name]);
        open[party.name].clear();

        const std::string key = oe.event + "@" + history_key(windows);
        const auto rule = party.rules.find(key);
        if (rule == party.rules.end())
            throw strategy_incomplete_error("simulate_messages: no rule for " + party.name + " at " + key);
        const RuleAction& action = rule->second;

        const auto reg = strategy.registry.find(action.unitary);
        if (reg == strategy.registry.end())
            throw std::invalid_argument("simulate_messages: unitary label not in registry: " + action.unitary);

        plan.push_back({party.name, oe.event, action.unitary, reg->second, action.targets, action.message});
        if (action.message) {
            for (const auto& p : strategy.parties)
                if (p.name != party.name) open[p.name].push_back(*action.message);
        }
    }
    return plan;
}

// Dry-runs every declared order; throws if any rule is missing.
inline void validate_strategy(const SignalingStrategy& strategy) {
    for (const auto& order : strategy.orders) simulate_messages(strategy, order);
}

// Product of the event unitaries embedded on their targets, earliest event
// applied first (i.e. rightmost factor).
inline Unitary compose_branch(const ApplicationPlan& plan, const std::vector<std::size_t>& dims) {
    const std::size_t n = product_dim(dims);
    Matrix w = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const PlanStep& step : plan) w = embed_on_targets(step.unitary.mat(), step.targets, dims) * w;
    return Unitary(std::move(w));
}

// One causal order's resolved plan together with its global unitary.
struct BranchComposition {
    std::string order_label;
    ApplicationPlan plan;
    Unitary global;
};

inline std::vector<BranchComposition> compose_strategy(const SignalingStrategy& strategy,
                                                       const std::vector<std::size_t>& dims) {
    std::vector<BranchComposition> branches;
    for (const auto& order : strategy.orders) {
        ApplicationPlan plan = simulate_messages(strategy, order);
        Unitary global = compose_branch(plan, dims);
        branches.push_back({order.label, std::move(plan), std::move(global)});
    }
    return branches;
}

// ------------------------------ mass register -------------------------------

// Amplitudes over the causal-order basis plus the measurement basis Charlie
// uses on the mass configuration.
struct MassRegister {
    std::size_t m;
    Vector amps;
    Basis basis;

    MassRegister(std::size_t m_, Vector amps_, Basis basis_)
        : m(m_), amps(std::move(amps_)), basis(std::move(basis_)) {
        if (m < 2) throw std::invalid_argument("MassRegister: need at least two branches");
        if (static_cast<std::size_t>(amps.size()) != m || basis.dim() != m)
            throw std::invalid_argument("MassRegister: amplitude/basis dimension mismatch");
        const double nrm2 = amps.squaredNorm();
        if (std::abs(nrm2 - 1.0) > kTol) throw std::invalid_argument("MassRegister: amplitudes not normalized");
        amps /= std::sqrt(nrm2);
    }
};

// Charlie's standard measurement bases: the +/- pair for two branches, the
// cube-root-of-unity triple for three, and the fixed sign-pattern basis for
// four (the four-branch correction tables are valid only for that basis, not
// for the order-4 Fourier basis).
inline Basis standard_mass_basis(std::size_t m) {
    if (m == 2) {
        Matrix b(2, 2);
        const double s = 1.0 / std::sqrt(2.0);
        b << s, s, s, -s;
        return Basis(b);
    }
    if (m == 3) {
        const Complex w = std::polar(1.0, 2.0 * M_PI / 3.0);
        const double s = 1.0 / std::sqrt(3.0);
        Matrix b(3, 3);
        b << s, s, s, s, s * w, s * w * w, s, s * w * w, s * w;
        return Basis(b);
    }
    if (m == 4) {
        Matrix b(4, 4);
        b << 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, -1, -1;
        return Basis(b / 2.0);
    }
    throw std::invalid_argument("standard_mass_basis: only m in {2,3,4} is supported");
}

inline std::vector<std::string> standard_mass_labels(std::size_t m) {
    if (m == 2) return {"+", "-"};
    if (m == 3) return {"a", "b", "c"};
    if (m == 4) return {"a", "b", "c", "d"};
    throw std::invalid_argument("standard_mass_labels: only m in {2,3,4} is supported");
}

inline MassRegister uniform_mass_register(std::size_t m) {
    Vector amps = Vector::Constant(static_cast<Eigen::Index>(m), Complex(1.0 / std::sqrt(double(m)), 0.0));
    return MassRegister(m, std::move(amps), standard_mass_basis(m));
}

// ------------------------- superposed-order execution -----------------------

// Joint state sum_k amps_k |M_k> (x) W_k |input>, mass factor first.
inline PureState run_superposed(const MassRegister& mass, const SignalingStrategy& strategy,
                                const PureState& input) {
    if (strategy.orders.size() != mass.m)
        throw std::invalid_argument("run_superposed: branch count does not match the order set");
    std::vector<std::size_t> dims{mass.m};
    dims.insert(dims.end(), input.dims().begin(), input.dims().end());
    Vector joint = Vector::Zero(static_cast<Eigen::Index>(mass.m) * input.amps().size());
    for (std::size_t k = 0; k < mass.m; ++k) {
        const ApplicationPlan plan = simulate_messages(strategy, strategy.orders[k]);
        PureState branch = input;
        for (const PlanStep& step : plan) branch = apply_unitary(branch, step.unitary, step.targets);
        joint.segment(static_cast<Eigen::Index>(k) * input.amps().size(), input.amps().size()) =
            mass.amps(static_cast<Eigen::Index>(k)) * branch.amps();
    }
    return PureState(std::move(dims), std::move(joint));
}

struct MassOutcome {
    std::size_t outcome;
    double probability;
    std::optional<PureState> system;  // mass factor removed; absent on null branches
    PureState mass_state;             // post-measurement mass configuration
};

// Measures the mass factor (subsystem 0) of a joint state in the given basis.
inline std::vector<MassOutcome> measure_mass(const PureState& joint, const Basis& basis) {
    if (joint.subsystems() < 2) throw std::invalid_argument("measure_mass: joint state has no system part");
    if (basis.dim() != joint.dims()[0])
        throw std::invalid_argument("measure_mass: basis does not match the mass dimension");
    const std::size_t m = joint.dims()[0];
    const std::size_t sys_dim = joint.dim() / m;
    std::vector<std::size_t> sys_dims(joint.dims().begin() + 1, joint.dims().end());

    std::vector<MassOutcome> outcomes;
    outcomes.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const Vector bk = basis.vec(k);
        Vector sys = Vector::Zero(static_cast<Eigen::Index>(sys_dim));
        for (std::size_t t = 0; t < m; ++t)
            sys += std::conj(bk(static_cast<Eigen::Index>(t))) *
                   joint.amps().segment(static_cast<Eigen::Index>(t * sys_dim), static_cast<Eigen::Index>(sys_dim));
        const double p = sys.squaredNorm();
        PureState mass_state({m}, bk);
        if (p < kNullProbability) {
            outcomes.push_back({k, p, std::nullopt, std::move(mass_state)});
        } else {
            outcomes.push_back(
                {k, p, PureState::normalized(sys_dims, std::move(sys)), std::move(mass_state)});
        }
    }
    return outcomes;
}

// --------------------- standard signaling-strategy builder -------------------

inline std::string standard_order_label(std::size_t m, std::size_t y_slot) {
    std::string label;
    for (std::size_t pos = 0, xi = 1; pos < m; ++pos) {
        if (!label.empty()) label += "->";
        if (pos == y_slot)
            label += "Y";
        else if (m == 2)
            label += "X";
        else
            label += "X" + std::to_string(xi++);
    }
    return label;
}

// Order set indexed to match the standard mass basis: index 0 puts Y last,
// index m-1 puts Y first.
inline std::vector<CausalOrder> standard_orders(std::size_t m) {
    std::vector<CausalOrder> orders;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t y_slot = m - 1 - k;
        CausalOrder order{standard_order_label(m, y_slot), {}};
        std::size_t xi = 1;
        for (std::size_t pos = 0; pos < m; ++pos) {
            if (pos == y_slot)
                order.sequence.push_back({"Y", "Bob"});
            else
                order.sequence.push_back({(m == 2 ? std::string("X") : "X" + std::to_string(xi++)), "Alice"});
        }
        orders.push_back(std::move(order));
    }
    return orders;
}

// The paper-schedule strategy for m superposed orders: Alice holds events
// X1..X_{m-1} acting on alice_target, Bob holds the single event Y acting on
// bob_target. Whoever has not heard from the other applies U1 and reports
// which event fired; a freshly received signal triggers the matching response
// unitary.
inline SignalingStrategy mics_teleport_strategy(std::size_t m, std::size_t alice_target, std::size_t bob_target,
                                                const std::vector<Unitary>& unitaries) {
    if (m < 2) throw std::invalid_argument("mics_teleport_strategy: need m >= 2");
    if (unitaries.size() != m)
        throw std::invalid_argument("mics_teleport_strategy: need exactly m unitaries U1..Um");

    SignalingStrategy s;
    for (std::size_t k = 0; k < m; ++k) s.registry.emplace("U" + std::to_string(k + 1), unitaries[k]);

    PartySpec alice{"Alice", {}, {}};
    for (std::size_t i = 1; i < m; ++i)
        alice.events.push_back(m == 2 ? std::string("X") : "X" + std::to_string(i));
    for (std::size_t i = 1; i < m; ++i) {
        const std::string& ev = alice.events[i - 1];
        // no signal yet: apply U1 and announce that event i-1 has passed
        std::vector<std::vector<std::string>> quiet(i);
        alice.rules[ev + "@" + history_key(quiet)] =
            RuleAction{"U1", {alice_target}, std::to_string(i - 1)};
        // Bob's signal arrived in window w: respond at the next event, idle after
        for (std::size_t w = 0; w < i; ++w) {
            auto windows = quiet;
            windows[w] = {"sig"};
            const std::string label = w + 1 == i ? "U" + std::to_string(i + 1) : "U1";
            alice.rules[ev + "@" + history_key(windows)] = RuleAction{label, {alice_target}, std::nullopt};
        }
    }

    PartySpec bob{"Bob", {"Y"}, {}};
    for (std::size_t heard = 0; heard < m; ++heard) {
        std::vector<std::vector<std::string>> window(1);
        for (std::size_t j = 0; j < heard; ++j) window[0].push_back(std::to_string(j));
        // for two branches only the party acting first signals; with more
        // events Bob reports back after every action so Alice can respond
        std::optional<std::string> msg;
        if (m > 2 || heard == 0) msg = "sig";
        bob.rules["Y@" + history_key(window)] =
            RuleAction{"U" + std::to_string(heard + 1), {bob_target}, msg};
    }

    s.parties = {std::move(alice), std::move(bob)};
    s.orders = standard_orders(m);
    return s;
}

}  // namespace icausal
