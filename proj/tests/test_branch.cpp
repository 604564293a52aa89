// Tests for the branch-composition engine: message replay, per-branch
// composition against the dense controlled-unitary oracle, mass measurement
// and the standard measurement bases.

#include <catch2/catch_amalgamated.hpp>

#include <icausal/branch.hpp>
#include <icausal/qcore.hpp>

#include <cmath>
#include <random>

using namespace icausal;
using Catch::Approx;

namespace {

// cyclic shift |j> -> |j + s mod d>
Unitary shift_unitary(std::size_t dim, std::size_t s) {
    Matrix m = Matrix::Zero(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>((j + s) % dim), static_cast<Eigen::Index>(j)) = 1.0;
    return Unitary(std::move(m));
}

std::vector<Unitary> shift_family(std::size_t m) {
    std::vector<Unitary> u;
    for (std::size_t k = 0; k < m; ++k) u.push_back(shift_unitary(m, k));
    return u;
}

const CausalOrder& order_by_label(const SignalingStrategy& s, const std::string& label) {
    for (const auto& o : s.orders)
        if (o.label == label) return o;
    throw std::runtime_error("no such order: " + label);
}

}  // namespace

TEST_CASE("message replay resolves the two-branch plans", "[branch]") {
    const auto strat = mics_teleport_strategy(2, 0, 2, {Unitary::identity(2), Unitary(sigma_x())});
    const auto fwd = simulate_messages(strat, order_by_label(strat, "X->Y"));
    REQUIRE(fwd.size() == 2);
    REQUIRE(fwd[0].party == "Alice");
    REQUIRE(fwd[0].unitary_label == "U1");
    REQUIRE(fwd[1].party == "Bob");
    REQUIRE(fwd[1].unitary_label == "U2");

    const auto rev = simulate_messages(strat, order_by_label(strat, "Y->X"));
    REQUIRE(rev[0].party == "Bob");
    REQUIRE(rev[0].unitary_label == "U1");
    REQUIRE(rev[1].party == "Alice");
    REQUIRE(rev[1].unitary_label == "U2");
}

TEST_CASE("message replay resolves the three-branch plans", "[branch]") {
    const auto strat = mics_teleport_strategy(3, 0, 2, shift_family(3));
    const auto plan = simulate_messages(strat, order_by_label(strat, "X1->Y->X2"));
    REQUIRE(plan.size() == 3);
    REQUIRE(plan[0].party == "Alice");
    REQUIRE(plan[0].unitary_label == "U1");
    REQUIRE(plan[1].party == "Bob");
    REQUIRE(plan[1].unitary_label == "U2");
    REQUIRE(plan[2].party == "Alice");
    REQUIRE(plan[2].unitary_label == "U3");

    const auto last = simulate_messages(strat, order_by_label(strat, "X1->X2->Y"));
    REQUIRE(last[2].party == "Bob");
    REQUIRE(last[2].unitary_label == "U3");

    const auto first = simulate_messages(strat, order_by_label(strat, "Y->X1->X2"));
    REQUIRE(first[0].unitary_label == "U1");
    REQUIRE(first[1].unitary_label == "U2");
    REQUIRE(first[2].unitary_label == "U1");
}

TEST_CASE("strategies are total over their declared orders", "[branch]") {
    for (std::size_t m : {2u, 3u, 4u}) {
        const auto strat = mics_teleport_strategy(m, 0, 2, shift_family(m));
        REQUIRE_NOTHROW(validate_strategy(strat));
        REQUIRE(strat.orders.size() == m);
    }
}

TEST_CASE("incomplete strategies and invalid orders are rejected", "[branch]") {
    auto strat = mics_teleport_strategy(2, 0, 1, {Unitary::identity(2), Unitary(sigma_x())});
    auto& alice = strat.parties[0];
    alice.rules.erase("X@sig");
    REQUIRE_THROWS_AS(simulate_messages(strat, order_by_label(strat, "Y->X")), strategy_incomplete_error);

    const auto good = mics_teleport_strategy(3, 0, 2, shift_family(3));
    CausalOrder reversed{"bad", {{"X2", "Alice"}, {"X1", "Alice"}, {"Y", "Bob"}}};
    REQUIRE_THROWS_AS(simulate_messages(good, reversed), std::invalid_argument);
}

TEST_CASE("branch composition", "[branch]") {
    const std::vector<std::size_t> dims{2, 3, 2};
    const Unitary w = compose_branch({}, dims);
    REQUIRE((w.mat() - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() == 0.0);

    // commuting single-party factors in either order
    PlanStep a{"Alice", "X", "U1", Unitary(sigma_x()), {0}, std::nullopt};
    PlanStep b{"Bob", "Y", "U2", Unitary(sigma_z()), {2}, std::nullopt};
    const Unitary ab = compose_branch({a, b}, dims);
    const Unitary ba = compose_branch({b, a}, dims);
    REQUIRE((ab.mat() - ba.mat()).cwiseAbs().maxCoeff() < kTightTol);

    // forward branch of the qubit protocol against the dense oracle
    const auto strat = mics_teleport_strategy(2, 0, 2, {Unitary::identity(2), Unitary(sigma_x())});
    const auto plan = simulate_messages(strat, order_by_label(strat, "X->Y"));
    const Unitary branch = compose_branch(plan, {2, 3, 2});
    const Matrix expect = kron(kron(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), sigma_x());
    REQUIRE((branch.mat() - expect).cwiseAbs().maxCoeff() < kTightTol);
}

TEST_CASE("strategy-wide composition pairs plans with global unitaries", "[branch]") {
    const auto strat = mics_teleport_strategy(3, 0, 2, shift_family(3));
    const std::vector<std::size_t> dims{3, 2, 3};
    const auto branches = compose_strategy(strat, dims);
    REQUIRE(branches.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        REQUIRE(branches[k].order_label == strat.orders[k].label);
        const Unitary direct = compose_branch(simulate_messages(strat, strat.orders[k]), dims);
        REQUIRE((branches[k].global.mat() - direct.mat()).cwiseAbs().maxCoeff() < kTightTol);
        REQUIRE(branches[k].plan.size() == 3);
    }
}

TEST_CASE("superposed run on a single branch", "[branch]") {
    const auto strat = mics_teleport_strategy(2, 0, 1, {Unitary::identity(2), Unitary(sigma_x())});
    Vector amps = Vector::Zero(2);
    amps(1) = 1.0;  // all weight on Y->X
    const MassRegister mass(2, amps, standard_mass_basis(2));
    const PureState input = tensor(PureState::basis_state(2, 0), PureState::basis_state(2, 0));
    const PureState joint = run_superposed(mass, strat, input);

    const auto plan = simulate_messages(strat, order_by_label(strat, "Y->X"));
    PureState branch = input;
    for (const auto& step : plan) branch = apply_unitary(branch, step.unitary, step.targets);
    const PureState expect = tensor(PureState::basis_state(2, 1), branch);
    REQUIRE(fidelity(joint, expect) == Approx(1.0).margin(kTol));
}

TEST_CASE("uniform two-branch run produces the flipped pair", "[branch]") {
    const auto strat = mics_teleport_strategy(2, 0, 1, {Unitary::identity(2), Unitary(sigma_x())});
    const PureState input = tensor(PureState::basis_state(2, 0), PureState::basis_state(2, 0));
    const PureState joint = run_superposed(uniform_mass_register(2), strat, input);

    Vector expect = Vector::Zero(8);  // (mass, A, B)
    expect(0 * 4 + 0 * 2 + 1) = 1.0 / std::sqrt(2.0);  // |M_XY> |0>|1>
    expect(1 * 4 + 1 * 2 + 0) = 1.0 / std::sqrt(2.0);  // |M_YX> |1>|0>
    REQUIRE((joint.amps() - expect).cwiseAbs().maxCoeff() < kTightTol);
}

TEST_CASE("superposed run equals the controlled-unitary oracle", "[branch]") {
    std::mt19937_64 rng(171);
    for (std::size_t m : {2u, 3u, 4u}) {
        std::vector<Unitary> family;
        for (std::size_t k = 0; k < m; ++k) family.push_back(random_unitary(m, rng));
        const auto strat = mics_teleport_strategy(m, 0, 2, family);
        const std::vector<std::size_t> dims{m, 4, m};
        for (int trial = 0; trial < 5; ++trial) {
            const PureState input = random_state(dims, rng);
            const PureState fast = run_superposed(uniform_mass_register(m), strat, input);

            // sum_k |k><k| (x) W_k applied to (mass (x) input)
            const std::size_t n = input.dim();
            Matrix ctrl = Matrix::Zero(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(m * n));
            for (std::size_t k = 0; k < m; ++k) {
                const Unitary wk = compose_branch(simulate_messages(strat, strat.orders[k]), dims);
                ctrl.block(static_cast<Eigen::Index>(k * n), static_cast<Eigen::Index>(k * n),
                           static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = wk.mat();
            }
            const PureState mass_state({m}, uniform_mass_register(m).amps);
            const Vector oracle = ctrl * tensor(mass_state, input).amps();
            REQUIRE((fast.amps() - oracle).cwiseAbs().maxCoeff() < kTightTol);
        }
    }
}

TEST_CASE("per-branch locality preserves the bipartite entropy", "[branch]") {
    std::mt19937_64 rng(181);
    for (std::size_t m : {2u, 3u, 4u}) {
        const auto strat = mics_teleport_strategy(m, 0, 2, shift_family(m));
        const std::vector<std::size_t> dims{m, 3, m};
        for (int trial = 0; trial < 10; ++trial) {
            const PureState input = random_state(dims, rng);
            const double before = entanglement_entropy(input, {0});
            for (const auto& order : strat.orders) {
                PureState branch = input;
                for (const auto& step : simulate_messages(strat, order))
                    branch = apply_unitary(branch, step.unitary, step.targets);
                REQUIRE(entanglement_entropy(branch, {0}) == Approx(before).margin(1e-9));
            }
        }
    }
}

TEST_CASE("mass measurement splits the entangling run into the +/- pair", "[branch]") {
    const auto strat = mics_teleport_strategy(2, 0, 1, {Unitary::identity(2), Unitary(sigma_x())});
    const PureState input = tensor(PureState::basis_state(2, 0), PureState::basis_state(2, 0));
    const PureState joint = run_superposed(uniform_mass_register(2), strat, input);
    const auto outcomes = measure_mass(joint, standard_mass_basis(2));

    REQUIRE(outcomes.size() == 2);
    REQUIRE(outcomes[0].probability == Approx(0.5).margin(kTol));
    REQUIRE(outcomes[1].probability == Approx(0.5).margin(kTol));

    Vector plus = Vector::Zero(4), minus = Vector::Zero(4);
    plus(1) = plus(2) = 1.0 / std::sqrt(2.0);
    minus(1) = 1.0 / std::sqrt(2.0);
    minus(2) = -1.0 / std::sqrt(2.0);
    REQUIRE(fidelity(*outcomes[0].system, PureState({2, 2}, plus)) == Approx(1.0).margin(kTol));
    REQUIRE(fidelity(*outcomes[1].system, PureState({2, 2}, minus)) == Approx(1.0).margin(kTol));
}

TEST_CASE("single-branch mass reproduces the basis overlap distribution", "[branch]") {
    const auto strat = mics_teleport_strategy(2, 0, 1, {Unitary::identity(2), Unitary(sigma_x())});
    Vector amps = Vector::Zero(2);
    amps(0) = 1.0;
    const MassRegister mass(2, amps, standard_mass_basis(2));
    const PureState input = tensor(PureState::basis_state(2, 0), PureState::basis_state(2, 0));
    const auto outcomes = measure_mass(run_superposed(mass, strat, input), mass.basis);
    for (const auto& o : outcomes) REQUIRE(o.probability == Approx(0.5).margin(kTol));  // |<b_i|M_0>|^2
}

TEST_CASE("mass outcomes are uniform and the register regenerates", "[branch]") {
    std::mt19937_64 rng(191);
    for (std::size_t m : {2u, 3u, 4u}) {
        const auto strat = mics_teleport_strategy(m, 0, 2, shift_family(m));
        for (int trial = 0; trial < 20; ++trial) {
            // teleportation input: arbitrary (sender, rest) pair, ancilla in |0>
            const PureState input = tensor(random_state({m, 3}, rng), PureState::basis_state(m, 0));
            const auto outcomes = measure_mass(run_superposed(uniform_mass_register(m), strat, input),
                                               standard_mass_basis(m));
            double total = 0.0;
            for (const auto& o : outcomes) {
                REQUIRE(o.probability == Approx(1.0 / double(m)).margin(kTol));
                total += o.probability;
                for (Eigen::Index i = 0; i < o.mass_state.amps().size(); ++i)
                    REQUIRE(std::abs(o.mass_state.amps()(i)) == Approx(1.0 / std::sqrt(double(m))).margin(kTol));
            }
            REQUIRE(total == Approx(1.0).margin(kTol));
        }
    }
}

TEST_CASE("standard mass bases", "[branch]") {
    const Basis two = standard_mass_basis(2);
    REQUIRE(std::abs(two.vec(0).dot(two.vec(1))) < kTightTol);
    REQUIRE(two.vec(0)(0).real() == Approx(1.0 / std::sqrt(2.0)));

    const Basis three = standard_mass_basis(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            REQUIRE(std::abs(three.vec(i).dot(three.vec(j))) < kTightTol);
    const Complex w = std::polar(1.0, 2.0 * M_PI / 3.0);
    REQUIRE(std::abs(three.vec(1)(1) - w / std::sqrt(3.0)) < kTightTol);

    const Basis four = standard_mass_basis(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            REQUIRE(std::abs(four.vec(i).dot(four.vec(j))) < kTightTol);
    REQUIRE(four.vec(1)(1).real() == Approx(-0.5));
    REQUIRE(four.vec(3)(2).real() == Approx(-0.5));

    REQUIRE_THROWS_AS(standard_mass_basis(5), std::invalid_argument);
}
