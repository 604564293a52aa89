// Protocol-level tests: correction tables, teleportation fidelity, channel
// implementation, Bell discrimination, unlocking, the discrimination
// reduction, and the correction search. Expected values come from exhaustive
// branch enumeration and direct matrix computation.

#include <catch2/catch_amalgamated.hpp>

#include <icausal/presets.hpp>
#include <icausal/protocols.hpp>

#include <cmath>
#include <random>

using namespace icausal;
using Catch::Approx;

namespace {

const BranchOutcome& branch(const ProtocolResult& r, const std::string& charlie, std::size_t sender) {
    for (const auto& b : r.branches)
        if (b.charlie_label == charlie && b.sender_outcome == sender) return b;
    throw std::runtime_error("no such branch");
}

void require_exact_teleport(const ProtocolResult& r, std::size_t m) {
    REQUIRE(r.branches.size() == m * m);
    REQUIRE(r.min_branch_fidelity >= 1.0 - kTol);
    REQUIRE(r.probability_sum == Approx(1.0).margin(kTol));
    for (const auto& b : r.branches)
        REQUIRE(b.probability == Approx(1.0 / double(m * m)).margin(kTol));
    REQUIRE(r.transcript.sibling_probabilities_consistent());
}

}  // namespace

TEST_CASE("entangling run produces the +/- superpositions", "[protocols]") {
    const PureState zero = PureState::basis_state(2, 0);
    const auto branches = entangle_2ics(Unitary::identity(2), Unitary(sigma_x()), zero, zero);
    REQUIRE(branches.size() == 2);

    Vector plus = Vector::Zero(4), minus = Vector::Zero(4);
    plus(1) = plus(2) = 1.0 / std::sqrt(2.0);
    minus(1) = 1.0 / std::sqrt(2.0);
    minus(2) = -1.0 / std::sqrt(2.0);
    REQUIRE(branches[0].probability == Approx(0.5).margin(kTol));
    REQUIRE(branches[1].probability == Approx(0.5).margin(kTol));
    REQUIRE(fidelity(*branches[0].state, PureState({2, 2}, plus)) == Approx(1.0).margin(kTol));
    REQUIRE(fidelity(*branches[1].state, PureState({2, 2}, minus)) == Approx(1.0).margin(kTol));
    REQUIRE(*branches[0].entropy == Approx(1.0).margin(kTol));
    REQUIRE(*branches[1].entropy == Approx(1.0).margin(kTol));
}

TEST_CASE("identical unitaries give no superposition", "[protocols]") {
    std::mt19937_64 rng(211);
    const PureState psi = random_state({2}, rng);
    const PureState phi = random_state({2}, rng);
    const auto branches = entangle_2ics(Unitary::identity(2), Unitary::identity(2), psi, phi);
    REQUIRE(branches[0].probability == Approx(1.0).margin(kTol));
    REQUIRE(fidelity(*branches[0].state, tensor(psi, phi)) == Approx(1.0).margin(kTol));
    REQUIRE(branches[1].probability < kNullProbability);
    REQUIRE_FALSE(branches[1].state.has_value());
}

TEST_CASE("entangling branches match the direct superposition formula", "[protocols]") {
    const double s = 1.0 / std::sqrt(2.0);
    Vector h(2);
    h << s, s;
    const PureState plus_state({2}, h);
    const Unitary u1 = Unitary::identity(2);
    const Unitary u2 = Unitary(sigma_z());
    const auto branches = entangle_2ics(u1, u2, plus_state, plus_state);

    for (std::size_t k = 0; k < 2; ++k) {
        if (!branches[k].state) continue;
        const Vector v1 = u1.mat() * plus_state.amps();
        const Vector v2 = u2.mat() * plus_state.amps();
        Vector expect = kron(Matrix(v1), Matrix(v2)).col(0);
        if (k == 0)
            expect += kron(Matrix(v2), Matrix(v1)).col(0);
        else
            expect -= kron(Matrix(v2), Matrix(v1)).col(0);
        const PureState reference = PureState::normalized({2, 2}, expect);
        REQUIRE(fidelity(*branches[k].state, reference) == Approx(1.0).margin(kTol));
        REQUIRE(*branches[k].entropy >= -kTol);
        REQUIRE(*branches[k].entropy <= 1.0 + kTol);
        REQUIRE(*branches[k].entropy ==
                Approx(entanglement_entropy(reference, {0})).margin(kTol));
    }
}

TEST_CASE("qubit teleportation applies the shipped corrections", "[protocols]") {
    std::mt19937_64 rng(221);
    const ProtocolResult r = teleport_2ics(random_state({2, 4}, rng));
    REQUIRE(branch(r, "+", 0).correction == "sigma_x");
    REQUIRE(branch(r, "+", 1).correction == "I");
    REQUIRE(branch(r, "-", 0).correction == "i*sigma_y");
    REQUIRE(branch(r, "-", 1).correction == "sigma_z");
    require_exact_teleport(r, 2);
}

TEST_CASE("teleporting a product state is exact", "[protocols]") {
    std::mt19937_64 rng(223);
    const PureState xi = random_state({5}, rng);
    const PureState input = tensor(PureState::basis_state(2, 0), xi);
    const ProtocolResult r = teleport_2ics(input);
    require_exact_teleport(r, 2);
    for (const auto& b : r.branches) REQUIRE(fidelity(b.state, input) >= 1.0 - kTol);
}

TEST_CASE("qubit teleportation is exact on random states", "[protocols]") {
    std::mt19937_64 rng(227);
    for (std::size_t d : {2u, 3u, 5u, 8u}) {
        for (int trial = 0; trial < 10; ++trial) {
            const ProtocolResult r = teleport_2ics(random_state({2, d}, rng));
            require_exact_teleport(r, 2);
        }
    }
    REQUIRE_THROWS_AS(teleport_2ics(PureState::basis_state({3, 2}, {0, 0})), std::invalid_argument);
}

TEST_CASE("every teleport/backteleport path restores the state", "[protocols]") {
    std::mt19937_64 rng(229);
    for (std::size_t d : {2u, 4u}) {
        for (int trial = 0; trial < 5; ++trial) {
            const PureState input = random_state({2, d}, rng);
            const ProtocolResult fwd = teleport_2ics(input);
            require_exact_teleport(fwd, 2);
            for (const auto& fb : fwd.branches) {
                const ProtocolResult bwd = backteleport_2ics(fb.state);
                require_exact_teleport(bwd, 2);
                for (const auto& bb : bwd.branches)
                    REQUIRE(fidelity(bb.state, input) >= 1.0 - kTol);  // 16 paths in total
            }
        }
    }
}

TEST_CASE("three-branch teleportation follows its correction tables", "[protocols]") {
    std::mt19937_64 rng(233);
    const ProtocolResult fwd = teleport_3ics(random_state({3, 4}, rng), Direction::Forward);
    REQUIRE(branch(fwd, "a", 0).correction == "V1");
    REQUIRE(branch(fwd, "b", 1).correction == "V2*Omega1");
    REQUIRE(branch(fwd, "c", 2).correction == "V3*Omega2");
    require_exact_teleport(fwd, 3);

    const ProtocolResult bwd = teleport_3ics(random_state({3, 4}, rng), Direction::Backward);
    REQUIRE(branch(bwd, "a", 0).correction == "V3");
    REQUIRE(branch(bwd, "a", 1).correction == "V1");
    REQUIRE(branch(bwd, "b", 2).correction == "V2*Omega1");
    require_exact_teleport(bwd, 3);

    for (std::size_t d : {3u, 5u}) {
        for (int trial = 0; trial < 5; ++trial) {
            require_exact_teleport(teleport_3ics(random_state({3, d}, rng), Direction::Forward), 3);
            require_exact_teleport(teleport_3ics(random_state({3, d}, rng), Direction::Backward), 3);
        }
    }
}

TEST_CASE("four-branch teleportation follows its correction tables", "[protocols]") {
    std::mt19937_64 rng(239);
    const ProtocolResult fwd = teleport_4ics(random_state({4, 5}, rng), Direction::Forward);
    REQUIRE(branch(fwd, "a", 0).correction == "V1");
    REQUIRE(branch(fwd, "b", 3).correction == "V4*Omega1");
    REQUIRE(branch(fwd, "d", 2).correction == "V3*Omega3");
    require_exact_teleport(fwd, 4);

    const ProtocolResult bwd = teleport_4ics(random_state({4, 5}, rng), Direction::Backward);
    REQUIRE(branch(bwd, "c", 1).correction == "W2*Omega2");
    REQUIRE(branch(bwd, "a", 3).correction == "W4");
    require_exact_teleport(bwd, 4);

    for (std::size_t d : {4u, 5u}) {
        require_exact_teleport(teleport_4ics(random_state({4, d}, rng), Direction::Forward), 4);
        require_exact_teleport(teleport_4ics(random_state({4, d}, rng), Direction::Backward), 4);
    }
}

TEST_CASE("identity channel via the protocol is the identity", "[protocols]") {
    std::mt19937_64 rng(241);
    const DensityState rho = DensityState::from_pure(random_state({2, 3}, rng));
    const KrausChannel id(6, 6, {Matrix::Identity(6, 6)});
    const DensityState out = implement_nonlocal_channel(rho, id);
    REQUIRE(trace_distance(out, rho) < kTightTol);
}

TEST_CASE("nonlocal SWAP maps |0>|1> to |1>|0>", "[protocols]") {
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = 1.0;
    swap(1, 2) = swap(2, 1) = 1.0;
    const KrausChannel channel(4, 4, {swap});
    const DensityState in = DensityState::from_pure(PureState::basis_state({2, 2}, {0, 1}));
    const DensityState out = implement_nonlocal_channel(in, channel);
    const DensityState expect = DensityState::from_pure(PureState::basis_state({2, 2}, {1, 0}));
    REQUIRE(trace_distance(out, expect) < kTol);
}

TEST_CASE("random channels agree with direct application", "[protocols]") {
    std::mt19937_64 rng(251);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        // random CPTP channel on 2x3: unravel a Haar isometry into Kraus blocks
        const std::size_t kraus_count = 2 + trial % 3;
        Matrix g(6 * kraus_count, 6);
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
        Eigen::HouseholderQR<Matrix> qr(g);
        const Matrix q = Matrix(qr.householderQ()).leftCols(6);
        std::vector<Matrix> kraus;
        for (std::size_t k = 0; k < kraus_count; ++k) kraus.push_back(q.middleRows(6 * k, 6));
        const KrausChannel channel(6, 6, kraus);
        REQUIRE(channel.trace_preserving());

        // random mixed input from a random two-state ensemble
        const PureState v1 = random_state({2, 3}, rng);
        const PureState v2 = random_state({2, 3}, rng);
        const DensityState rho({2, 3}, 0.3 * v1.amps() * v1.amps().adjoint() +
                                         0.7 * v2.amps() * v2.amps().adjoint());

        const DensityState via_protocol = implement_nonlocal_channel(rho, channel);
        const DensityState direct = apply_channel(channel, rho);
        REQUIRE(trace_distance(via_protocol, direct) < kTol);
    }
}

TEST_CASE("Bell discrimination identifies every state deterministically", "[protocols]") {
    std::size_t rows_exercised = 0;
    for (std::size_t secret = 1; secret <= 4; ++secret) {
        const BellResult r = discriminate_bell(secret);
        REQUIRE(r.identified == secret);
        REQUIRE(r.charlie_deterministic);
        REQUIRE(r.charlie_label == ((secret == 1 || secret == 3) ? "+" : "-"));
        REQUIRE(r.branches.size() == 2);
        double total = 0.0;
        for (const auto& b : r.branches) {
            REQUIRE(b.conclusion == secret);
            total += b.probability;
            ++rows_exercised;
        }
        REQUIRE(total == Approx(1.0).margin(kTol));
        REQUIRE(r.transcript.sibling_probabilities_consistent());
    }
    REQUIRE(rows_exercised == 8);

    const BellResult b1 = discriminate_bell(1);
    for (const auto& br : b1.branches) REQUIRE(br.alice != br.bob);
    const BellResult b4 = discriminate_bell(4);
    for (const auto& br : b4.branches) REQUIRE(br.alice == br.bob);
}

TEST_CASE("unlocking the bound-entangled pair mixture", "[protocols]") {
    const SmolinReport report = unlock_smolin();
    REQUIRE(report.ppt);
    REQUIRE(report.min_pt_eigenvalue >= -kTol);
    REQUIRE(report.all_unlocked);
    REQUIRE(report.min_fidelity >= 1.0 - kTol);
    REQUIRE(report.branches.size() == 4);
    REQUIRE(report.branches[0].correction == "I");
    REQUIRE(report.branches[1].correction == "sigma_z");
    for (const auto& b : report.branches) {
        REQUIRE(b.identified == b.bell_index);
        REQUIRE(b.entropy_bits == Approx(1.0).margin(kTol));
    }
}

TEST_CASE("discrimination reduction preserves orthogonality", "[protocols]") {
    const auto corpus = nlwe_default_corpus();
    const NlweReport report = reduce_nlwe(corpus);
    REQUIRE(report.ok);
    REQUIRE(report.max_gram_deviation_before < kTol);
    REQUIRE(report.max_gram_deviation_after < kTol);
    REQUIRE(report.min_discrimination_probability == Approx(1.0).margin(kTol));
    REQUIRE(report.reduced.size() == corpus.size());
    for (const auto& r : report.reduced) REQUIRE(r.dims() == std::vector<std::size_t>{2, 2, 2});
}

TEST_CASE("reduction keeps single products product-shaped", "[protocols]") {
    std::mt19937_64 rng(263);
    const PureState single =
        tensor(tensor(random_state({2}, rng), random_state({2}, rng)), random_state({2}, rng));
    const NlweReport report = reduce_nlwe({single});
    const PureState& out = report.reduced.front();
    for (std::size_t k = 0; k < 3; ++k) {
        const Matrix red = reduced_density(out, {k});
        REQUIRE(std::abs((red * red).trace().real() - 1.0) < 1e-8);
    }
}

TEST_CASE("reduction rejects malformed corpora", "[protocols]") {
    const auto corpus = nlwe_default_corpus();
    std::vector<PureState> bad{corpus[0], corpus[0]};
    REQUIRE_THROWS_AS(reduce_nlwe(bad), std::invalid_argument);

    Vector ghz = Vector::Zero(8);
    ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
    REQUIRE_THROWS_AS(reduce_nlwe({PureState({2, 2, 2}, ghz)}), std::invalid_argument);
}

TEST_CASE("correction search recovers the two-branch table", "[protocols]") {
    const SearchResult r = search_corrections(2, teleport_unitaries(2), standard_mass_basis(2), 3);
    REQUIRE(r.found);
    REQUIRE(r.vacuous.empty());
    REQUIRE(r.verification_min_fidelity >= 1.0 - 1e-9);
    const CorrectionTable shipped = forward_correction_table(2);
    for (std::size_t chi = 0; chi < 2; ++chi)
        for (std::size_t s = 0; s < 2; ++s)
            REQUIRE(equal_up_to_phase(r.table->at(chi, s).unitary.mat(), shipped.at(chi, s).unitary.mat()));
}

TEST_CASE("correction search recovers the three-branch table", "[protocols]") {
    const SearchResult r = search_corrections(3, teleport_unitaries(3), standard_mass_basis(3), 3);
    REQUIRE(r.found);
    REQUIRE(r.verification_min_fidelity >= 1.0 - 1e-9);
    const CorrectionTable shipped = forward_correction_table(3);
    for (std::size_t chi = 0; chi < 3; ++chi)
        for (std::size_t s = 0; s < 3; ++s)
            REQUIRE(equal_up_to_phase(r.table->at(chi, s).unitary.mat(), shipped.at(chi, s).unitary.mat()));
}

TEST_CASE("correction search recovers the four-branch table", "[protocols]") {
    const SearchResult r = search_corrections(4, teleport_unitaries(4), standard_mass_basis(4), 4);
    REQUIRE(r.found);
    const CorrectionTable shipped = forward_correction_table(4);
    for (std::size_t chi = 0; chi < 4; ++chi)
        for (std::size_t s = 0; s < 4; ++s)
            REQUIRE(equal_up_to_phase(r.table->at(chi, s).unitary.mat(), shipped.at(chi, s).unitary.mat()));
}

TEST_CASE("correction search reports degenerate strategies as unsolvable", "[protocols]") {
    const SearchResult r =
        search_corrections(2, {Unitary::identity(2), Unitary::identity(2)}, standard_mass_basis(2), 2);
    REQUIRE_FALSE(r.found);
    REQUIRE(r.first_failure.has_value());
    REQUIRE(r.first_failure->first == 0);  // the informative outcome already fails
    REQUIRE(r.vacuous.size() == 2);        // the "-" outcome never occurs
    for (const auto& [chi, s] : r.vacuous) REQUIRE(chi == 1);
}
