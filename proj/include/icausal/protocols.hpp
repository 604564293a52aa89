// protocols.hpp — End-to-end protocols on superposed causal orders:
// entanglement generation, teleportation and back-teleportation for two, three
// and four branches with their correction tables, universal channel
// implementation, Bell discrimination, bound-entanglement unlocking, the
// product-state discrimination reduction, and a brute-force correction search.

#pragma once

#include <icausal/branch.hpp>
#include <icausal/presets.hpp>
#include <icausal/qcore.hpp>

#include <Eigen/SVD>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace icausal {

// ------------------------------- transcripts --------------------------------

// Classical record of a run. Entries sharing a nonnegative group id are
// sibling outcomes of one measurement; their probabilities sum to 1.
struct TranscriptEntry {
    std::string actor;
    std::string action;
    std::string detail;
    double probability = 1.0;
    int group = -1;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;

    bool sibling_probabilities_consistent(double tol = kTol) const {
        std::map<int, double> sums;
        for (const auto& e : entries)
            if (e.group >= 0) sums[e.group] += e.probability;
        for (const auto& [group, total] : sums)
            if (std::abs(total - 1.0) > tol) return false;
        return true;
    }
};

// ---------------------------- correction tables ------------------------------

struct CorrectionEntry {
    Unitary unitary;
    std::string label;
};

// Receiver fix-up keyed by (Charlie's mass outcome, sender's local outcome).
class CorrectionTable {
public:
    CorrectionTable(std::size_t charlie_outcomes, std::size_t sender_outcomes, std::vector<CorrectionEntry> entries)
        : charlie_(charlie_outcomes), sender_(sender_outcomes), entries_(std::move(entries)) {
        if (entries_.size() != charlie_ * sender_)
            throw std::invalid_argument("CorrectionTable: must be total over all outcome pairs");
    }

    std::size_t charlie_outcomes() const { return charlie_; }
    std::size_t sender_outcomes() const { return sender_; }

    const CorrectionEntry& at(std::size_t charlie, std::size_t sender) const {
        if (charlie >= charlie_ || sender >= sender_) throw std::out_of_range("CorrectionTable::at");
        return entries_[charlie * sender_ + sender];
    }

private:
    std::size_t charlie_, sender_;
    std::vector<CorrectionEntry> entries_;
};

// --------------------- protocol unitaries and corrections --------------------

namespace detail {

inline Matrix perm_matrix(std::size_t dim, const std::vector<std::size_t>& image) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(image[j]), static_cast<Eigen::Index>(j)) = 1.0;
    return m;
}

inline Complex omega3() { return std::polar(1.0, 2.0 * M_PI / 3.0); }

}  // namespace detail

// Signal/response unitaries U1..Um for the m-branch schedule.
inline std::vector<Unitary> teleport_unitaries(std::size_t m) {
    if (m == 2) return {Unitary::identity(2), Unitary(sigma_x())};
    if (m == 3)
        return {Unitary::identity(3), Unitary(detail::perm_matrix(3, {1, 2, 0})),
                Unitary(detail::perm_matrix(3, {2, 0, 1}))};
    if (m == 4)
        return {Unitary::identity(4), Unitary(detail::perm_matrix(4, {2, 3, 0, 1})),
                Unitary(detail::perm_matrix(4, {1, 2, 3, 0})), Unitary(detail::perm_matrix(4, {3, 0, 1, 2}))};
    throw std::invalid_argument("teleport_unitaries: only m in {2,3,4} is supported");
}

inline CorrectionTable forward_correction_table(std::size_t m) {
    std::vector<CorrectionEntry> entries;
    if (m == 2) {
        Matrix i_sigma_y(2, 2);
        i_sigma_y << 0, 1, -1, 0;
        entries.push_back({Unitary(sigma_x()), "sigma_x"});
        entries.push_back({Unitary::identity(2), "I"});
        entries.push_back({Unitary(i_sigma_y), "i*sigma_y"});
        entries.push_back({Unitary(sigma_z()), "sigma_z"});
        return CorrectionTable(2, 2, std::move(entries));
    }
    if (m == 3) {
        const Complex w = detail::omega3();
        const std::vector<Matrix> v{detail::perm_matrix(3, {2, 1, 0}), detail::perm_matrix(3, {0, 2, 1}),
                                    detail::perm_matrix(3, {1, 0, 2})};
        std::vector<Matrix> om{Matrix::Identity(3, 3), Matrix::Identity(3, 3), Matrix::Identity(3, 3)};
        om[1].diagonal() << w * w, w, 1.0;
        om[2].diagonal() << w, w * w, 1.0;
        for (std::size_t chi = 0; chi < 3; ++chi)
            for (std::size_t s = 0; s < 3; ++s) {
                std::string label = "V" + std::to_string(s + 1);
                if (chi > 0) label += "*Omega" + std::to_string(chi);
                entries.push_back({Unitary(v[s] * om[chi]), std::move(label)});
            }
        return CorrectionTable(3, 3, std::move(entries));
    }
    if (m == 4) {
        const std::vector<Matrix> v{detail::perm_matrix(4, {2, 1, 3, 0}), detail::perm_matrix(4, {3, 2, 0, 1}),
                                    detail::perm_matrix(4, {0, 3, 1, 2}), detail::perm_matrix(4, {1, 0, 2, 3})};
        std::vector<Matrix> om{Matrix::Identity(4, 4), Matrix::Identity(4, 4), Matrix::Identity(4, 4),
                               Matrix::Identity(4, 4)};
        om[1].diagonal() << 1, -1, -1, 1;
        om[2].diagonal() << -1, -1, 1, 1;
        om[3].diagonal() << -1, 1, -1, 1;
        for (std::size_t chi = 0; chi < 4; ++chi)
            for (std::size_t s = 0; s < 4; ++s) {
                std::string label = "V" + std::to_string(s + 1);
                if (chi > 0) label += "*Omega" + std::to_string(chi);
                entries.push_back({Unitary(v[s] * om[chi]), std::move(label)});
            }
        return CorrectionTable(4, 4, std::move(entries));
    }
    throw std::invalid_argument("forward_correction_table: only m in {2,3,4} is supported");
}

inline CorrectionTable backward_correction_table(std::size_t m) {
    std::vector<CorrectionEntry> entries;
    if (m == 2) return forward_correction_table(2);  // same operators, keyed by Bob's outcome
    if (m == 3) {
        const Complex w = detail::omega3();
        // sender outcome s maps to V3, V1, V2
        const std::vector<Matrix> v{detail::perm_matrix(3, {1, 0, 2}), detail::perm_matrix(3, {2, 1, 0}),
                                    detail::perm_matrix(3, {0, 2, 1})};
        const std::vector<std::string> vname{"V3", "V1", "V2"};
        std::vector<Matrix> om{Matrix::Identity(3, 3), Matrix::Identity(3, 3), Matrix::Identity(3, 3)};
        om[1].diagonal() << w * w, w, 1.0;
        om[2].diagonal() << w, w * w, 1.0;
        for (std::size_t chi = 0; chi < 3; ++chi)
            for (std::size_t s = 0; s < 3; ++s) {
                std::string label = vname[s];
                if (chi > 0) label += "*Omega" + std::to_string(chi);
                entries.push_back({Unitary(v[s] * om[chi]), std::move(label)});
            }
        return CorrectionTable(3, 3, std::move(entries));
    }
    if (m == 4) {
        const std::vector<Matrix> wmats{detail::perm_matrix(4, {1, 2, 0, 3}), detail::perm_matrix(4, {2, 3, 1, 0}),
                                        detail::perm_matrix(4, {3, 0, 2, 1}), detail::perm_matrix(4, {0, 1, 3, 2})};
        // The collapsed states fix the phase patterns: outcome b pairs with
        // Omega3 (up to a global sign) and outcome d with Omega1.
        std::vector<Matrix> om{Matrix::Identity(4, 4), Matrix::Identity(4, 4), Matrix::Identity(4, 4),
                               Matrix::Identity(4, 4)};
        om[1].diagonal() << -1, 1, -1, 1;
        om[2].diagonal() << -1, -1, 1, 1;
        om[3].diagonal() << 1, -1, -1, 1;
        const std::vector<std::string> omname{"", "*Omega3", "*Omega2", "*Omega1"};
        for (std::size_t chi = 0; chi < 4; ++chi)
            for (std::size_t s = 0; s < 4; ++s)
                entries.push_back({Unitary(wmats[s] * om[chi]), "W" + std::to_string(s + 1) + omname[chi]});
        return CorrectionTable(4, 4, std::move(entries));
    }
    throw std::invalid_argument("backward_correction_table: only m in {2,3,4} is supported");
}

// ------------------------------- teleportation -------------------------------

enum class Direction { Forward, Backward };

struct BranchOutcome {
    std::size_t charlie_outcome;
    std::string charlie_label;
    std::size_t sender_outcome;
    double probability;
    std::string correction;
    PureState state;
    double fid;
};

struct ProtocolResult {
    std::string protocol;
    std::vector<BranchOutcome> branches;
    Transcript transcript;
    double min_branch_fidelity;
    double probability_sum;
};

// Runs an m-branch teleportation with caller-supplied unitaries, mass basis
// and correction table; the standard entry points below fix those pieces.
inline ProtocolResult teleport_custom(const PureState& input, std::size_t m, Direction dir,
                                      const std::vector<Unitary>& unitaries, const Basis& mass_basis,
                                      const CorrectionTable& table,
                                      const std::vector<std::string>& charlie_labels) {
    if (input.subsystems() != 2 || input.dims()[0] != m)
        throw std::invalid_argument("teleport: input must be bipartite with an m-dimensional sender factor");
    const bool forward = dir == Direction::Forward;

    ProtocolResult result;
    result.protocol = (forward ? "teleport-" : "backteleport-") + std::to_string(m) + "ics";
    const std::string sender = forward ? "Alice" : "Bob";
    const std::string receiver = forward ? "Bob" : "Alice";

    // The measured register is always subsystem 0 of the system state: the
    // sender qudit when teleporting forward, the ancilla it was teleported
    // into when sending back. The fresh |0> register is appended last.
    const PureState staged = tensor(input, PureState::basis_state(m, 0));
    const auto strategy = forward ? mics_teleport_strategy(m, 0, 2, unitaries)
                                  : mics_teleport_strategy(m, 2, 0, unitaries);

    if (forward) {
        result.transcript.entries.push_back({receiver, "prepare", "ancilla reset to |0>"});
    } else {
        result.transcript.entries.push_back({receiver, "reset", "register reset to |0>"});
        result.transcript.entries.push_back({"Charlie", "reset", "mass configuration reset to the uniform state"});
    }

    const MassRegister mass(m, uniform_mass_register(m).amps, mass_basis);
    const PureState joint = run_superposed(mass, strategy, staged);

    const PureState target(input.dims(), input.amps());
    result.min_branch_fidelity = 1.0;
    result.probability_sum = 0.0;

    const auto mass_outcomes = measure_mass(joint, mass_basis);
    int group = 0;
    for (const auto& mo : mass_outcomes) {
        result.transcript.entries.push_back(
            {"Charlie", "measure-mass", charlie_labels[mo.outcome], mo.probability, 0});
    }
    for (const auto& mo : mass_outcomes) {
        if (!mo.system) continue;
        ++group;
        const auto sender_outcomes = measure_exhaustive(*mo.system, 0, Basis::computational(m));
        for (const auto& so : sender_outcomes) {
            result.transcript.entries.push_back({sender, "measure", std::to_string(so.outcome),
                                                 so.probability, group});
            if (!so.state) continue;
            const CorrectionEntry& corr = table.at(mo.outcome, so.outcome);
            const PureState corrected = apply_unitary(*so.state, corr.unitary, {2});
            const PureState trimmed = remove_basis_factor(corrected, 0, so.outcome);
            const PureState final_state = permute_subsystems(trimmed, {1, 0});
            const double f = fidelity(final_state, target);
            const double p = mo.probability * so.probability;
            result.transcript.entries.push_back(
                {receiver, "correction", corr.label + " on " + (forward ? "ancilla" : "register")});
            result.branches.push_back({mo.outcome, charlie_labels[mo.outcome], so.outcome, p, corr.label,
                                       final_state, f});
            result.min_branch_fidelity = std::min(result.min_branch_fidelity, f);
            result.probability_sum += p;
        }
    }
    return result;
}

inline ProtocolResult teleport_mics(const PureState& input, std::size_t m, Direction dir) {
    const CorrectionTable table =
        dir == Direction::Forward ? forward_correction_table(m) : backward_correction_table(m);
    return teleport_custom(input, m, dir, teleport_unitaries(m), standard_mass_basis(m), table,
                           standard_mass_labels(m));
}

inline ProtocolResult teleport_2ics(const PureState& input) { return teleport_mics(input, 2, Direction::Forward); }
inline ProtocolResult backteleport_2ics(const PureState& input) {
    return teleport_mics(input, 2, Direction::Backward);
}
inline ProtocolResult teleport_3ics(const PureState& input, Direction dir) { return teleport_mics(input, 3, dir); }
inline ProtocolResult teleport_4ics(const PureState& input, Direction dir) { return teleport_mics(input, 4, dir); }

// --------------------------- entanglement generation -------------------------

struct EntangleBranch {
    std::string label;
    double probability;
    std::optional<PureState> state;    // absent on null branches
    std::optional<double> entropy;     // across the two parties, in bits
};

// Both parties hold a d-dimensional system; the +/- mass measurement projects
// (U1 psi)(U2 phi) +/- (U2 psi)(U1 phi) out of the superposed run.
inline std::vector<EntangleBranch> entangle_2ics(const Unitary& u1, const Unitary& u2, const PureState& psi,
                                                 const PureState& phi) {
    if (psi.dim() != phi.dim() || u1.dim() != psi.dim() || u2.dim() != psi.dim())
        throw std::invalid_argument("entangle_2ics: unitaries and states must share one dimension");
    const PureState a({psi.dim()}, psi.amps());
    const PureState b({phi.dim()}, phi.amps());
    const auto strategy = mics_teleport_strategy(2, 0, 1, {u1, u2});
    const PureState joint = run_superposed(uniform_mass_register(2), strategy, tensor(a, b));

    std::vector<EntangleBranch> branches;
    const auto labels = standard_mass_labels(2);
    for (const auto& mo : measure_mass(joint, standard_mass_basis(2))) {
        EntangleBranch br{labels[mo.outcome], mo.probability, std::nullopt, std::nullopt};
        if (mo.system) {
            br.state = mo.system;
            br.entropy = entanglement_entropy(*mo.system, {0});
        }
        branches.push_back(std::move(br));
    }
    return branches;
}

// --------------------------- channel implementation --------------------------

namespace detail {

// Probability-weighted mixture of the post-correction branch states; for an
// exact protocol this reassembles the teleported projector.
inline Matrix branch_mixture(const ProtocolResult& result) {
    const Eigen::Index n = result.branches.front().state.amps().size();
    Matrix mix = Matrix::Zero(n, n);
    for (const auto& br : result.branches)
        mix += br.probability * (br.state.amps() * br.state.amps().adjoint());
    return mix;
}

}  // namespace detail

// Teleport, apply the channel in one laboratory, teleport back. Mixed states
// are split along their eigendecomposition and reassembled by linearity.
inline DensityState implement_nonlocal_channel(const DensityState& rho, const KrausChannel& channel) {
    if (rho.subsystems() != 2 || rho.dims()[0] != 2)
        throw std::invalid_argument("implement_nonlocal_channel: state must live on a qubit x d system");
    if (channel.in_dim() != rho.dim() || channel.out_dim() != rho.dim())
        throw std::invalid_argument("implement_nonlocal_channel: channel dimension mismatch");
    if (!channel.trace_preserving())
        throw std::invalid_argument("implement_nonlocal_channel: channel must be trace preserving");

    const Eigen::Index n = static_cast<Eigen::Index>(rho.dim());
    Matrix out = Matrix::Zero(n, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
    for (Eigen::Index l = 0; l < n; ++l) {
        const double p = es.eigenvalues()(l);
        if (p < 1e-14) continue;

        const PureState component(rho.dims(), es.eigenvectors().col(l));
        const Matrix teleported = detail::branch_mixture(teleport_2ics(component));

        Matrix transformed = Matrix::Zero(n, n);
        for (const Matrix& k : channel.kraus()) transformed += k * teleported * k.adjoint();

        // send each eigencomponent of the transformed state back
        Eigen::SelfAdjointEigenSolver<Matrix> back(transformed);
        for (Eigen::Index w = 0; w < n; ++w) {
            const double q = back.eigenvalues()(w);
            if (q < 1e-14) continue;
            const PureState piece(rho.dims(), back.eigenvectors().col(w));
            out += p * q * detail::branch_mixture(backteleport_2ics(piece));
        }
    }
    return DensityState(rho.dims(), std::move(out));
}

// ----------------------------- Bell discrimination ---------------------------

struct BellBranch {
    std::string charlie;
    std::size_t alice;
    std::size_t bob;
    double probability;
    std::size_t conclusion;
};

struct BellResult {
    std::size_t secret;
    std::size_t identified;
    bool charlie_deterministic;
    std::string charlie_label;
    std::vector<BellBranch> branches;
    Transcript transcript;
};

// No ancilla: both parties act on their half of the shared pair with {I, X};
// the mass outcome plus the two local bits identify the state.
inline BellResult discriminate_bell(std::size_t secret_index) {
    const PureState secret = bell_state(secret_index);
    const auto strategy = mics_teleport_strategy(2, 0, 1, teleport_unitaries(2));
    const PureState joint = run_superposed(uniform_mass_register(2), strategy, secret);

    BellResult result;
    result.secret = secret_index;
    result.identified = 0;
    result.charlie_deterministic = true;

    const auto labels = standard_mass_labels(2);
    const auto mass_outcomes = measure_mass(joint, standard_mass_basis(2));
    std::size_t live_outcomes = 0;
    for (const auto& mo : mass_outcomes) {
        result.transcript.entries.push_back({"Charlie", "measure-mass", labels[mo.outcome], mo.probability, 0});
        if (!mo.system) continue;
        ++live_outcomes;
        if (std::abs(mo.probability - 1.0) > kTol) result.charlie_deterministic = false;
        result.charlie_label = labels[mo.outcome];

        for (const auto& ao : measure_exhaustive(*mo.system, 0, Basis::computational(2))) {
            if (!ao.state) continue;
            result.transcript.entries.push_back(
                {"Alice", "measure", std::to_string(ao.outcome), ao.probability, 1});
            for (const auto& bo : measure_exhaustive(*ao.state, 1, Basis::computational(2))) {
                if (!bo.state) continue;
                // outcome table: equal bits pair with B3/B4, unequal with B1/B2
                const bool plus = mo.outcome == 0;
                const bool equal = ao.outcome == bo.outcome;
                const std::size_t conclusion = plus ? (equal ? 3 : 1) : (equal ? 4 : 2);
                const double p = mo.probability * ao.probability * bo.probability;
                result.transcript.entries.push_back({"Bob", "measure", std::to_string(bo.outcome),
                                                     bo.probability, 2 + int(ao.outcome)});
                result.branches.push_back({labels[mo.outcome], ao.outcome, bo.outcome, p, conclusion});
                if (result.identified == 0)
                    result.identified = conclusion;
                else if (result.identified != conclusion)
                    result.identified = 5;  // inconsistent; never happens for Bell inputs
            }
        }
    }
    if (live_outcomes != 1) result.charlie_deterministic = false;
    return result;
}

// ----------------------------- Smolin unlocking ------------------------------

struct SmolinBranch {
    std::size_t bell_index;
    std::size_t identified;
    std::string correction;
    double fidelity_b1;
    double entropy_bits;
};

struct SmolinReport {
    double min_pt_eigenvalue;  // across the (A,B)|(D,E) cut
    bool ppt;
    std::vector<SmolinBranch> branches;
    double min_fidelity;
    bool all_unlocked;
    Transcript transcript;
};

// The pair mixture is an even ensemble of identical Bell pairs; identifying
// the AB pair tells Dan and Emma which Pauli turns their pair into B1.
inline SmolinReport unlock_smolin() {
    SmolinReport report;
    const DensityState rho = smolin_state();
    Eigen::SelfAdjointEigenSolver<Matrix> es(partial_transpose(rho, {2, 3}), Eigen::EigenvaluesOnly);
    report.min_pt_eigenvalue = es.eigenvalues().minCoeff();
    report.ppt = report.min_pt_eigenvalue >= -kTol;

    const std::vector<std::pair<Matrix, std::string>> corrections{
        {Matrix::Identity(2, 2), "I"},
        {sigma_z(), "sigma_z"},
        {sigma_x(), "sigma_x"},
        {sigma_x() * sigma_z(), "sigma_x*sigma_z"},
    };

    report.min_fidelity = 1.0;
    report.all_unlocked = true;
    for (std::size_t i = 1; i <= 4; ++i) {
        const BellResult bell = discriminate_bell(i);
        report.transcript.entries.push_back(
            {"Alice+Bob", "discriminate", "B" + std::to_string(bell.identified), 0.25, 0});
        report.transcript.entries.push_back(
            {"Dan", "correction", corrections[bell.identified - 1].second});

        const PureState pair = bell_state(i);
        const PureState fixed =
            apply_unitary(pair, Unitary(corrections[bell.identified - 1].first), {0});
        const double f = fidelity(fixed, bell_state(1));
        const double s = entanglement_entropy(fixed, {0});
        report.branches.push_back({i, bell.identified, corrections[bell.identified - 1].second, f, s});
        report.min_fidelity = std::min(report.min_fidelity, f);
        if (bell.identified != i || f < 1.0 - kTol) report.all_unlocked = false;
    }
    return report;
}

// --------------------- product-state discrimination reduction ----------------

struct NlweReport {
    std::vector<PureState> reduced;  // (B, C, C') with the pair (C, C') in one laboratory
    double max_gram_deviation_before;
    double max_gram_deviation_after;
    double min_discrimination_probability;
    bool ok;
};

namespace detail {

inline double max_gram_deviation(const std::vector<PureState>& states) {
    double dev = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < states.size(); ++j) {
            const double g = std::abs(inner_product(states[i], states[j]));
            dev = std::max(dev, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    return dev;
}

inline bool is_product_across_each_party(const PureState& state) {
    for (std::size_t k = 0; k < state.subsystems(); ++k) {
        const Matrix red = reduced_density(state, {k});
        if (std::abs((red * red).trace().real() - 1.0) > 1e-8) return false;
    }
    return true;
}

}  // namespace detail

// Teleports the first party's qubit into the third party's laboratory, turning
// the three-party discrimination problem into a bipartite one.
inline NlweReport reduce_nlwe(const std::vector<PureState>& states) {
    if (states.empty()) throw std::invalid_argument("reduce_nlwe: empty state set");
    for (const auto& s : states) {
        if (s.subsystems() != 3 || s.dims()[0] != 2 || s.dims()[1] != 2)
            throw std::invalid_argument("reduce_nlwe: states must live on qubit x qubit x d");
        if (s.dims() != states.front().dims())
            throw std::invalid_argument("reduce_nlwe: states must share dimensions");
        if (!detail::is_product_across_each_party(s))
            throw std::invalid_argument("reduce_nlwe: input is not a product across the three parties");
    }

    NlweReport report;
    report.max_gram_deviation_before = detail::max_gram_deviation(states);
    if (report.max_gram_deviation_before > kTol)
        throw std::invalid_argument("reduce_nlwe: input states are not orthogonal");

    const std::size_t d = states.front().dims()[2];
    for (const auto& s : states) {
        // qubit vs the joined (B, C) block
        const PureState flat({2, 2 * d}, s.amps());
        const ProtocolResult tele = teleport_2ics(flat);
        const PureState& moved = tele.branches.front().state;  // (C', (B, C))
        const PureState split({2, 2, d}, moved.amps());
        report.reduced.push_back(permute_subsystems(split, {1, 2, 0}));
    }

    report.max_gram_deviation_after = detail::max_gram_deviation(report.reduced);

    // global projective discrimination over the reduced set
    report.min_discrimination_probability = 1.0;
    for (std::size_t j = 0; j < report.reduced.size(); ++j) {
        double correct = 0.0;
        for (std::size_t i = 0; i < report.reduced.size(); ++i) {
            const double overlap = std::norm(inner_product(report.reduced[i], report.reduced[j]));
            if (i == j) correct = overlap;
        }
        report.min_discrimination_probability = std::min(report.min_discrimination_probability, correct);
    }
    report.ok = report.max_gram_deviation_after < check_tolerance() &&
                report.min_discrimination_probability > 1.0 - check_tolerance();
    return report;
}

// ------------------------------ correction search ----------------------------

struct SearchResult {
    bool found;
    std::optional<CorrectionTable> table;
    std::vector<std::pair<std::size_t, std::size_t>> vacuous;        // zero-probability pairs
    std::optional<std::pair<std::size_t, std::size_t>> first_failure;
    double verification_min_fidelity = 0.0;
};

// Brute-force check whether a correction unitary exists for every outcome
// pair: the conditional receiver map, linear in the sender coefficients, must
// be a scaled isometry. The least-squares unitary is its polar factor.
inline SearchResult search_corrections(std::size_t m, const std::vector<Unitary>& sender_unitaries,
                                       const Basis& mass_basis, std::size_t d) {
    if (m < 2 || m > 6) throw std::invalid_argument("search_corrections: m must be in 2..6");
    if (sender_unitaries.size() != m)
        throw std::invalid_argument("search_corrections: need exactly m unitaries");
    for (const auto& u : sender_unitaries)
        if (u.dim() != m) throw std::invalid_argument("search_corrections: unitaries must be m-dimensional");
    if (mass_basis.dim() != m) throw std::invalid_argument("search_corrections: mass basis must be m-dimensional");
    if (d < 1) throw std::invalid_argument("search_corrections: d must be positive");

    // Per-branch sender composite A_k and ancilla response B_k, replayed from
    // the schedule itself.
    const auto strategy = mics_teleport_strategy(m, 0, 1, sender_unitaries);
    std::vector<Matrix> a_k(m), b_k(m);
    for (std::size_t k = 0; k < m; ++k) {
        Matrix a = Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        Matrix b = Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (const auto& step : simulate_messages(strategy, strategy.orders[k])) {
            if (step.party == "Alice")
                a = step.unitary.mat() * a;
            else
                b = step.unitary.mat() * b;
        }
        a_k[k] = a;
        b_k[k] = b;
    }

    SearchResult result;
    result.found = true;
    std::vector<CorrectionEntry> entries;
    const double inv_sqrt_m = 1.0 / std::sqrt(double(m));
    for (std::size_t chi = 0; chi < m; ++chi) {
        for (std::size_t s = 0; s < m; ++s) {
            // column i: the receiver state produced by sender basis vector |i>
            Matrix cond = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
            for (std::size_t k = 0; k < m; ++k) {
                const Complex weight =
                    inv_sqrt_m * std::conj(mass_basis.vec(chi)(static_cast<Eigen::Index>(k)));
                const Vector anc = b_k[k].col(0);  // B_k |0>
                for (std::size_t i = 0; i < m; ++i)
                    cond.col(static_cast<Eigen::Index>(i)) +=
                        weight * a_k[k](static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) * anc;
            }
            const double weight2 = cond.squaredNorm();
            if (weight2 < 1e-12) {
                // no information ever reaches the receiver on this pair; flag
                // it instead of inventing a correction
                result.vacuous.push_back({chi, s});
                result.found = false;
                if (!result.first_failure) result.first_failure = {chi, s};
                continue;
            }
            const double gamma = std::sqrt(weight2 / double(m));
            Eigen::JacobiSVD<Matrix> svd(cond.adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Matrix correction = svd.matrixU() * svd.matrixV().adjoint();
            const Matrix residual = correction * cond - gamma * Matrix::Identity(cond.rows(), cond.cols());
            if (residual.cwiseAbs().maxCoeff() > 1e-9) {
                result.found = false;
                if (!result.first_failure) result.first_failure = {chi, s};
                continue;
            }
            entries.push_back({Unitary(correction),
                               "solved(" + std::to_string(chi) + "," + std::to_string(s) + ")"});
        }
    }

    if (result.found) {
        result.table = CorrectionTable(m, m, std::move(entries));
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < m; ++k) labels.push_back("m" + std::to_string(k));
        std::mt19937_64 rng(12345);
        const PureState probe = random_state({m, d}, rng);
        const ProtocolResult check =
            teleport_custom(probe, m, Direction::Forward, sender_unitaries, mass_basis, *result.table, labels);
        result.verification_min_fidelity = check.min_branch_fidelity;
    }
    return result;
}

// Equality of two unitaries up to a global phase.
inline bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol = 1e-9) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    const double overlap = std::abs((a.adjoint() * b).trace());
    return std::abs(overlap - double(a.rows())) < tol * a.rows();
}

}  // namespace icausal
