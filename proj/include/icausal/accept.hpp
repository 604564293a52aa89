// accept.hpp — The acceptance suite: every shipped guarantee as an executable
// criterion with pinned tolerances. Each criterion prints one pass/fail line;
// the whole suite is exposed through the CLI and the test runner.

#pragma once

#include <icausal/branch.hpp>
#include <icausal/oracles.hpp>
#include <icausal/presets.hpp>
#include <icausal/protocols.hpp>
#include <icausal/qcore.hpp>
#include <icausal/spacetime.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace icausal::accept {

struct CriterionResult {
    std::string name;
    bool passed;
    std::string detail;
    double seconds;
};

namespace detail {

struct Checker {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            if (!ok) detail << "; ";
            ok = false;
            detail << what;
        }
    }
};

inline void check_uniform_teleport(Checker& c, const ProtocolResult& r, std::size_t m, const char* tag) {
    const double p_expect = 1.0 / double(m * m);
    c.expect(r.branches.size() == m * m, std::string(tag) + ": missing branches");
    c.expect(r.min_branch_fidelity >= 1.0 - 1e-10, std::string(tag) + ": fidelity below 1-1e-10");
    for (const auto& b : r.branches)
        c.expect(std::abs(b.probability - p_expect) <= 1e-10, std::string(tag) + ": branch probability off");
}

inline KrausChannel random_cptp_channel(std::size_t dim, std::size_t kraus_count, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(static_cast<Eigen::Index>(dim * kraus_count), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix q = Matrix(qr.householderQ()).leftCols(static_cast<Eigen::Index>(dim));
    std::vector<Matrix> kraus;
    for (std::size_t k = 0; k < kraus_count; ++k)
        kraus.push_back(q.middleRows(static_cast<Eigen::Index>(dim * k), static_cast<Eigen::Index>(dim)));
    return KrausChannel(dim, dim, std::move(kraus));
}

}  // namespace detail

// 1. Two-branch teleportation: four exact branches at probability 1/4.
inline CriterionResult criterion_teleport_2ics() {
    detail::Checker c;
    std::mt19937_64 rng(1001);
    const std::vector<std::size_t> ds{2, 3, 5, 8};
    for (int trial = 0; trial < 200; ++trial) {
        const ProtocolResult r = teleport_2ics(random_state({2, ds[trial % ds.size()]}, rng));
        detail::check_uniform_teleport(c, r, 2, "teleport-2ics");
        if (!c.ok) break;
    }
    return {"teleport-2ics-table", c.ok, c.ok ? "200 random states, 4 branches each exact" : c.detail.str(), 0.0};
}

// 2. Teleport then back-teleport restores the state along all 16 paths.
inline CriterionResult criterion_roundtrip_2ics() {
    detail::Checker c;
    std::mt19937_64 rng(1002);
    const std::vector<std::size_t> ds{2, 3, 5, 8};
    for (int trial = 0; trial < 50 && c.ok; ++trial) {
        const PureState input = random_state({2, ds[trial % ds.size()]}, rng);
        const ProtocolResult fwd = teleport_2ics(input);
        for (const auto& fb : fwd.branches) {
            const ProtocolResult bwd = backteleport_2ics(fb.state);
            for (const auto& bb : bwd.branches)
                c.expect(fidelity(bb.state, input) >= 1.0 - 1e-10, "roundtrip: path fidelity below 1-1e-10");
        }
    }
    return {"roundtrip-2ics", c.ok, c.ok ? "50 random states, 16 paths each restore the input" : c.detail.str(),
            0.0};
}

// 3. Teleport-channel-backteleport equals direct channel application.
inline CriterionResult criterion_channel_universal() {
    detail::Checker c;
    std::mt19937_64 rng(1003);
    for (int trial = 0; trial < 50 && c.ok; ++trial) {
        const KrausChannel channel = detail::random_cptp_channel(6, 1 + trial % 4, rng);
        const PureState v1 = random_state({2, 3}, rng);
        const PureState v2 = random_state({2, 3}, rng);
        const DensityState rho({2, 3},
                               0.4 * v1.amps() * v1.amps().adjoint() + 0.6 * v2.amps() * v2.amps().adjoint());
        const double dist = trace_distance(implement_nonlocal_channel(rho, channel), apply_channel(channel, rho));
        c.expect(dist < 1e-10, "channel: protocol deviates from direct application");
    }
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    const DensityState swapped = implement_nonlocal_channel(
        DensityState::from_pure(PureState::basis_state({2, 2}, {0, 1})), KrausChannel(4, 4, {swap}));
    c.expect(trace_distance(swapped, DensityState::from_pure(PureState::basis_state({2, 2}, {1, 0}))) < 1e-10,
             "channel: SWAP |0>|1> -> |1>|0> failed");
    return {"channel-universal", c.ok, c.ok ? "50 random channels on 2x3 + SWAP match direct application"
                                            : c.detail.str(), 0.0};
}

// 4. Bell discrimination: deterministic, all eight table rows exercised.
inline CriterionResult criterion_bell_discrimination() {
    detail::Checker c;
    std::size_t rows = 0;
    for (std::size_t secret = 1; secret <= 4; ++secret) {
        const BellResult r = discriminate_bell(secret);
        c.expect(r.charlie_deterministic, "bell: Charlie outcome not deterministic");
        const std::string expected_label = (secret == 1 || secret == 3) ? "+" : "-";
        c.expect(r.charlie_label == expected_label, "bell: Charlie outcome wrong for secret");
        double identified_probability = 0.0;
        for (const auto& b : r.branches) {
            if (b.conclusion == secret) identified_probability += b.probability;
            ++rows;
        }
        c.expect(std::abs(identified_probability - 1.0) <= 1e-10, "bell: identification probability not 1");
    }
    c.expect(rows == 8, "bell: not all 8 table rows exercised");
    return {"bell-discrimination", c.ok,
            c.ok ? "4 secrets identified with probability 1, 8 rows exercised" : c.detail.str(), 0.0};
}

// 5. Entanglement generation from a product state.
inline CriterionResult criterion_entangle() {
    detail::Checker c;
    const PureState zero = PureState::basis_state(2, 0);
    const auto branches = entangle_2ics(Unitary::identity(2), Unitary(sigma_x()), zero, zero);
    c.expect(std::abs(branches[0].probability - 0.5) <= 1e-10, "entangle: + probability not 1/2");
    c.expect(std::abs(branches[1].probability - 0.5) <= 1e-10, "entangle: - probability not 1/2");
    c.expect(branches[0].entropy && std::abs(*branches[0].entropy - 1.0) <= 1e-10,
             "entangle: + entropy not 1 ebit");
    c.expect(branches[1].entropy && std::abs(*branches[1].entropy - 1.0) <= 1e-10,
             "entangle: - entropy not 1 ebit");

    const auto degenerate = entangle_2ics(Unitary::identity(2), Unitary::identity(2), zero, zero);
    c.expect(degenerate[1].probability < 1e-12, "entangle: identical unitaries must kill the - branch");
    c.expect(degenerate[0].entropy && *degenerate[0].entropy <= 1e-10,
             "entangle: identical unitaries must leave the + branch unentangled");
    return {"entangle-generation", c.ok,
            c.ok ? "+/- branches at 1/2 with 1 ebit; degenerate pair stays product" : c.detail.str(), 0.0};
}

// 6. Unlocking the bound-entangled four-qubit mixture.
inline CriterionResult criterion_smolin() {
    detail::Checker c;
    const SmolinReport r = unlock_smolin();
    c.expect(r.min_pt_eigenvalue >= -1e-10, "smolin: pair-cut partial transpose has a negative eigenvalue");
    c.expect(r.min_fidelity >= 1.0 - 1e-10, "smolin: final pair fidelity below 1-1e-10");
    c.expect(r.all_unlocked, "smolin: some branch failed to unlock");
    for (const auto& b : r.branches)
        c.expect(std::abs(b.entropy_bits - 1.0) <= 1e-10, "smolin: final pair does not carry 1 ebit");
    return {"smolin-unlocking", c.ok,
            c.ok ? "PPT across the pair cut; every branch ends in the target pair at 1 ebit" : c.detail.str(),
            0.0};
}

// 7. Three-branch teleportation, both directions.
inline CriterionResult criterion_teleport_3ics() {
    detail::Checker c;
    std::mt19937_64 rng(1007);
    const std::vector<std::size_t> ds{3, 5};
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        const std::size_t d = ds[trial % ds.size()];
        detail::check_uniform_teleport(c, teleport_3ics(random_state({3, d}, rng), Direction::Forward), 3,
                                       "teleport-3ics fwd");
        detail::check_uniform_teleport(c, teleport_3ics(random_state({3, d}, rng), Direction::Backward), 3,
                                       "teleport-3ics bwd");
    }
    return {"teleport-3ics-tables", c.ok,
            c.ok ? "100 random states, 9 forward + 9 backward branches each exact" : c.detail.str(), 0.0};
}

// 8. Four-branch teleportation, both directions.
inline CriterionResult criterion_teleport_4ics() {
    detail::Checker c;
    std::mt19937_64 rng(1008);
    const std::vector<std::size_t> ds{4, 5};
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        const std::size_t d = ds[trial % ds.size()];
        detail::check_uniform_teleport(c, teleport_4ics(random_state({4, d}, rng), Direction::Forward), 4,
                                       "teleport-4ics fwd");
        detail::check_uniform_teleport(c, teleport_4ics(random_state({4, d}, rng), Direction::Backward), 4,
                                       "teleport-4ics bwd");
    }
    return {"teleport-4ics-tables", c.ok,
            c.ok ? "100 random states, 16 forward + 16 backward branches each exact" : c.detail.str(), 0.0};
}

// 9. The correction search re-derives the shipped two- and three-branch tables.
inline CriterionResult criterion_search_recovery() {
    detail::Checker c;
    for (std::size_t m : {2u, 3u}) {
        const SearchResult r = search_corrections(m, teleport_unitaries(m), standard_mass_basis(m), m);
        c.expect(r.found, "search: no table found");
        if (!r.found) continue;
        const CorrectionTable shipped = forward_correction_table(m);
        for (std::size_t chi = 0; chi < m; ++chi)
            for (std::size_t s = 0; s < m; ++s)
                c.expect(equal_up_to_phase(r.table->at(chi, s).unitary.mat(), shipped.at(chi, s).unitary.mat()),
                         "search: entry differs beyond a global phase");
        c.expect(r.verification_min_fidelity >= 1.0 - 1e-9, "search: verification run below fidelity 1");
    }
    return {"search-recovery", c.ok,
            c.ok ? "two- and three-branch correction tables recovered up to phases" : c.detail.str(), 0.0};
}

// 10. Spacetime thresholds and classification against the quadrature oracle.
inline CriterionResult criterion_spacetime() {
    detail::Checker c;
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double M = 0.01 + 0.29 * uni(rng);
        const gr::SpacetimeConfig cfg(1.0, 1.0, M, 2.0 * M * 1.1 + 3.0 * uni(rng), 0.1 + 2.9 * uni(rng));
        const double closed = gr::light_coordinate_time(cfg.R, cfg.R + cfg.h, cfg);
        const double quad = oracles::light_time_quadrature(cfg.R, cfg.R + cfg.h, cfg);
        c.expect(std::abs(closed - quad) / quad < 1e-9, "spacetime: closed form deviates from quadrature");
    }

    bool diverged = false;
    try {
        gr::tau_star_threshold(gr::SpacetimeConfig(1.0, 1.0, 0.0, 1.0, 1.0));
    } catch (const gr::divergent_threshold_error&) {
        diverged = true;
    }
    c.expect(diverged, "spacetime: flat configuration must raise a divergent threshold");

    for (int trial = 0; trial < 1000; ++trial) {
        const double M = 0.01 + 0.29 * uni(rng);
        const gr::SpacetimeConfig cfg(1.0, 1.0, M, 2.0 * M * 1.1 + 3.0 * uni(rng), 0.1 + 2.9 * uni(rng));
        const gr::Clock placement = trial % 2 == 0 ? gr::Clock::A : gr::Clock::B;
        const gr::EventSpec e1(uni(rng) < 0.5 ? gr::Clock::A : gr::Clock::B, 40.0 * uni(rng));
        const gr::EventSpec e2(uni(rng) < 0.5 ? gr::Clock::A : gr::Clock::B, 40.0 * uni(rng));
        const auto fwd = gr::classify_order(e1, e2, placement, cfg);
        const auto rev = gr::classify_order(e2, e1, placement, cfg);
        c.expect(std::abs(fwd.margin + rev.margin) < 1e-12, "spacetime: classification is not antisymmetric");
    }

    const gr::SpacetimeConfig cfg(1.0, 1.0, 0.1, 1.0, 1.0);
    const double tau_star = 1.5 * gr::tau_star_threshold(cfg);
    const double tilde = gr::definite_future_threshold(tau_star, cfg);
    const gr::EventSpec x(gr::Clock::A, tau_star);
    const gr::EventSpec y_prime(gr::Clock::B, tilde * (1.0 + 1e-9));
    c.expect(gr::classify_order(x, y_prime, gr::Clock::A, cfg).relation == gr::Relation::XBeforeY,
             "spacetime: definite-future event not in the future under the near-A placement");
    c.expect(gr::classify_order(x, y_prime, gr::Clock::B, cfg).relation == gr::Relation::XBeforeY,
             "spacetime: definite-future event not in the future under the near-B placement");
    return {"spacetime-thresholds", c.ok,
            c.ok ? "quadrature match, divergent flat limit, antisymmetry, definite future" : c.detail.str(), 0.0};
}

// 11. Superposed run equals the controlled-unitary construction; per-branch
// locality preserves the sender|receiver entropy.
inline CriterionResult criterion_branch_oracle() {
    detail::Checker c;
    std::mt19937_64 rng(1011);
    for (std::size_t m : {2u, 3u, 4u}) {
        std::vector<Unitary> family;
        for (std::size_t k = 0; k < m; ++k) family.push_back(random_unitary(2, rng));
        const auto strat = mics_teleport_strategy(m, 0, 2, family);
        const std::vector<std::size_t> dims{2, 4, 2};
        for (int trial = 0; trial < 5; ++trial) {
            const PureState input = random_state(dims, rng);
            const PureState fast = run_superposed(uniform_mass_register(m), strat, input);
            const std::size_t n = input.dim();
            Matrix ctrl = Matrix::Zero(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(m * n));
            for (std::size_t k = 0; k < m; ++k) {
                const Unitary wk = compose_branch(simulate_messages(strat, strat.orders[k]), dims);
                ctrl.block(static_cast<Eigen::Index>(k * n), static_cast<Eigen::Index>(k * n),
                           static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = wk.mat();
            }
            const PureState mass_state({m}, uniform_mass_register(m).amps);
            const Vector oracle = ctrl * tensor(mass_state, input).amps();
            c.expect((fast.amps() - oracle).cwiseAbs().maxCoeff() < 1e-12,
                     "branch: superposed run deviates from the controlled unitary");
        }
    }
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + trial % 3;
        const auto strat = mics_teleport_strategy(m, 0, 2, teleport_unitaries(m));
        const PureState input = tensor(random_state({m, 3}, rng), PureState::basis_state(m, 0));
        const double before = entanglement_entropy(input, {0});
        for (const auto& order : strat.orders) {
            PureState branch_state = input;
            for (const auto& step : simulate_messages(strat, order))
                branch_state = apply_unitary(branch_state, step.unitary, step.targets);
            c.expect(std::abs(entanglement_entropy(branch_state, {0}) - before) < 1e-9,
                     "branch: a local branch changed the bipartite entropy");
            ++checked;
        }
    }
    c.expect(checked >= 100, "branch: too few entropy checks");
    return {"branch-oracle", c.ok,
            c.ok ? "controlled-unitary equality and per-branch entropy preservation" : c.detail.str(), 0.0};
}

// 12. The product-state discrimination reduction keeps the corpus orthogonal.
inline CriterionResult criterion_nlwe() {
    detail::Checker c;
    const NlweReport r = reduce_nlwe(nlwe_default_corpus());
    c.expect(r.max_gram_deviation_before <= 1e-10, "nlwe: corpus not orthogonal before reduction");
    c.expect(r.max_gram_deviation_after <= 1e-10, "nlwe: orthogonality lost in reduction");
    c.expect(r.min_discrimination_probability >= 1.0 - 1e-10, "nlwe: discrimination below certainty");
    return {"nlwe-reduction", c.ok,
            c.ok ? "corpus Gram matrix stays the identity; discrimination certain" : c.detail.str(), 0.0};
}

// ----------------------------------- runner ----------------------------------

inline std::vector<CriterionResult> run_all(const std::string& filter = "") {
    using CriterionFn = std::function<CriterionResult()>;
    const std::vector<std::pair<std::string, CriterionFn>> criteria{
        {"teleport-2ics-table", criterion_teleport_2ics},
        {"roundtrip-2ics", criterion_roundtrip_2ics},
        {"channel-universal", criterion_channel_universal},
        {"bell-discrimination", criterion_bell_discrimination},
        {"entangle-generation", criterion_entangle},
        {"smolin-unlocking", criterion_smolin},
        {"teleport-3ics-tables", criterion_teleport_3ics},
        {"teleport-4ics-tables", criterion_teleport_4ics},
        {"search-recovery", criterion_search_recovery},
        {"spacetime-thresholds", criterion_spacetime},
        {"branch-oracle", criterion_branch_oracle},
        {"nlwe-reduction", criterion_nlwe},
    };
    std::vector<CriterionResult> results;
    for (const auto& [name, fn] : criteria) {
        if (!filter.empty() && name.rfind(filter, 0) != 0) continue;
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r = fn();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(r));
    }
    return results;
}

inline bool print_results(const std::vector<CriterionResult>& results) {
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %-24s %6.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        all = all && r.passed;
    }
    std::printf("%zu criteria, %s\n", results.size(), all ? "all passed" : "FAILURES PRESENT");
    return all;
}

}  // namespace icausal::accept
