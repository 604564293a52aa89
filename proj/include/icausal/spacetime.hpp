// spacetime.hpp — Schwarzschild causal geometry: light-travel coordinate
// times, gravitational time-dilation ratios, causal-connection thresholds and
// the classification of event pairs under each mass placement.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace icausal::gr {

// Margins inside this band are reported as boundary rather than silently
// classified: the light-cone inequality is closed and numeric ties must be
// visible.
inline constexpr double kBoundaryBand = 1e-9;

// Below this mass the causal-connection threshold is treated as divergent.
inline constexpr double kMassFloor = 1e-30;

struct horizon_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct divergent_threshold_error : std::domain_error {
    using std::domain_error::domain_error;
};

// CODATA defaults; tests typically pass G = c = 1 toy units instead.
inline constexpr double kGravitationalConstant = 6.67430e-11;  // m^3 kg^-1 s^-2
inline constexpr double kLightSpeed = 299792458.0;             // m / s

// Static geometry of one mass placement: a spherical mass at distance R from
// the nearer clock, the two clocks a distance h apart on the same radial line.
struct SpacetimeConfig {
    double G;
    double c;
    double M;
    double R;
    double h;

    SpacetimeConfig(double G_, double c_, double M_, double R_, double h_)
        : G(G_), c(c_), M(M_), R(R_), h(h_) {
        if (!(G > 0.0) || !(c > 0.0)) throw std::invalid_argument("SpacetimeConfig: G and c must be positive");
        if (!(h > 0.0)) throw std::invalid_argument("SpacetimeConfig: clock separation h must be positive");
        if (!(R > 0.0)) throw std::invalid_argument("SpacetimeConfig: R must be positive");
        if (M < 0.0) throw std::invalid_argument("SpacetimeConfig: mass must be nonnegative");
        const double rs = schwarzschild_radius();
        if (R <= rs || R + h <= rs)
            throw std::invalid_argument("SpacetimeConfig: both clocks must sit outside the Schwarzschild radius");
    }

    static SpacetimeConfig si(double M_, double R_, double h_) {
        return SpacetimeConfig(kGravitationalConstant, kLightSpeed, M_, R_, h_);
    }

    double schwarzschild_radius() const { return 2.0 * G * M / (c * c); }
};

enum class Clock { A, B };

inline const char* clock_name(Clock c) { return c == Clock::A ? "A" : "B"; }

// Event at a clock's worldline, tagged by the proper time that clock reads.
struct EventSpec {
    Clock clock;
    double proper_time;

    EventSpec(Clock clock_, double proper_time_) : clock(clock_), proper_time(proper_time_) {
        if (proper_time < 0.0) throw std::invalid_argument("EventSpec: clocks are synchronized at zero");
    }
};

enum class Relation { XBeforeY, YBeforeX, Spacelike };

inline const char* relation_name(Relation r) {
    switch (r) {
        case Relation::XBeforeY: return "X_before_Y";
        case Relation::YBeforeX: return "Y_before_X";
        default: return "spacelike";
    }
}

// margin > 0 leans toward ev1 -> ev2, margin < 0 toward ev2 -> ev1; swapping
// the events negates it.
struct CausalVerdict {
    Relation relation;
    double margin;
    bool boundary;
};

// --------------------------------- metric -----------------------------------

// g_tt(r) = -(1 - 2 V(r)/c^2) with V(r) = G M / r; strictly negative outside
// the horizon.
inline double metric_gtt(double r, const SpacetimeConfig& cfg) {
    const double rs = cfg.schwarzschild_radius();
    if (r <= rs) throw horizon_error("metric_gtt: radius inside the Schwarzschild radius");
    return -(1.0 - rs / r);
}

// Coordinate time for a radial light signal between the two radii:
// (1/c) * [ |dr| + R_s ln((r_> - R_s)/(r_< - R_s)) ], the closed form of the
// integral of dr / (1 - R_s/r). Symmetric in its arguments.
inline double light_coordinate_time(double r_from, double r_to, const SpacetimeConfig& cfg) {
    const double rs = cfg.schwarzschild_radius();
    if (r_from <= rs || r_to <= rs)
        throw horizon_error("light_coordinate_time: radius inside the Schwarzschild radius");
    const double lo = std::min(r_from, r_to);
    const double hi = std::max(r_from, r_to);
    const double log_term = rs > 0.0 ? rs * std::log((hi - rs) / (lo - rs)) : 0.0;
    return ((hi - lo) + log_term) / cfg.c;
}

// Proper time read by the receiving clock when a light signal emitted at the
// emitter's proper time tau_emit arrives.
inline double arrival_proper_time(double tau_emit, double r_emit, double r_receive, const SpacetimeConfig& cfg) {
    if (tau_emit < 0.0) throw std::invalid_argument("arrival_proper_time: emission time must be nonnegative");
    const double a_emit = std::sqrt(-metric_gtt(r_emit, cfg));
    const double a_recv = std::sqrt(-metric_gtt(r_receive, cfg));
    const double tc = light_coordinate_time(r_emit, r_receive, cfg);
    return a_recv * (tau_emit / a_emit + tc);
}

// Smallest equal proper time tau* at which the event pair (near clock, far
// clock) becomes causally connected. Flat spacetime admits no such pair.
inline double tau_star_threshold(const SpacetimeConfig& cfg) {
    if (cfg.M < kMassFloor)
        throw divergent_threshold_error("tau_star_threshold: threshold diverges as M -> 0");
    const double a_near = std::sqrt(-metric_gtt(cfg.R, cfg));
    const double a_far = std::sqrt(-metric_gtt(cfg.R + cfg.h, cfg));
    const double tc = light_coordinate_time(cfg.R, cfg.R + cfg.h, cfg);
    return a_near * tc / (1.0 - a_near / a_far);
}

// Minimal proper time tau~ at the far clock such that an event there is in the
// causal future of the near clock's tau* event under BOTH mass placements.
inline double definite_future_threshold(double tau_star, const SpacetimeConfig& cfg) {
    if (tau_star < tau_star_threshold(cfg))
        throw std::invalid_argument("definite_future_threshold: tau_star below the causal-connection threshold");
    const double a_near = std::sqrt(-metric_gtt(cfg.R, cfg));
    const double a_far = std::sqrt(-metric_gtt(cfg.R + cfg.h, cfg));
    const double tc = light_coordinate_time(cfg.R, cfg.R + cfg.h, cfg);
    return a_far * (tau_star / a_near + tc);
}

inline double clock_radius(Clock clock, Clock mass_near, const SpacetimeConfig& cfg) {
    return clock == mass_near ? cfg.R : cfg.R + cfg.h;
}

// Classifies the event pair under the stated mass placement by evaluating
// light-signal arrivals in both directions. Antisymmetric under event swap.
inline CausalVerdict classify_order(const EventSpec& ev1, const EventSpec& ev2, Clock mass_near,
                                    const SpacetimeConfig& cfg) {
    const double r1 = clock_radius(ev1.clock, mass_near, cfg);
    const double r2 = clock_radius(ev2.clock, mass_near, cfg);
    const double slack12 = ev2.proper_time - arrival_proper_time(ev1.proper_time, r1, r2, cfg);
    const double slack21 = ev1.proper_time - arrival_proper_time(ev2.proper_time, r2, r1, cfg);

    CausalVerdict v{};
    if (slack12 >= slack21) {
        v.margin = slack12;
        v.relation = slack12 >= 0.0 ? Relation::XBeforeY : Relation::Spacelike;
    } else {
        v.margin = -slack21;
        v.relation = slack21 >= 0.0 ? Relation::YBeforeX : Relation::Spacelike;
    }
    v.boundary = std::abs(v.margin) < kBoundaryBand;
    return v;
}

// ------------------------- m-ICS configuration checks ------------------------

// One target causal order together with the geometry meant to realize it.
struct OrderRealization {
    std::size_t y_slot;  // number of A-events preceding Y in the target order
    SpacetimeConfig cfg;
    Clock mass_near;
};

// Shared event times: the A-clock events X1..X_{m-1} and the B-clock event Y.
struct MicsEvents {
    std::vector<double> x_times;
    double y_time;
};

struct OrderCheck {
    std::string order_label;
    bool realized;
    double margin;  // smallest |margin| among the (X_i, Y) verdicts
    std::string note;
};

struct MicsReport {
    std::size_t m;
    bool valid;
    std::vector<OrderCheck> orders;
    std::string failure;
};

inline std::string order_label(std::size_t m, std::size_t y_slot) {
    std::string label;
    for (std::size_t pos = 0, xi = 1; pos < m; ++pos) {
        if (!label.empty()) label += "->";
        if (pos == y_slot)
            label += "Y";
        else
            label += "X" + std::to_string(xi++);
    }
    return label;
}

// Checks that each supplied geometry puts Y at its target slot among the
// A-clock events, using classify_order on every (X_i, Y) pair.
inline MicsReport validate_mics(std::size_t m, const MicsEvents& events,
                                const std::vector<OrderRealization>& realizations) {
    if (m < 2 || m > 4) throw std::invalid_argument("validate_mics: m must be 2, 3 or 4");
    if (events.x_times.size() != m - 1)
        throw std::invalid_argument("validate_mics: expected m-1 A-clock event times");
    if (realizations.size() != m)
        throw std::invalid_argument("validate_mics: expected one realization per causal order");
    for (std::size_t i = 1; i < events.x_times.size(); ++i)
        if (events.x_times[i] <= events.x_times[i - 1])
            throw std::invalid_argument("validate_mics: A-clock event times must increase");

    MicsReport report{m, true, {}, ""};
    std::vector<bool> seen(m, false);
    for (const auto& real : realizations) {
        OrderCheck check{order_label(m, real.y_slot), true, 0.0, ""};
        if (real.y_slot >= m) throw std::invalid_argument("validate_mics: y_slot out of range");

        std::size_t slot = 0;
        double min_abs_margin = std::numeric_limits<double>::infinity();
        bool spacelike = false;
        const EventSpec y(Clock::B, events.y_time);
        for (std::size_t i = 0; i < events.x_times.size(); ++i) {
            const EventSpec xi(Clock::A, events.x_times[i]);
            const CausalVerdict v = classify_order(xi, y, real.mass_near, real.cfg);
            if (v.relation == Relation::Spacelike) {
                spacelike = true;
                check.note = "spacelike pair (X" + std::to_string(i + 1) + ", Y)";
                break;
            }
            if (v.relation == Relation::XBeforeY) ++slot;  // this X event precedes Y
            min_abs_margin = std::min(min_abs_margin, std::abs(v.margin));
        }
        if (spacelike) {
            check.realized = false;
        } else {
            check.margin = min_abs_margin;
            if (slot != real.y_slot) {
                check.realized = false;
                check.note = "geometry realizes " + order_label(m, slot) + " instead";
            }
        }
        if (check.realized) {
            if (seen[real.y_slot]) {
                check.realized = false;
                check.note = "duplicate causal order";
            } else {
                seen[real.y_slot] = true;
            }
        }
        if (!check.realized && report.valid) {
            report.valid = false;
            report.failure = check.order_label + ": " + check.note;
        }
        report.orders.push_back(std::move(check));
    }
    return report;
}

namespace detail {

// Near-B geometry at distance rho from clock B, same separation h.
inline SpacetimeConfig with_near_radius(const SpacetimeConfig& cfg, double rho) {
    return SpacetimeConfig(cfg.G, cfg.c, cfg.M, rho, cfg.h);
}

// Strengthens the near-B field until the A-clock event at tau_a reaches B
// before fraction * tau_y.
inline SpacetimeConfig strong_enough(const SpacetimeConfig& cfg, double tau_a, double tau_y, double fraction,
                                     double rho_max) {
    const double rs = cfg.schwarzschild_radius();
    double scale = 1.0;
    for (int k = 0; k < 60; ++k) {
        const double rho = rs + (rho_max - rs) * scale;
        const SpacetimeConfig trial = with_near_radius(cfg, rho);
        const double arrive = arrival_proper_time(tau_a, rho + cfg.h, rho, trial);
        if (arrive <= fraction * tau_y) return trial;
        scale *= 0.5;
    }
    throw std::runtime_error("default_mics_realizations: no strong enough geometry found");
}

}  // namespace detail

// Builds per-order geometries from a base configuration: the slot-0 order uses
// the mass near clock A; later slots use the mass near clock B at
// progressively smaller distances. The base tau* fixes the first event times.
inline std::pair<MicsEvents, std::vector<OrderRealization>> default_mics_realizations(const SpacetimeConfig& cfg,
                                                                                      double tau_star,
                                                                                      std::size_t m) {
    if (m < 2 || m > 4) throw std::invalid_argument("default_mics_realizations: m must be 2, 3 or 4");
    MicsEvents events{{tau_star}, tau_star};
    std::vector<OrderRealization> reals;
    reals.push_back({0, cfg, Clock::A});  // Y -> X1 -> ...
    if (m == 2) {
        reals.push_back({1, cfg, Clock::B});  // X -> Y
        return {events, reals};
    }

    // Slot 1 keeps the base field strength near B; X2 sits comfortably after
    // the return signal so that X1 -> Y -> X2.
    reals.push_back({1, cfg, Clock::B});
    const double back_arrival = arrival_proper_time(tau_star, cfg.R, cfg.R + cfg.h, cfg);
    events.x_times.push_back(1.25 * back_arrival);

    if (m == 3) {
        const SpacetimeConfig strong = detail::strong_enough(cfg, events.x_times[1], tau_star, 0.8, cfg.R);
        reals.push_back({2, strong, Clock::B});  // X1 -> X2 -> Y
        return {events, reals};
    }

    // m == 4: a medium geometry realizes X1 -> X2 -> Y -> X3, a stronger one
    // pushes even X3 into Y's past.
    const SpacetimeConfig medium = detail::strong_enough(cfg, events.x_times[1], tau_star, 0.8, cfg.R);
    const double medium_back = arrival_proper_time(tau_star, medium.R, medium.R + medium.h, medium);
    events.x_times.push_back(1.25 * std::max(back_arrival, medium_back));
    reals.push_back({2, medium, Clock::B});
    const SpacetimeConfig strong = detail::strong_enough(cfg, events.x_times[2], tau_star, 0.8, medium.R);
    reals.push_back({3, strong, Clock::B});
    return {events, reals};
}

inline MicsReport validate_mics(const SpacetimeConfig& cfg, double tau_star, std::size_t m) {
    const auto [events, reals] = default_mics_realizations(cfg, tau_star, m);
    return validate_mics(m, events, reals);
}

}  // namespace icausal::gr
