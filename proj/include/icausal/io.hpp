// io.hpp — JSON wire formats: states, operators, channels, spacetime configs,
// signaling strategies, product-state corpora and protocol reports.

#pragma once

#include <icausal/branch.hpp>
#include <icausal/protocols.hpp>
#include <icausal/qcore.hpp>
#include <icausal/spacetime.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace icausal::io {

using json = nlohmann::json;

// complex numbers are [re, im]; matrices are row-major 2-D arrays of them
inline json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("io: complex entry must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("io: matrix must be a nonempty 2-D array");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw std::invalid_argument("io: ragged matrix rows");
        for (std::size_t k = 0; k < cols; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from_json(j[i][k]);
    }
    return m;
}

inline json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
    return arr;
}

inline Vector vector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("io: amplitude list must be a nonempty array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

// ------------------------------ states & operators ---------------------------

inline json state_to_json(const PureState& s) {
    return json{{"dims", s.dims()}, {"amps", vector_to_json(s.amps())}};
}

inline PureState state_from_json(const json& j) {
    if (!j.contains("dims") || !j.contains("amps"))
        throw std::invalid_argument("io: state needs \"dims\" and \"amps\"");
    return PureState(j["dims"].get<std::vector<std::size_t>>(), vector_from_json(j["amps"]));
}

inline json density_to_json(const DensityState& s) {
    return json{{"dims", s.dims()}, {"mat", matrix_to_json(s.mat())}};
}

inline DensityState density_from_json(const json& j) {
    if (!j.contains("dims") || !j.contains("mat"))
        throw std::invalid_argument("io: density state needs \"dims\" and \"mat\"");
    return DensityState(j["dims"].get<std::vector<std::size_t>>(), matrix_from_json(j["mat"]));
}

// unitary files are the bare row-major matrix
inline json unitary_to_json(const Unitary& u) { return matrix_to_json(u.mat()); }

inline Unitary unitary_from_json(const json& j) { return Unitary(matrix_from_json(j)); }

inline json channel_to_json(const KrausChannel& ch) {
    json kraus = json::array();
    for (const auto& k : ch.kraus()) kraus.push_back(matrix_to_json(k));
    return json{{"in_dim", ch.in_dim()}, {"out_dim", ch.out_dim()}, {"kraus", std::move(kraus)}};
}

inline KrausChannel channel_from_json(const json& j) {
    if (!j.contains("in_dim") || !j.contains("out_dim") || !j.contains("kraus"))
        throw std::invalid_argument("io: channel needs \"in_dim\", \"out_dim\" and \"kraus\"");
    std::vector<Matrix> kraus;
    for (const auto& k : j["kraus"]) kraus.push_back(matrix_from_json(k));
    return KrausChannel(j["in_dim"].get<std::size_t>(), j["out_dim"].get<std::size_t>(), std::move(kraus));
}

// ------------------------------- spacetime ----------------------------------

inline json spacetime_to_json(const gr::SpacetimeConfig& cfg) {
    return json{{"G", cfg.G}, {"c", cfg.c}, {"M", cfg.M}, {"R", cfg.R}, {"h", cfg.h}};
}

inline gr::SpacetimeConfig spacetime_from_json(const json& j) {
    for (const char* key : {"G", "c", "M", "R", "h"})
        if (!j.contains(key)) throw std::invalid_argument(std::string("io: spacetime config needs \"") + key + "\"");
    return gr::SpacetimeConfig(j["G"].get<double>(), j["c"].get<double>(), j["M"].get<double>(),
                               j["R"].get<double>(), j["h"].get<double>());
}

// ------------------------------- strategies ----------------------------------

inline json strategy_to_json(const SignalingStrategy& s) {
    json parties = json::array();
    for (const auto& p : s.parties) {
        json rules = json::object();
        for (const auto& [key, action] : p.rules) {
            json a{{"unitary", action.unitary}, {"targets", action.targets}};
            if (action.message) a["message"] = *action.message;
            rules[key] = std::move(a);
        }
        parties.push_back(json{{"name", p.name}, {"events", p.events}, {"rules", std::move(rules)}});
    }
    json registry = json::object();
    for (const auto& [label, u] : s.registry) registry[label] = unitary_to_json(u);
    json orders = json::array();
    for (const auto& o : s.orders) {
        json seq = json::array();
        for (const auto& e : o.sequence) seq.push_back(json{{"event", e.event}, {"party", e.party}});
        orders.push_back(json{{"label", o.label}, {"sequence", std::move(seq)}});
    }
    return json{{"parties", std::move(parties)}, {"registry", std::move(registry)}, {"orders", std::move(orders)}};
}

inline SignalingStrategy strategy_from_json(const json& j) {
    SignalingStrategy s;
    for (const auto& p : j.at("parties")) {
        PartySpec party{p.at("name").get<std::string>(), p.at("events").get<std::vector<std::string>>(), {}};
        for (const auto& [key, a] : p.at("rules").items()) {
            RuleAction action{a.at("unitary").get<std::string>(), a.at("targets").get<std::vector<std::size_t>>(),
                              std::nullopt};
            if (a.contains("message")) action.message = a["message"].get<std::string>();
            party.rules[key] = std::move(action);
        }
        s.parties.push_back(std::move(party));
    }
    for (const auto& [label, mat] : j.at("registry").items()) s.registry.emplace(label, unitary_from_json(mat));
    for (const auto& o : j.at("orders")) {
        CausalOrder order{o.at("label").get<std::string>(), {}};
        for (const auto& e : o.at("sequence"))
            order.sequence.push_back({e.at("event").get<std::string>(), e.at("party").get<std::string>()});
        s.orders.push_back(std::move(order));
    }
    return s;
}

// ---------------------------------- corpora ----------------------------------

// corpus files: list of states, each a list of per-party factor vectors
inline std::vector<PureState> corpus_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("io: corpus must be a nonempty array");
    std::vector<PureState> states;
    for (const auto& entry : j) {
        if (!entry.is_array() || entry.empty())
            throw std::invalid_argument("io: corpus entry must list per-party factors");
        std::optional<PureState> acc;
        for (const auto& factor : entry) {
            const Vector v = vector_from_json(factor);
            PureState f = PureState::normalized({static_cast<std::size_t>(v.size())}, v);
            acc = acc ? tensor(*acc, f) : f;
        }
        states.push_back(*acc);
    }
    return states;
}

inline json corpus_to_json(const std::vector<std::vector<Vector>>& factorized) {
    json out = json::array();
    for (const auto& entry : factorized) {
        json factors = json::array();
        for (const auto& f : entry) factors.push_back(vector_to_json(f));
        out.push_back(std::move(factors));
    }
    return out;
}

// ---------------------------------- reports ----------------------------------

// FNV-1a digest of dims and amplitude bytes; identifies an input in reports.
inline std::string state_digest(const PureState& s) {
    std::uint64_t h = 1469598103934665603ull;
    const auto mix = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    for (std::size_t d : s.dims()) mix(&d, sizeof(d));
    for (Eigen::Index i = 0; i < s.amps().size(); ++i) {
        const double re = s.amps()(i).real(), im = s.amps()(i).imag();
        mix(&re, sizeof(re));
        mix(&im, sizeof(im));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string state_digest(const DensityState& s) {
    std::uint64_t h = 1469598103934665603ull;
    const auto mix = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    for (std::size_t d : s.dims()) mix(&d, sizeof(d));
    for (Eigen::Index i = 0; i < s.mat().rows(); ++i)
        for (Eigen::Index j = 0; j < s.mat().cols(); ++j) {
            const double re = s.mat()(i, j).real(), im = s.mat()(i, j).imag();
            mix(&re, sizeof(re));
            mix(&im, sizeof(im));
        }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json transcript_to_json(const Transcript& t) {
    json entries = json::array();
    for (const auto& e : t.entries) {
        json entry{{"actor", e.actor}, {"action", e.action}, {"detail", e.detail}};
        if (e.group >= 0) {
            entry["probability"] = e.probability;
            entry["group"] = e.group;
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

inline json protocol_result_to_json(const ProtocolResult& r, bool include_states = false) {
    json branches = json::array();
    for (const auto& b : r.branches) {
        json branch{{"charlie", b.charlie_label},
                    {"sender_outcome", b.sender_outcome},
                    {"probability", b.probability},
                    {"correction", b.correction},
                    {"fidelity", b.fid}};
        if (include_states) branch["state"] = state_to_json(b.state);
        branches.push_back(std::move(branch));
    }
    return json{{"protocol", r.protocol},
                {"branches", std::move(branches)},
                {"transcript", transcript_to_json(r.transcript)},
                {"min_branch_fidelity", r.min_branch_fidelity},
                {"probability_sum", r.probability_sum}};
}

// -------------------------------- file helpers -------------------------------

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("io: cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("io: cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace icausal::io
