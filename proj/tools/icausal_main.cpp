// icausal — command-line front end: runs the superposed-causal-order protocols
// and the causal-geometry validations from JSON configs or flags, and emits
// machine-readable reports.

#include <CLI11.hpp>

#include <icausal/scenario.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using icausal::io::json;

struct CommonFlags {
    std::optional<std::string> config_path;
    std::optional<std::string> out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::size_t> m;
    std::optional<std::string> preset;
    std::optional<std::string> input_path;
    std::optional<std::size_t> random_d;
    bool include_states = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "scenario config file (flags win on conflict)");
    cmd->add_option("--out", flags.out_path, "write the report here instead of stdout");
    cmd->add_option("--seed", flags.seed, "64-bit seed for sampling and random presets");
    cmd->add_option("--mode", flags.mode, "exhaustive (default) or sample")
        ->check(CLI::IsMember({"exhaustive", "sample"}));
    cmd->add_option("--m", flags.m, "number of superposed causal orders (2, 3 or 4)");
    cmd->add_option("--preset", flags.preset, "named input: B1..B4 or random");
    cmd->add_option("--input", flags.input_path, "state file (JSON dims + amps)");
    cmd->add_option("--random-d", flags.random_d, "bystander dimension for random inputs");
    cmd->add_flag("--include-states", flags.include_states, "embed state vectors in the report");
}

json merge_config(const CommonFlags& flags, const std::string& protocol) {
    json cfg = json::object();
    if (flags.config_path) cfg = icausal::io::load_json(*flags.config_path);
    cfg["protocol"] = protocol;
    if (flags.seed) cfg["seed"] = *flags.seed;
    if (flags.mode) cfg["mode"] = *flags.mode;
    if (flags.m) cfg["m"] = *flags.m;
    if (flags.preset) cfg["preset"] = *flags.preset;
    if (flags.input_path) cfg["input_path"] = *flags.input_path;
    if (flags.random_d) cfg["random_d"] = *flags.random_d;
    if (flags.include_states) cfg["include_states"] = true;
    // teleport-style commands default to a random input when no source given
    if ((protocol == "teleport" || protocol == "backteleport") && !cfg.contains("input") &&
        !cfg.contains("input_path") && !cfg.contains("preset"))
        cfg["preset"] = "random";
    return cfg;
}

int emit(const icausal::scenario::Report& report, const CommonFlags& flags, double seconds) {
    json body = report.body;
    body["timing"] = json{{"seconds", seconds}};
    if (flags.out_path)
        icausal::io::save_json(*flags.out_path, body);
    else
        std::cout << body.dump(2) << '\n';
    return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator of signaling protocols on superposed causal orders"};
    app.require_subcommand(1);

    std::map<std::string, CommonFlags> flags;

    for (const auto& name : std::vector<std::string>{"teleport", "backteleport", "smolin"}) {
        auto* cmd = app.add_subcommand(
            name, name == "smolin" ? "unlock the four-qubit bound-entangled mixture"
                                   : name + " a (m x d) state across the superposed orders");
        add_common(cmd, flags[name]);
    }

    auto* entangle = app.add_subcommand("entangle", "superpose two local unitaries into entanglement");
    add_common(entangle, flags["entangle"]);
    std::string u1 = "I", u2 = "X";
    entangle->add_option("--u1", u1, "first unitary: I, X, Y, Z, H or a matrix file");
    entangle->add_option("--u2", u2, "second unitary: I, X, Y, Z, H or a matrix file");

    auto* bell = app.add_subcommand("bell", "identify a shared Bell state");
    add_common(bell, flags["bell"]);
    std::optional<std::size_t> secret;
    bell->add_option("--secret", secret, "which Bell state (1..4); --preset B1..B4 also works");

    auto* channel = app.add_subcommand("channel", "implement a joint channel with local operations");
    add_common(channel, flags["channel"]);
    std::optional<std::string> channel_path, channel_preset;
    channel->add_option("--channel", channel_path, "Kraus channel file");
    channel->add_option("--channel-preset", channel_preset, "swap or identity")
        ->check(CLI::IsMember({"swap", "identity"}));

    auto* nlwe = app.add_subcommand("nlwe", "reduce a tripartite product-state discrimination task");
    add_common(nlwe, flags["nlwe"]);
    std::optional<std::string> corpus_path;
    nlwe->add_option("--corpus", corpus_path, "corpus file (list of per-party factor vectors)");

    auto* search = app.add_subcommand("search", "solve for a correction table by brute force");
    add_common(search, flags["search"]);
    std::optional<std::string> unitaries_path;
    search->add_option("--unitaries", unitaries_path, "file with a JSON list of m matrices");

    auto* spacetime = app.add_subcommand("spacetime", "validate mass configurations for superposed orders");
    spacetime->set_help_flag("--help", "print help");  // frees -h for the clock distance
    add_common(spacetime, flags["spacetime"]);
    std::optional<double> g_opt, c_opt, m_opt, r_opt, h_opt, tau_star;
    spacetime->add_option("--G", g_opt, "gravitational constant");
    spacetime->add_option("--c", c_opt, "speed of light");
    spacetime->add_option("--M", m_opt, "mass in kg");
    spacetime->add_option("--R", r_opt, "clock-to-mass distance in m");
    spacetime->add_option("--h", h_opt, "inter-clock distance in m");
    spacetime->add_option("--tau-star", tau_star, "shared proper time of the signaling events");

    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    add_common(accept, flags["accept"]);
    std::string filter;
    accept->add_option("--filter", filter, "run only criteria whose name starts with this prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        json cfg = merge_config(flags[name], name);
        if (name == "entangle") {
            cfg["u1"] = u1;
            cfg["u2"] = u2;
        } else if (name == "bell") {
            if (secret) cfg["secret"] = *secret;
        } else if (name == "channel") {
            if (channel_path) cfg["channel_path"] = *channel_path;
            if (channel_preset) cfg["channel_preset"] = *channel_preset;
            if (!cfg.contains("input") && !cfg.contains("input_path") && !cfg.contains("preset"))
                cfg["preset"] = "random";
        } else if (name == "nlwe") {
            if (corpus_path) cfg["corpus_path"] = *corpus_path;
        } else if (name == "search") {
            if (unitaries_path) cfg["unitaries_path"] = *unitaries_path;
        } else if (name == "spacetime") {
            json st = cfg.value("spacetime", json::object());
            if (g_opt) st["G"] = *g_opt;
            if (c_opt) st["c"] = *c_opt;
            if (m_opt) st["M"] = *m_opt;
            if (r_opt) st["R"] = *r_opt;
            if (h_opt) st["h"] = *h_opt;
            if (tau_star) st["tau_star"] = *tau_star;
            cfg["spacetime"] = std::move(st);
        } else if (name == "accept") {
            if (!filter.empty()) cfg["filter"] = filter;
        }

        const auto start = std::chrono::steady_clock::now();
        const auto report = icausal::scenario::run_scenario(cfg);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (name == "accept") {
            // human-readable pass/fail lines alongside the JSON report
            for (const auto& criterion : report.body["results"]["criteria"])
                std::fprintf(stderr, "[%s] %s\n", criterion["passed"].get<bool>() ? "PASS" : "FAIL",
                             criterion["name"].get<std::string>().c_str());
        }
        return emit(report, flags[name], seconds);
    } catch (const icausal::scenario::ScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: malformed config: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
