#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "hapticnav/cli.hpp"

namespace cli = hapticnav::cli;

namespace {

// Blocks SIGINT/SIGTERM in every thread so the server's workers never see them, then waits.
sigset_t shutdown_signals() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    return set;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hapticnav: detection replay, haptic pattern compiler, navigation simulator and session gateway"};
    app.set_version_flag("--version", std::string(HAPTICNAV_VERSION));
    app.require_subcommand(1);
    std::string data_dir = cli::default_data_dir();
    app.add_option("--data-dir", data_dir, "Bundled data root (paths/, envs/, confusion/, scenarios/)");

    cli::ReplayOptions replay;
    auto* rp = app.add_subcommand("replay", "Run perception, scene and policy over a recorded detection log");
    rp->add_option("log", replay.log, "NDJSON detection log")->required();
    rp->add_option("--config", replay.pipeline_config, "Pipeline config (camera, perception, scene)");
    rp->add_option("--policy-config", replay.policy_config, "Policy config");
    rp->add_option("--llm", replay.llm, "none, http or transcript")
        ->check(CLI::IsMember({"none", "http", "transcript"}));
    rp->add_option("--transcript", replay.transcript, "Recorded responses for --llm transcript");
    rp->add_option("--out", replay.out_dir, "Output directory");
    rp->add_flag("--strict", replay.strict, "Abort on the first malformed line");

    cli::CompileOptions compile;
    auto* cp = app.add_subcommand("compile-pattern", "Compile a haptic pattern to a contact CSV or wire stream");
    cp->add_option("pattern", compile.pattern, "Pattern name, e.g. slide_back_slow")->required();
    cp->add_option("--emit", compile.emit, "csv or wire")->check(CLI::IsMember({"csv", "wire"}));
    cp->add_option("--geometry", compile.geometry, "Linkage geometry JSON");
    cp->add_option("--calibration", compile.calibration, "Per-temple calibration JSON");
    cp->add_option("--tick-hz", compile.tick_hz, "Sample rate");
    cp->add_option("--out", compile.out, "Output file (stdout if omitted)");

    cli::SimNavOptions nav;
    auto* np = app.add_subcommand("sim-nav", "Run seeded navigation trials with the simulated agent");
    np->add_option("--path", nav.path, "Path file or bundled name");
    np->add_option("--env", nav.env, "Environment file or bundled name");
    np->add_option("--agent", nav.agent_config, "Agent config JSON");
    np->add_option("--perception", nav.perception, "perfect, table_one, or a confusion CSV");
    np->add_option("--seed", nav.seed, "Base seed");
    np->add_option("--trials", nav.trials, "Number of trials")->check(CLI::NonNegativeNumber);
    np->add_option("--jobs", nav.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    np->add_option("--out", nav.out_dir, "Output directory");

    cli::ScenarioOptions scen;
    auto* sp = app.add_subcommand("scenario", "Score the decision policy on generated scenes");
    sp->add_option("kind", scen.kind, "open, static, dynamic or all");
    sp->add_option("--policy", scen.policy, "fallback, llm or transcript")
        ->check(CLI::IsMember({"fallback", "llm", "transcript"}));
    sp->add_option("--trials", scen.trials, "Scenes per kind")->check(CLI::NonNegativeNumber);
    sp->add_option("--seed", scen.seed, "Suite seed");
    sp->add_option("--labels", scen.labels, "Label file (default: bundled labels)");
    sp->add_option("--transcript", scen.transcript, "Recorded responses (default: bundled transcript)");
    sp->add_option("--policy-config", scen.policy_config, "Policy config");
    sp->add_option("--out", scen.out_dir, "Output directory");

    cli::ServeOptions serve;
    auto* sv = app.add_subcommand("serve", "Run the websocket session gateway until SIGINT");
    sv->add_option("--host", serve.host, "Bind address");
    sv->add_option("--port", serve.port, "Port (0 picks a free one)");
    sv->add_option("--config", serve.config, "Gateway config JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kUsageError;
    }
    nav.data_dir = scen.data_dir = serve.data_dir = data_dir;

    auto& out = std::cout;
    auto& err = std::cerr;
    return cli::guarded(
        [&]() -> int {
            if (*rp) return cli::run_replay(replay, out, err);
            if (*cp) return cli::run_compile_pattern(compile, out, err);
            if (*np) return cli::run_sim_nav(nav, out, err);
            if (*sp) return cli::run_scenario(scen, out, err);
            const sigset_t set = shutdown_signals();
            pthread_sigmask(SIG_BLOCK, &set, nullptr);
            return cli::run_serve(serve, out, err, [&set] {
                int sig = 0;
                sigwait(&set, &sig);
            });
        },
        err);
}
