#include <gtest/gtest.h>

#include <csignal>
#include <regex>

#include <httplib.h>
#include <json.hpp>
#include <unistd.h>

#include "support/test_support.hpp"

using nlohmann::json;
using testing_support::data_dir;
using testing_support::read_file;
using testing_support::run_cli;
using testing_support::TempDir;

namespace {

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::string sample_log() { return q(data_dir() / "logs" / "sample_50.ndjson"); }

}  // namespace

TEST(Cli, HelpAndUsage) {
    EXPECT_EQ(run_cli("--help").exit_code, 0);
    EXPECT_EQ(run_cli("").exit_code, 2);
    EXPECT_EQ(run_cli("teleport").exit_code, 2);
    EXPECT_EQ(run_cli("replay").exit_code, 2);
    EXPECT_EQ(run_cli("sim-nav --trials -1").exit_code, 2);
}

TEST(Cli, ReplayMatchesFallbackGolden) {
    TempDir out;
    const auto r = run_cli("replay " + sample_log() + " --out " + q(out.path()));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(read_file(out / "decisions.ndjson"), read_file(data_dir() / "golden" / "replay_sample_fallback.ndjson"));
    EXPECT_TRUE(std::filesystem::exists(out / "manifest.json"));
}

TEST(Cli, ReplayMatchesTranscriptGolden) {
    TempDir out;
    const auto r = run_cli("replay " + sample_log() + " --llm transcript --transcript " +
                           q(data_dir() / "transcripts" / "replay_sample.json") + " --out " + q(out.path()));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(read_file(out / "decisions.ndjson"),
              read_file(data_dir() / "golden" / "replay_sample_transcript.ndjson"));
}

TEST(Cli, ReplayEmptyAndMissingLogs) {
    TempDir dir;
    std::ofstream(dir / "empty.ndjson").close();
    const auto empty = run_cli("replay " + q(dir / "empty.ndjson") + " --out " + q(dir / "out"));
    EXPECT_EQ(empty.exit_code, 0) << empty.output;
    EXPECT_EQ(read_file(dir / "out" / "decisions.ndjson"), "");

    EXPECT_EQ(run_cli("replay " + q(dir / "missing.ndjson") + " --out " + q(dir / "o2")).exit_code, 2);
}

TEST(Cli, ReplayReportsSkippedLines) {
    TempDir dir;
    const auto text = read_file(data_dir() / "logs" / "sample_50.ndjson");
    std::ofstream(dir / "bad.ndjson") << text.substr(0, text.find('\n') + 1) << "garbage\n";
    const auto lenient = run_cli("replay " + q(dir / "bad.ndjson") + " --out " + q(dir / "o"));
    EXPECT_EQ(lenient.exit_code, 0);
    EXPECT_NE(lenient.output.find(":2: skipped"), std::string::npos) << lenient.output;
    const auto strict = run_cli("replay " + q(dir / "bad.ndjson") + " --strict --out " + q(dir / "o2"));
    EXPECT_EQ(strict.exit_code, 1) << strict.output;
    EXPECT_NE(strict.output.find("line 2"), std::string::npos);
}

TEST(Cli, LiveModelRouteNeedsEnvironmentKey) {
    TempDir out;
    const auto r = run_cli("replay " + sample_log() + " --llm http --out " + q(out.path()), "env -u HAPTICNAV_API_KEY");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("HAPTICNAV_API_KEY"), std::string::npos) << r.output;
    EXPECT_EQ(run_cli("scenario open --policy llm --out " + q(out / "s"), "env -u HAPTICNAV_API_KEY").exit_code, 2);
}

TEST(Cli, CompilePattern) {
    TempDir out;
    const auto csv = run_cli("compile-pattern slide_back_slow --emit csv --out " + q(out / "p.csv"));
    ASSERT_EQ(csv.exit_code, 0) << csv.output;
    const auto text = read_file(out / "p.csv");
    // header, then both temples over 1500 ms at 50 Hz with both endpoints
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 76);
    EXPECT_EQ(text.substr(0, text.find('\n')), "t_ms,temple,position_mm,pressure");

    const auto wire = run_cli("compile-pattern tap_front --emit wire");
    ASSERT_EQ(wire.exit_code, 0);
    const std::regex frame(R"(S,[LR],\d+,\d+,\d+)");
    std::istringstream lines(wire.output);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        EXPECT_TRUE(std::regex_match(line, frame)) << line;
        ++n;
    }
    EXPECT_EQ(n, 2 * 20);  // 400 ms at 50 Hz per temple

    EXPECT_EQ(run_cli("compile-pattern bogus").exit_code, 2);
    EXPECT_EQ(run_cli("compile-pattern tap_front --emit pdf").exit_code, 2);
    EXPECT_EQ(run_cli("compile-pattern tap_front --emit wire --geometry /nonexistent.json").exit_code, 2);
}

TEST(Cli, SimNavIsReproducible) {
    TempDir a, b;
    const std::string args = "sim-nav --path path1 --env furnished --perception table_one --trials 100 --seed 7 --out ";
    const auto r1 = run_cli(args + q(a.path()));
    const auto r2 = run_cli(args + q(b.path()) + " --jobs 1");
    ASSERT_EQ(r1.exit_code, 0) << r1.output;
    ASSERT_EQ(r2.exit_code, 0) << r2.output;
    EXPECT_EQ(read_file(a / "aggregate.json"), read_file(b / "aggregate.json"));
    const auto agg = json::parse(read_file(a / "aggregate.json"));
    EXPECT_GE(agg.at("completed").get<int>(), 90);
}

TEST(Cli, SimNavBadInputs) {
    TempDir out;
    EXPECT_EQ(run_cli("sim-nav --path nowhere --out " + q(out / "a")).exit_code, 2);
    EXPECT_EQ(run_cli("sim-nav --perception psychic --out " + q(out / "b")).exit_code, 2);
    EXPECT_EQ(run_cli("sim-nav --agent /nonexistent.json --out " + q(out / "c")).exit_code, 2);
}

TEST(Cli, ScenarioFallbackIsPerfect) {
    TempDir out;
    const auto r = run_cli("scenario all --policy fallback --out " + q(out.path()));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    for (const char* kind : {"open", "static", "dynamic"}) {
        const auto rep = json::parse(read_file(out / (std::string("report_") + kind + ".json")));
        EXPECT_DOUBLE_EQ(rep.at("accuracy").get<double>(), 1.0) << kind;
    }
    EXPECT_EQ(run_cli("scenario crowded --out " + q(out / "x")).exit_code, 2);
}

TEST(Cli, BadConfigPaths) {
    TempDir out;
    EXPECT_NE(run_cli("replay " + sample_log() + " --config /nonexistent.json --out " + q(out / "a")).exit_code, 0);
    std::ofstream(out / "bad.json") << "{\"scene\": {\"persistence_k\": 9}}";
    EXPECT_EQ(run_cli("replay " + sample_log() + " --config " + q(out / "bad.json") + " --out " + q(out / "b")).exit_code,
              2);
    EXPECT_EQ(run_cli("serve --config /nonexistent.json").exit_code, 2);
}

TEST(Cli, ServeShutsDownOnSigint) {
    int fds[2];
    ASSERT_EQ(pipe(fds), 0);
    const pid_t pid = fork();
    ASSERT_GE(pid, 0);
    if (pid == 0) {
        dup2(fds[1], STDOUT_FILENO);
        dup2(fds[1], STDERR_FILENO);
        close(fds[0]);
        execl(HAPTICNAV_CLI_PATH, HAPTICNAV_CLI_PATH, "serve", "--port", "0", static_cast<char*>(nullptr));
        _exit(127);
    }
    close(fds[1]);
    std::string out;
    char c;
    while (out.find('\n') == std::string::npos && read(fds[0], &c, 1) == 1) out.push_back(c);
    std::smatch m;
    ASSERT_TRUE(std::regex_search(out, m, std::regex(R"(listening on [0-9.]+:(\d+))"))) << out;
    const int port = std::stoi(m[1]);

    httplib::Client http("127.0.0.1", port);
    const auto res = http.Get("/healthz");
    ASSERT_TRUE(res);
    EXPECT_EQ(json::parse(res->body).at("status"), "ok");

    kill(pid, SIGINT);
    int status = 0;
    waitpid(pid, &status, 0);
    while (read(fds[0], &c, 1) == 1) out.push_back(c);
    close(fds[0]);
    ASSERT_TRUE(WIFEXITED(status)) << out;
    EXPECT_EQ(WEXITSTATUS(status), 0) << out;
    EXPECT_NE(out.find("stopped"), std::string::npos) << out;
}
