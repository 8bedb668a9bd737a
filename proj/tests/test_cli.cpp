#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sys/wait.h>
#include <sstream>
#include <string>
#include <vector>

#include "treeperc/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using treeperc::cli::run;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("treeperc_cli_" + tag + "_" + std::to_string(std::rand()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "treeperc");
    std::ostringstream out;
    std::ostringstream err;
    Result r;
    r.code = run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json load(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

void check_record_shape(const json& j, int code) {
    CHECK(j.at("tool") == "treeperc");
    CHECK(j.at("version") == treeperc::cli::tool_version());
    CHECK(j.at("exit_code") == code);
    CHECK(j.at("config").contains("seed"));
    CHECK(j.at("config").contains("sources"));
}

}  // namespace

TEST_CASE("hstar") {
    TempDir t("hstar");
    const Result r = invoke({"hstar", "--out-dir", t.path.string()});
    CHECK(r.code == 0);
    const json j = load(t.path / "hstar.json");
    check_record_shape(j, 0);
    CHECK(j["result"]["h_star"].get<double>() == doctest::Approx(0.588612064507).epsilon(1e-9));
    CHECK(j["result"]["pass"] == true);

    const Result r3 = invoke({"hstar", "--d", "3", "--out-dir", t.path.string()});
    CHECK(r3.code == 0);
    CHECK(load(t.path / "hstar.json")["result"]["h_star"].get<double>() ==
          doctest::Approx(0.572188447197).epsilon(1e-9));
}

TEST_CASE("lambda") {
    TempDir t("lambda");
    const Result r = invoke({"lambda", "--a", "0", "--u", "0.5", "--out-dir", t.path.string()});
    CHECK(r.code == 0);
    const json res = load(t.path / "lambda.json")["result"];
    CHECK(res["lambda_h"].get<double>() == doctest::Approx(1.384475074264).epsilon(1e-9));
    CHECK(res["lambda_ua"].get<double>() == doctest::Approx(1.384475074264 * std::exp(-0.25)).epsilon(1e-9));
    CHECK(r.out.find("lambda_0") != std::string::npos);
}

TEST_CASE("critline writes a CSV in the diagram schema") {
    TempDir t("critline");
    const Result r = invoke({"critline", "--samples", "6", "--out-dir", t.path.string()});
    CHECK(r.code == 0);
    CHECK(first_line(t.path / "critline.csv") == "source,u,a,lambda,region");
    const json res = load(t.path / "critline.json")["result"];
    CHECK(std::abs(res["a_c_at_u0"].get<double>()) < 1e-6);
    CHECK(res["csv"] == (t.path / "critline.csv").string());
}

TEST_CASE("tau and two-point") {
    TempDir t("tau");
    Result r = invoke({"tau", "--u", "0.05", "--a", "0.2", "--n", "6", "--trials", "5000", "--seed", "7", "--out-dir",
                       t.path.string()});
    CHECK(r.code == 0);
    CHECK(first_line(t.path / "tau.csv") == "n,successes,trials,estimate,stderr");
    json res = load(t.path / "tau.json")["result"];
    CHECK(res["by_n"].size() == 7);
    CHECK(res.contains("second_moment"));

    // Same seed, same artifact.
    std::ifstream first(t.path / "tau.csv");
    const std::string before((std::istreambuf_iterator<char>(first)), std::istreambuf_iterator<char>());
    r = invoke({"tau", "--u", "0.05", "--a", "0.2", "--n", "6", "--trials", "5000", "--seed", "7", "--workers", "3",
                "--out-dir", t.path.string()});
    std::ifstream second(t.path / "tau.csv");
    const std::string after((std::istreambuf_iterator<char>(second)), std::istreambuf_iterator<char>());
    CHECK(before == after);

    r = invoke({"tau", "--u", "1.5", "--a", "0.5", "--n", "4", "--trials", "2000", "--out-dir", t.path.string()});
    CHECK(r.code == 0);
    res = load(t.path / "tau.json")["result"];
    CHECK(res["by_n"][4].contains("envelope"));
    CHECK_FALSE(res.contains("second_moment"));

    r = invoke({"two-point", "--u", "0.3", "--a", "0.3", "--n", "4", "--trials", "20000", "--out-dir",
                t.path.string()});
    CHECK((r.code == 0 || r.code == 4));
    res = load(t.path / "two-point.json")["result"];
    CHECK(res.contains("prediction"));
    CHECK(res.contains("z"));
}

TEST_CASE("diagram artifacts") {
    TempDir t("diagram");
    const Result r = invoke({"diagram", "--grid-u", "4", "--grid-a", "5", "--samples", "6", "--out-dir",
                             t.path.string()});
    CHECK(r.code == 0);
    CHECK(first_line(t.path / "diagram.csv") == "source,u,a,lambda,region");
    const json j = load(t.path / "diagram.json");
    check_record_shape(j, 0);
    const json& res = j["result"];
    for (const char* key : {"h_star", "u_star", "u0", "lambda0", "eps", "assertions", "undetermined_region",
                            "failures", "spot_checks", "pass"}) {
        CHECK_MESSAGE(res.contains(key), key);
    }
    CHECK(res["assertions"]["all_passed"] == true);
}

TEST_CASE("selftest and verify-spectral") {
    TempDir t("verify");
    CHECK(invoke({"selftest", "--out-dir", t.path.string()}).code == 0);
    const Result r = invoke({"verify-spectral", "--out-dir", t.path.string()});
    CHECK(r.code == 0);
    const json res = load(t.path / "verify-spectral.json")["result"];
    CHECK(res["gap_grid"]["pass"] == true);
    CHECK(res["lambda_tilde_chain"]["pass"] == true);
    CHECK(res["parabola_scans"]["pass"] == true);
}

TEST_CASE("verify-mc produces a complete record") {
    TempDir t("mc");
    const Result r = invoke({"verify-mc", "--trials", "3000", "--n", "4", "--K", "3", "--dom-n", "3", "--buffer",
                             "1", "--fit-from", "2", "--fit-to", "6", "--seed", "3", "--out-dir", t.path.string()});
    CHECK((r.code == 0 || r.code == 4));
    const json j = load(t.path / "verify-mc.json");
    check_record_shape(j, r.code);
    const json& res = j["result"];
    CHECK(res["ineq_level_shift"].size() == 6);
    CHECK(res["arc_monotonicity"].size() == 2);
    CHECK(res["domination"].size() == 2);
    CHECK(res.contains("cross_sampler"));
    CHECK(res["decay_rate"]["fit_to"] == 6);
    CHECK((res["pass"] == (r.code == 0)));
}

TEST_CASE("exit codes") {
    TempDir t("codes");
    CHECK(invoke({"hstar", "--bogus", "--out-dir", t.path.string()}).code == 2);
    CHECK(invoke({"hstar", "--d", "1", "--out-dir", t.path.string()}).code == 2);
    CHECK(invoke({"nosuchcommand"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
    const Result v = invoke({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(treeperc::cli::tool_version()) != std::string::npos);

    // Inverted fit window.
    const Result bad = invoke({"verify-mc", "--fit-from", "5", "--fit-to", "3", "--out-dir", t.path.string()});
    CHECK(bad.code == 2);
    const json j = load(t.path / "verify-mc.json");
    CHECK(j.contains("error"));
    CHECK(j["exit_code"] == 2);
    CHECK(invoke({"tau", "--n", "3", "--trials", "0", "--out-dir", t.path.string()}).code == 2);
}

TEST_CASE("config file supplies defaults and flags override it") {
    TempDir t("config");
    const fs::path cfg = t.path / "run.ini";
    {
        std::ofstream f(cfg);
        f << "# defaults\nd = 3\nseed = 99\nnode-count = 800\n";
    }
    const Result r = invoke({"hstar", "--config", cfg.string(), "--node-count", "400", "--out-dir", t.path.string()});
    CHECK(r.code == 0);
    const json c = load(t.path / "hstar.json")["config"];
    CHECK(c["d"] == 3);
    CHECK(c["seed"] == 99);
    CHECK(c["node_count"] == 400);
    CHECK(c["sources"]["d"] == "config");
    CHECK(c["sources"]["seed"] == "config");
    CHECK(c["sources"]["node-count"] == "flag");
    CHECK(c["sources"]["eps"] == "default");
    CHECK(c["config_file"] == cfg.string());
    CHECK(c["config_entries"]["d"] == "3");
}

TEST_CASE("the installed binary runs end to end") {
    TempDir t("binary");
    const std::string cmd = std::string("\"") + TREEPERC_TOOL + "\" selftest --out-dir \"" + t.path.string() +
                            "\" > \"" + (t.path / "stdout.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    CHECK(status == 0);
    CHECK(fs::exists(t.path / "selftest.json"));
    const std::string bad = std::string("\"") + TREEPERC_TOOL + "\" hstar --d 1 --out-dir \"" + t.path.string() +
                            "\" 2> /dev/null";
    const int bad_status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(bad_status) == 2);
}
