#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmrqc/cli.hpp"

using namespace nmrqc;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("cli synth") {
    SECTION("expanded composite program for 111 has 21 lines") {
        const CliResult r = call({"synth", "--pattern", "111", "--angle", "pi", "--expand", "--composite"});
        REQUIRE(r.code == 0);
        REQUIRE(count_lines(r.out) == 21);
    }

    SECTION("merged reduced gate is a 2-line program") {
        const CliResult r = call({"synth", "--pattern", "11e", "--angle", "pi/2"});
        REQUIRE(r.code == 0);
        REQUIRE(count_lines(r.out) == 2);
        REQUIRE(r.out.find("pat=***") != std::string::npos);  // spin-selective first pulse
        REQUIRE(r.out.find("pat=1**") != std::string::npos);  // subset-selective second pulse
    }

    SECTION("pattern with no conditioned qubits is a usage error") {
        const CliResult r = call({"synth", "--pattern", "eee", "--angle", "pi"});
        REQUIRE(r.code == 2);
        REQUIRE(r.err.find("no conditioned qubits") != std::string::npos);
    }

    SECTION("verification report on stdout, exit 0 on pass") {
        const CliResult r = call({"synth", "--pattern", "11", "--angle", "pi/2", "--expand", "--verify"});
        REQUIRE(r.code == 0);
        const std::string last = r.out.substr(r.out.rfind('{'));
        const auto j = nlohmann::json::parse(last);
        REQUIRE(j["pass"].get<bool>());
        REQUIRE(j["target"] == "Cphase(11,pi/2)");
        REQUIRE(j["expected_phase"].get<double>() == Catch::Approx(-std::numbers::pi / 8).margin(1e-15));
    }

    SECTION("bad pattern is a usage error") {
        const CliResult r = call({"synth", "--pattern", "1x", "--angle", "pi"});
        REQUIRE(r.code == 2);
    }

    SECTION("--out writes the program to a file") {
        const auto path = temp_file("nmrqc_cli_synth.pulse");
        const CliResult r = call({"synth", "--pattern", "11", "--angle", "pi", "--out", path.string()});
        REQUIRE(r.code == 0);
        REQUIRE(r.out.empty());
        std::ifstream f(path);
        REQUIRE(f.good());
        std::stringstream ss;
        ss << f.rdbuf();
        REQUIRE(count_lines(ss.str()) == 2);
        std::filesystem::remove(path);
    }
}

TEST_CASE("cli grover") {
    SECTION("3-qubit pulse-level search reports the target with 121/128") {
        const CliResult r = call({"grover", "-n", "3", "--target", "110", "--iters", "2", "--level", "pulse"});
        REQUIRE(r.code == 0);
        REQUIRE(r.out.find("|110> probability 0.9453125") == 0);
    }

    SECTION("default iteration count comes from the qubit count") {
        const CliResult r = call({"grover", "-n", "2", "--target", "01"});
        REQUIRE(r.code == 0);
        REQUIRE(r.out.find("|01> probability 1") == 0);
    }

    SECTION("json trace contains the checkpoints") {
        const CliResult r = call({"grover", "-n", "2", "--target", "11", "--iters", "1", "--json"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out.substr(r.out.find('\n') + 1));
        REQUIRE(j.contains("initial"));
        REQUIRE(j.contains("superposition"));
        REQUIRE(j.contains("sign-flip"));
        REQUIRE(j.contains("inversion"));
    }

    SECTION("chart goes to stderr") {
        const CliResult r = call({"grover", "-n", "2", "--target", "10", "--iters", "1", "--chart"});
        REQUIRE(r.code == 0);
        REQUIRE(r.err.find("|10>") != std::string::npos);
        REQUIRE(r.err.find('#') != std::string::npos);
    }

    SECTION("bad target is a usage error") {
        REQUIRE(call({"grover", "-n", "3", "--target", "11"}).code == 2);
        REQUIRE(call({"grover", "-n", "3", "--target", "abc"}).code == 2);
    }

    SECTION("identical flags give byte-identical output") {
        const std::vector<std::string> args = {"grover", "-n", "3", "--target", "101",
                                               "--iters", "2", "--level", "pulse", "--json"};
        const CliResult a = call(args);
        const CliResult b = call(args);
        REQUIRE(a.code == 0);
        REQUIRE(a.out == b.out);
    }
}

TEST_CASE("cli qft") {
    SECTION("period-4 input peaks every second index") {
        const CliResult r = call({"qft", "--input-period", "4"});
        REQUIRE(r.code == 0);
        REQUIRE(r.out.find("populations [0.25,0,0.25,0,0.25,0,0.25,0]") == 0);
    }

    SECTION("period-2 input peaks at 0 and 4, pulse level included") {
        for (const char* level : {"gate", "pulse"}) {
            const CliResult r = call({"qft", "--input-period", "2", "--level", level});
            REQUIRE(r.code == 0);
            const std::string line = r.out.substr(0, r.out.find('\n'));
            const auto j = nlohmann::json::parse(line.substr(line.find('[')));
            REQUIRE(j[0].get<double>() == Catch::Approx(0.5).margin(1e-9));
            REQUIRE(j[4].get<double>() == Catch::Approx(0.5).margin(1e-9));
            for (int i : {1, 2, 3, 5, 6, 7}) REQUIRE(j[i].get<double>() == Catch::Approx(0.0).margin(1e-9));
        }
    }

    SECTION("chart marks the peaks") {
        const CliResult r = call({"qft", "--input-period", "4", "--chart"});
        REQUIRE(r.code == 0);
        REQUIRE(r.err.find("|000>") != std::string::npos);
    }

    SECTION("period must be a power of two in range") {
        REQUIRE(call({"qft", "--input-period", "3"}).code == 2);
        REQUIRE(call({"qft", "--input-period", "16"}).code == 2);
    }
}

TEST_CASE("cli ppure") {
    const CliResult r = call({"ppure"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("populations [1,-0.333333") == 0);

    const CliResult j = call({"ppure", "--json"});
    const auto trace = nlohmann::json::parse(j.out.substr(j.out.find('\n') + 1));
    REQUIRE(trace["final"]["kind"] == "density");
}

TEST_CASE("cli verify") {
    const auto path = temp_file("nmrqc_cli_verify.pulse");

    SECTION("synthesized program verifies against its gate") {
        REQUIRE(call({"synth", "--pattern", "111", "--angle", "pi", "--expand", "--composite",
                      "--out", path.string()})
                    .code == 0);
        const CliResult r = call({"verify", "--program", path.string(), "--target", "Cphase(111,pi)",
                                  "--expected-phase", "-pi/8"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        REQUIRE(j["pass"].get<bool>());
        REQUIRE(j["phase"].get<double>() == Catch::Approx(-std::numbers::pi / 8).margin(1e-9));
        std::filesystem::remove(path);
    }

    SECTION("tampered program fails with exit 1") {
        REQUIRE(call({"synth", "--pattern", "11", "--angle", "pi", "--expand", "--out", path.string()}).code == 0);
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        in.close();
        std::string text = ss.str();
        text.replace(text.find("z "), 2, "-z ");  // flip the first rotation's sense
        std::ofstream(path) << text;
        const CliResult r = call({"verify", "--program", path.string(), "--target", "Cphase(11,pi)"});
        REQUIRE(r.code == 1);
        REQUIRE_FALSE(nlohmann::json::parse(r.out)["pass"].get<bool>());
        std::filesystem::remove(path);
    }

    SECTION("swap cascade verifies only up to diagonal phases") {
        std::ofstream(path) << "x 3.1415926535897931 q3 pat=00*\n"
                               "x 3.1415926535897931 q1 pat=*00\n"
                               "x 3.1415926535897931 q3 pat=00*\n"
                               "x 3.1415926535897931 q3 pat=11*\n"
                               "x 3.1415926535897931 q1 pat=*11\n"
                               "x 3.1415926535897931 q3 pat=11*\n";
        const CliResult global = call({"verify", "--program", path.string(), "--target", "SWAP(1,3)"});
        REQUIRE(global.code == 1);
        const CliResult diag = call({"verify", "--program", path.string(), "--target", "SWAP(1,3)", "--diagonal"});
        REQUIRE(diag.code == 0);
        const auto j = nlohmann::json::parse(diag.out);
        REQUIRE(j["pass"].get<bool>());
        REQUIRE(j["diag_phase"].size() == 8);
        std::filesystem::remove(path);
    }

    SECTION("parse errors carry the line number and exit 2") {
        std::ofstream(path) << "x 1.0 q1 pat=**\nw 1.0 q1 pat=**\n";
        const CliResult r = call({"verify", "--program", path.string(), "--target", "H(1,2)"});
        REQUIRE(r.code == 2);
        REQUIRE(r.err.find("line 2") != std::string::npos);
        std::filesystem::remove(path);
    }

    SECTION("missing file exits 2") {
        REQUIRE(call({"verify", "--program", "/nonexistent.pulse", "--target", "H(1)"}).code == 2);
    }

    SECTION("tight tolerance can fail an otherwise good program") {
        REQUIRE(call({"synth", "--pattern", "111", "--angle", "pi", "--expand", "--composite",
                      "--out", path.string()})
                    .code == 0);
        const CliResult r = call({"verify", "--program", path.string(), "--target", "Cphase(111,pi)",
                                  "--tol", "1e-18"});
        const auto j = nlohmann::json::parse(r.out);
        REQUIRE(r.code == (j["pass"].get<bool>() ? 0 : 1));
        std::filesystem::remove(path);
    }
}

TEST_CASE("cli run") {
    const auto path = temp_file("nmrqc_cli_run.prog");
    std::ofstream(path) << "H q=1,2\nCPHASE pat=11 angle=pi\nH q=1,2\nCHECKPOINT done\n";

    SECTION("runs a program file and prints the trace") {
        const CliResult r = call({"run", "--program", path.string(), "--init", "00"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        REQUIRE(j.contains("initial"));
        REQUIRE(j.contains("done"));
        REQUIRE(j["done"]["kind"] == "state");
    }

    SECTION("pulse level and density mode work") {
        const CliResult r = call({"run", "--program", path.string(), "--level", "pulse", "--density"});
        REQUIRE(r.code == 0);
        REQUIRE(nlohmann::json::parse(r.out)["done"]["kind"] == "density");
    }

    SECTION("byte-identical across runs") {
        const CliResult a = call({"run", "--program", path.string(), "--level", "pulse"});
        const CliResult b = call({"run", "--program", path.string(), "--level", "pulse"});
        REQUIRE(a.out == b.out);
    }

    std::filesystem::remove(path);
}

TEST_CASE("cli usage errors") {
    REQUIRE(call({}).code == 2);
    REQUIRE(call({"bogus"}).code == 2);
    REQUIRE(call({"synth"}).code == 2);             // missing required flags
    REQUIRE(call({"grover", "--target"}).code == 2);
    REQUIRE(call({"--help"}).code == 0);
}
