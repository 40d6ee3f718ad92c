#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nmrqc/algorithms.hpp"
#include "nmrqc/gates.hpp"
#include "nmrqc/json_io.hpp"
#include "nmrqc/pulse.hpp"
#include "nmrqc/qstate.hpp"
#include "nmrqc/synth.hpp"
#include "nmrqc/textio.hpp"

namespace nmrqc {

// Exit codes: 0 success / verification pass, 1 verification failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

namespace cli_detail {

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (cur.empty()) throw std::invalid_argument("bad integer list '" + s + "'");
            std::size_t used = 0;
            out.push_back(std::stoi(cur, &used));
            if (used != cur.size()) throw std::invalid_argument("bad integer '" + cur + "'");
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

inline std::string basis_label(std::size_t index, int n_qubits) {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 1; q <= n_qubits; ++q)
        if (qubit_bit(index, q, n_qubits)) s[q - 1] = '1';
    return s;
}

inline void print_chart(std::ostream& os, const std::vector<double>& pops, int n_qubits) {
    double peak = 0.0;
    for (double p : pops) peak = std::max(peak, std::abs(p));
    constexpr int kWidth = 40;
    for (std::size_t i = 0; i < pops.size(); ++i) {
        const int len = peak > 0.0 ? static_cast<int>(std::lround(std::abs(pops[i]) / peak * kWidth)) : 0;
        char num[32];
        std::snprintf(num, sizeof num, "%10.6f", pops[i]);
        os << "|" << basis_label(i, n_qubits) << "> " << num << " " << std::string(len, '#') << "\n";
    }
}

inline std::string populations_line(const std::vector<double>& pops) {
    std::string s = "populations [";
    for (std::size_t i = 0; i < pops.size(); ++i) {
        if (i) s += ',';
        s += format_double(pops[i]);
    }
    s += ']';
    return s;
}

inline RunLevel parse_level(const std::string& s) {
    if (s == "gate") return RunLevel::Gate;
    if (s == "pulse") return RunLevel::Pulse;
    throw std::invalid_argument("--level must be 'gate' or 'pulse'");
}

// Writes the payload to --out when given, otherwise to the stream.
inline void emit_payload(const std::string& payload, const std::string& out_file, std::ostream& out) {
    if (out_file.empty()) {
        out << payload;
        return;
    }
    std::ofstream f(out_file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + out_file + "' for writing");
    f << payload;
    if (!f.good()) throw std::runtime_error("write failed for '" + out_file + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Gate expressions name targets for `verify`: Cphase(pattern,angle),
// H(qubits), QFT(n), SWAP(i,j), Rk(k). The surrounding program fixes N.
inline ComplexMatrix gate_expression(const std::string& text, int n_qubits) {
    const std::string s = trim(text);
    const std::size_t open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        throw std::invalid_argument("bad gate expression '" + text + "' (expected Name(args))");
    const std::string name = s.substr(0, open);
    const std::string args = s.substr(open + 1, s.size() - open - 2);
    if (name == "Cphase") {
        const std::size_t comma = args.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("Cphase needs (pattern,angle)");
        const ConditionPattern pat = ConditionPattern::parse(trim(args.substr(0, comma)));
        if (pat.n_qubits() != n_qubits)
            throw std::invalid_argument("Cphase pattern length does not match the program's qubit count");
        return conditional_phase(pat, parse_angle(args.substr(comma + 1)));
    }
    if (name == "H") return hadamard(n_qubits, parse_int_list(args));
    if (name == "QFT") {
        const int n = std::stoi(args);
        if (n != n_qubits) throw std::invalid_argument("QFT(n) does not match the program's qubit count");
        return qft_matrix(n);
    }
    if (name == "SWAP") {
        const auto qs = parse_int_list(args);
        if (qs.size() != 2) throw std::invalid_argument("SWAP needs (i,j)");
        return swap_gate(qs[0], qs[1], n_qubits);
    }
    if (name == "Rk") {
        if (n_qubits != 1) throw std::invalid_argument("Rk targets a single-qubit program");
        return r_k(std::stoi(args));
    }
    throw std::invalid_argument("unknown gate '" + name + "'");
}

struct SynthOpts {
    std::string pattern;
    std::string angle;
    std::string order;
    std::string out_file;
    bool expand = false;
    bool composite = false;
    bool verify = false;
    double tol = kTol;
};

inline int cmd_synth(const SynthOpts& o, std::ostream& out, std::ostream& err) {
    const ConditionPattern pat = ConditionPattern::parse(o.pattern);
    const double angle = parse_angle(o.angle);
    std::vector<int> order;
    if (!o.order.empty()) order = parse_int_list(o.order);
    SynthesisResult res;
    try {
        res = synth_phase_gate(pat, angle, order, o.expand);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    PulseSequence seq = o.composite ? expand_composite(res.sequence) : res.sequence;
    emit_payload(serialize_pulse_program(seq), o.out_file, out);
    if (o.verify) {
        const std::string name = "Cphase(" + o.pattern + "," + format_angle(angle) + ")";
        const VerifyReport rep =
            verify_sequence(seq, conditional_phase(pat, angle), res.expected_phase, o.tol, name);
        out << to_json(rep) << "\n";
        if (!rep.pass) return kExitVerifyFailed;
    }
    return kExitOk;
}

struct GroverOpts {
    int n_qubits = 3;
    std::string target;
    int iterations = 0;  // 0 = floor(pi/4 * sqrt(2^n)), the standard count
    std::string start;
    std::string level = "gate";
    std::string out_file;
    bool json = false;
    bool chart = false;
};

inline int cmd_grover(const GroverOpts& o, std::ostream& out, std::ostream& err) {
    (void)err;
    int iterations = o.iterations;
    if (iterations == 0)
        iterations = std::max(1, static_cast<int>(std::floor(
                                     std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(dim_for(o.n_qubits))))));
    const Program prog = grover_program(o.n_qubits, o.target, iterations, o.start);
    std::size_t start_index = 0;
    for (int q = 1; q <= o.n_qubits; ++q)
        if (!o.start.empty() && o.start[q - 1] == '1') start_index |= qubit_mask(q, o.n_qubits);
    const StateVector initial = StateVector::basis(o.n_qubits, start_index);
    const RunTrace trace = run(prog, initial, parse_level(o.level));

    const StateVector& final_state = std::get<StateVector>(trace.final_state);
    const std::vector<double> pops = final_state.probabilities();
    const std::size_t best = static_cast<std::size_t>(
        std::max_element(pops.begin(), pops.end()) - pops.begin());
    out << "|" << basis_label(best, o.n_qubits) << "> probability " << format_double(pops[best]) << "\n";
    if (o.json || !o.out_file.empty()) emit_payload(to_json(trace) + "\n", o.out_file, out);
    if (o.chart) print_chart(err, pops, o.n_qubits);
    return kExitOk;
}

struct QftOpts {
    int n_qubits = 3;
    int input_period = 4;
    std::string level = "gate";
    std::string out_file;
    bool json = false;
    bool chart = false;
};

inline int cmd_qft(const QftOpts& o, std::ostream& out, std::ostream& err) {
    const std::size_t q = dim_for(o.n_qubits);
    const std::size_t r = static_cast<std::size_t>(o.input_period);
    if (r == 0 || (r & (r - 1)) != 0 || r > q)
        throw std::invalid_argument("--input-period must be a power of two <= 2^n");
    // Period-r inputs come from (pi/2)_y pulses on the first n - log2(r) qubits.
    int pulsed = o.n_qubits;
    for (std::size_t v = r; v > 1; v >>= 1) --pulsed;
    StateVector s = StateVector::basis(o.n_qubits, 0);
    const std::string all_any(static_cast<std::size_t>(o.n_qubits), '*');
    for (int k = 1; k <= pulsed; ++k)
        s = apply(pulse_unitary(make_pulse(Axis::Y, std::numbers::pi / 2, k, all_any), o.n_qubits), s);

    const RunTrace trace = run(qft_program(o.n_qubits), s, parse_level(o.level));
    const std::vector<double> pops = std::get<StateVector>(trace.final_state).probabilities();
    out << populations_line(pops) << "\n";
    if (o.json || !o.out_file.empty()) emit_payload(to_json(trace) + "\n", o.out_file, out);
    if (o.chart) print_chart(err, pops, o.n_qubits);
    return kExitOk;
}

struct PpureOpts {
    std::string out_file;
    bool json = false;
    bool chart = false;
};

inline int cmd_ppure(const PpureOpts& o, std::ostream& out, std::ostream& err) {
    const auto [rho, trace] = pseudo_pure_2q();
    const std::vector<double> pops = populations(rho);
    out << populations_line(pops) << "\n";
    if (o.json || !o.out_file.empty()) emit_payload(to_json(trace) + "\n", o.out_file, out);
    if (o.chart) print_chart(err, pops, rho.n_qubits);
    return kExitOk;
}

struct VerifyOpts {
    std::string program_file;
    std::string target;
    std::string expected_phase;
    double tol = kTol;
    bool diagonal = false;
};

inline int cmd_verify(const VerifyOpts& o, std::ostream& out, std::ostream& err) {
    (void)err;
    const PulseSequence seq = parse_pulse_program(read_file(o.program_file));
    if (seq.empty()) throw std::invalid_argument("program '" + o.program_file + "' contains no pulses");
    const int n = seq.n_qubits();
    const ComplexMatrix target = gate_expression(o.target, n);
    std::optional<double> expected;
    if (!o.expected_phase.empty()) expected = parse_angle(o.expected_phase);
    const VerifyReport rep = o.diagonal
                                 ? verify_sequence_diagonal(seq, target, o.tol, trim(o.target))
                                 : verify_sequence(seq, target, expected, o.tol, trim(o.target));
    out << to_json(rep) << "\n";
    return rep.pass ? kExitOk : kExitVerifyFailed;
}

struct RunOpts {
    std::string program_file;
    std::string init;
    std::string level = "gate";
    std::string out_file;
    int n_qubits = 0;
    bool density = false;
    bool chart = false;
};

inline int cmd_run(const RunOpts& o, std::ostream& out, std::ostream& err) {
    const Program prog = parse_program(read_file(o.program_file), o.n_qubits);
    if (prog.n_qubits == 0) throw std::invalid_argument("cannot infer qubit count; pass --qubits");
    std::size_t index = 0;
    if (!o.init.empty()) {
        if (static_cast<int>(o.init.size()) != prog.n_qubits)
            throw std::invalid_argument("--init length must equal the qubit count");
        for (int q = 1; q <= prog.n_qubits; ++q) {
            if (o.init[q - 1] != '0' && o.init[q - 1] != '1')
                throw std::invalid_argument("--init must be a bitstring");
            if (o.init[q - 1] == '1') index |= qubit_mask(q, prog.n_qubits);
        }
    }
    const StateVector s = StateVector::basis(prog.n_qubits, index);
    const RunLevel level = parse_level(o.level);
    RunTrace trace;
    if (o.density)
        trace = run(prog, DensityMatrix::pure(s), level);
    else
        trace = run(prog, s, level);
    emit_payload(to_json(trace) + "\n", o.out_file, out);
    if (o.chart) print_chart(err, snapshot_populations(trace.final_state), prog.n_qubits);
    return kExitOk;
}

}  // namespace cli_detail

// Front end; args excludes the program name. Every run is deterministic:
// identical flags produce byte-identical JSON.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"transition-selective pulse compiler and simulator for NMR quantum computing"};
    app.require_subcommand(1);

    cli_detail::SynthOpts synth_opts;
    auto* synth = app.add_subcommand("synth", "compile a conditional phase gate to a pulse program");
    synth->add_option("--pattern", synth_opts.pattern, "condition pattern over {0,1,e}, qubit 1 first")->required();
    synth->add_option("--angle", synth_opts.angle, "phase angle (radians or pi forms like pi/2)")->required();
    synth->add_option("--order", synth_opts.order, "conditioned-qubit order, e.g. 2,1,3 (default ascending)");
    synth->add_flag("--expand", synth_opts.expand, "emit transition-selective pulses (default: merged)");
    synth->add_flag("--composite", synth_opts.composite, "expand z-pulses into composite x/y triples");
    synth->add_flag("--verify", synth_opts.verify, "verify the program against the gate and print a report");
    synth->add_option("--tol", synth_opts.tol, "verification tolerance");
    synth->add_option("--out", synth_opts.out_file, "write the pulse program to a file");

    cli_detail::GroverOpts grover_opts;
    auto* grover = app.add_subcommand("grover", "run Grover search");
    grover->add_option("-n,--qubits", grover_opts.n_qubits, "qubit count");
    grover->add_option("--target", grover_opts.target, "searched basis state, e.g. 110")->required();
    grover->add_option("--iters", grover_opts.iterations, "iteration count (default: floor(pi/4*sqrt(2^n)))");
    grover->add_option("--start", grover_opts.start, "prepared basis state (default all zeros)");
    grover->add_option("--level", grover_opts.level, "gate|pulse");
    grover->add_flag("--json", grover_opts.json, "print the checkpoint trace as JSON");
    grover->add_flag("--chart", grover_opts.chart, "ASCII population chart on stderr");
    grover->add_option("--out", grover_opts.out_file, "write the trace JSON to a file");

    cli_detail::QftOpts qft_opts;
    auto* qft = app.add_subcommand("qft", "run the quantum Fourier transform on a periodic input");
    qft->add_option("-n,--qubits", qft_opts.n_qubits, "qubit count");
    qft->add_option("--input-period", qft_opts.input_period, "input-state period (power of two)");
    qft->add_option("--level", qft_opts.level, "gate|pulse");
    qft->add_flag("--json", qft_opts.json, "print the checkpoint trace as JSON");
    qft->add_flag("--chart", qft_opts.chart, "ASCII population chart on stderr");
    qft->add_option("--out", qft_opts.out_file, "write the trace JSON to a file");

    cli_detail::PpureOpts ppure_opts;
    auto* ppure = app.add_subcommand("ppure", "two-qubit pseudo-pure state preparation");
    ppure->add_flag("--json", ppure_opts.json, "print the checkpoint trace as JSON");
    ppure->add_flag("--chart", ppure_opts.chart, "ASCII population chart on stderr");
    ppure->add_option("--out", ppure_opts.out_file, "write the trace JSON to a file");

    cli_detail::VerifyOpts verify_opts;
    auto* verify = app.add_subcommand("verify", "verify a pulse program against a gate");
    verify->add_option("--program", verify_opts.program_file, "pulse program file")->required();
    verify->add_option("--target", verify_opts.target, "gate expression, e.g. Cphase(111,pi)")->required();
    verify->add_option("--expected-phase", verify_opts.expected_phase, "expected residual global phase");
    verify->add_option("--tol", verify_opts.tol, "tolerance on the max-entry error");
    verify->add_flag("--diagonal", verify_opts.diagonal, "verify up to per-state diagonal phases");

    cli_detail::RunOpts run_opts;
    auto* runc = app.add_subcommand("run", "run a gate program file");
    runc->add_option("--program", run_opts.program_file, "program file")->required();
    runc->add_option("--qubits", run_opts.n_qubits, "qubit count (default: inferred)");
    runc->add_option("--init", run_opts.init, "initial basis state bitstring (default all zeros)");
    runc->add_option("--level", run_opts.level, "gate|pulse");
    runc->add_flag("--density", run_opts.density, "simulate the density matrix instead of the state vector");
    runc->add_flag("--chart", run_opts.chart, "ASCII population chart on stderr");
    runc->add_option("--out", run_opts.out_file, "write the trace JSON to a file");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cli_detail::cmd_synth(synth_opts, out, err);
        if (grover->parsed()) return cli_detail::cmd_grover(grover_opts, out, err);
        if (qft->parsed()) return cli_detail::cmd_qft(qft_opts, out, err);
        if (ppure->parsed()) return cli_detail::cmd_ppure(ppure_opts, out, err);
        if (verify->parsed()) return cli_detail::cmd_verify(verify_opts, out, err);
        if (runc->parsed()) return cli_detail::cmd_run(run_opts, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace nmrqc
