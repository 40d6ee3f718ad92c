#pragma once

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nmrqc/gates.hpp"
#include "nmrqc/pulse.hpp"
#include "nmrqc/qstate.hpp"
#include "nmrqc/synth.hpp"
#include "nmrqc/textio.hpp"

namespace nmrqc {

enum class StepKind { Hadamard, CondPhase, Swap, Checkpoint };

struct ProgramStep {
    StepKind kind = StepKind::Checkpoint;
    std::vector<int> qubits;   // Hadamard subset, or {i, j} for Swap
    ConditionPattern pattern;  // CondPhase
    double angle = 0.0;        // CondPhase
    std::string label;         // Checkpoint

    static ProgramStep hadamard(std::vector<int> qs) {
        ProgramStep s;
        s.kind = StepKind::Hadamard;
        s.qubits = std::move(qs);
        return s;
    }
    static ProgramStep cond_phase(ConditionPattern p, double angle) {
        ProgramStep s;
        s.kind = StepKind::CondPhase;
        s.pattern = std::move(p);
        s.angle = angle;
        return s;
    }
    static ProgramStep swap(int i, int j) {
        ProgramStep s;
        s.kind = StepKind::Swap;
        s.qubits = {i, j};
        return s;
    }
    static ProgramStep checkpoint(std::string label) {
        ProgramStep s;
        s.kind = StepKind::Checkpoint;
        s.label = std::move(label);
        return s;
    }
};

// Gate-level steps in execution order (index 0 runs first).
struct Program {
    int n_qubits = 0;
    std::vector<ProgramStep> steps;

    void validate() const {
        std::set<std::string> labels;
        for (const auto& s : steps) {
            switch (s.kind) {
                case StepKind::Hadamard:
                    if (s.qubits.empty()) throw std::invalid_argument("program: H step with no qubits");
                    for (int q : s.qubits)
                        if (q < 1 || q > n_qubits) throw std::invalid_argument("program: H qubit out of range");
                    break;
                case StepKind::CondPhase:
                    if (s.pattern.n_qubits() != n_qubits)
                        throw std::invalid_argument("program: CPHASE pattern length != qubit count");
                    break;
                case StepKind::Swap:
                    if (s.qubits.size() != 2 || s.qubits[0] == s.qubits[1])
                        throw std::invalid_argument("program: SWAP needs two distinct qubits");
                    for (int q : s.qubits)
                        if (q < 1 || q > n_qubits) throw std::invalid_argument("program: SWAP qubit out of range");
                    break;
                case StepKind::Checkpoint:
                    if (s.label.empty()) throw std::invalid_argument("program: empty checkpoint label");
                    if (!labels.insert(s.label).second)
                        throw std::invalid_argument("program: duplicate checkpoint label '" + s.label + "'");
                    break;
            }
        }
    }
};

// Ideal matrix for one (non-checkpoint) step.
inline ComplexMatrix step_unitary(const ProgramStep& s, int n_qubits) {
    switch (s.kind) {
        case StepKind::Hadamard: return hadamard(n_qubits, s.qubits);
        case StepKind::CondPhase: return conditional_phase(s.pattern, s.angle);
        case StepKind::Swap: return swap_gate(s.qubits[0], s.qubits[1], n_qubits);
        case StepKind::Checkpoint: break;
    }
    throw std::logic_error("step_unitary: checkpoint has no unitary");
}

// Pulse compilation of one step: phase gates are fully expanded to
// transition-selective composite x/y pulses, H becomes the pulse pair,
// SWAP the pi-pulse cascade.
inline PulseSequence step_pulses(const ProgramStep& s, int n_qubits) {
    switch (s.kind) {
        case StepKind::Hadamard: return synth_hadamard(s.qubits, n_qubits);
        case StepKind::CondPhase:
            return expand_composite(synth_phase_gate(s.pattern, s.angle, {}, true).sequence);
        case StepKind::Swap: return synth_swap(s.qubits[0], s.qubits[1], n_qubits);
        case StepKind::Checkpoint: break;
    }
    throw std::logic_error("step_pulses: checkpoint has no pulses");
}

enum class RunLevel { Gate, Pulse };

using Snapshot = std::variant<StateVector, DensityMatrix>;

inline std::vector<double> snapshot_populations(const Snapshot& s) {
    if (std::holds_alternative<StateVector>(s)) return std::get<StateVector>(s).probabilities();
    return populations(std::get<DensityMatrix>(s));
}

struct RunTrace {
    RunLevel level = RunLevel::Gate;
    bool density = false;
    std::vector<std::pair<std::string, Snapshot>> checkpoints;  // in execution order
    Snapshot final_state;

    void record(const std::string& label, Snapshot snap) {
        for (const auto& [name, _] : checkpoints)
            if (name == label) throw std::invalid_argument("duplicate checkpoint label '" + label + "'");
        checkpoints.emplace_back(label, std::move(snap));
    }

    bool has(const std::string& label) const {
        for (const auto& [name, _] : checkpoints)
            if (name == label) return true;
        return false;
    }

    const Snapshot& at(const std::string& label) const {
        for (const auto& [name, snap] : checkpoints)
            if (name == label) return snap;
        throw std::out_of_range("no checkpoint '" + label + "'");
    }
};

namespace detail {

template <typename State>
State apply_step(const ProgramStep& s, const State& in, int n_qubits, RunLevel level) {
    if (level == RunLevel::Gate) {
        const ComplexMatrix u = step_unitary(s, n_qubits);
        if constexpr (std::is_same_v<State, StateVector>)
            return apply(u, in);
        else
            return conjugate(u, in);
    }
    State cur = in;
    for (const auto& p : step_pulses(s, n_qubits)) {
        const ComplexMatrix u = pulse_unitary(p, n_qubits);
        if constexpr (std::is_same_v<State, StateVector>)
            cur = apply(u, cur);
        else
            cur = conjugate(u, cur);
    }
    return cur;
}

template <typename State>
RunTrace run_impl(const Program& prog, const State& initial, RunLevel level) {
    prog.validate();
    const std::size_t d = dim_for(prog.n_qubits);
    if constexpr (std::is_same_v<State, StateVector>) {
        if (initial.dim() != d) throw std::invalid_argument("run: state dimension != 2^N");
    } else {
        if (initial.dim() != d) throw std::invalid_argument("run: density dimension != 2^N");
    }
    RunTrace trace;
    trace.level = level;
    trace.density = std::is_same_v<State, DensityMatrix>;
    State cur = initial;
    trace.record("initial", cur);
    for (const auto& s : prog.steps) {
        if (s.kind == StepKind::Checkpoint) {
            trace.record(s.label, cur);
            continue;
        }
        cur = apply_step(s, cur, prog.n_qubits, level);
    }
    trace.final_state = cur;
    return trace;
}

}  // namespace detail

inline RunTrace run(const Program& prog, const StateVector& initial, RunLevel level) {
    return detail::run_impl(prog, initial, level);
}

inline RunTrace run(const Program& prog, const DensityMatrix& initial, RunLevel level) {
    return detail::run_impl(prog, initial, level);
}

// Grover search: H on all qubits, then per iteration a conditional pi
// sign-flip on the target pattern and the inversion about average realized
// as H C_start(pi) H, where `start` is the prepared basis state's pattern
// (all zeros unless the run starts elsewhere). Checkpoints mirror the
// algorithm's stages: superposition, then sign-flip / inversion per iteration.
inline Program grover_program(int n_qubits, const std::string& target, int iterations,
                              std::string start = {}) {
    if (static_cast<int>(target.size()) != n_qubits)
        throw std::invalid_argument("grover_program: target length != qubit count");
    for (char c : target)
        if (c != '0' && c != '1') throw std::invalid_argument("grover_program: target must be over {0,1}");
    if (iterations < 1) throw std::invalid_argument("grover_program: iterations must be >= 1");
    if (start.empty()) start.assign(static_cast<std::size_t>(n_qubits), '0');
    if (static_cast<int>(start.size()) != n_qubits)
        throw std::invalid_argument("grover_program: start length != qubit count");

    std::vector<int> all;
    for (int q = 1; q <= n_qubits; ++q) all.push_back(q);
    const ConditionPattern target_pat = ConditionPattern::parse(target);
    const ConditionPattern start_pat = ConditionPattern::parse(start);

    Program prog;
    prog.n_qubits = n_qubits;
    prog.steps.push_back(ProgramStep::hadamard(all));
    prog.steps.push_back(ProgramStep::checkpoint("superposition"));
    for (int k = 1; k <= iterations; ++k) {
        const std::string suffix = (k == 1) ? "" : "-" + std::to_string(k);
        prog.steps.push_back(ProgramStep::cond_phase(target_pat, std::numbers::pi));
        prog.steps.push_back(ProgramStep::checkpoint("sign-flip" + suffix));
        prog.steps.push_back(ProgramStep::hadamard(all));
        prog.steps.push_back(ProgramStep::cond_phase(start_pat, std::numbers::pi));
        prog.steps.push_back(ProgramStep::hadamard(all));
        prog.steps.push_back(ProgramStep::checkpoint("inversion" + suffix));
    }
    return prog;
}

// QFT circuit. For 3 qubits the step order is H1, C_11e(pi/2), H2,
// C_1e1(pi/4), C_e11(pi/2), H3, SWAP(1,3); general n follows the same
// pattern (H on each qubit followed by its controlled phases, bit-reversal
// swaps at the end). The gate product equals qft_matrix(n) up to global phase.
inline Program qft_program(int n_qubits = 3) {
    if (n_qubits < 1) throw std::invalid_argument("qft_program: need at least one qubit");
    Program prog;
    prog.n_qubits = n_qubits;
    auto cphase_between = [&](int a, int b) {  // phase pi/2^(b-a) conditioned on qubits a,b
        std::string pat(static_cast<std::size_t>(n_qubits), 'e');
        pat[a - 1] = '1';
        pat[b - 1] = '1';
        const double angle = std::numbers::pi / static_cast<double>(std::size_t{1} << (b - a));
        return ProgramStep::cond_phase(ConditionPattern::parse(pat), angle);
    };
    if (n_qubits == 3) {
        prog.steps.push_back(ProgramStep::hadamard({1}));
        prog.steps.push_back(cphase_between(1, 2));
        prog.steps.push_back(ProgramStep::hadamard({2}));
        prog.steps.push_back(cphase_between(1, 3));
        prog.steps.push_back(cphase_between(2, 3));
        prog.steps.push_back(ProgramStep::hadamard({3}));
        prog.steps.push_back(ProgramStep::swap(1, 3));
    } else {
        for (int k = 1; k <= n_qubits; ++k) {
            prog.steps.push_back(ProgramStep::hadamard({k}));
            for (int l = k + 1; l <= n_qubits; ++l) prog.steps.push_back(cphase_between(k, l));
        }
        for (int k = 1; k <= n_qubits / 2; ++k)
            if (k != n_qubits + 1 - k) prog.steps.push_back(ProgramStep::swap(k, n_qubits + 1 - k));
    }
    prog.steps.push_back(ProgramStep::checkpoint("final"));
    return prog;
}

// Pseudo-pure |00> preparation on two qubits, equal-weight deviation model:
// starting from sigma = Iz x I + I x Iz = diag(1, 0, 0, -1), an x-pulse of
// arccos(1/3) on qubit 1 (spectator pattern "1", i.e. the |01>-|11>
// transition) and a pi/2 x-pulse on qubit 2 (pattern "1", |10>-|11>) followed
// by a gradient crush equalize the last three populations at -1/3 while the
// |00> population stays at 1. The heteronuclear gamma weights of a real
// two-species pair are not modeled; these angles equalize under equal weights.
inline std::pair<DensityMatrix, RunTrace> pseudo_pure_2q() {
    DensityMatrix rho = DensityMatrix::from_diagonal(2, {1.0, 0.0, 0.0, -1.0}, true);
    RunTrace trace;
    trace.level = RunLevel::Pulse;
    trace.density = true;
    trace.record("initial", rho);
    const double transfer_angle = std::acos(1.0 / 3.0);  // "70.5 degrees"
    rho = conjugate(pulse_unitary(make_pulse(Axis::X, transfer_angle, 1, "*1"), 2), rho);
    trace.record("pulse-1", rho);
    rho = conjugate(pulse_unitary(make_pulse(Axis::X, std::numbers::pi / 2, 2, "1*"), 2), rho);
    trace.record("pulse-2", rho);
    rho = crush(rho);
    trace.record("final", rho);
    trace.final_state = rho;
    return {rho, trace};
}

// --- program text format ---------------------------------------------------
//
// One step per line, execution order top to bottom:
//   H q=1,2,3 | CPHASE pat=110 angle=pi | SWAP q=1,3 | CHECKPOINT label
// '#' starts a comment line. The qubit count is inferred (CPHASE pattern
// length, else the largest referenced qubit) unless passed explicitly.

inline std::string serialize_program(const Program& prog) {
    std::string out;
    for (const auto& s : prog.steps) {
        switch (s.kind) {
            case StepKind::Hadamard: {
                out += "H q=";
                for (std::size_t k = 0; k < s.qubits.size(); ++k) {
                    if (k) out += ',';
                    out += std::to_string(s.qubits[k]);
                }
                break;
            }
            case StepKind::CondPhase:
                out += "CPHASE pat=" + s.pattern.str() + " angle=" + format_angle(s.angle);
                break;
            case StepKind::Swap:
                out += "SWAP q=" + std::to_string(s.qubits[0]) + "," + std::to_string(s.qubits[1]);
                break;
            case StepKind::Checkpoint:
                out += "CHECKPOINT " + s.label;
                break;
        }
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::vector<int> parse_qubit_list(const std::string& field, int line_no) {
    if (field.rfind("q=", 0) != 0) throw parse_error("expected q=<list>", line_no);
    std::vector<int> qs;
    std::string cur;
    for (char c : field.substr(2) + ",") {
        if (c == ',') {
            if (cur.empty()) throw parse_error("bad qubit list '" + field + "'", line_no);
            try {
                std::size_t used = 0;
                qs.push_back(std::stoi(cur, &used));
                if (used != cur.size()) throw std::invalid_argument("");
            } catch (...) {
                throw parse_error("bad qubit '" + cur + "'", line_no);
            }
            cur.clear();
        } else {
            cur += c;
        }
    }
    return qs;
}

}  // namespace detail

inline Program parse_program(const std::string& text, int n_qubits = 0) {
    Program prog;
    int max_qubit = 0;
    int pattern_len = 0;
    const auto lines = split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int line_no = static_cast<int>(li) + 1;
        const std::string line = trim(lines[li]);
        if (line.empty() || line[0] == '#') continue;
        const auto tok = split_ws(line);
        const std::string& op = tok[0];
        if (op == "H") {
            if (tok.size() != 2) throw parse_error("H takes exactly q=<list>", line_no);
            auto qs = detail::parse_qubit_list(tok[1], line_no);
            for (int q : qs) max_qubit = std::max(max_qubit, q);
            prog.steps.push_back(ProgramStep::hadamard(std::move(qs)));
        } else if (op == "CPHASE") {
            if (tok.size() != 3 || tok[1].rfind("pat=", 0) != 0 || tok[2].rfind("angle=", 0) != 0)
                throw parse_error("CPHASE takes pat=<pattern> angle=<angle>", line_no);
            ConditionPattern pat;
            double angle = 0.0;
            try {
                pat = ConditionPattern::parse(tok[1].substr(4));
                angle = parse_angle(tok[2].substr(6));
            } catch (const std::invalid_argument& e) {
                throw parse_error(e.what(), line_no);
            }
            if (pattern_len == 0) pattern_len = pat.n_qubits();
            if (pat.n_qubits() != pattern_len)
                throw parse_error("CPHASE pattern length differs from earlier lines", line_no);
            prog.steps.push_back(ProgramStep::cond_phase(std::move(pat), angle));
        } else if (op == "SWAP") {
            if (tok.size() != 2) throw parse_error("SWAP takes exactly q=<i>,<j>", line_no);
            auto qs = detail::parse_qubit_list(tok[1], line_no);
            if (qs.size() != 2) throw parse_error("SWAP needs exactly two qubits", line_no);
            max_qubit = std::max({max_qubit, qs[0], qs[1]});
            prog.steps.push_back(ProgramStep::swap(qs[0], qs[1]));
        } else if (op == "CHECKPOINT") {
            const std::string label = trim(line.substr(op.size()));
            if (label.empty()) throw parse_error("CHECKPOINT needs a label", line_no);
            prog.steps.push_back(ProgramStep::checkpoint(label));
        } else {
            throw parse_error("unknown step '" + op + "'", line_no);
        }
    }
    prog.n_qubits = n_qubits > 0 ? n_qubits : (pattern_len > 0 ? pattern_len : max_qubit);
    prog.validate();
    return prog;
}

}  // namespace nmrqc
