#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmrqc/qstate.hpp"
#include "nmrqc/textio.hpp"

namespace nmrqc {

// Rotation convention: (angle)_axis = exp(-i angle sigma_axis / 2), and a
// negative axis means sigma_{-a} = -sigma_a.
enum class Axis { X, MinusX, Y, MinusY, Z, MinusZ };

inline bool is_z_axis(Axis a) { return a == Axis::Z || a == Axis::MinusZ; }

inline int axis_sign(Axis a) {
    return (a == Axis::MinusX || a == Axis::MinusY || a == Axis::MinusZ) ? -1 : 1;
}

inline Axis negated(Axis a) {
    switch (a) {
        case Axis::X: return Axis::MinusX;
        case Axis::MinusX: return Axis::X;
        case Axis::Y: return Axis::MinusY;
        case Axis::MinusY: return Axis::Y;
        case Axis::Z: return Axis::MinusZ;
        case Axis::MinusZ: return Axis::Z;
    }
    throw std::logic_error("bad axis");
}

inline std::string axis_name(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::MinusX: return "-x";
        case Axis::Y: return "y";
        case Axis::MinusY: return "-y";
        case Axis::Z: return "z";
        case Axis::MinusZ: return "-z";
    }
    throw std::logic_error("bad axis");
}

inline Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::X;
    if (s == "-x") return Axis::MinusX;
    if (s == "y") return Axis::Y;
    if (s == "-y") return Axis::MinusY;
    if (s == "z") return Axis::Z;
    if (s == "-z") return Axis::MinusZ;
    throw std::invalid_argument("unknown axis '" + s + "'");
}

// Spectator condition for one qubit of a selective pulse.
enum class Spectator : char { Zero = '0', One = '1', Any = '*' };

// One rotation pulse. `active` is the 1-based rotated qubit; every other
// qubit is a spectator constrained by `pattern` (the entry at the active
// position is ignored and serialized as '*'). All spectators fixed makes the
// pulse transition-selective, all '*' makes it spin (qubit) selective.
struct PulseSpec {
    Axis axis = Axis::X;
    double angle = 0.0;
    int active = 1;
    std::vector<Spectator> pattern;

    int n_qubits() const { return static_cast<int>(pattern.size()); }

    bool spin_selective() const {
        for (int q = 1; q <= n_qubits(); ++q)
            if (q != active && pattern[q - 1] != Spectator::Any) return false;
        return true;
    }

    bool transition_selective() const {
        for (int q = 1; q <= n_qubits(); ++q)
            if (q != active && pattern[q - 1] == Spectator::Any) return false;
        return true;
    }
};

inline std::string pattern_string(const PulseSpec& p) {
    std::string s;
    for (int q = 1; q <= p.n_qubits(); ++q)
        s += (q == p.active) ? '*' : static_cast<char>(p.pattern[q - 1]);
    return s;
}

// Convenience builder; pattern is a string over {0,1,*}, active position ignored.
inline PulseSpec make_pulse(Axis axis, double angle, int active, const std::string& pattern) {
    PulseSpec p;
    p.axis = axis;
    p.angle = angle;
    p.active = active;
    p.pattern.reserve(pattern.size());
    for (char c : pattern) {
        if (c != '0' && c != '1' && c != '*') throw std::invalid_argument("bad pattern char");
        p.pattern.push_back(static_cast<Spectator>(c));
    }
    if (active < 1 || active > p.n_qubits()) throw std::invalid_argument("active qubit out of range");
    p.pattern[active - 1] = Spectator::Any;
    return p;
}

// Time-ordered pulse list, index 0 = earliest.
struct PulseSequence {
    std::vector<PulseSpec> pulses;

    std::size_t size() const { return pulses.size(); }
    bool empty() const { return pulses.empty(); }
    auto begin() const { return pulses.begin(); }
    auto end() const { return pulses.end(); }
    const PulseSpec& operator[](std::size_t i) const { return pulses[i]; }

    void append(PulseSpec p) { pulses.push_back(std::move(p)); }
    void extend(const PulseSequence& other) {
        pulses.insert(pulses.end(), other.pulses.begin(), other.pulses.end());
    }

    int n_qubits() const {
        if (pulses.empty()) throw std::invalid_argument("empty pulse sequence has no qubit count");
        const int n = pulses.front().n_qubits();
        for (const auto& p : pulses)
            if (p.n_qubits() != n) throw std::invalid_argument("pulse sequence mixes qubit counts");
        return n;
    }
};

namespace detail {

inline void check_pulse(const PulseSpec& p, int n_qubits) {
    if (p.n_qubits() != n_qubits) throw std::invalid_argument("pulse pattern length != qubit count");
    if (p.active < 1 || p.active > n_qubits) throw std::invalid_argument("active qubit out of range");
    if (!std::isfinite(p.angle)) throw std::invalid_argument("pulse angle not finite");
}

inline bool spectators_match(const PulseSpec& p, std::size_t index, int n_qubits) {
    for (int q = 1; q <= n_qubits; ++q) {
        if (q == p.active || p.pattern[q - 1] == Spectator::Any) continue;
        const int want = (p.pattern[q - 1] == Spectator::One) ? 1 : 0;
        if (qubit_bit(index, q, n_qubits) != want) return false;
    }
    return true;
}

}  // namespace detail

// Hermitian generator G with U = exp(-i angle G): sigma_axis/2 at the active
// qubit, |0><0| / |1><1| projectors on fixed spectators, identity on '*'.
inline ComplexMatrix generator(const PulseSpec& p, int n_qubits) {
    detail::check_pulse(p, n_qubits);
    const double sg = axis_sign(p.axis);
    ComplexMatrix sigma(2, 2);
    switch (p.axis) {
        case Axis::X:
        case Axis::MinusX:
            sigma(0, 1) = sg;
            sigma(1, 0) = sg;
            break;
        case Axis::Y:
        case Axis::MinusY:
            sigma(0, 1) = cd(0.0, -sg);
            sigma(1, 0) = cd(0.0, sg);
            break;
        case Axis::Z:
        case Axis::MinusZ:
            sigma(0, 0) = sg;
            sigma(1, 1) = -sg;
            break;
    }
    ComplexMatrix g(1, 1);
    g(0, 0) = 1.0;
    for (int q = 1; q <= n_qubits; ++q) {
        ComplexMatrix f(2, 2);
        if (q == p.active) {
            f = sigma * cd(0.5, 0.0);
        } else {
            switch (p.pattern[q - 1]) {
                case Spectator::Zero: f(0, 0) = 1.0; break;
                case Spectator::One: f(1, 1) = 1.0; break;
                case Spectator::Any: f = ComplexMatrix::identity(2); break;
            }
        }
        g = kron(g, f);
    }
    return g;
}

// exp(-i angle G), closed form: identity outside the selected subspace, the
// 2x2 rotation cos(a/2) I - i sin(a/2) sigma_axis on every matching pair.
inline ComplexMatrix pulse_unitary(const PulseSpec& p, int n_qubits) {
    detail::check_pulse(p, n_qubits);
    const std::size_t d = dim_for(n_qubits);
    const double c = std::cos(p.angle / 2.0);
    const double s = std::sin(p.angle / 2.0) * axis_sign(p.axis);
    cd r00, r01, r10, r11;
    switch (p.axis) {
        case Axis::X:
        case Axis::MinusX:
            r00 = c; r01 = cd(0.0, -s); r10 = cd(0.0, -s); r11 = c;
            break;
        case Axis::Y:
        case Axis::MinusY:
            r00 = c; r01 = -s; r10 = s; r11 = c;
            break;
        case Axis::Z:
        case Axis::MinusZ:
            r00 = cd(c, -s); r01 = 0.0; r10 = 0.0; r11 = cd(c, s);
            break;
    }
    ComplexMatrix u = ComplexMatrix::identity(d);
    const std::size_t mask = qubit_mask(p.active, n_qubits);
    for (std::size_t i = 0; i < d; ++i) {
        if (i & mask) continue;
        if (!detail::spectators_match(p, i, n_qubits)) continue;
        const std::size_t j = i | mask;
        u(i, i) = r00;
        u(i, j) = r01;
        u(j, i) = r10;
        u(j, j) = r11;
    }
    return u;
}

// Product of a time-ordered sequence: U = U_k .. U_2 U_1 with U_1 earliest.
inline ComplexMatrix sequence_unitary(const PulseSequence& seq) {
    if (seq.empty()) throw std::invalid_argument("sequence_unitary: empty sequence");
    const int n = seq.n_qubits();
    ComplexMatrix u = ComplexMatrix::identity(dim_for(n));
    for (const auto& p : seq) u = pulse_unitary(p, n) * u;
    return u;
}

// Composite z-pulse: a z rotation as three x/y pulses with the same
// selectivity, time-ordered [(pi/2)_y, (angle)_x, (pi/2)_-y]; a -z pulse
// negates the x angle.
inline PulseSequence composite_z(const PulseSpec& p) {
    if (!is_z_axis(p.axis)) throw std::invalid_argument("composite_z: pulse must be about z or -z");
    PulseSpec first = p, mid = p, last = p;
    first.axis = Axis::Y;
    first.angle = std::numbers::pi / 2;
    mid.axis = Axis::X;
    mid.angle = (p.axis == Axis::Z) ? p.angle : -p.angle;
    last.axis = Axis::MinusY;
    last.angle = std::numbers::pi / 2;
    PulseSequence out;
    out.append(first);
    out.append(mid);
    out.append(last);
    return out;
}

// Enumerates every '*' spectator into {0,1}: the transition-selective
// expansion of a (partially) spin-selective pulse. Earlier qubits vary
// slowest, so e.g. patterns come out as x00, x01, x10, x11.
inline std::vector<PulseSpec> transition_expansion(const PulseSpec& p) {
    std::vector<int> stars;
    for (int q = 1; q <= p.n_qubits(); ++q)
        if (q != p.active && p.pattern[q - 1] == Spectator::Any) stars.push_back(q);
    std::vector<PulseSpec> out;
    const std::size_t count = std::size_t{1} << stars.size();
    out.reserve(count);
    for (std::size_t v = 0; v < count; ++v) {
        PulseSpec t = p;
        for (std::size_t k = 0; k < stars.size(); ++k) {
            const bool one = (v >> (stars.size() - 1 - k)) & std::size_t{1};
            t.pattern[stars[k] - 1] = one ? Spectator::One : Spectator::Zero;
        }
        out.push_back(std::move(t));
    }
    return out;
}

// --- pulse-program text format -------------------------------------------
//
// One pulse per line, time order top to bottom:
//   <axis> <angle_radians> q<active> pat=<pattern>
// axis in {x,-x,y,-y,z,-z}; pattern over {0,1,*} with the active position
// written as '*'. Lines starting with '#' are comments.

inline std::string serialize_pulse(const PulseSpec& p) {
    return axis_name(p.axis) + " " + format_double(p.angle) + " q" + std::to_string(p.active) +
           " pat=" + pattern_string(p);
}

inline std::string serialize_pulse_program(const PulseSequence& seq) {
    std::string out;
    for (const auto& p : seq) {
        out += serialize_pulse(p);
        out += '\n';
    }
    return out;
}

inline PulseSequence parse_pulse_program(const std::string& text) {
    PulseSequence seq;
    int n_qubits = -1;
    const auto lines = split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int line_no = static_cast<int>(li) + 1;
        const std::string line = trim(lines[li]);
        if (line.empty() || line[0] == '#') continue;
        const auto tok = split_ws(line);
        if (tok.size() != 4) throw parse_error("expected '<axis> <angle> q<i> pat=<pattern>'", line_no);
        Axis axis;
        try {
            axis = parse_axis(tok[0]);
        } catch (const std::invalid_argument& e) {
            throw parse_error(e.what(), line_no);
        }
        char* end = nullptr;
        const double angle = std::strtod(tok[1].c_str(), &end);
        if (end != tok[1].c_str() + tok[1].size() || !std::isfinite(angle))
            throw parse_error("bad angle '" + tok[1] + "'", line_no);
        if (tok[2].size() < 2 || tok[2][0] != 'q') throw parse_error("bad qubit field '" + tok[2] + "'", line_no);
        int active = 0;
        try {
            std::size_t used = 0;
            active = std::stoi(tok[2].substr(1), &used);
            if (used != tok[2].size() - 1) throw std::invalid_argument("");
        } catch (...) {
            throw parse_error("bad qubit field '" + tok[2] + "'", line_no);
        }
        if (tok[3].rfind("pat=", 0) != 0) throw parse_error("missing pat= field", line_no);
        const std::string pat = tok[3].substr(4);
        if (n_qubits < 0) n_qubits = static_cast<int>(pat.size());
        if (static_cast<int>(pat.size()) != n_qubits)
            throw parse_error("pattern length differs from earlier lines", line_no);
        if (active < 1 || active > n_qubits) throw parse_error("active qubit out of range", line_no);
        for (char c : pat)
            if (c != '0' && c != '1' && c != '*') throw parse_error("bad pattern char '" + std::string(1, c) + "'", line_no);
        if (pat[active - 1] != '*') throw parse_error("active position must be '*'", line_no);
        seq.append(make_pulse(axis, angle, active, pat));
    }
    return seq;
}

}  // namespace nmrqc
