#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmrqc/qstate.hpp"

namespace nmrqc {

// Per-qubit condition of a conditional phase gate: fixed 0, fixed 1, or
// unconditioned ('e' in text form).
enum class Cond : char { Zero = '0', One = '1', Free = 'e' };

struct ConditionPattern {
    std::vector<Cond> entries;

    static ConditionPattern parse(const std::string& s) {
        ConditionPattern c;
        c.entries.reserve(s.size());
        for (char ch : s) {
            if (ch != '0' && ch != '1' && ch != 'e')
                throw std::invalid_argument("condition pattern must be over {0,1,e}, got '" + s + "'");
            c.entries.push_back(static_cast<Cond>(ch));
        }
        return c;
    }

    std::string str() const {
        std::string s;
        for (Cond c : entries) s += static_cast<char>(c);
        return s;
    }

    int n_qubits() const { return static_cast<int>(entries.size()); }

    // m = number of conditioned (non-free) qubits; m = 0 is a global phase.
    int conditioned_count() const {
        int m = 0;
        for (Cond c : entries)
            if (c != Cond::Free) ++m;
        return m;
    }

    std::vector<int> conditioned_qubits() const {
        std::vector<int> qs;
        for (int q = 1; q <= n_qubits(); ++q)
            if (entries[q - 1] != Cond::Free) qs.push_back(q);
        return qs;
    }

    bool matches(std::size_t index) const {
        const int n = n_qubits();
        for (int q = 1; q <= n; ++q) {
            if (entries[q - 1] == Cond::Free) continue;
            const int want = (entries[q - 1] == Cond::One) ? 1 : 0;
            if (qubit_bit(index, q, n) != want) return false;
        }
        return true;
    }
};

// Diagonal gate: e^{i phi} on every basis state matching the pattern, 1 elsewhere.
inline ComplexMatrix conditional_phase(const ConditionPattern& c, double phi) {
    const std::size_t d = dim_for(c.n_qubits());
    ComplexMatrix m = ComplexMatrix::identity(d);
    const cd shift = std::polar(1.0, phi);
    for (std::size_t i = 0; i < d; ++i)
        if (c.matches(i)) m(i, i) = shift;
    return m;
}

inline ComplexMatrix hadamard_2x2() {
    ComplexMatrix h(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    h(0, 0) = r; h(0, 1) = r; h(1, 0) = r; h(1, 1) = -r;
    return h;
}

// H on the listed qubits (1-based), identity elsewhere.
inline ComplexMatrix hadamard(int n_qubits, const std::vector<int>& qubits) {
    if (qubits.empty()) throw std::invalid_argument("hadamard: empty qubit set");
    std::vector<bool> sel(n_qubits, false);
    for (int q : qubits) {
        if (q < 1 || q > n_qubits) throw std::invalid_argument("hadamard: qubit out of range");
        if (sel[q - 1]) throw std::invalid_argument("hadamard: duplicate qubit");
        sel[q - 1] = true;
    }
    ComplexMatrix out(1, 1);
    out(0, 0) = 1.0;
    const ComplexMatrix h = hadamard_2x2();
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    for (int q = 1; q <= n_qubits; ++q) out = kron(out, sel[q - 1] ? h : i2);
    return out;
}

// Lambda = 2A - I with A_ij = 2^-N: reflection of amplitudes about their mean.
inline ComplexMatrix inversion_about_average(int n_qubits) {
    if (n_qubits < 1) throw std::invalid_argument("inversion_about_average: need at least one qubit");
    const std::size_t d = dim_for(n_qubits);
    ComplexMatrix m(d, d);
    const double off = 2.0 / static_cast<double>(d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = (r == c) ? off - 1.0 : off;
    return m;
}

// QFT[x'][x] = exp(2 pi i x x' / q) / sqrt(q), q = 2^n.
inline ComplexMatrix qft_matrix(int n_qubits) {
    if (n_qubits < 1) throw std::invalid_argument("qft_matrix: need at least one qubit");
    const std::size_t q = dim_for(n_qubits);
    ComplexMatrix m(q, q);
    const double norm = 1.0 / std::sqrt(static_cast<double>(q));
    for (std::size_t xp = 0; xp < q; ++xp)
        for (std::size_t x = 0; x < q; ++x) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(x) * static_cast<double>(xp) /
                                 static_cast<double>(q);
            m(xp, x) = std::polar(norm, phase);
        }
    return m;
}

// Permutation exchanging bits i and j of each basis index.
inline ComplexMatrix swap_gate(int i, int j, int n_qubits) {
    if (i == j) throw std::invalid_argument("swap_gate: qubits must differ");
    if (i < 1 || j < 1 || i > n_qubits || j > n_qubits) throw std::invalid_argument("swap_gate: qubit out of range");
    const std::size_t d = dim_for(n_qubits);
    ComplexMatrix m(d, d);
    const std::size_t mi = qubit_mask(i, n_qubits);
    const std::size_t mj = qubit_mask(j, n_qubits);
    for (std::size_t idx = 0; idx < d; ++idx) {
        const int bi = (idx & mi) ? 1 : 0;
        const int bj = (idx & mj) ? 1 : 0;
        std::size_t to = idx & ~(mi | mj);
        if (bj) to |= mi;
        if (bi) to |= mj;
        m(to, idx) = 1.0;
    }
    return m;
}

// R_k = diag(1, e^{2 pi i / 2^k}), the controlled-phase building block of the QFT circuit.
inline ComplexMatrix r_k(int k) {
    if (k < 1) throw std::invalid_argument("r_k: k must be >= 1");
    ComplexMatrix m = ComplexMatrix::identity(2);
    m(1, 1) = std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(std::size_t{1} << k));
    return m;
}

}  // namespace nmrqc
