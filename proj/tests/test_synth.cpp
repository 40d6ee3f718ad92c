#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nmrqc/gates.hpp"
#include "nmrqc/pulse.hpp"
#include "nmrqc/qstate.hpp"
#include "nmrqc/synth.hpp"
#include "support/test_helpers.hpp"

using namespace nmrqc;

namespace {

constexpr double kPi = std::numbers::pi;

// All condition patterns over {0,1,e} of length n.
std::vector<std::string> all_patterns(int n) {
    std::vector<std::string> out{""};
    for (int i = 0; i < n; ++i) {
        std::vector<std::string> next;
        for (const auto& p : out)
            for (char c : {'0', '1', 'e'}) next.push_back(p + c);
        out = std::move(next);
    }
    return out;
}

}  // namespace

TEST_CASE("synth_phase_gate emits the documented structure for 111") {
    const double phi = 0.9;
    const SynthesisResult res = synth_phase_gate(ConditionPattern::parse("111"), phi);
    REQUIRE(res.expanded);
    REQUIRE(res.z_pulse_count == 7);
    REQUIRE(res.sequence.size() == 7);
    REQUIRE(res.expected_phase == Catch::Approx(-phi / 8).margin(1e-15));

    // four quarter-angle pulses on qubit 1, spectators enumerated
    for (int k = 0; k < 4; ++k) {
        const PulseSpec& p = res.sequence[k];
        REQUIRE(p.active == 1);
        REQUIRE(p.axis == Axis::Z);
        REQUIRE(p.angle == Catch::Approx(phi / 4));
        REQUIRE(p.transition_selective());
    }
    REQUIRE(pattern_string(res.sequence[0]) == "*00");
    REQUIRE(pattern_string(res.sequence[1]) == "*01");
    REQUIRE(pattern_string(res.sequence[2]) == "*10");
    REQUIRE(pattern_string(res.sequence[3]) == "*11");
    // two half-angle pulses on qubit 2 with qubit 1 fixed at 1
    REQUIRE(pattern_string(res.sequence[4]) == "1*0");
    REQUIRE(pattern_string(res.sequence[5]) == "1*1");
    REQUIRE(res.sequence[4].angle == Catch::Approx(phi / 2));
    // one full-angle pulse on qubit 3 with both earlier qubits fixed
    REQUIRE(pattern_string(res.sequence[6]) == "11*");
    REQUIRE(res.sequence[6].angle == Catch::Approx(phi));
    REQUIRE(res.sequence[6].axis == Axis::Z);
}

TEST_CASE("synth_phase_gate sign rule: 0 bits rotate about -z") {
    const SynthesisResult res = synth_phase_gate(ConditionPattern::parse("10"), 1.0, {}, false);
    REQUIRE(res.sequence.size() == 2);
    REQUIRE(res.sequence[0].axis == Axis::Z);       // bit 1
    REQUIRE(res.sequence[1].axis == Axis::MinusZ);  // bit 0
    REQUIRE(res.sequence[1].angle == 1.0);          // -z with positive angle
}

TEST_CASE("synth_phase_gate reduced gate 11e") {
    const double phi = 1.21;
    const SynthesisResult res = synth_phase_gate(ConditionPattern::parse("11e"), phi);
    REQUIRE(res.z_pulse_count == 6);
    for (int k = 0; k < 4; ++k) {
        REQUIRE(res.sequence[k].active == 1);
        REQUIRE(res.sequence[k].angle == Catch::Approx(phi / 2));
    }
    for (int k = 4; k < 6; ++k) {
        REQUIRE(res.sequence[k].active == 2);
        REQUIRE(res.sequence[k].angle == Catch::Approx(phi));
    }
    REQUIRE(res.expected_phase == Catch::Approx(-phi / 4).margin(1e-15));
    const VerifyReport rep = verify_sequence(res.sequence, conditional_phase(ConditionPattern::parse("11e"), phi),
                                             res.expected_phase);
    REQUIRE(rep.pass);
}

TEST_CASE("synth_phase_gate single qubit") {
    const double phi = 2.2;
    const SynthesisResult res = synth_phase_gate(ConditionPattern::parse("1"), phi);
    REQUIRE(res.sequence.size() == 1);
    REQUIRE(res.sequence[0].axis == Axis::Z);
    REQUIRE(res.sequence[0].angle == Catch::Approx(phi));
    const VerifyReport rep =
        verify_sequence(res.sequence, conditional_phase(ConditionPattern::parse("1"), phi), -phi / 2);
    REQUIRE(rep.pass);
}

TEST_CASE("synth_phase_gate rejects patterns with no conditioned qubit") {
    REQUIRE_THROWS_AS(synth_phase_gate(ConditionPattern::parse("eee"), 1.0), std::invalid_argument);
}

TEST_CASE("alternate conditioned-qubit orders give the same unitary and count") {
    const double phi = 1.234;
    const ConditionPattern c = ConditionPattern::parse("111");
    const ComplexMatrix target = conditional_phase(c, phi);
    const std::vector<std::vector<int>> orders = {{1, 2, 3}, {2, 1, 3}, {3, 2, 1}, {3, 1, 2}, {1, 3, 2}, {2, 3, 1}};
    ComplexMatrix first;
    for (const auto& order : orders) {
        const SynthesisResult res = synth_phase_gate(c, phi, order);
        REQUIRE(res.sequence.size() == 7);
        const VerifyReport rep = verify_sequence(res.sequence, target, -phi / 8);
        REQUIRE(rep.pass);
        const ComplexMatrix u = sequence_unitary(res.sequence);
        if (first.rows() == 0)
            first = u;
        else
            REQUIRE(max_abs_diff(u, first) <= 1e-12);
    }
    REQUIRE_THROWS_AS(synth_phase_gate(c, phi, {1, 2}), std::invalid_argument);
    REQUIRE_THROWS_AS(synth_phase_gate(c, phi, {1, 2, 4}), std::invalid_argument);
}

TEST_CASE("expanded and merged forms produce identical unitaries") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> ang(-6.0, 6.0);
    std::uniform_int_distribution<int> nq(1, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = nq(rng);
        std::string pat;
        int m = 0;
        for (int q = 0; q < n; ++q) {
            const char c = "01e"[std::uniform_int_distribution<int>(0, 2)(rng)];
            if (c != 'e') ++m;
            pat += c;
        }
        if (m == 0) continue;
        const double phi = ang(rng);
        const ConditionPattern c = ConditionPattern::parse(pat);
        const ComplexMatrix expanded = sequence_unitary(synth_phase_gate(c, phi, {}, true).sequence);
        const ComplexMatrix merged = sequence_unitary(synth_phase_gate(c, phi, {}, false).sequence);
        REQUIRE(max_abs_diff(expanded, merged) <= 1e-12);
    }
}

TEST_CASE("200 random draws verify with residual phase -phi/2^m and order-independent counts") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> ang(-2.0 * kPi, 2.0 * kPi);
    std::uniform_int_distribution<int> nq(1, 4);
    int done = 0;
    while (done < 200) {
        const int n = nq(rng);
        std::string pat;
        for (int q = 0; q < n; ++q) pat += "01e"[std::uniform_int_distribution<int>(0, 2)(rng)];
        const ConditionPattern c = ConditionPattern::parse(pat);
        const int m = c.conditioned_count();
        if (m == 0) continue;
        const double phi = ang(rng);
        auto order = c.conditioned_qubits();
        std::shuffle(order.begin(), order.end(), rng);
        const SynthesisResult res = synth_phase_gate(c, phi, order);
        REQUIRE(res.z_pulse_count == static_cast<int>(dim_for(n) - dim_for(n - m)));
        const VerifyReport rep = verify_sequence(res.sequence, conditional_phase(c, phi), res.expected_phase);
        REQUIRE(rep.pass);
        ++done;
    }
}

TEST_CASE("z-pulse count formula is exact for every pattern up to N = 5") {
    for (int n = 1; n <= 5; ++n) {
        for (const auto& pat : all_patterns(n)) {
            const ConditionPattern c = ConditionPattern::parse(pat);
            const int m = c.conditioned_count();
            if (m == 0) continue;
            const SynthesisResult res = synth_phase_gate(c, 0.37);
            REQUIRE(res.z_pulse_count == static_cast<int>(dim_for(n) - dim_for(n - m)));
        }
    }
}

TEST_CASE("expand_composite") {
    SECTION("7-pulse program becomes 21 x/y pulses with the same product") {
        const double phi = 0.61;
        const SynthesisResult res = synth_phase_gate(ConditionPattern::parse("111"), phi);
        const PulseSequence composite = expand_composite(res.sequence);
        REQUIRE(composite.size() == 21);
        for (const auto& p : composite) REQUIRE_FALSE(is_z_axis(p.axis));
        const VerifyReport rep = verify_sequence(composite, conditional_phase(ConditionPattern::parse("111"), phi),
                                                 -phi / 8);
        REQUIRE(rep.pass);
    }

    SECTION("empty stays empty; non-z pulses pass through") {
        REQUIRE(expand_composite(PulseSequence{}).empty());
        PulseSequence seq;
        seq.append(make_pulse(Axis::X, 1.0, 1, "*0"));
        seq.append(make_pulse(Axis::Z, 0.3, 2, "1*"));
        const PulseSequence out = expand_composite(seq);
        REQUIRE(out.size() == 4);
        REQUIRE(out[0].axis == Axis::X);
        REQUIRE(max_abs_diff(sequence_unitary(out), sequence_unitary(seq)) <= 1e-12);
    }
}

TEST_CASE("synth_swap") {
    const PulseSequence casc = synth_swap(1, 3, 3);

    SECTION("emits the documented six-pulse cascade in order") {
        REQUIRE(casc.size() == 6);
        const std::string want[6] = {"00*", "*00", "00*", "11*", "*11", "11*"};
        const int active[6] = {3, 1, 3, 3, 1, 3};
        for (int k = 0; k < 6; ++k) {
            REQUIRE(casc[k].axis == Axis::X);
            REQUIRE(casc[k].angle == Catch::Approx(kPi));
            REQUIRE(casc[k].active == active[k]);
            REQUIRE(pattern_string(casc[k]) == want[k]);
        }
    }

    SECTION("maps |001> to -|100> and fixes |010> up to phase") {
        const ComplexMatrix u = sequence_unitary(casc);
        const StateVector a = apply(u, StateVector::basis(3, 1));
        REQUIRE(std::abs(a.amps[4] - cd(-1.0, 0.0)) <= 1e-12);
        const StateVector b = apply(u, StateVector::basis(3, 2));
        REQUIRE(std::abs(std::abs(b.amps[2]) - 1.0) <= 1e-12);
    }

    SECTION("the two triples commute") {
        PulseSequence first, second;
        for (int k = 0; k < 3; ++k) first.append(casc[k]);
        for (int k = 3; k < 6; ++k) second.append(casc[k]);
        const ComplexMatrix u1 = sequence_unitary(first);
        const ComplexMatrix u2 = sequence_unitary(second);
        REQUIRE(max_abs_diff(u1 * u2, u2 * u1) <= 1e-12);
    }

    SECTION("equals SWAP up to the measured diagonal phases") {
        const VerifyReport rep = verify_sequence_diagonal(casc, swap_gate(1, 3, 3));
        REQUIRE(rep.pass);
        REQUIRE(rep.diagonal_phases.size() == 8);
        const double want[8] = {kPi, kPi, 0.0, kPi, kPi, 0.0, kPi, kPi};  // D = diag(-1,-1,1,-1,-1,1,-1,-1)
        for (int k = 0; k < 8; ++k)
            REQUIRE(std::abs(wrap_angle(rep.diagonal_phases[k] - want[k])) <= 1e-12);
    }

    SECTION("populations preserved for any diagonal input") {
        std::mt19937 rng(55);
        std::uniform_real_distribution<double> w(0.0, 1.0);
        std::vector<double> diag(8);
        double sum = 0.0;
        for (auto& d : diag) {
            d = w(rng);
            sum += d;
        }
        for (auto& d : diag) d /= sum;
        const DensityMatrix rho = DensityMatrix::from_diagonal(3, diag, false);
        const auto via_pulses = populations(conjugate(sequence_unitary(casc), rho));
        const auto via_gate = populations(conjugate(swap_gate(1, 3, 3), rho));
        for (int k = 0; k < 8; ++k) REQUIRE(via_pulses[k] == Catch::Approx(via_gate[k]).margin(1e-12));
    }

    SECTION("generalizes to other qubit pairs, up to diagonal phases") {
        for (auto [i, j, n] : {std::tuple{1, 2, 2}, std::tuple{2, 3, 3}, std::tuple{1, 4, 4}}) {
            const VerifyReport rep = verify_sequence_diagonal(synth_swap(i, j, n), swap_gate(i, j, n));
            REQUIRE(rep.pass);
        }
    }

    SECTION("invalid qubit pairs rejected") {
        REQUIRE_THROWS_AS(synth_swap(1, 1, 3), std::invalid_argument);
        REQUIRE_THROWS_AS(synth_swap(0, 2, 3), std::invalid_argument);
        REQUIRE_THROWS_AS(synth_swap(1, 4, 3), std::invalid_argument);
    }
}

TEST_CASE("synth_hadamard") {
    SECTION("one qubit gives -iH") {
        const ComplexMatrix u = sequence_unitary(synth_hadamard({1}, 1));
        const ComplexMatrix want = hadamard(1, {1}) * cd(0.0, -1.0);
        REQUIRE(max_abs_diff(u, want) <= 1e-12);
    }

    SECTION("three qubits on |000> give the uniform state with phase (-i)^3") {
        const ComplexMatrix u = sequence_unitary(synth_hadamard({1, 2, 3}, 3));
        const StateVector s = apply(u, StateVector::basis(3, 0));
        const cd want = cd(0.0, 1.0) / (2.0 * std::sqrt(2.0));  // (-i)^3 = i
        for (const auto& a : s.amps) REQUIRE(std::abs(a - want) <= 1e-12);
        const auto [eq, phase] = equal_up_to_global_phase(u, hadamard(3, {1, 2, 3}));
        REQUIRE(eq);
    }

    SECTION("applying the pair twice gives (-1)^k identity") {
        PulseSequence twice = synth_hadamard({1, 2}, 2);
        twice.extend(synth_hadamard({1, 2}, 2));
        const ComplexMatrix u = sequence_unitary(twice);
        REQUIRE(max_abs_diff(u, ComplexMatrix::identity(4) * cd(-1.0, 0.0)) <= 1e-12);
    }

    SECTION("empty subset rejected") {
        REQUIRE_THROWS_AS(synth_hadamard({}, 2), std::invalid_argument);
    }
}

TEST_CASE("verify_sequence") {
    const double phi = 1.5;
    const ConditionPattern c111 = ConditionPattern::parse("111");
    const SynthesisResult res = synth_phase_gate(c111, phi);

    SECTION("correct program passes with the expected phase") {
        const VerifyReport rep = verify_sequence(res.sequence, conditional_phase(c111, phi), -phi / 8, 1e-12,
                                                 "Cphase(111,phi)");
        REQUIRE(rep.pass);
        REQUIRE(rep.max_err <= 1e-12);
        REQUIRE(rep.phase == Catch::Approx(-phi / 8).margin(1e-9));
        REQUIRE(rep.target_name == "Cphase(111,phi)");
    }

    SECTION("two-qubit program verifies against its gate with phase -phi/4") {
        const SynthesisResult r2 = synth_phase_gate(ConditionPattern::parse("11"), phi);
        const VerifyReport rep =
            verify_sequence(r2.sequence, conditional_phase(ConditionPattern::parse("11"), phi), -phi / 4);
        REQUIRE(rep.pass);
    }

    SECTION("a corrupted program fails") {
        PulseSequence bad = res.sequence;
        bad.pulses[3].angle = -bad.pulses[3].angle;
        const VerifyReport rep = verify_sequence(bad, conditional_phase(c111, phi), -phi / 8);
        REQUIRE_FALSE(rep.pass);
        REQUIRE(rep.max_err > 1e-6);
    }

    SECTION("wrong expected phase fails even when the unitary matches") {
        const VerifyReport rep = verify_sequence(res.sequence, conditional_phase(c111, phi), +phi / 8);
        if (std::abs(wrap_angle(-phi / 8 - phi / 8)) > 1e-9) REQUIRE_FALSE(rep.pass);
    }

    SECTION("dimension mismatch throws") {
        REQUIRE_THROWS_AS(verify_sequence(res.sequence, ComplexMatrix::identity(4)), std::invalid_argument);
    }
}

TEST_CASE("every synthesized program keeps all z-pulses mutually commuting") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> ang(-6.0, 6.0);
    const char* pats[] = {"11", "10e", "111", "e11", "0e01"};
    for (const char* pat : pats) {
        const SynthesisResult res = synth_phase_gate(ConditionPattern::parse(pat), ang(rng));
        const int n = res.sequence.n_qubits();
        for (std::size_t a = 0; a < res.sequence.size(); ++a)
            for (std::size_t b = a + 1; b < res.sequence.size(); ++b) {
                const ComplexMatrix ua = pulse_unitary(res.sequence[a], n);
                const ComplexMatrix ub = pulse_unitary(res.sequence[b], n);
                REQUIRE(max_abs_diff(ua * ub, ub * ua) <= 1e-12);
            }
    }
}
