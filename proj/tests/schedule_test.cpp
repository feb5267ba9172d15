// Copyright 2026 The ddtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "ddtomo/analytic.hpp"
#include "ddtomo/evolve.hpp"
#include "ddtomo/schedule.hpp"
#include "ddtomo/testing/brute_force.hpp"

using namespace ddtomo;

TEST_CASE("XY-8 pair schedule layout") {
    const double tau = 0.01;
    PulseSchedule sched = pair_sequence(3, 5, AxisVariant::XXYY, 1, tau);
    REQUIRE(sched.events.size() == 8);
    for (int k = 0; k < 8; ++k) {
        CHECK(sched.events[k].half_step == 2 * k + 1);
        REQUIRE(sched.events[k].targets.size() == 2);
        CHECK(sched.events[k].targets[0].first == 3);
        CHECK(sched.events[k].targets[1].first == 5);
        CHECK(sched.events[k].targets[0].second == sched.events[k].targets[1].second);
    }
    CHECK(sched.total_time() == doctest::Approx(8.0 * tau));
    CHECK(sched.pulse_count() == 16);
    // Alternating XX / YY, then mirrored.
    std::vector<Axis> axes;
    for (const auto &e : sched.events) {
        axes.push_back(e.targets[0].second);
    }
    CHECK(axes == std::vector<Axis>{Axis::X, Axis::Y, Axis::X, Axis::Y, Axis::Y, Axis::X,
                                    Axis::Y, Axis::X});
}

TEST_CASE("XY-8 axes are palindromic about the cycle midpoint") {
    for (AxisVariant v : {AxisVariant::XXYY, AxisVariant::XYYZ, AxisVariant::YXZY}) {
        PulseSchedule sched = pair_sequence(0, 1, v, 1, 0.01);
        const std::size_t n = sched.events.size();
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(sched.events[k].targets[0].second ==
                  sched.events[n - 1 - k].targets[0].second);
            CHECK(sched.events[k].targets[1].second ==
                  sched.events[n - 1 - k].targets[1].second);
        }
    }
}

TEST_CASE("event offsets are strictly increasing and within total time") {
    for (int n_cycles : {1, 3}) {
        PulseSchedule sched = pair_sequence(0, 1, AxisVariant::XYYZ, n_cycles, 0.02);
        CHECK(static_cast<int>(sched.events.size()) == 8 * n_cycles);
        long prev = -1;
        for (const auto &e : sched.events) {
            CHECK(e.half_step > prev);
            CHECK(e.half_step <= sched.total_half_steps);
            prev = e.half_step;
        }
    }
}

TEST_CASE("pair_sequence rejects identical qubits") {
    CHECK_THROWS_AS(pair_sequence(2, 2, AxisVariant::XXYY, 1, 0.01), std::invalid_argument);
}

TEST_CASE("XY-4 cycle sits at odd half-steps within 4 tau") {
    PulseSchedule sched = pair_sequence(0, 1, AxisVariant::XXYY, 1, 0.01, CycleForm::XY4);
    REQUIRE(sched.events.size() == 4);
    CHECK(sched.total_half_steps == 8);
    for (int k = 0; k < 4; ++k) {
        CHECK(sched.events[k].half_step == 2 * k + 1);
    }
}

TEST_CASE("environment sequence never pulses the target spin") {
    PulseSchedule sched = environment_sequence(6, 12, 2, 0.01);
    CHECK(sched.events.size() == 16);
    for (const auto &e : sched.events) {
        CHECK(e.targets.size() == 11);
        for (const auto &[q, axis] : e.targets) {
            CHECK(q != 6);
            (void)axis;
        }
    }
}

TEST_CASE("global cancel sequence pulses everything plus a cancel on the target") {
    PulseSchedule sched = global_cancel_sequence(1, 4, 1, 0.01);
    REQUIRE(sched.events.size() == 16);  // 8 instants, 2 events each
    for (std::size_t k = 0; k + 1 < sched.events.size(); k += 2) {
        const auto &global = sched.events[k];
        const auto &cancel = sched.events[k + 1];
        CHECK(global.half_step == cancel.half_step);
        CHECK(global.targets.size() == 4);
        REQUIRE(cancel.targets.size() == 1);
        CHECK(cancel.targets[0].first == 1);
        CHECK(cancel.targets[0].second == global.targets[0].second);
    }
}

TEST_CASE("NPE realization is the ideal pi pulse") {
    PulseSchedule sched = pair_sequence(0, 1, AxisVariant::XXYY, 1, 0.01);
    Rng rng(5);
    auto realized = realize_pulses(sched, PulseErrorModel{ErrorKind::NPE, 0.3}, rng);
    REQUIRE(realized.size() == 16);
    std::size_t k = 0;
    for (const auto &e : sched.events) {
        for (const auto &[q, axis] : e.targets) {
            (void)q;
            CHECK((realized[k++] - ideal_pi_pulse(axis)).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("SAE realization matches the closed form") {
    PulseErrorModel model{ErrorKind::SAE, 0.05};
    Rng rng(0);
    PulseRealizationStream stream(model, rng);
    Matrix2cd u = stream.next(Axis::X);
    Matrix2cd expected = std::cos(M_PI / 2.0 * 1.05) * Matrix2cd::Identity() +
                         kImag * std::sin(M_PI / 2.0 * 1.05) * pauli(Axis::X);
    CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("RAE draws stay within the magnitude window and are seed-deterministic") {
    PulseSchedule sched = environment_sequence(0, 3, 4, 0.01);
    PulseErrorModel model{ErrorKind::RAE, 0.01};
    Rng rng_a(77), rng_b(77);
    auto a = realize_pulses(sched, model, rng_a);
    auto b = realize_pulses(sched, model, rng_b);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK((a[k] - b[k]).cwiseAbs().maxCoeff() == 0.0);
        // Recover the over-rotation from the trace: tr U = 2 cos(pi/2 (1+delta)).
        double c = a[k].trace().real() / 2.0;
        double delta = std::acos(std::clamp(c, -1.0, 1.0)) / (M_PI / 2.0) - 1.0;
        CHECK(std::abs(delta) <= 0.01 + 1e-12);
    }
}

TEST_CASE("RRE realization is unitary with the advertised tilt magnitude") {
    PulseErrorModel model{ErrorKind::RRE, 0.01};
    Rng rng(3);
    PulseRealizationStream stream(model, rng);
    for (int k = 0; k < 20; ++k) {
        Axis axis = k % 2 == 0 ? Axis::X : Axis::Y;
        Matrix2cd u = stream.next(axis);
        CHECK((u * u.adjoint() - Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
        // The rotation angle is pi/2 |nu_hat + tilt| with |tilt| = mag, so
        // cos(angle) = tr(U)/2 pins |v| in [1-mag, 1+mag].
        double angle = std::acos(std::clamp(u.trace().real() / 2.0, -1.0, 1.0));
        double v_norm = angle / (M_PI / 2.0);
        CHECK(v_norm >= 1.0 - 0.01 - 1e-9);
        CHECK(v_norm <= 1.0 + 0.01 + 1e-9);
    }
}

namespace {

// A two-qubit Pauli term survives the variant iff it commutes with both of the
// variant's pulse operators.
bool paulis_commute(Axis a, Axis b) { return a == b; }

bool term_survives(AxisVariant v, Axis a, Axis b) {
    auto axes = [&]() -> std::array<std::pair<Axis, Axis>, 2> {
        switch (v) {
            case AxisVariant::XXYY:
                return {{{Axis::X, Axis::X}, {Axis::Y, Axis::Y}}};
            case AxisVariant::XYYZ:
                return {{{Axis::X, Axis::Y}, {Axis::Y, Axis::Z}}};
            case AxisVariant::YXZY:
                return {{{Axis::Y, Axis::X}, {Axis::Z, Axis::Y}}};
        }
        throw std::invalid_argument("bad variant");
    }();
    for (const auto &[pi, pj] : axes) {
        bool ci = paulis_commute(a, pi);
        bool cj = paulis_commute(b, pj);
        // sigma^a sigma^b commutes with P_i P_j iff the two single-qubit
        // factors commute or anticommute together.
        if (ci != cj) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("variant survival table: all 27 term-variant combinations") {
    const double tau = 0.01, j_val = 0.4;
    const int n_cycles = 1;
    for (AxisVariant v : {AxisVariant::XXYY, AxisVariant::XYYZ, AxisVariant::YXZY}) {
        for (Axis a : kAxes) {
            for (Axis b : kAxes) {
                SpinSystem sys(2);
                sys.set_coupling(0, 1, a, b, j_val);
                Propagator prop(sys, tau);
                PulseSchedule sched = pair_sequence(0, 1, v, n_cycles, tau);
                QuantumState psi0 = QuantumState::product(
                    {ket_vector(Ket::Plus), ket_vector(Ket::PlusI)});
                Rng rng(0);
                QuantumState out = run_schedule(psi0, prop, sched, PulseErrorModel{}, rng);
                const double t_total = 8.0 * n_cycles * tau;
                const double bound = 10.0 * std::pow(j_val * tau, 3) * n_cycles;
                if (term_survives(v, a, b)) {
                    MatrixXcd h_term = j_val * testing::kron(pauli(a), pauli(b));
                    VectorXcd expected =
                        testing::expm_series(MatrixXcd(-kImag * h_term * t_total)) *
                        psi0.amplitudes;
                    CHECK(testing::pure_state_trace_distance(out.amplitudes, expected) <
                          1e-9);
                } else {
                    CHECK(testing::pure_state_trace_distance(out.amplitudes,
                                                             psi0.amplitudes) < bound);
                }
            }
        }
    }
}

TEST_CASE("environment sequence reproduces single-spin dynamics") {
    // N=2: local field on spin 0 plus a zz coupling to the pulsed spin.
    SpinSystem sys(2);
    sys.set_field(0, Axis::X, 0.4);
    sys.set_field(0, Axis::Y, -0.3);
    sys.set_field(0, Axis::Z, 0.6);
    sys.set_coupling(0, 1, Axis::Z, Axis::Z, 0.8);
    const double tau = 0.01;
    const int n_cycles = 4;
    Propagator prop(sys, tau);
    PulseSchedule sched = environment_sequence(0, 2, n_cycles, tau);
    QuantumState psi0 = QuantumState::product({ket_vector(Ket::Plus), ket_vector(Ket::Zero)});
    Rng rng(0);
    QuantumState out = run_schedule(psi0, prop, sched, PulseErrorModel{}, rng);
    const double t_total = 8.0 * n_cycles * tau;
    Matrix2cd u1 = one_spin_unitary(0.4, -0.3, 0.6, t_total);
    Vector2cd expected = u1 * ket_vector(Ket::Plus);
    MatrixXcd rho = reduced_density(out, {0});
    CHECK(trace_distance(rho, pure_density(expected)) < 100.0 * std::pow(tau, 3) * n_cycles);
}

TEST_CASE("global cancel equals environment scheme under NPE") {
    SpinSystem sys = SpinSystem::random_instance(3, 31);
    const double tau = 0.01;
    Propagator prop(sys, tau);
    QuantumState psi0 = QuantumState::product(
        {ket_vector(Ket::Plus), ket_vector(Ket::Zero), ket_vector(Ket::Zero)});
    Rng rng_a(0), rng_b(0);
    QuantumState env = run_schedule(psi0, prop, environment_sequence(0, 3, 2, tau),
                                    PulseErrorModel{}, rng_a);
    QuantumState glob = run_schedule(psi0, prop, global_cancel_sequence(0, 3, 2, tau),
                                     PulseErrorModel{}, rng_b);
    CHECK(testing::pure_state_trace_distance(env.amplitudes, glob.amplitudes) < 1e-12);
}

TEST_CASE("global cancel doubles systematic pulse error on the target") {
    // Zero Hamiltonian: the only action on the target is the residual
    // e^{i pi eps sigma} per global+cancel pair (up to phase).
    SpinSystem sys(2);
    const double tau = 0.01, eps = 0.02;
    Propagator prop(sys, tau);
    PulseSchedule sched = global_cancel_sequence(0, 2, 1, tau);
    QuantumState psi0 = QuantumState::all_zeros(2);
    Rng rng(0);
    QuantumState out =
        run_schedule(psi0, prop, sched, PulseErrorModel{ErrorKind::SAE, eps}, rng);
    Matrix2cd residual = Matrix2cd::Identity();
    for (Axis axis : {Axis::X, Axis::Y, Axis::X, Axis::Y, Axis::Y, Axis::X, Axis::Y, Axis::X}) {
        Matrix2cd u = rotation_exponential(M_PI / 2.0 * (1.0 + eps), axis == Axis::X,
                                           axis == Axis::Y, axis == Axis::Z);
        residual = u * u * residual;
    }
    Vector2cd expected = residual * Vector2cd(1, 0);
    MatrixXcd rho = reduced_density(out, {0});
    CHECK(trace_distance(rho, pure_density(expected)) < 1e-10);
    // The residual truly rotates: population must have leaked out of |0>.
    CHECK(std::norm(expected(1)) > 1e-4);
}

TEST_CASE("schedule json dump is well formed") {
    PulseSchedule sched = pair_sequence(0, 1, AxisVariant::XXYY, 1, 0.01);
    nlohmann::json j = schedule_to_json(sched);
    REQUIRE(j.size() == 8);
    CHECK(j[0]["t"] == doctest::Approx(0.005));
    CHECK(j[0]["targets"].size() == 2);
    CHECK(j[0]["targets"][0]["axis"] == "x");
}
