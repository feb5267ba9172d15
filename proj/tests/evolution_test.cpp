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
#include "ddtomo/propagator.hpp"
#include "ddtomo/testing/brute_force.hpp"

using namespace ddtomo;

namespace {

QuantumState random_state(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    QuantumState psi(n);
    for (Eigen::Index k = 0; k < psi.amplitudes.size(); ++k) {
        psi.amplitudes[k] = complex{g(rng), g(rng)};
    }
    psi.amplitudes /= psi.amplitudes.norm();
    return psi;
}

}  // namespace

TEST_CASE("zero Hamiltonian propagator is the identity") {
    SpinSystem sys(3);  // all coefficients zero
    Propagator prop(sys, 0.05);
    QuantumState psi = random_state(3, 1);
    QuantumState out = psi;
    prop.apply(out);
    prop.apply_half(out);
    CHECK((out.amplitudes - psi.amplitudes).norm() < 1e-14);
}

TEST_CASE("single-qubit z field gives pure phases") {
    SpinSystem sys(1);
    const double b = 0.7, tau = 0.3;
    sys.set_field(0, Axis::Z, b);
    Propagator prop(sys, tau);
    QuantumState psi = QuantumState::product({ket_vector(Ket::Plus)});
    prop.apply(psi);
    CHECK(std::abs(psi.amplitudes[0] - std::exp(-kImag * b * tau) / std::sqrt(2.0)) < 1e-13);
    CHECK(std::abs(psi.amplitudes[1] - std::exp(kImag * b * tau) / std::sqrt(2.0)) < 1e-13);
}

TEST_CASE("propagator matches series matrix-exponential oracle") {
    SpinSystem sys = SpinSystem::random_instance(3, 5);
    const double tau = 0.01;
    Propagator prop(sys, tau);
    MatrixXcd u_oracle =
        testing::expm_series(MatrixXcd(-kImag * testing::hamiltonian_by_kron(sys) * tau));
    QuantumState psi = random_state(3, 2);
    QuantumState out = psi;
    prop.apply(out);
    CHECK((out.amplitudes - u_oracle * psi.amplitudes).norm() < 1e-10);
}

TEST_CASE("propagator is unitary and half-steps compose") {
    SpinSystem sys = SpinSystem::random_instance(4, 9);
    Propagator prop(sys, 0.02);
    QuantumState psi = random_state(4, 3);
    QuantumState once = psi;
    prop.apply_half_steps(once, 4);  // 2 tau
    QuantumState twice = psi;
    prop.apply(twice);
    prop.apply(twice);
    CHECK(std::abs(once.norm() - 1.0) < 1e-10);
    CHECK((once.amplitudes - twice.amplitudes).norm() < 1e-9);
    QuantumState halves = psi;
    prop.apply_half(halves);
    prop.apply_half(halves);
    QuantumState full = psi;
    prop.apply(full);
    CHECK((halves.amplitudes - full.amplitudes).norm() < 1e-12);
}

TEST_CASE("propagator enforces the spin cap") {
    SpinSystem sys = SpinSystem::random_instance(4, 1);
    CHECK_THROWS_AS(Propagator(sys, 0.01, 1e-10, 3), ResourceLimitError);
}

TEST_CASE("ideal pulse applied twice is the identity up to phase") {
    QuantumState psi = QuantumState::all_zeros(2);
    apply_pulse(psi, {{0, ideal_pi_pulse(Axis::X)}});
    apply_pulse(psi, {{0, ideal_pi_pulse(Axis::X)}});
    CHECK(std::abs(std::abs(psi.amplitudes[0]) - 1.0) < 1e-14);
}

TEST_CASE("systematic amplitude error leaks population") {
    // SAE with epsilon: |<1| e^{i pi/2 (1+eps) sigma_x} |0>|^2 = cos^2(pi(1+eps)/2).
    const double eps = 0.05;
    QuantumState psi = QuantumState::all_zeros(1);
    PulseErrorModel model{ErrorKind::SAE, eps};
    Rng rng(0);
    PulseRealizationStream stream(model, rng);
    apply_pulse(psi, {{0, stream.next(Axis::X)}});
    double p0 = std::norm(psi.amplitudes[0]);
    double expected = std::pow(std::cos(M_PI / 2.0 * (1.0 + eps)), 2);
    CHECK(p0 == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(6.155e-3).epsilon(1e-3));
}

TEST_CASE("synchronized pulses flip basis states") {
    QuantumState psi = QuantumState::all_zeros(2);
    apply_pulse(psi, {{0, ideal_pi_pulse(Axis::X)}, {1, ideal_pi_pulse(Axis::X)}});
    CHECK(std::abs(std::abs(psi.amplitudes[3]) - 1.0) < 1e-14);
}

TEST_CASE("duplicate pulse targets are rejected") {
    QuantumState psi = QuantumState::all_zeros(2);
    CHECK_THROWS_AS(
        apply_pulse(psi, {{0, ideal_pi_pulse(Axis::X)}, {0, ideal_pi_pulse(Axis::Y)}}),
        std::invalid_argument);
}

TEST_CASE("empty schedule reduces to plain evolution") {
    SpinSystem sys = SpinSystem::random_instance(3, 4);
    const double tau = 0.02;
    Propagator prop(sys, tau);
    PulseSchedule sched;
    sched.tau = tau;
    sched.total_half_steps = 10;  // T = 5 tau
    QuantumState psi = random_state(3, 7);
    Rng rng(0);
    QuantumState out = run_schedule(psi, prop, sched, PulseErrorModel{}, rng);
    MatrixXcd u_oracle = testing::expm_series(
        MatrixXcd(-kImag * testing::hamiltonian_by_kron(sys) * (5.0 * tau)));
    CHECK(testing::pure_state_trace_distance(out.amplitudes, u_oracle * psi.amplitudes) <
          1e-9);
}

TEST_CASE("schedule tau mismatch is rejected") {
    SpinSystem sys = SpinSystem::random_instance(2, 4);
    Propagator prop(sys, 0.02);
    PulseSchedule sched = pair_sequence(0, 1, AxisVariant::XXYY, 1, 0.01);
    QuantumState psi = QuantumState::all_zeros(2);
    Rng rng(0);
    CHECK_THROWS_AS(run_schedule(psi, prop, sched, PulseErrorModel{}, rng),
                    ScheduleMismatchError);
}

TEST_CASE("XY-8 pair run matches the analytic two-spin unitary") {
    // N=2 system with only the diagonal couplings: no environment, no error.
    SpinSystem sys(2);
    const double c1 = 0.3, c2 = -0.2, c3 = 0.1, tau = 0.05;
    sys.set_coupling(0, 1, Axis::X, Axis::X, c1);
    sys.set_coupling(0, 1, Axis::Y, Axis::Y, c2);
    sys.set_coupling(0, 1, Axis::Z, Axis::Z, c3);
    Propagator prop(sys, tau);
    const int n_cycles = 3;
    PulseSchedule sched = pair_sequence(0, 1, AxisVariant::XXYY, n_cycles, tau);
    QuantumState psi0 = QuantumState::product({ket_vector(Ket::Plus), ket_vector(Ket::PlusI)});
    Rng rng(0);
    QuantumState out = run_schedule(psi0, prop, sched, PulseErrorModel{}, rng);
    const double t_total = 8.0 * n_cycles * tau;
    VectorXcd expected = two_spin_unitary(c1, c2, c3, t_total) * psi0.amplitudes;
    CHECK(testing::pure_state_trace_distance(out.amplitudes, expected) < 1e-9);
}

TEST_CASE("run_schedule matches the dense matrix-product oracle with errors") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        SpinSystem sys = SpinSystem::random_instance(3, seed);
        const double tau = 0.03;
        Propagator prop(sys, tau);
        PulseSchedule sched = pair_sequence(0, 2, AxisVariant::XYYZ, 2, tau);
        PulseErrorModel model{ErrorKind::RRE, 0.05};
        Rng rng_sim(seed);
        Rng rng_oracle(seed);
        QuantumState psi = random_state(3, seed + 100);
        QuantumState out = run_schedule(psi, prop, sched, model, rng_sim);
        auto realized = realize_pulses(sched, model, rng_oracle);
        MatrixXcd u = testing::dense_schedule_unitary(sys, sched, realized);
        CHECK(testing::pure_state_trace_distance(out.amplitudes, u * psi.amplitudes) < 1e-9);
    }
}

TEST_CASE("observer fires at cycle boundaries with consistent states") {
    SpinSystem sys = SpinSystem::random_instance(3, 21);
    const double tau = 0.02;
    Propagator prop(sys, tau);
    QuantumState psi0 = random_state(3, 5);
    Rng rng(1);
    std::vector<VectorXcd> snapshots;
    PulseSchedule sched3 = pair_sequence(0, 1, AxisVariant::XXYY, 3, tau);
    run_schedule(psi0, prop, sched3, PulseErrorModel{}, rng,
                 [&](int, const QuantumState &s) { snapshots.push_back(s.amplitudes); });
    REQUIRE(snapshots.size() == 3);
    // Snapshot k must equal the final state of a k-cycle schedule.
    for (int k = 1; k <= 3; ++k) {
        PulseSchedule schedk = pair_sequence(0, 1, AxisVariant::XXYY, k, tau);
        Rng rngk(1);
        QuantumState fin = run_schedule(psi0, prop, schedk, PulseErrorModel{}, rngk);
        CHECK((fin.amplitudes - snapshots[k - 1]).norm() < 1e-11);
    }
}

TEST_CASE("reduced density of a product state") {
    QuantumState psi = QuantumState::product({ket_vector(Ket::Zero), ket_vector(Ket::Plus)});
    MatrixXcd rho = reduced_density(psi, {1});
    CHECK(std::abs(rho(0, 0).real() - 0.5) < 1e-12);
    CHECK(std::abs(rho(0, 1).real() - 0.5) < 1e-12);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("reduced density of a Bell state is maximally mixed") {
    QuantumState psi(2);
    psi.amplitudes[0] = 1.0 / std::sqrt(2.0);
    psi.amplitudes[3] = 1.0 / std::sqrt(2.0);
    MatrixXcd rho = reduced_density(psi, {0});
    CHECK(std::abs(rho(0, 0).real() - 0.5) < 1e-12);
    CHECK(std::abs(rho(0, 1)) < 1e-12);
    CHECK(purity(rho) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("reduced density matches the double-sum oracle") {
    QuantumState psi = random_state(4, 17);
    for (auto keep : std::vector<std::vector<int>>{{0, 3}, {2, 1}, {1}}) {
        MatrixXcd rho = reduced_density(psi, keep);
        MatrixXcd oracle = testing::reduced_density_by_sum(psi, keep);
        CHECK((rho - oracle).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
}
