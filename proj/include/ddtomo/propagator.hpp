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

#pragma once

#include "ddtomo/errors.hpp"
#include "ddtomo/spin_system.hpp"
#include "ddtomo/state.hpp"

namespace ddtomo {

/// Repeated-application representation of U_0 = exp(-i H tau) for one fixed
/// (SpinSystem, tau) pair, built by a one-time spectral decomposition of the
/// dense Hamiltonian. Stores the dense U_0 and half-interval U_0^{1/2}
/// matrices; each application is a single matrix-vector product, exact up to
/// floating round-off. Immutable and shareable across runs.
class Propagator {
  public:
    Propagator(const SpinSystem &sys, double tau, double tol = 1e-10, int max_spins = 14)
        : n_spins_(sys.n_spins()), tau_(tau), tol_(tol) {
        if (tau <= 0.0) {
            throw std::invalid_argument("Propagator requires tau > 0");
        }
        if (n_spins_ > max_spins) {
            throw ResourceLimitError("Propagator: " + std::to_string(n_spins_) +
                                     " spins exceeds cap of " + std::to_string(max_spins));
        }
        MatrixXcd h = matrix_representation(sys, max_spins);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
        if (es.info() != Eigen::Success) {
            throw std::runtime_error("Propagator: eigendecomposition failed");
        }
        h.resize(0, 0);
        const Eigen::VectorXd &evals = es.eigenvalues();
        const MatrixXcd &v = es.eigenvectors();
        VectorXcd phase_full(evals.size());
        VectorXcd phase_half(evals.size());
        for (Eigen::Index i = 0; i < evals.size(); ++i) {
            phase_full[i] = std::exp(-kImag * evals[i] * tau);
            phase_half[i] = std::exp(-kImag * evals[i] * (tau / 2.0));
        }
        u_full_.noalias() = v * phase_full.asDiagonal() * v.adjoint();
        u_half_.noalias() = v * phase_half.asDiagonal() * v.adjoint();
    }

    int n_spins() const { return n_spins_; }
    double tau() const { return tau_; }
    double tol() const { return tol_; }

    /// One full interval tau.
    void apply(QuantumState &psi) const { apply_matrix(u_full_, psi); }

    /// One half interval tau/2 (the U_0^{1/2} at cycle boundaries).
    void apply_half(QuantumState &psi) const { apply_matrix(u_half_, psi); }

    /// Free evolution for `half_steps` multiples of tau/2.
    void apply_half_steps(QuantumState &psi, long half_steps) const {
        if (half_steps < 0) {
            throw std::invalid_argument("negative evolution interval");
        }
        for (long s = 0; s + 1 < half_steps; s += 2) {
            apply(psi);
        }
        if (half_steps % 2 != 0) {
            apply_half(psi);
        }
    }

    const MatrixXcd &unitary() const { return u_full_; }
    const MatrixXcd &half_unitary() const { return u_half_; }

  private:
    void apply_matrix(const MatrixXcd &u, QuantumState &psi) const {
        if (psi.n_spins != n_spins_) {
            throw std::invalid_argument("state dimension does not match propagator");
        }
        VectorXcd tmp;
        tmp.noalias() = u * psi.amplitudes;
        psi.amplitudes.swap(tmp);
    }

    int n_spins_;
    double tau_;
    double tol_;
    MatrixXcd u_full_;
    MatrixXcd u_half_;
};

inline Propagator build_propagator(const SpinSystem &sys, double tau, double tol = 1e-10,
                                   int max_spins = 14) {
    return Propagator(sys, tau, tol, max_spins);
}

}  // namespace ddtomo
