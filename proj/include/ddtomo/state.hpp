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

#include <vector>

#include "ddtomo/errors.hpp"
#include "ddtomo/pauli.hpp"

namespace ddtomo {

/// Normalized amplitude vector over 2^N basis states, qubit 0 = most
/// significant bit.
struct QuantumState {
    int n_spins = 0;
    VectorXcd amplitudes;

    QuantumState() = default;

    explicit QuantumState(int n)
        : n_spins(n), amplitudes(VectorXcd::Zero(std::size_t{1} << n)) {}

    static QuantumState basis_state(int n, std::size_t index) {
        QuantumState psi(n);
        psi.amplitudes[index] = 1.0;
        return psi;
    }

    /// Product state from one single-qubit vector per spin (qubit 0 first).
    static QuantumState product(const std::vector<Vector2cd> &factors) {
        const int n = static_cast<int>(factors.size());
        QuantumState psi(n);
        const std::size_t dim = std::size_t{1} << n;
        for (std::size_t idx = 0; idx < dim; ++idx) {
            complex amp = 1.0;
            for (int q = 0; q < n; ++q) {
                int bit = (idx >> (n - 1 - q)) & 1;
                amp *= factors[q](bit);
            }
            psi.amplitudes[idx] = amp;
        }
        return psi;
    }

    static QuantumState all_zeros(int n) { return basis_state(n, 0); }

    double norm() const { return amplitudes.norm(); }

    int bit_of(std::size_t index, int qubit) const {
        return (index >> (n_spins - 1 - qubit)) & 1;
    }
};

/// In-place application of a 2x2 unitary on one qubit.
inline void apply_single_qubit(QuantumState &psi, int qubit, const Matrix2cd &u) {
    if (qubit < 0 || qubit >= psi.n_spins) {
        throw std::invalid_argument("qubit index out of range");
    }
    const std::size_t dim = std::size_t{1} << psi.n_spins;
    const std::size_t stride = std::size_t{1} << (psi.n_spins - 1 - qubit);
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t low = 0; low < stride; ++low) {
            const std::size_t i0 = base + low;
            const std::size_t i1 = i0 + stride;
            const complex a0 = psi.amplitudes[i0];
            const complex a1 = psi.amplitudes[i1];
            psi.amplitudes[i0] = u(0, 0) * a0 + u(0, 1) * a1;
            psi.amplitudes[i1] = u(1, 0) * a0 + u(1, 1) * a1;
        }
    }
}

/// Simultaneous pulses on distinct qubits; `unitaries` supplies the realized
/// 2x2 unitary per target, in target order.
inline void apply_pulse(QuantumState &psi, const std::vector<std::pair<int, Matrix2cd>> &targets) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            if (targets[i].first == targets[j].first) {
                throw std::invalid_argument("duplicate pulse target qubit " +
                                            std::to_string(targets[i].first));
            }
        }
    }
    for (const auto &[q, u] : targets) {
        apply_single_qubit(psi, q, u);
    }
}

/// Partial trace over all qubits not in `keep`. Row/column bits of the result
/// follow the order of `keep` (first listed = most significant).
inline MatrixXcd reduced_density(const QuantumState &psi, const std::vector<int> &keep) {
    const int n = psi.n_spins;
    const int k = static_cast<int>(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= n) {
            throw std::invalid_argument("reduced_density: qubit index out of range");
        }
        for (std::size_t j = i + 1; j < keep.size(); ++j) {
            if (keep[i] == keep[j]) {
                throw std::invalid_argument("reduced_density: duplicate qubit");
            }
        }
    }
    std::vector<int> env;
    std::vector<char> kept(n, 0);
    for (int q : keep) {
        kept[q] = 1;
    }
    for (int q = 0; q < n; ++q) {
        if (!kept[q]) {
            env.push_back(q);
        }
    }
    const std::size_t kdim = std::size_t{1} << k;
    const std::size_t edim = std::size_t{1} << env.size();
    auto full_index = [&](std::size_t kept_bits, std::size_t env_bits) {
        std::size_t idx = 0;
        for (int i = 0; i < k; ++i) {
            if ((kept_bits >> (k - 1 - i)) & 1) {
                idx |= std::size_t{1} << (n - 1 - keep[i]);
            }
        }
        for (std::size_t i = 0; i < env.size(); ++i) {
            if ((env_bits >> (env.size() - 1 - i)) & 1) {
                idx |= std::size_t{1} << (n - 1 - env[i]);
            }
        }
        return idx;
    };
    MatrixXcd rho = MatrixXcd::Zero(kdim, kdim);
    for (std::size_t e = 0; e < edim; ++e) {
        for (std::size_t a = 0; a < kdim; ++a) {
            const complex amp_a = psi.amplitudes[full_index(a, e)];
            if (amp_a == complex{0.0, 0.0}) {
                continue;
            }
            for (std::size_t b = 0; b < kdim; ++b) {
                rho(a, b) += amp_a * std::conj(psi.amplitudes[full_index(b, e)]);
            }
        }
    }
    return rho;
}

inline double purity(const MatrixXcd &rho) {
    return (rho * rho).trace().real();
}

/// Trace distance (1/2)||rho - sigma||_1 between density matrices.
inline double trace_distance(const MatrixXcd &rho, const MatrixXcd &sigma) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho - sigma);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline MatrixXcd pure_density(const VectorXcd &psi) {
    return psi * psi.adjoint();
}

}  // namespace ddtomo
