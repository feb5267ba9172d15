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

#include <cstdint>
#include <random>
#include <vector>

#include "ddtomo/errors.hpp"
#include "ddtomo/pauli.hpp"
#include "ddtomo/rng.hpp"

namespace ddtomo {

/// Two-body spin Hamiltonian
///
///   H = sum_{m<n, a, b} J_mn^{ab} sigma_m^a sigma_n^b + sum_{m,a} b_m^a sigma_m^a
///
/// with all coefficients in units of J (J == 1 internally). Couplings are stored
/// canonically for m < n; lookup with m > n resolves to the (n, m, b, a) entry.
/// Absent entries are exactly zero. Immutable use after construction is
/// thread-safe.
///
/// Bit convention (global for the whole library): qubit 0 is the MOST
/// significant bit of a basis-state index.
class SpinSystem {
  public:
    explicit SpinSystem(int n_spins)
        : n_spins_(n_spins),
          couplings_(static_cast<std::size_t>(n_spins) * (n_spins - 1) / 2 * 9, 0.0),
          fields_(static_cast<std::size_t>(n_spins) * 3, 0.0) {
        if (n_spins < 1) {
            throw std::invalid_argument("SpinSystem requires n_spins >= 1");
        }
    }

    int n_spins() const { return n_spins_; }

    double coupling(int m, int n, Axis a, Axis b) const {
        if (m > n) {
            std::swap(m, n);
            std::swap(a, b);
        }
        return couplings_[coupling_index(m, n, a, b)];
    }

    void set_coupling(int m, int n, Axis a, Axis b, double value) {
        if (m > n) {
            std::swap(m, n);
            std::swap(a, b);
        }
        couplings_[coupling_index(m, n, a, b)] = value;
    }

    double field(int m, Axis a) const { return fields_[field_index(m, a)]; }

    void set_field(int m, Axis a, double value) { fields_[field_index(m, a)] = value; }

    std::size_t coefficient_count() const { return couplings_.size() + fields_.size(); }

    /// Every J_mn^{ab} and b_m^a drawn i.i.d. uniform on [-1, 1].
    static SpinSystem random_instance(int n_spins, std::uint64_t seed) {
        if (n_spins < 2) {
            throw std::invalid_argument("random_instance requires n_spins >= 2");
        }
        SpinSystem sys(n_spins);
        Rng rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int m = 0; m < n_spins; ++m) {
            for (int n = m + 1; n < n_spins; ++n) {
                for (Axis a : kAxes) {
                    for (Axis b : kAxes) {
                        sys.set_coupling(m, n, a, b, u(rng));
                    }
                }
            }
        }
        for (int m = 0; m < n_spins; ++m) {
            for (Axis a : kAxes) {
                sys.set_field(m, a, u(rng));
            }
        }
        return sys;
    }

    bool operator==(const SpinSystem &other) const {
        return n_spins_ == other.n_spins_ && couplings_ == other.couplings_ &&
               fields_ == other.fields_;
    }

  private:
    std::size_t coupling_index(int m, int n, Axis a, Axis b) const {
        check_qubit(m);
        check_qubit(n);
        if (m == n) {
            throw std::invalid_argument("coupling requires two distinct spins");
        }
        // Pair (m, n), m < n, packed in lexicographic order.
        std::size_t pair = static_cast<std::size_t>(m) * n_spins_ -
                           static_cast<std::size_t>(m) * (m + 1) / 2 + (n - m - 1);
        return pair * 9 + static_cast<std::size_t>(a) * 3 + static_cast<std::size_t>(b);
    }

    std::size_t field_index(int m, Axis a) const {
        check_qubit(m);
        return static_cast<std::size_t>(m) * 3 + static_cast<std::size_t>(a);
    }

    void check_qubit(int m) const {
        if (m < 0 || m >= n_spins_) {
            throw std::invalid_argument("spin index out of range");
        }
    }

    int n_spins_;
    std::vector<double> couplings_;
    std::vector<double> fields_;
};

/// Dense 2^N x 2^N Hermitian matrix of the Hamiltonian under the MSB-first bit
/// convention. Intended for propagator construction and oracle support.
inline MatrixXcd matrix_representation(const SpinSystem &sys, int max_spins = 12) {
    const int n = sys.n_spins();
    if (n > max_spins) {
        throw ResourceLimitError("matrix_representation: " + std::to_string(n) +
                                 " spins exceeds cap of " + std::to_string(max_spins));
    }
    const std::size_t dim = std::size_t{1} << n;
    MatrixXcd h = MatrixXcd::Zero(dim, dim);

    // sigma_q^a contributes a factor indexed by bit (n-1-q) counted from the LSB.
    auto pauli_entry = [](Axis a, int row_bit, int col_bit) -> complex {
        return pauli(a)(row_bit, col_bit);
    };

    auto add_single = [&](int q, Axis a, double coeff) {
        const std::size_t stride = std::size_t{1} << (n - 1 - q);
        for (std::size_t col = 0; col < dim; ++col) {
            int cb = (col / stride) & 1;
            for (int rb = 0; rb < 2; ++rb) {
                complex v = pauli_entry(a, rb, cb);
                if (v != complex{0.0, 0.0}) {
                    std::size_t row = (col & ~stride) | (rb ? stride : 0);
                    h(row, col) += coeff * v;
                }
            }
        }
    };

    auto add_pair = [&](int m, int q, Axis a, Axis b, double coeff) {
        const std::size_t sm = std::size_t{1} << (n - 1 - m);
        const std::size_t sq = std::size_t{1} << (n - 1 - q);
        for (std::size_t col = 0; col < dim; ++col) {
            int cbm = (col / sm) & 1;
            int cbq = (col / sq) & 1;
            for (int rbm = 0; rbm < 2; ++rbm) {
                complex vm = pauli_entry(a, rbm, cbm);
                if (vm == complex{0.0, 0.0}) {
                    continue;
                }
                for (int rbq = 0; rbq < 2; ++rbq) {
                    complex vq = pauli_entry(b, rbq, cbq);
                    if (vq == complex{0.0, 0.0}) {
                        continue;
                    }
                    std::size_t row = (col & ~(sm | sq)) | (rbm ? sm : 0) | (rbq ? sq : 0);
                    h(row, col) += coeff * vm * vq;
                }
            }
        }
    };

    for (int m = 0; m < n; ++m) {
        for (Axis a : kAxes) {
            double f = sys.field(m, a);
            if (f != 0.0) {
                add_single(m, a, f);
            }
        }
        for (int q = m + 1; q < n; ++q) {
            for (Axis a : kAxes) {
                for (Axis b : kAxes) {
                    double c = sys.coupling(m, q, a, b);
                    if (c != 0.0) {
                        add_pair(m, q, a, b, c);
                    }
                }
            }
        }
    }
    return h;
}

}  // namespace ddtomo
