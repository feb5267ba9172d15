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

#include <cmath>

#include "ddtomo/pauli.hpp"

namespace ddtomo {

// Closed forms of the decoupled dynamics. These are the fit models of the
// estimation pipeline and the independent predictions the simulator is checked
// against; they never touch the state-vector path.

/// exp(-i (c1 XX + c2 YY + c3 ZZ) T) in the basis |00>, |01>, |10>, |11>
/// (first qubit = target spin i).
inline Matrix4cd two_spin_unitary(double c1, double c2, double c3, double t) {
    const double dm = (c1 - c2) * t;
    const double dp = (c1 + c2) * t;
    const complex ep = std::exp(kImag * c3 * t);
    const complex em = std::exp(-kImag * c3 * t);
    Matrix4cd u = Matrix4cd::Zero();
    u(0, 0) = std::cos(dm) * em;
    u(0, 3) = -kImag * std::sin(dm) * em;
    u(3, 0) = -kImag * std::sin(dm) * em;
    u(3, 3) = std::cos(dm) * em;
    u(1, 1) = std::cos(dp) * ep;
    u(1, 2) = -kImag * std::sin(dp) * ep;
    u(2, 1) = -kImag * std::sin(dp) * ep;
    u(2, 2) = std::cos(dp) * ep;
    return u;
}

/// exp(-i (bx X + by Y + bz Z) T) single-spin rotation.
inline Matrix2cd one_spin_unitary(double bx, double by, double bz, double t) {
    const double b = std::sqrt(bx * bx + by * by + bz * bz);
    if (b == 0.0) {
        return Matrix2cd::Identity();
    }
    const double c = std::cos(b * t);
    const double s = std::sin(b * t);
    Matrix2cd u;
    u(0, 0) = complex{c, -bz / b * s};
    u(0, 1) = complex{-by / b * s, -bx / b * s};
    u(1, 0) = complex{by / b * s, -bx / b * s};
    u(1, 1) = complex{c, bz / b * s};
    return u;
}

// Pair-probe probability curves.
inline double prob_plusI_to_00(double c1, double c2, double t) {
    return 0.25 * (1.0 + std::sin(2.0 * (c1 - c2) * t));
}

inline double prob_plusI_to_10(double c1, double c2, double t) {
    return 0.25 * (1.0 + std::sin(2.0 * (c1 + c2) * t));
}

inline double prob_0I_to_pp(double c2, double c3, double t) {
    return 0.25 * (1.0 + std::sin(2.0 * (c2 - c3) * t));
}

// Local-field probability curves.
inline double prob_0_to_0(double bx, double by, double bz, double t) {
    const double b2 = bx * bx + by * by + bz * bz;
    if (b2 == 0.0) {
        return 1.0;
    }
    const double s = std::sin(std::sqrt(b2) * t);
    return 1.0 + (bz * bz / b2 - 1.0) * s * s;
}

inline double prob_plus_to_plus(double bx, double by, double bz, double t) {
    const double b2 = bx * bx + by * by + bz * bz;
    if (b2 == 0.0) {
        return 1.0;
    }
    const double s = std::sin(std::sqrt(b2) * t);
    return 1.0 + (bx * bx / b2 - 1.0) * s * s;
}

// Sign-disambiguation point probabilities.
inline double prob_plus_to_0(double bx, double by, double bz, double t) {
    const double b2 = bx * bx + by * by + bz * bz;
    if (b2 == 0.0) {
        return 0.5;
    }
    const double b = std::sqrt(b2);
    const double s = std::sin(b * t);
    return 0.5 * (1.0 + 2.0 * bx * bz / b2 * s * s - by / b * std::sin(2.0 * b * t));
}

inline double prob_I_to_0(double bx, double by, double bz, double t) {
    const double b2 = bx * bx + by * by + bz * bz;
    if (b2 == 0.0) {
        return 0.5;
    }
    const double b = std::sqrt(b2);
    const double s = std::sin(b * t);
    return 0.5 * (1.0 + 2.0 * by * bz / b2 * s * s + bx / b * std::sin(2.0 * b * t));
}

}  // namespace ddtomo
