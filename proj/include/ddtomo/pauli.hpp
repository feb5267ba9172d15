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

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ddtomo {

using complex = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using Eigen::Vector2cd;
using Eigen::VectorXcd;

constexpr complex kImag{0.0, 1.0};

enum class Axis : int { X = 0, Y = 1, Z = 2 };

constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

inline Axis cyclic_next(Axis a) {
    return static_cast<Axis>((static_cast<int>(a) + 1) % 3);
}

inline Axis cyclic_prev(Axis a) {
    return static_cast<Axis>((static_cast<int>(a) + 2) % 3);
}

inline char axis_char(Axis a) {
    switch (a) {
        case Axis::X:
            return 'x';
        case Axis::Y:
            return 'y';
        case Axis::Z:
            return 'z';
    }
    throw std::invalid_argument("bad axis");
}

inline Axis parse_axis(const std::string &s) {
    if (s == "x" || s == "X") {
        return Axis::X;
    }
    if (s == "y" || s == "Y") {
        return Axis::Y;
    }
    if (s == "z" || s == "Z") {
        return Axis::Z;
    }
    throw std::invalid_argument("bad axis '" + s + "' (expected x, y, or z)");
}

inline const Matrix2cd &pauli(Axis a) {
    static const Matrix2cd sx = (Matrix2cd() << 0, 1, 1, 0).finished();
    static const Matrix2cd sy = (Matrix2cd() << 0, -kImag, kImag, 0).finished();
    static const Matrix2cd sz = (Matrix2cd() << 1, 0, 0, -1).finished();
    switch (a) {
        case Axis::X:
            return sx;
        case Axis::Y:
            return sy;
        case Axis::Z:
            return sz;
    }
    throw std::invalid_argument("bad axis");
}

/// exp(i * angle * n.sigma) for a unit-free generator vector n (not necessarily
/// normalized): exp(i * theta * n_hat.sigma) with theta = angle * |n|.
inline Matrix2cd rotation_exponential(double angle, double nx, double ny, double nz) {
    double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (norm == 0.0) {
        return Matrix2cd::Identity();
    }
    double theta = angle * norm;
    Matrix2cd generator =
        (nx * pauli(Axis::X) + ny * pauli(Axis::Y) + nz * pauli(Axis::Z)) / norm;
    return std::cos(theta) * Matrix2cd::Identity() + kImag * std::sin(theta) * generator;
}

/// Ideal instantaneous pi pulse about the given axis, e^{i pi/2 sigma} = i sigma.
inline Matrix2cd ideal_pi_pulse(Axis a) {
    return kImag * pauli(a);
}

inline Matrix4cd kron22(const Matrix2cd &a, const Matrix2cd &b) {
    Matrix4cd out;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
        }
    }
    return out;
}

// Single-qubit preparation / measurement kets used throughout the protocol.
// PlusI is (|0> + i|1>)/sqrt(2).
enum class Ket { Zero, One, Plus, PlusI };

inline Vector2cd ket_vector(Ket k) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (k) {
        case Ket::Zero:
            return Vector2cd(1, 0);
        case Ket::One:
            return Vector2cd(0, 1);
        case Ket::Plus:
            return Vector2cd(s, s);
        case Ket::PlusI:
            return Vector2cd(s, s * kImag);
    }
    throw std::invalid_argument("bad ket");
}

inline std::string ket_name(Ket k) {
    switch (k) {
        case Ket::Zero:
            return "0";
        case Ket::One:
            return "1";
        case Ket::Plus:
            return "+";
        case Ket::PlusI:
            return "I";
    }
    throw std::invalid_argument("bad ket");
}

}  // namespace ddtomo
