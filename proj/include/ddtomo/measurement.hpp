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

#include <fstream>
#include <iomanip>
#include <vector>

#include "ddtomo/errors.hpp"
#include "ddtomo/pauli.hpp"
#include "ddtomo/rng.hpp"

namespace ddtomo {

/// Preparation / measurement setting for 1 or 2 target qubits, labels from
/// {|0>, |1>, |+>, |I>}. The first label refers to the first listed target
/// (spin i for pair probes).
struct MeasSetting {
    std::vector<Ket> prepared;
    std::vector<Ket> measured;
    std::vector<int> targets;
};

inline VectorXcd kets_to_vector(const std::vector<Ket> &kets) {
    VectorXcd v = VectorXcd::Ones(1);
    for (Ket k : kets) {
        VectorXcd next(v.size() * 2);
        Vector2cd f = ket_vector(k);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            next[2 * i] = v[i] * f[0];
            next[2 * i + 1] = v[i] * f[1];
        }
        v = next;
    }
    return v;
}

/// p = <measured| rho |measured>, clamped to [0, 1].
inline double outcome_probability(const MatrixXcd &rho, const std::vector<Ket> &measured) {
    VectorXcd m = kets_to_vector(measured);
    if (m.size() != rho.rows()) {
        throw std::invalid_argument("outcome_probability: dimension mismatch");
    }
    double p = (m.adjoint() * rho * m)(0, 0).real();
    if (p < 0.0) {
        if (p < -1e-9) {
            throw std::invalid_argument("outcome_probability: density matrix not PSD");
        }
        p = 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + 1e-9) {
            throw std::invalid_argument("outcome_probability: trace exceeds 1");
        }
        p = 1.0;
    }
    return p;
}

/// Shot-noise-limited probability estimates over a time grid. sigma_m follows
/// the binomial form sqrt(p_m (1-p_m) / N_m); it is 0 at p_m in {0,1} and the
/// estimator floors per-point weights accordingly.
struct ShotRecord {
    std::vector<double> times;
    std::vector<double> p_m;
    std::vector<double> sigma_m;
    std::vector<double> p_true;  // optional; empty when unknown
    int n_shots = 0;

    std::size_t size() const { return times.size(); }
};

struct ShotSample {
    double p_m;
    double sigma_m;
};

inline ShotSample sample_shots(double p, int n_shots, Rng &rng) {
    if (n_shots < 1) {
        throw std::invalid_argument("sample_shots requires n_shots >= 1");
    }
    if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("sample_shots requires p in [0, 1]");
    }
    std::binomial_distribution<int> bin(n_shots, p);
    int k = bin(rng);
    double pm = static_cast<double>(k) / n_shots;
    return {pm, std::sqrt(pm * (1.0 - pm) / n_shots)};
}

/// CSV columns: T, p_m, sigma_m, n_shots (plus p_true and the fitted curve
/// when supplied), full decimal precision.
inline void write_record_csv(const ShotRecord &record, const std::string &path,
                             const std::vector<double> &p_fit = {}) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << std::setprecision(17);
    out << "T,p_m,sigma_m,n_shots";
    if (!record.p_true.empty()) {
        out << ",p_true";
    }
    if (!p_fit.empty()) {
        out << ",p_fit";
    }
    out << "\n";
    for (std::size_t k = 0; k < record.size(); ++k) {
        out << record.times[k] << "," << record.p_m[k] << "," << record.sigma_m[k] << ","
            << record.n_shots;
        if (!record.p_true.empty()) {
            out << "," << record.p_true[k];
        }
        if (!p_fit.empty()) {
            out << "," << p_fit[k];
        }
        out << "\n";
    }
}

}  // namespace ddtomo
