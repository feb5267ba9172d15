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

#include <string>
#include <vector>

#include <json.hpp>

#include "ddtomo/errors.hpp"
#include "ddtomo/pauli.hpp"
#include "ddtomo/rng.hpp"

namespace ddtomo {

enum class AxisVariant {
    XXYY,  // diagonal:  survives xx, yy, zz
    XYYZ,  // forward off-diagonal: survives xy, yz, zx
    YXZY,  // reverse off-diagonal: survives yx, zy, xz
};

inline std::string variant_name(AxisVariant v) {
    switch (v) {
        case AxisVariant::XXYY:
            return "XX-YY";
        case AxisVariant::XYYZ:
            return "XY-YZ";
        case AxisVariant::YXZY:
            return "YX-ZY";
    }
    throw std::invalid_argument("bad variant");
}

enum class CycleForm { XY4, XY8 };

/// One instant of simultaneous pi pulses. Time offsets are stored in integer
/// half-steps of tau/2 so interval arithmetic stays exact. Two events may share
/// the same half_step (global-plus-cancel scheme); they are applied in listed
/// order.
struct PulseEvent {
    long half_step = 0;
    std::vector<std::pair<int, Axis>> targets;
};

struct PulseSchedule {
    double tau = 0.0;
    int n_cycles = 0;
    long total_half_steps = 0;  // total time = total_half_steps * tau / 2
    std::vector<PulseEvent> events;

    double total_time() const { return total_half_steps * tau / 2.0; }
    double event_time(const PulseEvent &e) const { return e.half_step * tau / 2.0; }
    std::size_t pulse_count() const {
        std::size_t c = 0;
        for (const auto &e : events) {
            c += e.targets.size();
        }
        return c;
    }
};

enum class ErrorKind { NPE, SAE, RAE, RRE };

inline std::string error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::NPE:
            return "npe";
        case ErrorKind::SAE:
            return "sae";
        case ErrorKind::RAE:
            return "rae";
        case ErrorKind::RRE:
            return "rre";
    }
    throw std::invalid_argument("bad error kind");
}

inline ErrorKind parse_error_kind(const std::string &s) {
    if (s == "npe") return ErrorKind::NPE;
    if (s == "sae") return ErrorKind::SAE;
    if (s == "rae") return ErrorKind::RAE;
    if (s == "rre") return ErrorKind::RRE;
    throw std::invalid_argument("unknown error model '" + s + "' (expected npe/sae/rae/rre)");
}

/// NPE: ideal pulses (magnitude ignored). SAE: fixed over-rotation epsilon.
/// RAE: per-pulse delta uniform in (-magnitude, +magnitude). RRE: per-pulse
/// axis tilt (alpha, beta, gamma) uniform on the sphere of radius `magnitude`.
struct PulseErrorModel {
    ErrorKind kind = ErrorKind::NPE;
    double magnitude = 0.0;
    std::uint64_t seed = 0;
};

/// Draws the realized 2x2 unitary per (event, target) in schedule order:
/// event index ascending, then target index ascending within the event.
class PulseRealizationStream {
  public:
    PulseRealizationStream(const PulseErrorModel &model, Rng &rng)
        : model_(model), rng_(rng) {}

    Matrix2cd next(Axis axis) {
        switch (model_.kind) {
            case ErrorKind::NPE:
                return ideal_pi_pulse(axis);
            case ErrorKind::SAE:
                return rotation_exponential(M_PI / 2.0 * (1.0 + model_.magnitude),
                                            axis == Axis::X, axis == Axis::Y,
                                            axis == Axis::Z);
            case ErrorKind::RAE: {
                std::uniform_real_distribution<double> u(-model_.magnitude, model_.magnitude);
                double delta = u(rng_);
                return rotation_exponential(M_PI / 2.0 * (1.0 + delta), axis == Axis::X,
                                            axis == Axis::Y, axis == Axis::Z);
            }
            case ErrorKind::RRE: {
                std::normal_distribution<double> g(0.0, 1.0);
                double tx = g(rng_);
                double ty = g(rng_);
                double tz = g(rng_);
                double norm = std::sqrt(tx * tx + ty * ty + tz * tz);
                if (norm == 0.0) {
                    norm = 1.0;
                }
                double s = model_.magnitude / norm;
                double nx = (axis == Axis::X ? 1.0 : 0.0) + s * tx;
                double ny = (axis == Axis::Y ? 1.0 : 0.0) + s * ty;
                double nz = (axis == Axis::Z ? 1.0 : 0.0) + s * tz;
                return rotation_exponential(M_PI / 2.0, nx, ny, nz);
            }
        }
        throw std::invalid_argument("unknown error kind");
    }

  private:
    PulseErrorModel model_;
    Rng &rng_;
};

/// Materialized realization of a whole schedule, in draw order.
inline std::vector<Matrix2cd> realize_pulses(const PulseSchedule &sched,
                                             const PulseErrorModel &model, Rng &rng) {
    PulseRealizationStream stream(model, rng);
    std::vector<Matrix2cd> out;
    out.reserve(sched.pulse_count());
    for (const auto &event : sched.events) {
        for (const auto &[q, axis] : event.targets) {
            (void)q;
            out.push_back(stream.next(axis));
        }
    }
    return out;
}

namespace detail {

// Chronological pulse axes of one cycle, as (axis on first operand, axis on
// second operand) pairs. XY-8 is an XY-4 cycle followed by its time reversal.
inline std::vector<std::pair<Axis, Axis>> cycle_axes(AxisVariant variant, CycleForm form) {
    std::pair<Axis, Axis> p1, p2;
    switch (variant) {
        case AxisVariant::XXYY:
            p1 = {Axis::X, Axis::X};
            p2 = {Axis::Y, Axis::Y};
            break;
        case AxisVariant::XYYZ:
            p1 = {Axis::X, Axis::Y};
            p2 = {Axis::Y, Axis::Z};
            break;
        case AxisVariant::YXZY:
            p1 = {Axis::Y, Axis::X};
            p2 = {Axis::Z, Axis::Y};
            break;
    }
    std::vector<std::pair<Axis, Axis>> axes{p1, p2, p1, p2};
    if (form == CycleForm::XY8) {
        axes.insert(axes.end(), {p2, p1, p2, p1});
    }
    return axes;
}

}  // namespace detail

/// Synchronized DD sequence on target pair (i, j). Each cycle starts and ends
/// with tau/2 free evolution, so adjacent cycles merge into full tau intervals;
/// pulses sit at odd half-steps.
inline PulseSchedule pair_sequence(int i, int j, AxisVariant variant, int n_cycles, double tau,
                                   CycleForm form = CycleForm::XY8) {
    if (i == j) {
        throw std::invalid_argument("pair_sequence requires two distinct qubits");
    }
    if (n_cycles < 1) {
        throw std::invalid_argument("pair_sequence requires n_cycles >= 1");
    }
    const auto axes = detail::cycle_axes(variant, form);
    const long cycle_half_steps = 2 * static_cast<long>(axes.size());
    PulseSchedule sched;
    sched.tau = tau;
    sched.n_cycles = n_cycles;
    sched.total_half_steps = cycle_half_steps * n_cycles;
    for (int c = 0; c < n_cycles; ++c) {
        for (std::size_t k = 0; k < axes.size(); ++k) {
            PulseEvent e;
            e.half_step = c * cycle_half_steps + 2 * static_cast<long>(k) + 1;
            e.targets = {{i, axes[k].first}, {j, axes[k].second}};
            sched.events.push_back(e);
        }
    }
    return sched;
}

/// Synchronized XY-8 on every qubit except i; the target spin is never pulsed.
inline PulseSchedule environment_sequence(int i, int n_spins, int n_cycles, double tau,
                                          CycleForm form = CycleForm::XY8) {
    if (n_spins < 2) {
        throw std::invalid_argument("environment_sequence requires n_spins >= 2");
    }
    if (i < 0 || i >= n_spins) {
        throw std::invalid_argument("environment_sequence: target out of range");
    }
    const auto axes = detail::cycle_axes(AxisVariant::XXYY, form);
    const long cycle_half_steps = 2 * static_cast<long>(axes.size());
    PulseSchedule sched;
    sched.tau = tau;
    sched.n_cycles = n_cycles;
    sched.total_half_steps = cycle_half_steps * n_cycles;
    for (int c = 0; c < n_cycles; ++c) {
        for (std::size_t k = 0; k < axes.size(); ++k) {
            PulseEvent e;
            e.half_step = c * cycle_half_steps + 2 * static_cast<long>(k) + 1;
            for (int q = 0; q < n_spins; ++q) {
                if (q != i) {
                    e.targets.emplace_back(q, axes[k].first);
                }
            }
            sched.events.push_back(e);
        }
    }
    return sched;
}

/// Global XY-8 on all qubits plus a simultaneous canceling pulse on spin i.
/// Each instant is emitted as two events at the same half-step (global first,
/// then the focused cancel); their error draws are independent, so any pulse
/// error hits spin i twice.
inline PulseSchedule global_cancel_sequence(int i, int n_spins, int n_cycles, double tau,
                                            CycleForm form = CycleForm::XY8) {
    if (n_spins < 2) {
        throw std::invalid_argument("global_cancel_sequence requires n_spins >= 2");
    }
    if (i < 0 || i >= n_spins) {
        throw std::invalid_argument("global_cancel_sequence: target out of range");
    }
    const auto axes = detail::cycle_axes(AxisVariant::XXYY, form);
    const long cycle_half_steps = 2 * static_cast<long>(axes.size());
    PulseSchedule sched;
    sched.tau = tau;
    sched.n_cycles = n_cycles;
    sched.total_half_steps = cycle_half_steps * n_cycles;
    for (int c = 0; c < n_cycles; ++c) {
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const long hs = c * cycle_half_steps + 2 * static_cast<long>(k) + 1;
            PulseEvent global;
            global.half_step = hs;
            for (int q = 0; q < n_spins; ++q) {
                global.targets.emplace_back(q, axes[k].first);
            }
            sched.events.push_back(global);
            PulseEvent cancel;
            cancel.half_step = hs;
            cancel.targets = {{i, axes[k].first}};
            sched.events.push_back(cancel);
        }
    }
    return sched;
}

/// Debug dump: JSON array of {t, targets:[{q, axis}]}.
inline nlohmann::json schedule_to_json(const PulseSchedule &sched) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &e : sched.events) {
        nlohmann::json targets = nlohmann::json::array();
        for (const auto &[q, axis] : e.targets) {
            targets.push_back({{"q", q}, {"axis", std::string(1, axis_char(axis))}});
        }
        arr.push_back({{"t", sched.event_time(e)}, {"targets", targets}});
    }
    return arr;
}

}  // namespace ddtomo
