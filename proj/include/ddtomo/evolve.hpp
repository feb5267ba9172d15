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

#include <functional>

#include "ddtomo/propagator.hpp"
#include "ddtomo/schedule.hpp"
#include "ddtomo/state.hpp"

namespace ddtomo {

/// Called at every completed cycle boundary with the 1-based cycle count and
/// the current state.
using CycleObserver = std::function<void(int cycle, const QuantumState &psi)>;

namespace detail {

inline void check_schedule(const Propagator &prop, const PulseSchedule &sched) {
    if (sched.tau != prop.tau()) {
        throw ScheduleMismatchError("schedule tau does not match propagator tau");
    }
    long prev = 0;
    for (const auto &e : sched.events) {
        if (e.half_step < prev) {
            throw ScheduleMismatchError("schedule events out of order");
        }
        if (e.half_step > sched.total_half_steps) {
            throw ScheduleMismatchError("schedule event beyond total time");
        }
        prev = e.half_step;
    }
}

}  // namespace detail

/// Alternates free evolution with realized pulses in schedule order. Per-pulse
/// error draws are consumed in (event, target) order, reproducible per seed.
/// If `observer` is set, it fires at every cycle boundary (after any pulses at
/// that instant).
inline QuantumState run_schedule(const QuantumState &psi0, const Propagator &prop,
                                 const PulseSchedule &sched, const PulseErrorModel &err,
                                 Rng &rng, const CycleObserver &observer = nullptr) {
    detail::check_schedule(prop, sched);
    QuantumState psi = psi0;
    PulseRealizationStream stream(err, rng);

    const long cycle_hs =
        sched.n_cycles > 0 ? sched.total_half_steps / sched.n_cycles : sched.total_half_steps;
    long pos = 0;
    std::size_t next_event = 0;
    int next_cycle = 1;
    while (true) {
        long event_hs = next_event < sched.events.size() ? sched.events[next_event].half_step
                                                         : sched.total_half_steps;
        long boundary_hs = (observer && cycle_hs > 0 && next_cycle <= sched.n_cycles)
                               ? next_cycle * cycle_hs
                               : sched.total_half_steps;
        long stop = std::min(std::min(event_hs, boundary_hs), sched.total_half_steps);
        prop.apply_half_steps(psi, stop - pos);
        pos = stop;
        bool advanced = false;
        while (next_event < sched.events.size() &&
               sched.events[next_event].half_step == pos) {
            std::vector<std::pair<int, Matrix2cd>> realized;
            realized.reserve(sched.events[next_event].targets.size());
            for (const auto &[q, axis] : sched.events[next_event].targets) {
                realized.emplace_back(q, stream.next(axis));
            }
            apply_pulse(psi, realized);
            ++next_event;
            advanced = true;
        }
        if (observer && cycle_hs > 0 && next_cycle <= sched.n_cycles &&
            next_cycle * cycle_hs == pos) {
            observer(next_cycle, psi);
            ++next_cycle;
            advanced = true;
        }
        if (pos >= sched.total_half_steps && next_event >= sched.events.size() &&
            (!observer || next_cycle > sched.n_cycles)) {
            break;
        }
        if (!advanced && pos >= sched.total_half_steps) {
            break;
        }
    }
    return psi;
}

}  // namespace ddtomo
