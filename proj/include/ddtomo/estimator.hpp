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

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "ddtomo/analytic.hpp"
#include "ddtomo/errors.hpp"
#include "ddtomo/measurement.hpp"
#include "ddtomo/pauli.hpp"
#include "ddtomo/rng.hpp"
#include "ddtomo/schedule.hpp"

namespace ddtomo {

namespace detail {

struct WeightedPoints {
    std::vector<double> t;
    std::vector<double> p;
    std::vector<double> w;  // 1 / sigma^2 with floored sigma
};

/// Sorted by (t, p) so fit results do not depend on record ordering.
inline WeightedPoints prepare_points(const ShotRecord &record, std::size_t min_points) {
    if (record.size() < min_points) {
        throw InsufficientDataError("need at least " + std::to_string(min_points) +
                                    " time points, got " + std::to_string(record.size()));
    }
    const double floor_sigma = std::sqrt(0.25 / record.n_shots) / 10.0;
    std::vector<std::size_t> order(record.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (record.times[a] != record.times[b]) {
            return record.times[a] < record.times[b];
        }
        return record.p_m[a] < record.p_m[b];
    });
    WeightedPoints pts;
    pts.t.reserve(record.size());
    pts.p.reserve(record.size());
    pts.w.reserve(record.size());
    for (std::size_t k : order) {
        double sigma = std::max(record.sigma_m[k], floor_sigma);
        pts.t.push_back(record.times[k]);
        pts.p.push_back(record.p_m[k]);
        pts.w.push_back(1.0 / (sigma * sigma));
    }
    return pts;
}

inline double min_time_spacing(const std::vector<double> &sorted_times) {
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < sorted_times.size(); ++k) {
        double gap = sorted_times[k] - sorted_times[k - 1];
        if (gap > 0.0) {
            dt = std::min(dt, gap);
        }
    }
    if (!std::isfinite(dt)) {
        throw InsufficientDataError("all time points coincide");
    }
    return dt;
}

/// Golden-section minimization on [lo, hi].
template <typename F>
double golden_minimize(F f, double lo, double hi, int iterations = 120) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iterations && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

struct SineFitOptions {
    int grid_points = 4001;       // dense scan over the search window
    bool free_amplitude = false;  // fit p = 1/4 + a sin(wT) instead of fixed a = 1/4
    // Physical bound on |w|: couplings lie in [-1, 1] so |w| = 2|c1 +- c2| <= 4
    // (10% headroom). Also avoids the alias w = pi / dt, where sin vanishes at
    // every grid point exactly like w = 0.
    double max_omega = 4.4;
};

struct CouplingFit {
    double omega = 0.0;
    double amplitude = 0.25;
    double residual = 0.0;     // weighted SSE at the optimum
    double omega_sigma = 0.0;  // Gauss-Newton covariance proxy
    bool converged = true;
};

/// One-parameter weighted fit of p(T) = 1/4 [1 + sin(w T)]; dense grid search
/// over [-w_Nyquist, +w_Nyquist] followed by golden-section refinement. The
/// sign of w is identifiable since sin is odd.
inline CouplingFit fit_sine(const ShotRecord &record, const SineFitOptions &opts = {}) {
    auto pts = detail::prepare_points(record, 8);
    const double w_ny =
        std::min(M_PI / detail::min_time_spacing(pts.t), opts.max_omega);

    auto sse_and_amp = [&](double omega) -> std::pair<double, double> {
        double amp = 0.25;
        if (opts.free_amplitude) {
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < pts.t.size(); ++k) {
                double s = std::sin(omega * pts.t[k]);
                num += pts.w[k] * s * (pts.p[k] - 0.25);
                den += pts.w[k] * s * s;
            }
            amp = den > 0.0 ? num / den : 0.25;
        }
        double sse = 0.0;
        for (std::size_t k = 0; k < pts.t.size(); ++k) {
            double r = pts.p[k] - (0.25 + amp * std::sin(omega * pts.t[k]));
            sse += pts.w[k] * r * r;
        }
        return {sse, amp};
    };
    auto sse = [&](double omega) { return sse_and_amp(omega).first; };

    const int grid = std::max(opts.grid_points, 2001);
    double best_w = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid; ++g) {
        double w = -w_ny + 2.0 * w_ny * g / (grid - 1);
        double s = sse(w);
        if (s < best_sse) {
            best_sse = s;
            best_w = w;
        }
    }
    const double spacing = 2.0 * w_ny / (grid - 1);
    double refined =
        detail::golden_minimize(sse, best_w - spacing, best_w + spacing);
    CouplingFit fit;
    auto [refined_sse, refined_amp] = sse_and_amp(refined);
    if (std::isfinite(refined_sse) && refined_sse <= best_sse + 1e-12 * (1.0 + best_sse)) {
        fit.omega = refined;
        fit.residual = refined_sse;
        fit.amplitude = refined_amp;
    } else {
        fit.omega = best_w;
        fit.residual = best_sse;
        fit.amplitude = sse_and_amp(best_w).second;
        fit.converged = false;
    }
    double fisher = 0.0;
    for (std::size_t k = 0; k < pts.t.size(); ++k) {
        double d = fit.amplitude * pts.t[k] * std::cos(fit.omega * pts.t[k]);
        fisher += pts.w[k] * d * d;
    }
    fit.omega_sigma = fisher > 0.0 ? 1.0 / std::sqrt(fisher) : 0.0;
    return fit;
}

/// Inverts the three oscillation frequencies (settings |+I>->|00>, |+I>->|10>,
/// |0I>->|++> in that order) into the diagonal couplings.
inline std::array<double, 3> couplings_from_frequencies(double w_minus, double w_plus,
                                                        double w_mid) {
    double c1 = (w_minus + w_plus) / 4.0;
    double c2 = (w_plus - w_minus) / 4.0;
    double c3 = c2 - w_mid / 2.0;
    return {c1, c2, c3};
}

/// The three pair-probe settings in the diagonal (c1 XX + c2 YY + c3 ZZ)
/// frame. First label = spin i.
inline std::array<MeasSetting, 3> diagonal_frame_settings(int i, int j) {
    return {MeasSetting{{Ket::Plus, Ket::PlusI}, {Ket::Zero, Ket::Zero}, {i, j}},
            MeasSetting{{Ket::Plus, Ket::PlusI}, {Ket::One, Ket::Zero}, {i, j}},
            MeasSetting{{Ket::Zero, Ket::PlusI}, {Ket::Plus, Ket::Plus}, {i, j}}};
}

/// Single-qubit frame rotation and coupling-name mapping for a pulse-axis
/// variant: conjugating the surviving effective Hamiltonian by `rotation` on
/// the rotated target maps it to c1 XX + c2 YY + c3 ZZ, with (c1, c2, c3)
/// naming the listed J^{ab} entries.
struct VariantSettings {
    AxisVariant variant;
    int rotated_target;  // 0 = spin i, 1 = spin j, -1 = none
    Matrix2cd rotation;
    std::array<std::pair<Axis, Axis>, 3> coupling_axes;
};

inline VariantSettings variant_settings(AxisVariant variant) {
    // Conjugation by R maps sigma^y -> sigma^x, sigma^z -> sigma^y,
    // sigma^x -> sigma^z (inverse cyclic rotation about (1,1,1)/sqrt(3)).
    const double n = 1.0 / std::sqrt(3.0);
    static const Matrix2cd inverse_cyclic = rotation_exponential(2.0 * M_PI / 3.0 / 2.0,
                                                                 n, n, n);
    switch (variant) {
        case AxisVariant::XXYY:
            return {variant,
                    -1,
                    Matrix2cd::Identity(),
                    {{{Axis::X, Axis::X}, {Axis::Y, Axis::Y}, {Axis::Z, Axis::Z}}}};
        case AxisVariant::XYYZ:
            return {variant,
                    1,
                    inverse_cyclic,
                    {{{Axis::X, Axis::Y}, {Axis::Y, Axis::Z}, {Axis::Z, Axis::X}}}};
        case AxisVariant::YXZY:
            return {variant,
                    0,
                    inverse_cyclic,
                    {{{Axis::Y, Axis::X}, {Axis::Z, Axis::Y}, {Axis::X, Axis::Z}}}};
    }
    throw std::invalid_argument("bad variant");
}

struct FieldFit {
    double b = 0.0;      // Bloch-vector magnitude
    double amp_z = 0.0;  // fitted (b_z / b)^2
    double amp_x = 0.0;  // fitted (b_x / b)^2
    double residual = 0.0;
    bool discriminant_clamped = false;  // 1 - amp_z - amp_x was negative beyond tolerance
    bool near_zero_field = false;       // both curves indistinguishable from flat 1

    double bz_magnitude() const { return b * std::sqrt(amp_z); }
    double bx_magnitude() const { return b * std::sqrt(amp_x); }
    double by_magnitude() const { return b * std::sqrt(std::max(0.0, 1.0 - amp_z - amp_x)); }
};

/// Joint weighted fit of P_{|0>->|0>} = 1 + (amp_z - 1) sin^2(bT) and
/// P_{|+>->|+>} = 1 + (amp_x - 1) sin^2(bT) sharing b. The amplitudes are
/// linear in the model and solved in closed form per grid value of b; b is
/// grid-searched on (0, sqrt(3)*1.05] and golden-refined.
inline FieldFit fit_local_field(const ShotRecord &record_zz, const ShotRecord &record_xx,
                                int grid_points = 2000) {
    auto zz = detail::prepare_points(record_zz, 8);
    auto xx = detail::prepare_points(record_xx, 8);

    auto curve_fit = [](const detail::WeightedPoints &pts, double b) {
        // Model p = (1 - s) + A s with s = sin^2(bT); weighted LS for A.
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < pts.t.size(); ++k) {
            double s = std::sin(b * pts.t[k]);
            s *= s;
            num += pts.w[k] * s * (pts.p[k] - (1.0 - s));
            den += pts.w[k] * s * s;
        }
        double amp = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 1.0;
        double sse = 0.0;
        for (std::size_t k = 0; k < pts.t.size(); ++k) {
            double s = std::sin(b * pts.t[k]);
            s *= s;
            double r = pts.p[k] - (1.0 + (amp - 1.0) * s);
            sse += pts.w[k] * r * r;
        }
        return std::pair<double, double>{sse, amp};
    };
    auto joint_sse = [&](double b) {
        return curve_fit(zz, b).first + curve_fit(xx, b).first;
    };

    const double b_max = std::sqrt(3.0) * 1.05;
    double best_b = b_max / grid_points;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int g = 1; g <= grid_points; ++g) {
        double b = b_max * g / grid_points;
        double s = joint_sse(b);
        if (s < best_sse) {
            best_sse = s;
            best_b = b;
        }
    }
    const double spacing = b_max / grid_points;
    double refined = detail::golden_minimize(joint_sse, std::max(1e-12, best_b - spacing),
                                             best_b + spacing);
    if (joint_sse(refined) > best_sse) {
        refined = best_b;
    }

    FieldFit fit;
    fit.b = refined;
    auto [sse_zz, amp_z] = curve_fit(zz, refined);
    auto [sse_xx, amp_x] = curve_fit(xx, refined);
    fit.amp_z = amp_z;
    fit.amp_x = amp_x;
    fit.residual = sse_zz + sse_xx;
    if (amp_z + amp_x > 1.0 + 0.05) {
        fit.discriminant_clamped = true;
    }
    // Both curves flat at 1 happens only for b = 0 (it needs amp_z = amp_x = 1,
    // i.e. |b_z| = |b_x| = b with b_y = 0, which forces b = 0).
    if ((1.0 - amp_z) + (1.0 - amp_x) < 0.02) {
        fit.near_zero_field = true;
    }
    return fit;
}

struct SignedField {
    double bx = 0.0;
    double by = 0.0;
    double bz = 0.0;
    bool tie_flagged = false;  // some component ~0, sign resolved toward +1
    bool undefined = false;    // b ~ 0, signs meaningless
};

/// Picks the sign assignment minimizing the squared residual of the two
/// single-time-point probes P_{|+>->|0>} and P_{|I>->|0>} evaluated at the
/// actual measurement time t_star (chosen near b T = pi/4 using the fitted b).
inline SignedField disambiguate_signs(const FieldFit &fit, double p_plus0, double p_I0,
                                      double t_star) {
    SignedField out;
    if (fit.b <= 0.0 || fit.near_zero_field) {
        out.undefined = true;
        out.tie_flagged = true;
        return out;
    }
    const double mx = fit.bx_magnitude();
    const double my = fit.by_magnitude();
    const double mz = fit.bz_magnitude();

    struct Candidate {
        int sx, sy, sz;
        double residual;
    };
    std::vector<Candidate> candidates;
    for (int sx : {+1, -1}) {
        for (int sy : {+1, -1}) {
            for (int sz : {+1, -1}) {
                double bx = sx * mx, by = sy * my, bz = sz * mz;
                double r1 = p_plus0 - prob_plus_to_0(bx, by, bz, t_star);
                double r2 = p_I0 - prob_I_to_0(bx, by, bz, t_star);
                candidates.push_back({sx, sy, sz, r1 * r1 + r2 * r2});
            }
        }
    }
    // Preference order for ties: fewest minus signs, then lexicographic with
    // +1 first; the enumeration above is already in that lexicographic order.
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate &a, const Candidate &b) {
        int ma = (a.sx < 0) + (a.sy < 0) + (a.sz < 0);
        int mb = (b.sx < 0) + (b.sy < 0) + (b.sz < 0);
        return ma < mb;
    });
    double best = std::numeric_limits<double>::infinity();
    const Candidate *winner = nullptr;
    for (const auto &c : candidates) {
        if (c.residual < best - 1e-12) {
            best = c.residual;
            winner = &c;
        }
    }
    int ties = 0;
    for (const auto &c : candidates) {
        if (std::abs(c.residual - best) <= 1e-12) {
            ++ties;
        }
    }
    // First candidate in preference order among the tied set wins.
    for (const auto &c : candidates) {
        if (std::abs(c.residual - best) <= 1e-12) {
            winner = &c;
            break;
        }
    }
    out.bx = winner->sx * mx;
    out.by = winner->sy * my;
    out.bz = winner->sz * mz;
    out.tie_flagged = ties > 1;
    return out;
}

/// Parametric bootstrap: each point's count is resampled from
/// Binomial(N_m, p_m), the fit is repeated, and the per-parameter sample
/// standard deviation is reported. Deterministic per seed; resample r uses the
/// child seed (seed, r).
struct BootstrapResult {
    std::vector<double> sigma;
    double failure_rate = 0.0;
    bool flagged = false;  // more than 10% of resamples failed to fit
};

inline ShotRecord resample_record(const ShotRecord &record, Rng &rng) {
    ShotRecord out = record;
    for (std::size_t k = 0; k < record.size(); ++k) {
        auto s = sample_shots(record.p_m[k], record.n_shots, rng);
        out.p_m[k] = s.p_m;
        out.sigma_m[k] = s.sigma_m;
    }
    return out;
}

inline BootstrapResult bootstrap_sigma(
    const std::vector<ShotRecord> &records,
    const std::function<std::vector<double>(const std::vector<ShotRecord> &)> &refit,
    int n_resamples, std::uint64_t seed) {
    if (n_resamples < 200) {
        throw std::invalid_argument("bootstrap_sigma requires n_resamples >= 200");
    }
    std::vector<std::vector<double>> samples;
    int failures = 0;
    for (int r = 0; r < n_resamples; ++r) {
        Rng rng(child_seed(seed, "bootstrap", static_cast<std::uint64_t>(r)));
        std::vector<ShotRecord> resampled;
        resampled.reserve(records.size());
        for (const auto &rec : records) {
            resampled.push_back(resample_record(rec, rng));
        }
        try {
            samples.push_back(refit(resampled));
        } catch (const std::exception &) {
            ++failures;
        }
    }
    BootstrapResult result;
    result.failure_rate = static_cast<double>(failures) / n_resamples;
    result.flagged = result.failure_rate > 0.10;
    if (samples.empty()) {
        result.flagged = true;
        return result;
    }
    const std::size_t n_params = samples.front().size();
    result.sigma.assign(n_params, 0.0);
    for (std::size_t p = 0; p < n_params; ++p) {
        double mean = 0.0;
        for (const auto &s : samples) {
            mean += s[p];
        }
        mean /= samples.size();
        double var = 0.0;
        for (const auto &s : samples) {
            var += (s[p] - mean) * (s[p] - mean);
        }
        var /= std::max<std::size_t>(1, samples.size() - 1);
        result.sigma[p] = std::sqrt(var);
    }
    return result;
}

}  // namespace ddtomo
