// Copyright 2026 The restoplan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "restoplan/der.hpp"

#include <algorithm>
#include <cmath>

#include "restoplan/feeder.hpp"

namespace restoplan {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void GfmiParams::validate() const {
    if (!(s_rat > 0.0)) throw std::invalid_argument("gfmi: s_rat must be > 0");
    if (!(c > 0.0)) throw std::invalid_argument("gfmi: capacity must be > 0");
    if (!(h > 0.0)) throw std::invalid_argument("gfmi: inertia must be > 0");
    if (!(d + kf > 0.0)) throw std::invalid_argument("gfmi: d + kf must be > 0");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gfmi: gamma must lie in [0,1)");
    if (t_lp) {
        if (!(*t_lp > 0.0)) throw std::invalid_argument("gfmi: t_lp must be > 0");
        const GammaResult g = gamma_compute(h, d, kf, *t_lp);
        if (std::abs(g.value - gamma) > 1e-3) {
            throw std::invalid_argument("gfmi: gamma inconsistent with t_lp (expected " +
                                        std::to_string(g.value) + ")");
        }
    }
}

double qss_frequency(const GfmiParams& p, double p_total_kw, double delta_f_star_hz) {
    if (std::abs(p_total_kw) > p.s_rat * (1.0 + 1e-12)) {
        throw std::domain_error("qss_frequency: |p_total| exceeds rated power");
    }
    const double p_pu = p_total_kw / p.s_rat;
    return p.f_star * (1.0 - p_pu / (p.d + p.kf)) + delta_f_star_hz;
}

double rocof_estimate(const GfmiParams& p, double delta_p_kw) {
    if (std::abs(delta_p_kw) > p.s_rat * (1.0 + 1e-12)) {
        throw std::domain_error("rocof_estimate: |delta_p| exceeds rated power");
    }
    return -p.f_star * (delta_p_kw / p.s_rat) / (2.0 * p.h);
}

double nadir_estimate(const GfmiParams& p, double f_pre_hz, double delta_p_kw) {
    if (std::abs(delta_p_kw) > p.s_rat * (1.0 + 1e-12)) {
        throw std::domain_error("nadir_estimate: |delta_p| exceeds rated power");
    }
    const double dp_pu = delta_p_kw / p.s_rat;
    return f_pre_hz - p.f_star * dp_pu / (p.d + p.kf) * (1.0 + p.gamma);
}

GammaResult gamma_compute(double h, double d, double kf, double t_lp) {
    if (!(h > 0.0 && t_lp > 0.0)) throw std::invalid_argument("gamma_compute: h and t_lp must be > 0");
    if (!(d + kf > 0.0)) throw std::invalid_argument("gamma_compute: d + kf must be > 0");

    // Characteristic polynomial 2HT s^2 + (2H + DT) s + (D + Kf); the
    // droop acts through the measurement lag, which puts a zero at -1/T in
    // the frequency response.
    const double wn = std::sqrt((d + kf) / (2.0 * h * t_lp));
    const double xi = (2.0 * h + d * t_lp) / (2.0 * (d + kf)) * wn;
    if (xi >= 1.0) return {0.0, true};

    const double wr = wn * std::sqrt(1.0 - xi * xi);
    // First extremum of the step response; atan branch chosen so t_nad > 0.
    double t_nad = std::atan(wr * t_lp / (xi * wn * t_lp - 1.0)) / wr;
    if (t_nad <= 0.0) t_nad += kPi / wr;
    // Exact peak amplitude of the with-zero second-order step response,
    // normalized by the steady-state deviation.
    const double zc = (xi * wn - t_lp * wn * wn) / wr;
    const double value = std::abs(std::exp(-xi * wn * t_nad) *
                                  (std::cos(wr * t_nad) + zc * std::sin(wr * t_nad)));
    return {value, false};
}

double recover_t_lp(double h, double d, double kf, double gamma_target, double t_max) {
    if (!(gamma_target > 0.0 && gamma_target < 1.0)) {
        throw std::invalid_argument("recover_t_lp: target must lie in (0,1)");
    }
    // Scan for a bracketing underdamped interval, then bisect.
    const int kScan = 4000;
    double prev_t = 0.0, prev_g = -1.0;
    double lo = 0.0, hi = 0.0;
    for (int i = 1; i <= kScan; ++i) {
        const double t = t_max * static_cast<double>(i) / kScan;
        const GammaResult g = gamma_compute(h, d, kf, t);
        if (g.overdamped) {
            prev_g = -1.0;
            prev_t = t;
            continue;
        }
        if (prev_g >= 0.0 && (prev_g - gamma_target) * (g.value - gamma_target) <= 0.0) {
            lo = prev_t;
            hi = t;
            break;
        }
        prev_t = t;
        prev_g = g.value;
    }
    if (hi == 0.0) throw std::runtime_error("recover_t_lp: no underdamped t matches the target");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const GammaResult g = gamma_compute(h, d, kf, mid);
        const double glo = gamma_compute(h, d, kf, lo).value;
        if (g.overdamped || (glo - gamma_target) * (g.value - gamma_target) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

TerminalVoltage terminal_voltage_sq(const GfmiParams& p, double q_total_kvar) {
    if (std::abs(q_total_kvar) > p.s_rat * (1.0 + 1e-12)) {
        throw std::domain_error("terminal_voltage_sq: |q_total| exceeds rated power");
    }
    const double q_pu = q_total_kvar / p.s_rat;
    const double v = p.v_star - p.kv * q_pu;
    TerminalVoltage out;
    out.v_sq = v * v;
    out.dv_cc = -2.0 * p.v_star * p.kv * q_pu + (p.kv * q_pu) * (p.kv * q_pu);
    return out;
}

SocStep soc_step(const GfmiParams& p, double soc_prev, double p_total_kw, double dt_hours) {
    if (!(soc_prev >= 0.0 && soc_prev <= 1.0)) {
        throw std::domain_error("soc_step: soc_prev outside [0,1]");
    }
    SocStep out;
    out.soc = soc_prev - p_total_kw * dt_hours / p.c;
    out.in_range = out.soc >= -1e-12 && out.soc <= 1.0 + 1e-12;
    return out;
}

double pv_output(const PvUnit& pv, int t, bool bus_status_prev) {
    if (t < 0 || t >= static_cast<int>(pv.profile.size())) {
        throw std::out_of_range("pv_output: step outside forecast");
    }
    return bus_status_prev ? pv.profile[t] : 0.0;
}

std::pair<double, double> pv_q_bounds(const PvUnit& pv, bool bus_status_prev) {
    const double cap = 0.484 * pv.rated_kw * (bus_status_prev ? 1.0 : 0.0);
    return {-cap, cap};
}

std::vector<FreqSample> simulate_vsg_step(const GfmiParams& p, double p_pre_kw,
                                          double delta_p_kw, double duration_s,
                                          double dt_sim_s) {
    if (!p.t_lp) throw std::invalid_argument("simulate_vsg_step: params.t_lp required");
    if (!(dt_sim_s > 0.0) || dt_sim_s > duration_s / 1000.0) {
        throw std::invalid_argument("simulate_vsg_step: need dt_sim <= duration/1000");
    }
    const double t_lp = *p.t_lp;
    const double dkf = p.d + p.kf;

    // States in per-unit frequency deviation: w (swing) and wm (measured).
    // 2H dw/dt = -p_load - D w - Kf wm;  T dwm/dt = w - wm.
    // The electrical load is droop-stiff at this timescale, so p_load is the
    // commanded step in output power.
    const double p_load_pre = p_pre_kw / p.s_rat;
    const double p_load_post = (p_pre_kw + delta_p_kw) / p.s_rat;

    double w = -p_load_pre / dkf;
    double wm = w;

    auto deriv = [&](double wv, double wmv, double load, double& dw, double& dwm) {
        dw = (-load - p.d * wv - p.kf * wmv) / (2.0 * p.h);
        dwm = (wv - wmv) / t_lp;
    };

    const int n = static_cast<int>(std::ceil(duration_s / dt_sim_s));
    std::vector<FreqSample> traj;
    traj.reserve(static_cast<std::size_t>(n) + 1);
    traj.push_back({0.0, p.f_star * (1.0 + w)});
    for (int i = 0; i < n; ++i) {
        const double load = p_load_post;
        double k1w, k1m, k2w, k2m, k3w, k3m, k4w, k4m;
        deriv(w, wm, load, k1w, k1m);
        deriv(w + 0.5 * dt_sim_s * k1w, wm + 0.5 * dt_sim_s * k1m, load, k2w, k2m);
        deriv(w + 0.5 * dt_sim_s * k2w, wm + 0.5 * dt_sim_s * k2m, load, k3w, k3m);
        deriv(w + dt_sim_s * k3w, wm + dt_sim_s * k3m, load, k4w, k4m);
        w += dt_sim_s / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        wm += dt_sim_s / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        if (!std::isfinite(w) || std::abs(w) > 10.0) {
            throw std::runtime_error("simulate_vsg_step: integration diverged (reduce dt_sim)");
        }
        traj.push_back({(i + 1) * dt_sim_s, p.f_star * (1.0 + w)});
    }
    return traj;
}

FreqResponse extract_response(const std::vector<FreqSample>& traj, double rocof_window_s) {
    if (traj.size() < 2) throw std::invalid_argument("extract_response: trajectory too short");
    FreqResponse r;
    r.f_qss = traj.back().f_hz;
    r.f_nadir = traj.front().f_hz;
    double max_slope = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        r.f_nadir = std::min(r.f_nadir, traj[i].f_hz);
        if (traj[i].t_s <= rocof_window_s) {
            const double slope = (traj[i].f_hz - traj[i - 1].f_hz) / (traj[i].t_s - traj[i - 1].t_s);
            if (std::abs(slope) > std::abs(max_slope)) max_slope = slope;
        }
    }
    r.rocof = max_slope;
    return r;
}

}  // namespace restoplan
