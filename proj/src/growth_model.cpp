#include "aquarl/growth_model.hpp"

#include <cmath>

namespace aquarl {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

void GrowthParams::validate() const {
    require(m > 0.0 && m < 1.0, "growth params: m must be in (0, 1)");
    require(n > 0.0 && n < 1.0, "growth params: n must be in (0, 1)");
    require(h > 0.0, "growth params: h must be positive");
    require(b > 0.0 && b <= 1.0, "growth params: b must be in (0, 1]");
    require(a >= 0.0 && a < 1.0, "growth params: a must be in [0, 1)");
    require(k_min > 0.0, "growth params: k_min must be positive");
    require(kappa > 0.0, "growth params: kappa must be positive");
    require(t_min < t_opt && t_opt < t_max,
            "growth params: need t_min < t_opt < t_max");
    require(uia_crit < uia_max, "growth params: need uia_crit < uia_max");
    require(rho > 0.0 && rho < 2.0, "growth params: rho must be in (0, 2)");
    require(rm_fraction > 0.0, "growth params: rm_fraction must be positive");
}

double temperature_factor(double temperature, const GrowthParams& p) {
    if (temperature > p.t_opt) {
        const double x = (temperature - p.t_opt) / (p.t_max - p.t_opt);
        return std::exp(-p.kappa * x * x * x * x);
    }
    if (temperature < p.t_opt) {
        const double x = (p.t_opt - temperature) / (p.t_opt - p.t_min);
        return std::exp(-p.kappa * x * x * x * x);
    }
    return 1.0;
}

double uia_factor(double uia, const GrowthParams& p) {
    if (uia <= p.uia_crit) return 1.0;
    if (uia < p.uia_max) return (p.uia_max - uia) / (p.uia_max - p.uia_crit);
    return 0.0;
}

double do_factor(double dissolved_oxygen, const GrowthParams& p) {
    // With the published do_crit < do_min the ramp interval is empty and the
    // factor degenerates to a step at do_crit, boundary included.
    if (dissolved_oxygen >= p.do_crit) return 1.0;
    if (dissolved_oxygen > p.do_min)
        return (dissolved_oxygen - p.do_min) / (p.do_crit - p.do_min);
    return 0.0;
}

double anabolism_coefficient(double feed_rate, const EnvConditions& env,
                             const GrowthParams& p) {
    require(feed_rate >= 0.0 && feed_rate <= 1.0,
            "anabolism: feed rate must be in [0, 1]");
    return p.h * p.rho * feed_rate * p.b * (1.0 - p.a) *
           temperature_factor(env.temperature, p) *
           do_factor(env.dissolved_oxygen, p);
}

double catabolism_coefficient(double temperature, const GrowthParams& p) {
    return p.k_min * std::exp(p.j * (temperature - p.t_min));
}

double growth_rate(double weight, double feed_rate, const EnvConditions& env,
                   const GrowthParams& p) {
    require(weight > 0.0, "growth rate: weight must be positive");
    const double psi = anabolism_coefficient(feed_rate, env, p);
    const double k = catabolism_coefficient(env.temperature, p);
    return psi * uia_factor(env.uia, p) * std::pow(weight, p.m) -
           k * std::pow(weight, p.n);
}

StepResult step(FishState state, double feed_rate, const EnvConditions& env,
                const GrowthParams& p, int dt_days, const Integrator& integ) {
    require(state.weight > 0.0, "step: weight must be positive");
    require(dt_days > 0, "step: dt must be positive");
    require(integ.sub_step > 0.0, "step: sub-step must be positive");

    // Constant coefficients over the step; only w varies.
    const double psi_v = anabolism_coefficient(feed_rate, env, p) *
                         uia_factor(env.uia, p);
    const double k = catabolism_coefficient(env.temperature, p);
    if (!std::isfinite(psi_v) || !std::isfinite(k))
        throw NonFiniteError("step: non-finite growth coefficients");

    const int subs_per_day = static_cast<int>(std::lround(1.0 / integ.sub_step));
    require(subs_per_day >= 1 &&
                std::abs(subs_per_day * integ.sub_step - 1.0) < 1e-9,
            "step: sub-step must divide one day");

    double w = state.weight;
    bool starved = false;
    for (int d = 0; d < dt_days && !starved; ++d) {
        for (int s = 0; s < subs_per_day; ++s) {
            w += (psi_v * std::pow(w, p.m) - k * std::pow(w, p.n)) * integ.sub_step;
            if (!std::isfinite(w))
                throw NonFiniteError("step: weight became non-finite");
            if (w <= integ.weight_floor) {
                w = integ.weight_floor;
                starved = true;
                break;
            }
        }
    }
    return {FishState{w, state.day + dt_days}, starved};
}

std::vector<double> generate_reference(double w0, int horizon_days,
                                       const GrowthParams& p,
                                       const ReferenceSchedule& sched,
                                       const Integrator& integ) {
    require(w0 > 0.0, "reference: w0 must be positive");
    require(horizon_days >= 0, "reference: horizon must be non-negative");

    std::vector<double> daily;
    daily.reserve(static_cast<std::size_t>(horizon_days) + 1);
    FishState state{w0, 0};
    daily.push_back(state.weight);
    for (int d = 0; d < horizon_days; ++d) {
        const StepResult r = step(state, sched.feed_rate, sched.env, p, 1, integ);
        if (r.starved)
            throw StarvedError("reference: schedule starves the fish at day " +
                               std::to_string(d + 1));
        state = r.state;
        daily.push_back(state.weight);
    }
    return daily;
}

} // namespace aquarl
