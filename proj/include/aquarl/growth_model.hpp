#pragma once

#include <stdexcept>
#include <vector>

namespace aquarl {

// Simulation failure modes. Starvation is reported through StepResult instead
// (the MDP layer treats it as an episode outcome, not an error).
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StarvedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bioenergetic constants of the Nile tilapia growth model. Defaults are the
// published calibration; validate() guards the ranges the formulas assume.
struct GrowthParams {
    double m = 0.67;           // anabolism body-weight exponent
    double n = 0.81;           // catabolism body-weight exponent
    double h = 0.8;            // food consumption coefficient [g^(1-m)/day]
    double b = 0.62;           // food assimilation efficiency
    double a = 0.53;           // fraction of assimilated food lost
    double k_min = 0.00133;    // fasting catabolism at t_min [g^(1-n)/day]
    double j = 0.0132;         // catabolism temperature slope [1/degC]
    double kappa = 4.6;        // temperature response shape
    double t_opt = 33.0;       // [degC]
    double t_min = 24.0;       // [degC]
    double t_max = 40.0;       // [degC]
    double uia_crit = 0.06;    // [mg/l]
    double uia_max = 1.4;      // [mg/l]
    double do_crit = 0.3;      // [mg/l]
    double do_min = 1.0;       // [mg/l]
    double rho = 1.0;          // photoperiod factor, range (0, 2)
    double rm_fraction = 0.03; // maximal daily ration as fraction of body weight

    void validate() const; // throws std::invalid_argument
};

// Exogenous water state for one day.
struct EnvConditions {
    double temperature = 33.0;     // [degC]
    double dissolved_oxygen = 0.3; // [mg/l]
    double uia = 0.0;              // [mg/l]
};

struct FishState {
    double weight = 6.0; // [g], must stay > 0
    int day = 0;         // days since stocking
};

// Explicit-Euler settings. The sub-step is a config knob; 1/8 day keeps the
// halving-consistency check on a 120-day full-ration run well under 0.5%.
struct Integrator {
    double sub_step = 0.125;   // [days]
    double weight_floor = 0.1; // [g]; reaching it flags starvation
};

struct StepResult {
    FishState state;
    bool starved = false;
};

// Environmental response factors, each mapping into [0, 1].
double temperature_factor(double temperature, const GrowthParams& p);
double uia_factor(double uia, const GrowthParams& p);
double do_factor(double dissolved_oxygen, const GrowthParams& p);

// Net anabolism coefficient h*rho*f*b*(1-a)*tau(T)*sigma(DO).
// feed_rate is the relative ration f in [0, 1]; values outside are rejected.
double anabolism_coefficient(double feed_rate, const EnvConditions& env,
                             const GrowthParams& p);

// Fasting catabolism coefficient k_min*exp(j*(T - t_min)).
double catabolism_coefficient(double temperature, const GrowthParams& p);

// dw/dt = psi*v(UIA)*w^m - k(T)*w^n. Rejects w <= 0.
double growth_rate(double weight, double feed_rate, const EnvConditions& env,
                   const GrowthParams& p);

// Advances the state dt_days forward under constant feeding and conditions.
// The weight is clamped at the integrator floor; if the floor is hit the
// result carries starved = true and the weight stays at the floor.
StepResult step(FishState state, double feed_rate, const EnvConditions& env,
                const GrowthParams& p, int dt_days, const Integrator& integ = {});

// Conditions and ration used to synthesize a reference growth trajectory.
struct ReferenceSchedule {
    double feed_rate = 1.0;
    EnvConditions env{}; // defaults: t_opt water, DO at critical, no ammonia
};

// Daily weights w^d(0..horizon_days) simulated under the schedule.
// Throws StarvedError if the schedule starves the fish.
std::vector<double> generate_reference(double w0, int horizon_days,
                                       const GrowthParams& p,
                                       const ReferenceSchedule& sched = {},
                                       const Integrator& integ = {});

} // namespace aquarl
