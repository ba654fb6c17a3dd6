#pragma once

namespace aquarl {

// One transition of a finite deterministic MDP. next < 0 means the episode
// ended in the terminal state (which carries no Q entries).
struct EnvStep {
    int next = -1;
    double reward = 0.0;
    bool done = true;
};

// Minimal finite-MDP surface the trainer and the value-iteration solver work
// against. States and actions are dense 0-based indices; step() must be a
// pure function of (state, action).
class Environment {
public:
    virtual ~Environment() = default;
    virtual int state_count() const = 0;
    virtual int action_count() const = 0;
    virtual int initial_state() const = 0;
    virtual EnvStep step(int state, int action) const = 0;
};

} // namespace aquarl
