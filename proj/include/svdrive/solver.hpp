#pragma once

// Fixed-step classical Runge-Kutta integration.

#include <cmath>
#include <type_traits>
#include <utility>

#include "svdrive/errors.hpp"

namespace svdrive {

struct IntegratorConfig {
  double dt = 1.0 / 70000.0;

  // Ts/10 for a carrier at fsw.
  static IntegratorConfig for_switching_frequency(double fsw) { return {0.1 / fsw}; }
};

enum class Rk4Stage { k1, k2, k3, k4 };

// Sub-interval of [t, t+dt] (as fractions of dt) whose length equals the
// stage's quadrature weight: 1/6, 2/6, 2/6, 1/6.
struct StageSpan {
  double begin;
  double end;
};

constexpr StageSpan stage_span(Rk4Stage s) {
  switch (s) {
    case Rk4Stage::k1: return {0.0, 1.0 / 6.0};
    case Rk4Stage::k2: return {1.0 / 6.0, 0.5};
    case Rk4Stage::k3: return {0.5, 5.0 / 6.0};
    case Rk4Stage::k4: return {5.0 / 6.0, 1.0};
  }
  return {0.0, 1.0};
}

inline bool all_finite(double x) { return std::isfinite(x); }

// One RK4 step of dx/dt = f(x, t). A right-hand side that also accepts an
// Rk4Stage argument is told which stage it is evaluating, so forcing terms
// can be averaged over the stage's quadrature span.
template <typename State, typename F>
State rk4_step(F&& f, const State& x, double t, double dt) {
  auto eval = [&](const State& xs, double ts, Rk4Stage stage) -> State {
    State k;
    if constexpr (std::is_invocable_v<F&, const State&, double, Rk4Stage>) {
      k = f(xs, ts, stage);
    } else {
      k = f(xs, ts);
    }
    if (!all_finite(k)) throw IntegrationDiverged(ts);
    return k;
  };
  const double half = dt / 2.0;
  const State k1 = eval(x, t, Rk4Stage::k1);
  const State k2 = eval(x + half * k1, t + half, Rk4Stage::k2);
  const State k3 = eval(x + half * k2, t + half, Rk4Stage::k3);
  const State k4 = eval(x + dt * k3, t + dt, Rk4Stage::k4);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace svdrive
