#pragma once

// Squirrel-cage induction machine in the stationary q-d frame, flux linkages
// as states, plus the per-phase steady-state equivalent circuit.

#include <cmath>
#include <complex>

#include "svdrive/errors.hpp"
#include "svdrive/svpwm.hpp"

namespace svdrive {

// Nameplate record in ohms at base frequency.
struct Nameplate {
  double r1 = 0.0425;
  double r2 = 0.0425;
  double x1 = 0.284;
  double x2 = 0.284;
  double xm = 8.51;
  double j = 2.0;
  int poles = 4;
  double f_base = 60.0;
  double v_rated_ll = 460.0;
  double slip_rated = 0.0177;
};

// 100 HP, 4 pole, 60 Hz, 460 V reference machine.
inline Nameplate reference_nameplate() { return Nameplate{}; }

struct MachineParams {
  double rs = 0.0;
  double rr = 0.0;
  double lls = 0.0;
  double llr = 0.0;
  double lm = 0.0;
  int poles = 4;
  double j = 0.0;
  double f_base = 60.0;
  double v_rated_ll = 460.0;
  double slip_rated = 0.0;

  double ls() const { return lls + lm; }
  double lr() const { return llr + lm; }
  double determinant() const { return ls() * lr() - lm * lm; }
  double pole_pairs() const { return poles / 2.0; }
  double omega_base() const { return two_pi * f_base; }
  // Synchronous mechanical speed at base frequency, rad/s.
  double omega_sync_mech() const { return omega_base() / pole_pairs(); }
};

inline MachineParams params_from_nameplate(const Nameplate& n) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(n.x1) || !positive(n.x2) || !positive(n.xm)) {
    throw InvalidInput("nameplate reactances must be > 0");
  }
  if (!positive(n.r1) || !positive(n.r2)) throw InvalidInput("nameplate resistances must be > 0");
  if (!positive(n.f_base)) throw InvalidInput("base frequency must be > 0");
  if (!positive(n.j)) throw InvalidInput("inertia must be > 0");
  if (n.poles <= 0 || n.poles % 2 != 0) throw InvalidInput("pole count must be even and > 0");
  if (!positive(n.v_rated_ll)) throw InvalidInput("rated voltage must be > 0");
  if (!(n.slip_rated >= 0.0)) throw InvalidInput("rated slip must be >= 0");

  const double wb = two_pi * n.f_base;
  MachineParams p;
  p.rs = n.r1;
  p.rr = n.r2;
  p.lls = n.x1 / wb;
  p.llr = n.x2 / wb;
  p.lm = n.xm / wb;
  p.poles = n.poles;
  p.j = n.j;
  p.f_base = n.f_base;
  p.v_rated_ll = n.v_rated_ll;
  p.slip_rated = n.slip_rated;
  return p;
}

// Flux linkages (V*s) and electrical rotor speed (rad/s).
struct MachineState {
  double lam_qs = 0.0;
  double lam_ds = 0.0;
  double lam_qr = 0.0;
  double lam_dr = 0.0;
  double omega_r = 0.0;

  friend MachineState operator+(const MachineState& x, const MachineState& y) {
    return {x.lam_qs + y.lam_qs, x.lam_ds + y.lam_ds, x.lam_qr + y.lam_qr,
            x.lam_dr + y.lam_dr, x.omega_r + y.omega_r};
  }
  friend MachineState operator*(double k, const MachineState& x) {
    return {k * x.lam_qs, k * x.lam_ds, k * x.lam_qr, k * x.lam_dr, k * x.omega_r};
  }
  friend bool all_finite(const MachineState& x) {
    return std::isfinite(x.lam_qs) && std::isfinite(x.lam_ds) && std::isfinite(x.lam_qr) &&
           std::isfinite(x.lam_dr) && std::isfinite(x.omega_r);
  }
  friend bool operator==(const MachineState&, const MachineState&) = default;
};

struct DqCurrents {
  double iqs = 0.0;
  double ids = 0.0;
  double iqr = 0.0;
  double idr = 0.0;
};

struct MachineOutputs {
  DqCurrents dq;
  double ia = 0.0;
  double ib = 0.0;
  double ic = 0.0;
  double te = 0.0;
  double omega_m = 0.0;
  double speed_pu = 0.0;
};

inline DqCurrents flux_to_currents(const MachineState& s, const MachineParams& p) {
  const double d = p.determinant();
  if (!(d > 0.0)) throw SingularParameter("inductance matrix is singular (ls*lr - lm^2 <= 0)");
  const double ls = p.ls(), lr = p.lr(), lm = p.lm;
  return {(lr * s.lam_qs - lm * s.lam_qr) / d, (lr * s.lam_ds - lm * s.lam_dr) / d,
          (ls * s.lam_qr - lm * s.lam_qs) / d, (ls * s.lam_dr - lm * s.lam_ds) / d};
}

// Inductance relation lambda = L * i, the inverse of flux_to_currents.
inline MachineState currents_to_flux(const DqCurrents& i, double omega_r, const MachineParams& p) {
  return {p.ls() * i.iqs + p.lm * i.iqr, p.ls() * i.ids + p.lm * i.idr,
          p.lr() * i.iqr + p.lm * i.iqs, p.lr() * i.idr + p.lm * i.ids, omega_r};
}

inline double electromagnetic_torque(const MachineState& s, const DqCurrents& i,
                                     const MachineParams& p) {
  return 1.5 * p.pole_pairs() * (s.lam_ds * i.iqs - s.lam_qs * i.ids);
}

inline MachineState state_derivative(const MachineState& s, double vqs, double vds, double tl,
                                     const MachineParams& p) {
  const DqCurrents i = flux_to_currents(s, p);
  const double te = electromagnetic_torque(s, i, p);
  // Rotor voltage terms for the V_qds = Vq - jVd convention: the rotor
  // circuit is current-free when omega_r equals the supply angular speed.
  return {vqs - p.rs * i.iqs,
          vds - p.rs * i.ids,
          -p.rr * i.iqr + s.omega_r * s.lam_dr,
          -p.rr * i.idr - s.omega_r * s.lam_qr,
          p.pole_pairs() * (te - tl) / p.j};
}

inline MachineOutputs machine_outputs(const MachineState& s, const MachineParams& p) {
  MachineOutputs out;
  out.dq = flux_to_currents(s, p);
  const ThreePhase abc = inverse_clarke(out.dq.iqs, out.dq.ids);
  out.ia = abc.a;
  out.ib = abc.b;
  out.ic = abc.c;
  out.te = electromagnetic_torque(s, out.dq, p);
  out.omega_m = s.omega_r / p.pole_pairs();
  out.speed_pu = out.omega_m / p.omega_sync_mech();
  return out;
}

// Steady-state torque from the per-phase equivalent circuit (Thevenin form),
// at base frequency with rms phase voltage v_phase_rms.
inline double equivalent_circuit_torque(double slip, double v_phase_rms, const MachineParams& p) {
  if (slip == 0.0) return 0.0;
  using cd = std::complex<double>;
  const double wb = p.omega_base();
  const cd zs{p.rs, wb * p.lls};
  const cd zm{0.0, wb * p.lm};
  const cd v_th = v_phase_rms * zm / (zs + zm);
  const cd z_th = zs * zm / (zs + zm);
  const cd z_r{p.rr / slip, wb * p.llr};
  const double i2 = std::abs(v_th / (z_th + z_r));
  return 3.0 * i2 * i2 * (p.rr / slip) / p.omega_sync_mech();
}

}  // namespace svdrive
