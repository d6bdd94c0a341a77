// SSP-RK3 time stepping with the degree-dependent CFL rules used for the
// convergence studies, plus the time-reversibility experiment driver.
#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "dgvm/rhs.hpp"

namespace dgvm {

/// Raised when a stage produces non-finite coefficients.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double t, double dt)
      : std::runtime_error(format(t, dt)), t_(t), dt_(dt) {}
  double t() const { return t_; }
  double dt() const { return dt_; }

 private:
  static std::string format(double t, double dt) {
    std::ostringstream os;
    os << "non-finite solution coefficients at t=" << t << " (dt=" << dt
       << ")";
    return os.str();
  }
  double t_ = 0.0;
  double dt_ = 0.0;
};

enum class DtMode { adaptive, frozen };

struct TimeControls {
  double cfl = 0.1;
  double t_final = 1.0;
  DtMode dt_mode = DtMode::adaptive;
  double e_max_floor = 1e-8;
  // Exponent on the mesh widths in the dt rule; 0 selects by degree
  // (1, 5/3, 7/3 for k = 1, 2, 3).
  double dt_exponent_override = 0.0;
};

inline double dt_exponent(int degree) {
  switch (degree) {
    case 1:
      return 1.0;
    case 2:
      return 5.0 / 3.0;
    case 3:
      return 7.0 / 3.0;
    default:
      throw std::invalid_argument("dt rule defined for degrees 1..3 only");
  }
}

inline double default_cfl(int degree, SystemKind kind) {
  if (kind == SystemKind::StreamingWeibel1D2V) return 0.1;
  return degree == 2 ? 0.2 : 0.1;
}

/// Field magnitude entering the acceleration CFL term, maximized over the
/// per-cell quadrature nodes: |E| for VA, |E1|+|E2|+V_c|B3| for SW.
inline double field_max(const DGField& fields, SystemKind kind, double v_cut) {
  const Quadrature1D line = gauss_legendre(fields.degree() + 2);
  const std::vector<double> vals = detail::field_at_line_nodes(fields, line);
  const int nc = fields.n_comp();
  double m = 0.0;
  const long n_samples = static_cast<long>(vals.size()) / nc;
  for (long i = 0; i < n_samples; ++i) {
    double mag;
    if (kind == SystemKind::VlasovAmpere1D1V) {
      mag = std::abs(vals[i * nc + kE1]);
    } else {
      mag = std::abs(vals[i * nc + kE1]) + std::abs(vals[i * nc + kE2]) +
            v_cut * std::abs(vals[i * nc + kB3]);
    }
    m = std::max(m, mag);
  }
  return m;
}

/// dt = CFL / (V_c / dx^e + E_max / dv^e), exponent e per degree.
inline double select_dt(int degree, const TimeControls& controls,
                        const Mesh& mesh, const DGField& fields,
                        SystemKind kind) {
  const double e = controls.dt_exponent_override > 0.0
                       ? controls.dt_exponent_override
                       : dt_exponent(degree);
  const double dx = mesh.axis(0).h();
  double dv = mesh.axis(1).h();
  double v_cut = std::abs(mesh.axis(1).hi);
  for (int a = 1; a < mesh.dim(); ++a) {
    dv = std::min(dv, mesh.axis(a).h());
    v_cut = std::max(v_cut, std::abs(mesh.axis(a).hi));
  }
  const double e_max =
      std::max(field_max(fields, kind, v_cut), controls.e_max_floor);
  const double dt =
      controls.cfl / (v_cut / std::pow(dx, e) + e_max / std::pow(dv, e));
  if (!(dt > 0.0)) throw std::invalid_argument("computed dt is not positive");
  return dt;
}

using RhsFn = std::function<StateDeriv(const SimulationState&)>;

/// One Shu-Osher SSP-RK3 step; f and fields advance through shared stages.
/// Stages are combined as u0 + c*((u + dt L) - u0) so that a vanishing RHS
/// reproduces the input bitwise.
inline SimulationState ssp_rk3_step(const SimulationState& state, double dt,
                                    const RhsFn& rhs) {
  const auto euler = [&](const SimulationState& u, const StateDeriv& d) {
    SimulationState out = u;
    for (size_t i = 0; i < out.f.coeffs().size(); ++i)
      out.f.coeffs()[i] += dt * d.df.coeffs()[i];
    for (size_t i = 0; i < out.fields.coeffs().size(); ++i)
      out.fields.coeffs()[i] += dt * d.dfields.coeffs()[i];
    return out;
  };
  const auto convex = [&](const SimulationState& base, SimulationState u,
                          double c) {
    for (size_t i = 0; i < u.f.coeffs().size(); ++i) {
      const double b = base.f.coeffs()[i];
      u.f.coeffs()[i] = b + c * (u.f.coeffs()[i] - b);
    }
    for (size_t i = 0; i < u.fields.coeffs().size(); ++i) {
      const double b = base.fields.coeffs()[i];
      u.fields.coeffs()[i] = b + c * (u.fields.coeffs()[i] - b);
    }
    return u;
  };

  SimulationState u1 = euler(state, rhs(state));
  SimulationState u2 = convex(state, euler(u1, rhs(u1)), 0.25);
  SimulationState u3 = convex(state, euler(u2, rhs(u2)), 2.0 / 3.0);
  u3.t = state.t + dt;
  if (!u3.f.all_finite() || !u3.fields.all_finite())
    throw DivergenceError(state.t, dt);
  return u3;
}

/// Per-step observer: called with the state after each accepted step.
using StepObserver = std::function<void(const SimulationState&, long step)>;

/// Integrate to controls.t_final. The last step is clipped to land exactly
/// on the final time. In frozen mode dt comes from the initial fields.
inline SimulationState run(SimulationState state, SystemKind kind,
                           const TimeControls& controls,
                           const StepObserver& observer = nullptr) {
  validate_state(state, kind);
  const int degree = state.f.degree();
  const RhsFn rhs = [kind](const SimulationState& s) {
    return state_rhs(s, kind);
  };
  const double t_end = controls.t_final;
  double dt_frozen = 0.0;
  if (controls.dt_mode == DtMode::frozen)
    dt_frozen = select_dt(degree, controls, state.f.mesh(), state.fields, kind);
  long step = 0;
  if (observer) observer(state, step);
  while (state.t < t_end - 1e-14 * std::max(1.0, t_end)) {
    double dt = controls.dt_mode == DtMode::frozen
                    ? dt_frozen
                    : select_dt(degree, controls, state.f.mesh(), state.fields,
                                kind);
    if (state.t + dt > t_end) dt = t_end - state.t;
    state = ssp_rk3_step(state, dt, rhs);
    ++step;
    if (observer) observer(state, step);
  }
  state.t = t_end;
  return state;
}

/// Flip the state for the reversibility experiment: f(x,v) -> f(x,-v) and
/// B -> -B; the electric field is left unchanged.
inline SimulationState reverse_state(const SimulationState& state,
                                     SystemKind kind) {
  SimulationState out = state;
  out.f = reflect_v(state.f);
  if (kind == SystemKind::StreamingWeibel1D2V) {
    for (long e = 0; e < out.fields.n_elements(); ++e)
      for (int m = 0; m < out.fields.n_modes(); ++m)
        out.fields.at(e, m, kB3) = -state.fields.at(e, m, kB3);
  }
  out.t = 0.0;
  return out;
}

/// Evolve to T, reverse, evolve to T again. The result approximates the
/// v-reflected initial data (with B negated) up to twice the evolution error.
inline SimulationState run_reversible(SimulationState state, SystemKind kind,
                                      const TimeControls& controls,
                                      const StepObserver& observer = nullptr) {
  state = run(std::move(state), kind, controls, observer);
  state = reverse_state(state, kind);
  return run(std::move(state), kind, controls, observer);
}

}  // namespace dgvm
