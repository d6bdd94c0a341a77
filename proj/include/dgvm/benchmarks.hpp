// Benchmark initial conditions (Landau damping, two-stream, streaming
// Weibel), state construction, and the reversibility / convergence drivers.
#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "dgvm/config.hpp"
#include "dgvm/diagnostics.hpp"
#include "dgvm/integrator.hpp"
#include "dgvm/siac.hpp"

namespace dgvm {

/// Initial condition: distribution plus one function per field component.
struct CaseIC {
  PointFn f;
  std::vector<PointFn> fields;           // E | (E1, E2, B3)
  std::vector<std::string> field_names;  // "E" | "E1","E2","B3"
};

inline double maxwellian(double v) {
  return std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
}

/// f = f_M(v) (1 + A cos(kx)); E = (A/k) sin(kx) from Gauss's law (zero mean).
inline CaseIC landau_ic(const BenchmarkParams& p) {
  CaseIC ic;
  const double A = p.amplitude, k = p.wavenumber;
  ic.f = [A, k](std::span<const double> x) {
    return maxwellian(x[1]) * (1.0 + A * std::cos(k * x[0]));
  };
  ic.fields = {[A, k](std::span<const double> x) {
    return A / k * std::sin(k * x[0]);
  }};
  ic.field_names = {"E"};
  return ic;
}

/// f = f_TS(v) (1 + A cos(kx)) with f_TS = v^2 f_M; same field as Landau.
inline CaseIC two_stream_ic(const BenchmarkParams& p) {
  CaseIC ic = landau_ic(p);
  const double A = p.amplitude, k = p.wavenumber;
  ic.f = [A, k](std::span<const double> x) {
    return x[1] * x[1] * maxwellian(x[1]) * (1.0 + A * std::cos(k * x[0]));
  };
  return ic;
}

/// Counter-streaming beams in v1, thermal in v2; B3 = b sin(kappa0 x)
/// seeds the instability, E1 = E2 = 0.
inline CaseIC weibel_ic(const BenchmarkParams& p) {
  CaseIC ic;
  const double beta = p.beta, delta = p.delta;
  const double w1 = p.omega1, w2 = p.omega2;
  ic.f = [=](std::span<const double> x) {
    const double v1 = x[1], v2 = x[2];
    return 1.0 / (M_PI * beta) * std::exp(-v2 * v2 / beta) *
           (delta * std::exp(-(v1 - w1) * (v1 - w1) / beta) +
            (1.0 - delta) * std::exp(-(v1 + w2) * (v1 + w2) / beta));
  };
  const double b = p.b, kappa0 = p.wavenumber;
  ic.fields = {[](std::span<const double>) { return 0.0; },
               [](std::span<const double>) { return 0.0; },
               [b, kappa0](std::span<const double> x) {
                 return b * std::sin(kappa0 * x[0]);
               }};
  ic.field_names = {"E1", "E2", "B3"};
  return ic;
}

inline CaseIC benchmark_ic(BenchmarkCase c, const BenchmarkParams& p) {
  switch (c) {
    case BenchmarkCase::landau:
      return landau_ic(p);
    case BenchmarkCase::two_stream:
      return two_stream_ic(p);
    case BenchmarkCase::weibel:
      return weibel_ic(p);
  }
  throw std::invalid_argument("unknown benchmark case");
}

inline std::shared_ptr<const Mesh> benchmark_mesh(const RunConfig& cfg) {
  const int dv = cfg.kind() == SystemKind::VlasovAmpere1D1V ? 1 : 2;
  std::vector<AxisSpec> xa{{0.0, cfg.params.length, cfg.nx, true}};
  std::vector<AxisSpec> va(
      dv, AxisSpec{-cfg.params.v_cut, cfg.params.v_cut, cfg.nv, false});
  return std::make_shared<Mesh>(build_mesh(xa, va));
}

/// Project the case's initial data onto the DG spaces. Initial conditions
/// are over-integrated: the Maxwellian tails are steep on coarse meshes and
/// the neutrality budget (1e-9) is tighter than the operator quadrature.
inline SimulationState make_initial_state(const RunConfig& cfg) {
  const CaseIC ic = benchmark_ic(cfg.bench, cfg.params);
  auto pmesh = benchmark_mesh(cfg);
  auto xmesh = std::make_shared<Mesh>(pmesh->x_mesh());
  SimulationState state;
  state.f = l2_project(ic.f, pmesh, cfg.degree, cfg.degree + 8);
  state.fields = l2_project(ic.fields, xmesh, cfg.degree, cfg.degree + 8);
  state.t = 0.0;
  return state;
}

/// Reference data for the second leg of the reversibility run: the
/// v-reflected initial distribution and (for SW) the negated magnetic field.
inline CaseIC reversed_reference(BenchmarkCase c, const BenchmarkParams& p) {
  CaseIC ic = benchmark_ic(c, p);
  const PointFn f0 = ic.f;
  const int dv = c == BenchmarkCase::weibel ? 2 : 1;
  ic.f = [f0, dv](std::span<const double> x) {
    Point y{x[0], -x[1], 0.0};
    if (dv == 2) y[2] = -x[2];
    return f0(std::span<const double>(y.data(), x.size()));
  };
  if (c == BenchmarkCase::weibel) {
    const PointFn b0 = ic.fields[2];
    ic.fields[2] = [b0](std::span<const double> x) { return -b0(x); };
  }
  return ic;
}

/// Evolve to T, reverse, evolve to T again; report pre- and post-filter L2
/// and Linf errors of f and every field component against the reflected
/// initial data.
inline ErrorReport reversibility_experiment(
    const RunConfig& cfg, const StepObserver& observer = nullptr) {
  const auto wall0 = std::chrono::steady_clock::now();
  const SystemKind kind = cfg.kind();
  SimulationState state = make_initial_state(cfg);
  const TimeControls controls = cfg.controls();

  const double dt0 = select_dt(cfg.degree, controls, state.f.mesh(),
                               state.fields, kind);
  long steps = 0;
  const StepObserver counter = [&](const SimulationState& s, long step) {
    if (step > 0) ++steps;
    if (observer) observer(s, step);
  };
  state = run_reversible(std::move(state), kind, controls, counter);

  const CaseIC ref = reversed_reference(cfg.bench, cfg.params);

  ErrorReport report;
  report.nx = cfg.nx;
  report.nv = cfg.nv;
  report.degree = cfg.degree;
  report.t_final = cfg.t_final;
  report.dt = dt0;
  report.n_steps = steps;
  report.filtered = cfg.filter;

  QuantityErrors qf;
  qf.name = "f";
  const NormPair fpre = error_norms(state.f, ref.f);
  qf.l2 = fpre.l2;
  qf.linf = fpre.linf;
  report.quantities.push_back(qf);
  for (size_t c = 0; c < ref.fields.size(); ++c) {
    QuantityErrors qe;
    qe.name = ref.field_names[c];
    const NormPair p =
        error_norms(state.fields, ref.fields[c], static_cast<int>(c));
    qe.l2 = p.l2;
    qe.linf = p.linf;
    report.quantities.push_back(qe);
  }

  if (cfg.filter) {
    const SiacKernel pker = make_kernel(cfg.degree, state.f.mesh());
    const FilteredSample fs = postprocess_field(state.f, pker);
    const NormPair fpost = fs.error_vs(ref.f);
    report.quantities[0].l2_post = fpost.l2;
    report.quantities[0].linf_post = fpost.linf;
    const SiacKernel xker = make_kernel(cfg.degree, state.fields.mesh());
    for (size_t c = 0; c < ref.fields.size(); ++c) {
      const FilteredSample es = postprocess_field(
          state.fields, xker, 0, static_cast<int>(c));
      const NormPair p = es.error_vs(ref.fields[c]);
      report.quantities[c + 1].l2_post = p.l2;
      report.quantities[c + 1].linf_post = p.linf;
    }
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  return report;
}

/// Reversibility runs over a refinement sequence (nx = nv = each entry).
/// on_row, when given, sees the table after each completed mesh so callers
/// can flush partial results.
inline ConvergenceTable run_convergence_study(
    const RunConfig& base, const std::vector<int>& meshes,
    const std::function<void(const ConvergenceTable&)>& on_row = nullptr,
    const StepObserver& observer = nullptr) {
  ConvergenceTable table;
  for (const int n : meshes) {
    RunConfig cfg = base;
    cfg.nx = n;
    cfg.nv = n;
    table.rows.push_back(reversibility_experiment(cfg, observer));
    if (on_row) on_row(table);
  }
  return table;
}

}  // namespace dgvm
