#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dgvm/rhs.hpp"

using namespace dgvm;

namespace {

double maxwellian(double v) {
  return std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
}

std::shared_ptr<const Mesh> va_mesh(int nx, int nv, double length = 4 * M_PI,
                                    double vcut = 6 * M_PI) {
  return std::make_shared<Mesh>(
      build_mesh({{0.0, length, nx, true}}, {{-vcut, vcut, nv, false}}));
}

std::shared_ptr<const Mesh> sw_mesh(int n, double length = 10 * M_PI,
                                    double vcut = 1.8) {
  return std::make_shared<Mesh>(build_mesh(
      {{0.0, length, n, true}},
      {{-vcut, vcut, n, false}, {-vcut, vcut, n, false}}));
}

SimulationState va_state(std::shared_ptr<const Mesh> pmesh, int k,
                         const PointFn& f0, const PointFn& e0) {
  SimulationState s;
  auto xm = std::make_shared<Mesh>(pmesh->x_mesh());
  s.f = l2_project(f0, pmesh, k);
  s.fields = l2_project(e0, xm, k);
  return s;
}

double total_mass(const DGField& f) {
  const double jac =
      f.mesh().element_volume() / std::pow(2.0, f.mesh().dim());
  double s = 0.0;
  for (long e = 0; e < f.n_elements(); ++e)
    s += jac * f.at(e, 0) * std::pow(2.0, 0.5 * f.mesh().dim());
  return s;
}

TEST(Moments, MaxwellianDensity) {
  auto mesh = va_mesh(8, 64);
  const DGField f = l2_project(
      [](std::span<const double> x) { return maxwellian(x[1]); }, mesh, 2);
  const Moments mom = compute_moments(f);
  for (int e = 0; e < 8; ++e) {
    const Point p{mom.rho.mesh().element_center(e)};
    const auto sp = std::span<const double>(p.data(), 1);
    EXPECT_NEAR(mom.rho.eval(sp), 1.0, 1e-10);
    EXPECT_NEAR(mom.current.eval(sp), 0.0, 1e-10);
  }
}

TEST(Moments, TwoStreamDensityIsUnit) {
  auto mesh = va_mesh(4, 96);
  const DGField f = l2_project(
      [](std::span<const double> x) {
        return x[1] * x[1] * maxwellian(x[1]);
      },
      mesh, 2);
  const Moments mom = compute_moments(f);
  const Point p{1.0, 0, 0};
  EXPECT_NEAR(mom.rho.eval(std::span<const double>(p.data(), 1)), 1.0, 1e-10);
}

TEST(Moments, WeibelBeamsCancel) {
  auto mesh = sw_mesh(12);
  const double beta = 0.01, delta = 0.5, w1 = 0.3, w2 = 0.3;
  const DGField f = l2_project(
      [=](std::span<const double> x) {
        const double v1 = x[1], v2 = x[2];
        return 1.0 / (M_PI * beta) * std::exp(-v2 * v2 / beta) *
               (delta * std::exp(-(v1 - w1) * (v1 - w1) / beta) +
                (1 - delta) * std::exp(-(v1 + w2) * (v1 + w2) / beta));
      },
      mesh, 2);
  const Moments mom = compute_moments(f);
  for (int e = 0; e < 12; ++e) {
    EXPECT_NEAR(mom.current.at(e, 0, 0) / std::sqrt(2.0), 0.0, 1e-9);
    EXPECT_NEAR(mom.current.at(e, 0, 1) / std::sqrt(2.0), 0.0, 1e-9);
  }
}

TEST(Moments, ReflectionFlipsCurrentSign) {
  auto mesh = va_mesh(6, 10, 2.0, 2.0);
  const DGField f = l2_project(
      [](std::span<const double> x) {
        return std::exp(-x[1] * x[1]) * (1.0 + 0.3 * std::sin(M_PI * x[0])) +
               0.1 * x[1];
      },
      mesh, 2);
  const Moments a = compute_moments(f);
  const Moments b = compute_moments(reflect_v(f));
  for (long e = 0; e < a.current.n_elements(); ++e)
    for (int m = 0; m < a.current.n_modes(); ++m) {
      EXPECT_NEAR(b.current.at(e, m, 0), -a.current.at(e, m, 0), 1e-14);
      EXPECT_NEAR(b.rho.at(e, m, 0), a.rho.at(e, m, 0), 1e-14);
    }
}

TEST(Reflect, InvolutionIsBitwise) {
  auto mesh = sw_mesh(5);
  DGField f(mesh, 2, 1);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& c : f.coeffs()) c = u(rng);
  const DGField g = reflect_v(reflect_v(f));
  for (size_t i = 0; i < f.coeffs().size(); ++i)
    EXPECT_EQ(f.coeffs()[i], g.coeffs()[i]);
}

TEST(Ampere, ConstantCurrentGivesZero) {
  auto xm = std::make_shared<Mesh>(va_mesh(8, 2)->x_mesh());
  Moments mom{DGField(xm, 1, 1), DGField(xm, 1, 1)};
  for (long e = 0; e < 8; ++e) mom.current.at(e, 0, 0) = 2.5 * std::sqrt(2.0);
  const DGField dE = ampere_rhs(mom);
  for (long e = 0; e < 8; ++e)
    for (int m = 0; m < dE.n_modes(); ++m)
      EXPECT_NEAR(dE.at(e, m), 0.0, 1e-14);
}

TEST(Ampere, ZeroMeanCurrentPassesThrough) {
  auto xm = std::make_shared<Mesh>(va_mesh(32, 2)->x_mesh());
  const PointFn j = [](std::span<const double> x) {
    return std::sin(0.5 * x[0]);
  };
  Moments mom{DGField(xm, 2, 1), l2_project(j, xm, 2)};
  const DGField dE = ampere_rhs(mom);
  EXPECT_LT(l2_error(dE, [&](std::span<const double> x) { return -j(x); }),
            2e-4);
  // Mean electric field stays fixed: sum of mode-0 coefficients vanishes.
  double mean = 0.0;
  for (long e = 0; e < dE.n_elements(); ++e) mean += dE.at(e, 0);
  EXPECT_NEAR(mean, 0.0, 1e-13);
}

TEST(GaussLaw, UniformDensityGivesZeroField) {
  auto xm = std::make_shared<Mesh>(va_mesh(8, 2)->x_mesh());
  const DGField rho =
      l2_project([](std::span<const double>) { return 1.0; }, xm, 2);
  const DGField E = gauss_law_init(rho, 1.0);
  for (long e = 0; e < E.n_elements(); ++e)
    for (int m = 0; m < E.n_modes(); ++m) EXPECT_NEAR(E.at(e, m), 0.0, 1e-12);
}

TEST(GaussLaw, CosinePerturbation) {
  auto xm = std::make_shared<Mesh>(va_mesh(64, 2)->x_mesh());
  const DGField rho = l2_project(
      [](std::span<const double> x) { return 1.0 + 0.5 * std::cos(0.5 * x[0]); },
      xm, 2);
  const DGField E = gauss_law_init(rho, 1.0);
  EXPECT_LT(l2_error(E,
                     [](std::span<const double> x) {
                       return std::sin(0.5 * x[0]);
                     }),
            1e-5);

  // Cross-check against cumulative trapezoid integration of rho - 1.
  const int nf = 20000;
  const double L = 4.0 * M_PI, hf = L / nf;
  std::vector<double> cum(nf + 1, 0.0);
  const auto rho_at = [&](double x) {
    const Point p{x, 0, 0};
    return rho.eval(std::span<const double>(p.data(), 1)) - 1.0;
  };
  for (int i = 0; i < nf; ++i)
    cum[i + 1] = cum[i] + 0.5 * hf * (rho_at(i * hf) + rho_at((i + 1) * hf));
  double mean = 0.0;
  for (int i = 0; i < nf; ++i) mean += cum[i] * hf / L;
  for (int i = 0; i < nf; i += 1000) {
    const Point p{i * hf, 0, 0};
    EXPECT_NEAR(E.eval(std::span<const double>(p.data(), 1)), cum[i] - mean,
                1e-4);
  }
}

TEST(GaussLaw, NonNeutralThrows) {
  auto xm = std::make_shared<Mesh>(va_mesh(8, 2)->x_mesh());
  const DGField rho =
      l2_project([](std::span<const double>) { return 1.2; }, xm, 1);
  EXPECT_THROW(gauss_law_init(rho, 1.0), std::invalid_argument);
}

TEST(VlasovRhs, ConstantStateZeroFields) {
  // With no acceleration the constant telescopes through all faces and the
  // wall flux (driven by alpha . n) vanishes too.
  auto mesh = va_mesh(6, 6, 1.0, 1.0);
  SimulationState s = va_state(
      mesh, 2, [](std::span<const double>) { return 2.0; },
      [](std::span<const double>) { return 0.0; });
  const DGField rhs = vlasov_rhs(s, SystemKind::VlasovAmpere1D1V);
  for (long e = 0; e < mesh->n_elements(); ++e)
    for (int m = 0; m < rhs.n_modes(); ++m)
      EXPECT_NEAR(rhs.at(e, m), 0.0, 1e-13);
}

TEST(VlasovRhs, ConstantLeaksOnlyThroughWalls) {
  // Constant f pushed upward by E = 1: interior residual stays zero, mass
  // leaves through the upper wall at rate f * E * L_x with zero inflow.
  auto mesh = va_mesh(6, 6, 1.0, 1.0);
  SimulationState s = va_state(
      mesh, 2, [](std::span<const double>) { return 2.0; },
      [](std::span<const double>) { return 1.0; });
  const DGField rhs = vlasov_rhs(s, SystemKind::VlasovAmpere1D1V);
  for (long e = 0; e < mesh->n_elements(); ++e) {
    const MultiIndex idx = mesh->unflatten(e);
    if (idx[1] == 0 || idx[1] == 5) continue;
    for (int m = 0; m < rhs.n_modes(); ++m)
      EXPECT_NEAR(rhs.at(e, m), 0.0, 1e-13);
  }
  EXPECT_NEAR(total_mass(rhs), -2.0 * 1.0 * 1.0, 1e-13);
}

TEST(VlasovRhs, UpwindSelectsDonorCell) {
  // f = 1 on a single element, acceleration field E = 2: the v-upper
  // neighbor receives mass at rate 2 * (x-width of the cell).
  auto mesh = va_mesh(4, 6, 2.0, 3.0);
  SimulationState s = va_state(
      mesh, 1, [](std::span<const double>) { return 0.0; },
      [](std::span<const double>) { return 2.0; });
  const int ix = 1, iv = 2;
  const MultiIndex donor{ix, iv, 0};
  const MultiIndex upper{ix, iv + 1, 0};
  const long ed = mesh->flatten(std::span<const int>(donor.data(), 2));
  const long eu = mesh->flatten(std::span<const int>(upper.data(), 2));
  s.f.at(ed, 0) = std::pow(2.0, 0.5 * 2);  // value 1 on the donor element

  const DGField rhs = vlasov_rhs(s, SystemKind::VlasovAmpere1D1V);
  const double jac = mesh->element_volume() / 4.0;
  const double gain = jac * rhs.at(eu, 0) * 2.0;  // d/dt of neighbor mass
  EXPECT_NEAR(gain, 2.0 * mesh->axis(0).h(), 1e-13);
}

// Modal coefficients of a tensor product of per-axis linear functions
// c0 + c1 * Lhat_1(xi); used to build single-element data whose trace
// vanishes on adjacent walls.
void set_tensor_linear(DGField& f, long e,
                       const std::array<std::array<double, 2>, 3>& axis_c) {
  const int dim = f.mesh().dim();
  for (int m = 0; m < f.n_modes(); ++m) {
    const MultiIndex& mi = f.basis().modes[m];
    double coef = 1.0;
    for (int a = 0; a < dim; ++a)
      coef *= mi[a] <= 1 ? axis_c[a][mi[a]] : 0.0;
    f.at(e, m) = coef;
  }
}

// Per-axis coefficients of the hat factor: 1 away from walls, (1 -+ xi)/2
// against the adjacent wall so the wall trace is exactly zero.
std::array<double, 2> wall_factor(int cell, int n_cells) {
  const double s0 = std::sqrt(2.0);   // Lhat_0(xi) = 1/sqrt(2)
  const double s1 = std::sqrt(6.0);   // (1+xi)/2 = Lhat_0/s0... coefficients
  if (cell == 0) return {1.0 / s0, 1.0 / s1};
  if (cell == n_cells - 1) return {1.0 / s0, -1.0 / s1};
  return {s0, 0.0};
}

TEST(VlasovRhs, FluxAntisymmetryAcrossInteriorFaces) {
  // Single-element support with wall traces forced to zero: the total mass
  // rate is a telescoping sum over interior faces and must vanish.
  auto mesh = va_mesh(5, 4, 2.0, 1.5);
  auto xm = std::make_shared<Mesh>(mesh->x_mesh());
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const int k = 2;
  SimulationState base;
  base.fields = l2_project(
      [](std::span<const double> x) { return 0.4 + 0.3 * std::sin(M_PI * x[0]); },
      xm, k);

  for (long e = 0; e < mesh->n_elements(); ++e) {
    const MultiIndex idx = mesh->unflatten(e);
    SimulationState s = base;
    s.f = DGField(mesh, k, 1);
    const double c = u(rng);
    set_tensor_linear(s.f, e,
                      {{{c * std::sqrt(2.0), 0.0},
                        wall_factor(idx[1], mesh->axis(1).n_cells),
                        {1.0, 0.0}}});
    const DGField rhs = vlasov_rhs(s, SystemKind::VlasovAmpere1D1V);
    const double rate = total_mass(rhs);
    EXPECT_LT(std::abs(rate), 1e-13 * std::max(1.0, c)) << "element " << e;
  }
}

TEST(VlasovRhs, FluxAntisymmetrySW) {
  auto mesh = sw_mesh(3, 4.0, 1.2);
  auto xm = std::make_shared<Mesh>(mesh->x_mesh());
  const int k = 2;
  SimulationState base;
  base.fields = l2_project(
      {[](std::span<const double> x) { return 0.2 + 0.1 * std::sin(M_PI * x[0] / 2); },
       [](std::span<const double> x) { return -0.15 + 0.05 * std::cos(M_PI * x[0] / 2); },
       [](std::span<const double> x) { return 0.3 * std::sin(M_PI * x[0] / 2); }},
      xm, k);

  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (long e = 0; e < mesh->n_elements(); ++e) {
    const MultiIndex idx = mesh->unflatten(e);
    SimulationState s = base;
    s.f = DGField(mesh, k, 1);
    const double c = u(rng);
    set_tensor_linear(s.f, e,
                      {{{c * std::sqrt(2.0), 0.0},
                        wall_factor(idx[1], mesh->axis(1).n_cells),
                        wall_factor(idx[2], mesh->axis(2).n_cells)}});
    const DGField rhs = vlasov_rhs(s, SystemKind::StreamingWeibel1D2V);
    const double rate = total_mass(rhs);
    EXPECT_LT(std::abs(rate), 1e-13) << "element " << e;
  }
}

TEST(VlasovRhs, ContinuousGlobalFieldHasExactRhs) {
  // f = v is continuous across faces; with E = 0 the exact RHS is zero
  // away from the v walls, so zero-jump upwind fluxes must reduce to the
  // central value exactly.
  auto mesh = va_mesh(4, 5, 2.0, 1.0);
  SimulationState s = va_state(
      mesh, 1, [](std::span<const double> x) { return x[1]; },
      [](std::span<const double>) { return 0.0; });
  const DGField rhs = vlasov_rhs(s, SystemKind::VlasovAmpere1D1V);
  for (long e = 0; e < mesh->n_elements(); ++e) {
    const MultiIndex idx = mesh->unflatten(e);
    if (idx[1] == 0 || idx[1] == 4) continue;  // wall outflow rows
    for (int m = 0; m < rhs.n_modes(); ++m)
      EXPECT_NEAR(rhs.at(e, m), 0.0, 1e-13);
  }
}

TEST(VlasovRhs, L2Dissipation) {
  // (vlasov_rhs(f), f) <= 0 up to roundoff for fixed fields and f vanishing
  // at the v boundary.
  auto mesh = va_mesh(12, 12, 2.0 * M_PI, 2.0);
  SimulationState s = va_state(
      mesh, 2,
      [](std::span<const double> x) {
        return std::sin(x[0]) * std::exp(-8.0 * x[1] * x[1]);
      },
      [](std::span<const double> x) { return 0.3 + 0.2 * std::sin(x[0]); });
  const DGField rhs = vlasov_rhs(s, SystemKind::VlasovAmpere1D1V);
  const double jac = mesh->element_volume() / 4.0;
  double ip = 0.0;
  for (long e = 0; e < mesh->n_elements(); ++e)
    for (int m = 0; m < s.f.n_modes(); ++m)
      ip += jac * s.f.at(e, m) * rhs.at(e, m);
  EXPECT_LE(ip, 1e-10);
}

TEST(MaxwellRhs, ConstantsAreSteady) {
  auto mesh = sw_mesh(6, 4.0, 1.0);
  auto xm = std::make_shared<Mesh>(mesh->x_mesh());
  SimulationState s;
  s.f = DGField(mesh, 1, 1);
  s.fields = l2_project({[](std::span<const double>) { return 0.7; },
                         [](std::span<const double>) { return 0.0; },
                         [](std::span<const double>) { return -0.4; }},
                        xm, 1);
  Moments mom{DGField(xm, 1, 1), DGField(xm, 1, 2)};
  const DGField d = maxwell_rhs(s, mom);
  for (long e = 0; e < d.n_elements(); ++e)
    for (int m = 0; m < d.n_modes(); ++m)
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(d.at(e, m, c), 0.0, 1e-14);
}

TEST(MaxwellRhs, PureSourceTerm) {
  auto mesh = sw_mesh(6, 4.0, 1.0);
  auto xm = std::make_shared<Mesh>(mesh->x_mesh());
  SimulationState s;
  s.f = DGField(mesh, 1, 1);
  s.fields = DGField(xm, 1, 3);
  Moments mom{DGField(xm, 1, 1), DGField(xm, 1, 2)};
  for (long e = 0; e < 6; ++e) mom.current.at(e, 0, 1) = 1.5 * std::sqrt(2.0);
  const DGField d = maxwell_rhs(s, mom);
  const Point p{1.0, 0, 0};
  EXPECT_NEAR(d.eval(std::span<const double>(p.data(), 1), kE2), -1.5, 1e-13);
  EXPECT_NEAR(d.eval(std::span<const double>(p.data(), 1), kE1), 0.0, 1e-13);
}

TEST(MaxwellRhs, CurlConvergesToDerivative) {
  // With E1 = 0 the flux is the plain average, and for even degree the
  // resulting derivative of the projection superconverges at k+1.
  const double b = 0.7, kap = 1.0;
  const int k = 2;
  double prev_err = 0.0;
  for (const int n : {16, 32}) {
    auto mesh = sw_mesh(n, 2.0 * M_PI, 1.0);
    auto xm = std::make_shared<Mesh>(mesh->x_mesh());
    SimulationState s;
    s.f = DGField(mesh, k, 1);
    s.fields = l2_project({[](std::span<const double>) { return 0.0; },
                           [](std::span<const double>) { return 0.0; },
                           [=](std::span<const double> x) {
                             return b * std::sin(kap * x[0]);
                           }},
                          xm, k);
    Moments mom{DGField(xm, k, 1), DGField(xm, k, 2)};
    const DGField d = maxwell_rhs(s, mom);
    const double err = l2_error(
        d, [=](std::span<const double> x) { return b * kap * std::cos(kap * x[0]); },
        kE1);
    if (prev_err > 0.0) EXPECT_NEAR(std::log2(prev_err / err), 3.0, 0.4);
    prev_err = err;
  }
}

TEST(MaxwellRhs, UpwindEnergyDissipation) {
  auto mesh = sw_mesh(10, 2.0 * M_PI, 1.0);
  auto xm = std::make_shared<Mesh>(mesh->x_mesh());
  SimulationState s;
  s.f = DGField(mesh, 2, 1);
  s.fields = l2_project(
      {[](std::span<const double> x) { return std::sin(x[0]) + 0.2 * std::cos(3 * x[0]); },
       [](std::span<const double>) { return 0.0; },
       [](std::span<const double> x) { return std::cos(2 * x[0]); }},
      xm, 2);
  Moments mom{DGField(xm, 2, 1), DGField(xm, 2, 2)};
  const DGField d = maxwell_rhs(s, mom);
  const double jac = 0.5 * xm->axis(0).h();
  double rate = 0.0, mean_e1 = 0.0, mean_b3 = 0.0;
  for (long e = 0; e < xm->n_elements(); ++e) {
    for (int m = 0; m < s.fields.n_modes(); ++m) {
      rate += jac * (s.fields.at(e, m, kE1) * d.at(e, m, kE1) +
                     s.fields.at(e, m, kB3) * d.at(e, m, kB3));
    }
    mean_e1 += d.at(e, 0, kE1);
    mean_b3 += d.at(e, 0, kB3);
  }
  EXPECT_LE(rate, 1e-10);
  EXPECT_NEAR(mean_e1, 0.0, 1e-13);  // telescoping fluxes conserve means
  EXPECT_NEAR(mean_b3, 0.0, 1e-13);
}

TEST(Validation, MismatchedMeshesThrow) {
  auto mesh = va_mesh(8, 8);
  auto xm_wrong = std::make_shared<Mesh>(
      build_mesh({{0.0, 4.0 * M_PI, 16, true}}, {}));
  SimulationState s;
  s.f = DGField(mesh, 1, 1);
  s.fields = DGField(xm_wrong, 1, 1);
  EXPECT_THROW(vlasov_rhs(s, SystemKind::VlasovAmpere1D1V),
               std::invalid_argument);
  // maxwell_rhs on a VA state is a usage error.
  auto xm = std::make_shared<Mesh>(mesh->x_mesh());
  s.fields = DGField(xm, 1, 1);
  Moments mom{DGField(xm, 1, 1), DGField(xm, 1, 1)};
  EXPECT_THROW(maxwell_rhs(s, mom), std::invalid_argument);
}

}  // namespace
