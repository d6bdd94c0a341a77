#include <gtest/gtest.h>

#include <cmath>

#include "dgvm/mesh.hpp"

using namespace dgvm;

namespace {

Mesh landau_mesh(int n) {
  return build_mesh({{0.0, 4.0 * M_PI, n, true}},
                    {{-6.0 * M_PI, 6.0 * M_PI, n, false}});
}

TEST(Mesh, LandauMeshCounts) {
  const Mesh m = landau_mesh(32);
  EXPECT_EQ(m.n_elements(), 1024);
  EXPECT_NEAR(m.axis(0).h(), 4.0 * M_PI / 32, 1e-15);
  EXPECT_EQ(m.dim_x(), 1);
  EXPECT_EQ(m.dim_v(), 1);
}

TEST(Mesh, SingleElementCenter) {
  const Mesh m = build_mesh({{0.0, 1.0, 1, true}}, {{-1.0, 1.0, 1, false}});
  EXPECT_EQ(m.n_elements(), 1);
  const Point c = m.element_center(0);
  EXPECT_DOUBLE_EQ(c[0], 0.5);
  EXPECT_DOUBLE_EQ(c[1], 0.0);
}

TEST(Mesh, WeibelMeshCounts) {
  const Mesh m = build_mesh({{0.0, 2.0 * M_PI / 0.2, 20, true}},
                            {{-1.8, 1.8, 20, false}, {-1.8, 1.8, 20, false}});
  EXPECT_EQ(m.n_elements(), 8000);
  EXPECT_EQ(m.dim(), 3);
}

TEST(Mesh, NeighborWrapAndWalls) {
  const Mesh m = build_mesh({{0.0, 1.0, 4, true}}, {{-1.0, 1.0, 4, false}});
  EXPECT_EQ(m.neighbor_index(3, 0, true), 0);   // periodic wrap in x
  EXPECT_EQ(m.neighbor_index(0, 0, false), 3);
  EXPECT_EQ(m.neighbor_index(3, 1, true), Mesh::kBoundary);  // v wall
  EXPECT_EQ(m.neighbor_index(2, 1, true), 3);                // interior
  EXPECT_EQ(m.neighbor_index(0, 1, false), Mesh::kBoundary);
}

TEST(Mesh, NeighborInvolution) {
  const Mesh m = landau_mesh(5);
  for (int a = 0; a < m.dim(); ++a)
    for (int c = 0; c < m.axis(a).n_cells; ++c) {
      const int up = m.neighbor_index(c, a, true);
      if (up != Mesh::kBoundary) EXPECT_EQ(m.neighbor_index(up, a, false), c);
      const int dn = m.neighbor_index(c, a, false);
      if (dn != Mesh::kBoundary) EXPECT_EQ(m.neighbor_index(dn, a, true), c);
    }
}

TEST(Mesh, VolumeSumMatchesDomain) {
  const Mesh m = landau_mesh(17);
  const double domain = 4.0 * M_PI * 12.0 * M_PI;
  const double total = m.element_volume() * m.n_elements();
  EXPECT_NEAR(total, domain, 1e-14 * domain);
}

TEST(Mesh, FlattenUnflattenBijection) {
  const Mesh m = build_mesh({{0.0, 1.0, 3, true}},
                            {{-1.0, 1.0, 4, false}, {-2.0, 2.0, 5, false}});
  for (long e = 0; e < m.n_elements(); ++e) {
    const MultiIndex idx = m.unflatten(e);
    EXPECT_EQ(m.flatten(std::span<const int>(idx.data(), m.dim())), e);
  }
}

TEST(Mesh, LocateAndReference) {
  const Mesh m = landau_mesh(8);
  EXPECT_EQ(m.locate(0, 0.1), 0);
  EXPECT_EQ(m.locate(0, 4.0 * M_PI + 0.1), 0);  // periodic wrap
  EXPECT_THROW(m.locate(1, 100.0), std::domain_error);
  const int c = m.locate(1, 0.3);
  const double xi = m.to_reference(1, c, 0.3);
  EXPECT_NEAR(m.from_reference(1, c, xi), 0.3, 1e-13);
}

TEST(Mesh, RejectsBadAxes) {
  EXPECT_THROW(build_mesh({{1.0, 0.0, 4, true}}, {{-1, 1, 4, false}}),
               std::invalid_argument);
  EXPECT_THROW(build_mesh({{0.0, 1.0, 0, true}}, {{-1, 1, 4, false}}),
               std::invalid_argument);
  // x must be periodic, v must not be.
  EXPECT_THROW(build_mesh({{0.0, 1.0, 4, false}}, {{-1, 1, 4, false}}),
               std::invalid_argument);
  EXPECT_THROW(build_mesh({{0.0, 1.0, 4, true}}, {{-1, 1, 4, true}}),
               std::invalid_argument);
}

TEST(Mesh, XSubMesh) {
  const Mesh m = landau_mesh(8);
  const Mesh xm = m.x_mesh();
  EXPECT_EQ(xm.dim(), 1);
  EXPECT_EQ(xm.n_elements(), 8);
  EXPECT_TRUE(xm.axis(0) == m.axis(0));
}

}  // namespace
