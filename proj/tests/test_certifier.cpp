#include <gtest/gtest.h>

#include "sitecut/certifier.hpp"
#include "sitecut/report_io.hpp"

using namespace sitecut;

namespace {

Patch two_chain() { return Patch(build_graph({{0, 1}, {1, 2}}, 3), 0, {2}); }

} // namespace

TEST(GrowSet, LineCertifiesAtSevenTenths) {
  const Patch line = gen_line(6);
  GrowOptions opts;
  opts.epsilon0 = 0.05;
  const GrowResult r = grow_set(line, line.root(), 0.7, opts);
  ASSERT_TRUE(r.certificate.has_value());
  const Certificate& c = *r.certificate;
  EXPECT_TRUE(c.rigorous());
  EXPECT_LE(c.phi_value, 0.95);
  EXPECT_TRUE(interior_of(line.graph(), c.set).contains(line.root()));
  // [-2..2] gives 2 * 0.7^2 = 0.98; one more vertex on the left gives 0.7^2 + 0.7^3
  EXPECT_NEAR(phi(line, c.set, line.root(), 0.7).value, c.phi_value, 1e-12);
  EXPECT_EQ(c.set.size(), 6u);
  EXPECT_NEAR(c.phi_value, 0.7 * 0.7 + 0.7 * 0.7 * 0.7, 1e-12);
  // the symmetric [-3..3] also certifies, with 2 * 0.7^3
  std::vector<Vertex> sym;
  for (int x = -3; x <= 3; ++x) {
    sym.push_back(*line.find_label({x, 0}));
  }
  EXPECT_NEAR(phi(line, VertexSet(sym), line.root(), 0.7).value, 0.686, 1e-12);
}

TEST(GrowSet, BinaryTreeAboveThresholdFails) {
  const Patch tree = gen_tree(2, 8);
  GrowOptions opts;
  opts.budget = 200;
  const GrowResult r = grow_set(tree, tree.root(), 0.6, opts);
  EXPECT_FALSE(r.certificate.has_value());
  EXPECT_GT(r.best_phi, 0.99);
}

TEST(GrowSet, SmallPCertifiesWithNeighborhood) {
  const Patch grid = gen_grid2d(3);
  const GrowResult r = grow_set(grid, grid.root(), 0.01);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_EQ(r.steps, 0u);
  EXPECT_EQ(r.certificate->set.size(), 5u);
  EXPECT_NEAR(r.certificate->phi_value, 4 * 0.01, 1e-12);
}

TEST(GrowSet, FrontierAdjacentCenterHasNoCertificate) {
  const GrowResult r = grow_set(gen_line(1), 1, 0.1);
  EXPECT_FALSE(r.certificate.has_value());
  EXPECT_EQ(r.best_phi, 1.0);
}

TEST(GrowSet, Preconditions) {
  const Patch line = gen_line(4);
  GrowOptions opts;
  opts.budget = 2;
  EXPECT_THROW(grow_set(line, line.root(), 0.5, opts), ContractError);
  GrowOptions bad_eps;
  bad_eps.epsilon0 = 0.0;
  EXPECT_THROW(grow_set(line, line.root(), 0.5, bad_eps), ContractError);
  EXPECT_THROW(grow_set(line, 0, 0.5), ContractError);
}

TEST(GrowSet, DeterministicAndMonotoneInP) {
  const Patch grid = gen_grid2d(3);
  GrowOptions serial;
  GrowOptions parallel;
  parallel.threads = 4;
  const GrowResult a = grow_set(grid, grid.root(), 0.3, serial);
  const GrowResult b = grow_set(grid, grid.root(), 0.3, parallel);
  ASSERT_TRUE(a.certificate.has_value());
  ASSERT_TRUE(b.certificate.has_value());
  EXPECT_EQ(a.certificate->set, b.certificate->set);
  EXPECT_EQ(a.certificate->phi_value, b.certificate->phi_value);
  for (double q : {0.05, 0.1, 0.2, 0.29}) {
    EXPECT_LE(phi(grid, a.certificate->set, grid.root(), q).value, a.certificate->phi_value + 1e-12);
  }
}

TEST(GrowSet, MonteCarloFallbackIsFlagged) {
  const Patch line = gen_line(40);
  GrowOptions opts;
  opts.budget = 81;
  opts.allow_mc = true;
  opts.exact_interior_cap = 8;
  const GrowResult r = grow_set(line, line.root(), 0.95, opts);
  ASSERT_TRUE(r.certificate.has_value());
  const Certificate& c = *r.certificate;
  EXPECT_EQ(c.method, CertMethod::monte_carlo);
  EXPECT_FALSE(c.rigorous());
  EXPECT_LE(c.phi_value + 4.0 * c.phi_std_error, 1.0 - opts.epsilon0);
  // exact value of the witness on the line: 2 p^n for S = [-n..n]
  const int n = static_cast<int>(c.set.size() / 2);
  EXPECT_LE(2 * std::pow(0.95, n), 1.0);
}

TEST(CertifyBisect, BinaryTreeStaysBelowHalf) {
  const auto family = [](int depth) { return gen_tree(2, depth); };
  const BisectResult r = certify_bisect(family, {4, 6, 8}, 0.3, 0.6, 1e-3);
  EXPECT_LE(r.certified_p, 0.5);
  EXPECT_GE(r.certified_p, 0.45);
  EXPECT_TRUE(r.certificate.rigorous());
  EXPECT_EQ(r.certificate.p, r.certified_p);
}

TEST(CertifyBisect, GridIsBelowKnownThresholdAndGrowsWithRadius) {
  // radius 1 puts the origin next to the ghost ring, so no set certifies there
  const auto family = [](int r) { return gen_grid2d(r); };
  EXPECT_THROW(certify_bisect(family, {1}, 0.05, 0.9, 1e-3), ContractError);
  double last = 0.0;
  std::vector<int> radii;
  for (int radius = 2; radius <= 4; ++radius) {
    radii.push_back(radius);
    const BisectResult r = certify_bisect(family, radii, 0.05, 0.9, 1e-3);
    EXPECT_LE(r.certified_p, 0.593);
    EXPECT_GE(r.certified_p, last);
    last = r.certified_p;
  }
  EXPECT_GT(last, 0.25);
}

TEST(CertifyBisect, RejectsFailureAtLowerEnd) {
  const auto family = [](int depth) { return gen_tree(2, depth); };
  EXPECT_THROW(certify_bisect(family, {6}, 0.55, 0.6, 1e-3), ContractError);
  EXPECT_THROW(certify_bisect(family, {6}, 0.6, 0.55, 1e-3), ContractError);
}

TEST(IntegratedBound, ClosedForm) {
  EXPECT_EQ(integrated_bound(0.4, 0.4, 0.3), 0.0);
  EXPECT_NEAR(integrated_bound(0.75, 0.5, 0.0), 0.5, 1e-15);
  EXPECT_LT(integrated_bound(0.9, 0.1, 1.0 - 1e-12), 1e-10);
  EXPECT_THROW(integrated_bound(0.3, 0.5, 0.1), ContractError);
  EXPECT_THROW(integrated_bound(0.6, 0.5, 1.0), ContractError);
}

TEST(IntegratedBound, Checks) {
  // two-vertex chain: inf phi = p' on the grid, so epsilon1 = 1 - p1 verifies the hypothesis
  const auto chain = check_integrated_bound(two_chain(), 0, 0.8, 0.5, 0.5);
  EXPECT_TRUE(chain.hypothesis_verified);
  EXPECT_TRUE(chain.holds);
  EXPECT_NEAR(chain.actual, 0.64, 1e-12);

  const auto flat = check_integrated_bound(two_chain(), 0, 0.5, 0.5, 0.5);
  EXPECT_EQ(flat.bound, 0.0);
  EXPECT_TRUE(flat.holds);

  const Patch line = gen_line(3);
  double min_phi = 1.0;
  for (int i = 0; i < 5; ++i) {
    min_phi = std::min(min_phi, exhaustive_inf_phi(line, line.root(), 0.6 + 0.05 * i).min_value);
  }
  const auto lr = check_integrated_bound(line, line.root(), 0.8, 0.6, 1.0 - min_phi);
  EXPECT_TRUE(lr.hypothesis_verified);
  EXPECT_TRUE(lr.holds);

  const auto unverified = check_integrated_bound(line, line.root(), 0.8, 0.6, 0.01);
  EXPECT_FALSE(unverified.hypothesis_verified);
  EXPECT_FALSE(unverified.holds);
}

TEST(CertificateJson, StableKeys) {
  const Patch line = gen_line(6);
  GrowOptions opts;
  opts.epsilon0 = 0.05;
  const Certificate c = *grow_set(line, line.root(), 0.7, opts).certificate;
  const Json j = to_json(c);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) {
    keys.push_back(k);
  }
  EXPECT_EQ(keys, (std::vector<std::string>{"p", "epsilon0", "center", "set_members", "phi_value",
                                            "method", "engine_version"}));
  EXPECT_EQ(j["method"], "exact");
  EXPECT_EQ(j["set_members"].size(), c.set.size());
  EXPECT_THROW(format_number(std::nan("")), ContractError);
  EXPECT_EQ(format_number(0.72), "0.72");
}
