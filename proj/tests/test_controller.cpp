#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "platoon/controller.hpp"
#include "platoon/error.hpp"

using namespace platoon;

namespace {

Vec random_vec(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

Mat permutation(const std::vector<int>& perm) {
  const auto n = static_cast<int>(perm.size());
  Mat p = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, perm[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("reference gains") {
  const ControllerConfig c = ControllerConfig::reference_preset(4);
  CHECK(c.k1 == Vec::Constant(4, 7.0));
  CHECK(c.k2 == Vec::Constant(4, 21.0));
  CHECK(c.k3 == Vec::Constant(4, 24.0));
  CHECK(c.eps1 == 100.0);
  CHECK(c.eps2 == 50.0);
  CHECK(c.kappa1 == 0.5);
  CHECK(c.kappa2 == 0.5);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("gain validation") {
  ControllerConfig c = ControllerConfig::scalar_gains(4, 7.0, 5.0, 24.0);
  CHECK_THROWS_AS(c.validate(), Error);
  c = ControllerConfig::scalar_gains(4, 7.0, 21.0, 24.0);
  c.k3(2) = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = ControllerConfig::scalar_gains(4, 7.0, 21.0, 24.0);
  c.k2 = Vec::Constant(3, 21.0);
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("gain conditions with the reference gains") {
  const GainReport r = check_gain_conditions(ControllerConfig::reference_preset(4));
  CHECK(r.cond_a);
  CHECK(r.cond_b);
  CHECK(r.margin_a == 35.0);
  CHECK(r.margin_b == 0.0);

  ControllerConfig hot = ControllerConfig::reference_preset(4);
  hot.k3(1) = 30.0;  // min K3 is unchanged
  CHECK(check_gain_conditions(hot).cond_b);
  hot.k3 = Vec::Constant(4, 25.0);
  CHECK_FALSE(check_gain_conditions(hot).cond_b);
  CHECK(check_gain_conditions(hot).margin_b == -1.0);
}

TEST_CASE("property: signed_direction has norm 0 or 1") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> expo(-14.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 9;
    const Vec w = random_vec(rng, n, std::pow(10.0, expo(rng)));
    const Vec s = signed_direction(w, 1e-9);
    const double norm = s.norm();
    if (w.norm() > 1e-9) {
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
      CHECK((s * w.norm() - w).norm() <= 1e-12 * w.norm());
    } else {
      CHECK(norm == 0.0);
    }
  }
  CHECK(signed_direction(Vec::Zero(3), 1e-9).isZero());
}

TEST_CASE("virtual laws") {
  const Topology t = Topology::preset(TopologyPreset::BidirectionalLeader, 4);
  const ControllerConfig c = ControllerConfig::reference_preset(4);
  Vec e1(4);
  e1 << 0.5, -1.0, 0.25, 2.0;
  CHECK(virtual_ev_star(e1, c) == -7.0 * e1);
  const Vec e2 = Vec::LinSpaced(4, -1.0, 1.0);
  const Vec dv = Vec::Constant(4, 0.3);
  const Vec expected = t.h().fullPivLu().solve(-21.0 * e2 - dv);
  CHECK((virtual_ea_star(e2, dv, c, t) - expected).norm() < 1e-12);
}

TEST_CASE("adaptive rates") {
  const Topology t = Topology::preset(TopologyPreset::BidirectionalLeader, 3);
  ControllerConfig c = ControllerConfig::reference_preset(3);
  const Vec dv = Vec::Constant(3, 2.0);
  Vec e2(3);
  e2 << 3.0, 0.0, 4.0;
  Vec expected = -100.0 * 0.5 * dv + 100.0 * (e2 / 5.0);
  CHECK((adaptive_dv_rate(dv, e2, c) - expected).norm() < 1e-12);

  const Vec da = Vec::Constant(3, -1.0);
  Vec he3(3);
  he3 << 1.0, 2.0, 2.0;
  expected = -50.0 * 0.5 * da + 50.0 * t.h().transpose() * (he3 / 3.0);
  CHECK((adaptive_da_rate(da, he3, c, t) - expected).norm() < 1e-12);

  c.adaptive_enabled = false;
  CHECK(adaptive_dv_rate(dv, e2, c).isZero());
  CHECK(adaptive_da_rate(da, he3, c, t).isZero());
}

TEST_CASE("control law against an explicit-inverse oracle") {
  std::mt19937_64 rng(99);
  const Topology t = Topology::preset(TopologyPreset::BidirectionalLeader, 4);
  ControllerConfig c = ControllerConfig::reference_preset(4);
  c.k3 << 24.0, 26.0, 25.0, 30.0;
  const VehicleParams p;
  const Vec e2 = random_vec(rng, 4, 1.0), e3 = random_vec(rng, 4, 1.0);
  const Vec dv = random_vec(rng, 4, 3.0), da = random_vec(rng, 4, 3.0);
  const Vec v = Vec::Constant(4, 15.0) + random_vec(rng, 4, 2.0);
  const Vec a = random_vec(rng, 4, 0.5);
  const Vec u = control_law({e2, e3, dv, da, v, a, 0.4}, c, t, p);

  const Mat hinv = t.h().inverse();
  const Vec inner = hinv * Mat(c.k3.asDiagonal()) * t.h() * e3 + hinv * dv + da;
  for (int i = 0; i < 4; ++i) {
    const double expected = p.m * p.tau * (-drift_f(v(i), a(i), p) + 0.4 + inner(i));
    CHECK(u(i) == doctest::Approx(expected).epsilon(1e-12));
  }

  c.adaptive_enabled = false;
  const Vec u_off = control_law({e2, e3, dv, da, v, a, 0.4}, c, t, p);
  const Vec zero = Vec::Zero(4);
  CHECK((u_off - control_law({e2, e3, zero, zero, v, a, 0.4}, c, t, p)).norm() < 1e-9);
}

TEST_CASE("property: control law is equivariant under vehicle relabelling") {
  std::mt19937_64 rng(31337);
  std::bernoulli_distribution edge(0.4);
  std::uniform_real_distribution<double> gain(1.0, 30.0);
  int cases = 0;
  while (cases < 50) {
    const int n = 2 + cases % 7;
    Mat adj = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (edge(rng)) adj(i, j) = adj(j, i) = 1.0;
      }
    }
    Vec pin = Vec::Zero(n);
    for (int i = 0; i < n; ++i) pin(i) = edge(rng) ? 1.0 : 0.0;
    const Topology t(adj, pin);
    if (!t.h_inverse()) continue;
    ++cases;
    CAPTURE(cases);

    ControllerConfig c = ControllerConfig::reference_preset(n);
    for (int i = 0; i < n; ++i) {
      c.k1(i) = gain(rng);
      c.k2(i) = c.k1(i) + gain(rng);
      c.k3(i) = gain(rng);
    }
    std::vector<VehicleParams> params(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) params[static_cast<std::size_t>(i)].m = 1000.0 + 100.0 * i;

    const Vec e2 = random_vec(rng, n, 1.0), e3 = random_vec(rng, n, 1.0);
    const Vec dv = random_vec(rng, n, 2.0), da = random_vec(rng, n, 2.0);
    const Vec v = random_vec(rng, n, 5.0), a = random_vec(rng, n, 1.0);
    const Vec u = control_law({e2, e3, dv, da, v, a, 0.0}, c, t, params);

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Mat pm = permutation(perm);
    const Topology tp(pm * adj * pm.transpose(), pm * pin);
    ControllerConfig cp = c;
    cp.k1 = pm * c.k1;
    cp.k2 = pm * c.k2;
    cp.k3 = pm * c.k3;
    std::vector<VehicleParams> pp(params.size());
    for (int i = 0; i < n; ++i) pp[static_cast<std::size_t>(i)] = params[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];

    const Vec e2p = pm * e2, e3p = pm * e3, dvp = pm * dv, dap = pm * da, vp = pm * v, ap = pm * a;
    const Vec up = control_law({e2p, e3p, dvp, dap, vp, ap, 0.0}, cp, tp, pp);
    CHECK((up - pm * u).norm() <= 1e-9 * (1.0 + u.norm()));
  }
}

TEST_CASE("backstepping errors compose the virtual laws") {
  const Topology t = Topology::preset(TopologyPreset::BidirectionalLeader, 4);
  const ControllerConfig c = ControllerConfig::reference_preset(4);
  SyncErrors s{Vec::LinSpaced(4, -1.0, 2.0), Vec::LinSpaced(4, 0.5, -0.5), Vec::Constant(4, 0.2)};
  const Vec dv = Vec::Constant(4, 0.1);
  const BacksteppingErrors b = backstepping_errors(s, dv, c, t);
  CHECK(b.e1 == s.e_x);
  CHECK((b.e2 - (s.e_v + 7.0 * s.e_x)).norm() < 1e-14);
  CHECK((b.ea_star - virtual_ea_star(b.e2, dv, c, t)).norm() < 1e-14);
  CHECK((b.e3 - (s.e_a - b.ea_star)).norm() < 1e-14);
}
