#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/lagrangian.hpp"
#include "oracles/planar.hpp"
#include "torqueid/dynamics.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/trajectory.hpp"

using namespace torqueid;
using dynamics::Friction;

using namespace oracle;
using oracle::kG;

namespace {

Vector6 random_vector(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector6 v;
  for (int i = 0; i < kNumJoints; ++i) v(i) = u(rng);
  return v;
}

JointState state(const Vector6& q, const Vector6& qd, const Vector6& qdd) { return JointState{q, qd, qdd}; }

}  // namespace

TEST_CASE("zero gravity and rest gives zero torque") {
  RobotModel m = default_robot();
  m.gravity.setZero();
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const auto tau = dynamics::inverse_dynamics(m, state(random_vector(rng, 2.0), Vector6::Zero(), Vector6::Zero()),
                                                Friction::Off);
    CHECK(tau.tau.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pendulum static torque and inertia") {
  const double mass = 3.2, lc = 0.37, izz = 0.045;
  const RobotModel m = pendulum(mass, lc, izz);
  for (double q1 : {-2.0, -0.7, 0.0, 0.4, 1.3}) {
    Vector6 q = Vector6::Zero();
    q(0) = q1;
    const auto g = dynamics::gravity_torque(m, q);
    CHECK(g.tau(0) == doctest::Approx(mass * kG * lc * std::cos(q1)).epsilon(1e-12));
    const Matrix6 B = dynamics::mass_matrix(m, q);
    CHECK(B(0, 0) == doctest::Approx(izz + mass * lc * lc).epsilon(1e-12));
  }
  Vector6 up = Vector6::Zero();
  up(0) = M_PI / 2;
  CHECK(std::abs(dynamics::gravity_torque(m, up).tau(0)) < 1e-12);
}

TEST_CASE("two-link planar arm matches closed form") {
  const Planar p;
  const RobotModel m = planar_arm(p);

  Vector6 stretched = Vector6::Zero();
  const auto g = dynamics::gravity_torque(m, stretched);
  CHECK(g.tau(0) == doctest::Approx(p.m1 * kG * p.lc1 + p.m2 * kG * (p.l1 + p.lc2)).epsilon(1e-12));

  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vector6 q = random_vector(rng, M_PI), qd = random_vector(rng, 3.0), qdd = random_vector(rng, 5.0);
    const auto tau = dynamics::inverse_dynamics(m, state(q, qd, qdd), Friction::Off).tau;
    const Eigen::Vector2d expected = planar_closed_form(p, q.head<2>(), qd.head<2>(), qdd.head<2>());
    worst = std::max(worst, (tau.head<2>() - expected).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("recursive Newton-Euler agrees with the Lagrangian oracle") {
  const RobotModel m = default_robot();
  std::mt19937_64 rng(5);
  for (int k = 0; k < 25; ++k) {
    const Vector6 q = random_vector(rng, 2.0), qd = random_vector(rng, 2.0), qdd = random_vector(rng, 4.0);
    const Vector6 rnea = dynamics::inverse_dynamics(m, state(q, qd, qdd), Friction::Off).tau;
    const Vector6 lag = oracle::torque(m, q, qd, qdd);
    const double scale = std::max(1.0, lag.cwiseAbs().maxCoeff());
    CHECK((rnea - lag).cwiseAbs().maxCoeff() / scale < 1e-6);
  }
}

TEST_CASE("mass matrix matches the Jacobian inertia oracle and is symmetric positive definite") {
  const RobotModel m = default_robot();
  std::mt19937_64 rng(17);
  for (int k = 0; k < 100; ++k) {
    const Vector6 q = random_vector(rng, M_PI);
    const Matrix6 B = dynamics::mass_matrix(m, q);
    CHECK((B - B.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    Eigen::LLT<Matrix6> llt(B);
    CHECK(llt.info() == Eigen::Success);
    CHECK((B - oracle::inertia_matrix(m, q)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("acceleration enters linearly") {
  const RobotModel m = default_robot();
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const Vector6 q = random_vector(rng, 2.0), a = random_vector(rng, 3.0), b = random_vector(rng, 3.0);
    const Vector6 g = dynamics::gravity_torque(m, q).tau;
    auto lin = [&](const Vector6& qdd) {
      return Vector6(dynamics::inverse_dynamics(m, state(q, Vector6::Zero(), qdd), Friction::Off).tau - g);
    };
    const Vector6 sum = lin(a + 2.5 * b);
    const Vector6 parts = lin(a) + 2.5 * lin(b);
    CHECK((sum - parts).norm() / std::max(1.0, sum.norm()) < 1e-9);
    CHECK((lin(a) - dynamics::mass_matrix(m, q) * a).norm() < 1e-9);
  }
}

TEST_CASE("energy balance along a quintic trajectory without friction") {
  CHECK(energy_balance_error(default_robot(), energy_start(), energy_end(), 2.0) < 1e-3);
}

TEST_CASE("friction law") {
  RobotModel m = default_robot();
  m.friction[2] = JointFriction{0.1, 0.5, 0.01};
  Vector6 qd = Vector6::Zero();
  CHECK(dynamics::friction_torque(m, qd).tau.cwiseAbs().maxCoeff() == 0.0);
  qd(2) = 2.0;
  CHECK(dynamics::friction_torque(m, qd).tau(2) == doctest::Approx(0.7).epsilon(1e-15));
  qd(2) = 0.005;
  CHECK(dynamics::friction_torque(m, qd).tau(2) == 0.0);

  std::mt19937_64 rng(29);
  for (int k = 0; k < 100; ++k) {
    const Vector6 v = random_vector(rng, 3.0);
    const Vector6 plus = dynamics::friction_torque(m, v).tau;
    const Vector6 minus = dynamics::friction_torque(m, -v).tau;
    CHECK((plus + minus).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("friction is the only velocity-dependent term independent of configuration") {
  const RobotModel m = default_robot();
  std::mt19937_64 rng(31);
  const Vector6 q = random_vector(rng, 2.0), qd = random_vector(rng, 2.0), qdd = random_vector(rng, 3.0);
  const Vector6 on = dynamics::inverse_dynamics(m, state(q, qd, qdd), Friction::On).tau;
  const Vector6 off = dynamics::inverse_dynamics(m, state(q, qd, qdd), Friction::Off).tau;
  CHECK((on - off - dynamics::friction_torque(m, qd).tau).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("non-finite state names the joint") {
  const RobotModel m = default_robot();
  JointState s;
  s.qd(3) = std::nan("");
  try {
    dynamics::inverse_dynamics(m, s);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("joint 4") != std::string::npos);
  }
}

TEST_CASE("robot parameter file round trip and validation") {
  const RobotModel m = default_robot();
  const RobotModel back = parse_robot(format_robot(m), "memory");
  CHECK(format_robot(back) == format_robot(m));
  CHECK(robot_digest(back) == robot_digest(m));
  CHECK(format_robot(load_robot(TORQUEID_DATA_DIR "/robot_default.txt")) == format_robot(m));

  std::string text = format_robot(m);
  const auto pos = text.find("link3.mass = ");
  text.replace(pos, text.find('\n', pos) - pos, "link3.mass = -1");
  CHECK_THROWS_AS(parse_robot(text, "memory"), ValidationError);
  CHECK_THROWS_AS(parse_robot(format_robot(m) + "joint9.a = 1\n", "memory"), ValidationError);
}
