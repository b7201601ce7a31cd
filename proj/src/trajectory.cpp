#include "torqueid/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace torqueid {

double QuinticSegment::duration_for(double distance, double peak_velocity, double peak_acceleration) {
  const double d = std::abs(distance);
  const double by_velocity = kPeakVelocityFactor * d / peak_velocity;
  const double by_acceleration = std::sqrt(kPeakAccelerationFactor * d / peak_acceleration);
  return std::max(by_velocity, by_acceleration);
}

double QuinticSegment::position(double t) const {
  const double u = std::clamp(t / duration, 0.0, 1.0);
  const double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  return start + (end - start) * s;
}

double QuinticSegment::velocity(double t) const {
  const double u = std::clamp(t / duration, 0.0, 1.0);
  const double ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
  return (end - start) * ds / duration;
}

double QuinticSegment::acceleration(double t) const {
  const double u = std::clamp(t / duration, 0.0, 1.0);
  const double dds = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
  return (end - start) * dds / (duration * duration);
}

}  // namespace torqueid
