#pragma once

namespace torqueid {

/// Rest-to-rest quintic s(u) = 10u^3 - 15u^4 + 6u^5, u = t / duration.
///
/// For a move of length D over duration T the peaks are
///   |qd|max  = (15/8) D / T          at u = 1/2
///   |qdd|max = (10/sqrt(3)) D / T^2  at u = 1/2 -+ sqrt(3)/6
struct QuinticSegment {
  static constexpr double kPeakVelocityFactor = 15.0 / 8.0;
  static constexpr double kPeakAccelerationFactor = 5.773502691896258;  // 10/sqrt(3)

  double start = 0.0;
  double end = 0.0;
  double duration = 1.0;

  /// Shortest duration keeping both peaks within the given limits.
  static double duration_for(double distance, double peak_velocity, double peak_acceleration);

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
};

}  // namespace torqueid
