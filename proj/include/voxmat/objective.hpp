#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "voxmat/property.hpp"

namespace voxmat {

enum class ObjectiveKind { match_target, maximize, minimize };

inline const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::match_target: return "match_target";
    case ObjectiveKind::maximize: return "maximize";
    case ObjectiveKind::minimize: return "minimize";
  }
  return "?";
}

// One design objective. `target` is the match value for match_target and the
// threshold for maximize/minimize. `tolerance` is the relative success band
// delta for match targets.
struct ObjectiveSpec {
  Property property = Property::E;
  ObjectiveKind kind = ObjectiveKind::match_target;
  double target = 0.0;
  double tolerance = 0.10;
};

// Signed directional deviation in percent: (P - T) / T * 100.
inline double signed_error(double value, double target) {
  if (target == 0.0)
    throw std::invalid_argument("signed_error: target must be nonzero");
  return (value - target) / target * 100.0;
}

// Signed normalized deviation as a fraction. Match targets keep the sign;
// threshold objectives report only the shortfall (zero once satisfied).
inline double signed_relative_error(const ObjectiveSpec& obj, double value) {
  if (obj.target == 0.0)
    throw std::invalid_argument("relative error: target must be nonzero");
  switch (obj.kind) {
    case ObjectiveKind::match_target:
      return (value - obj.target) / obj.target;
    case ObjectiveKind::maximize:
      return std::max(0.0, (obj.target - value) / obj.target);
    case ObjectiveKind::minimize:
      return std::max(0.0, (value - obj.target) / obj.target);
  }
  return 0.0;
}

// Magnitude of the normalized deviation, used by MRE and the scalar utility.
inline double relative_error(const ObjectiveSpec& obj, double value) {
  return std::abs(signed_relative_error(obj, value));
}

// Boundary-inclusive satisfaction test.
inline bool satisfied(const ObjectiveSpec& obj, double value) {
  switch (obj.kind) {
    case ObjectiveKind::match_target:
      return std::abs(value - obj.target) <=
             obj.tolerance * std::abs(obj.target);
    case ObjectiveKind::maximize:
      return value >= obj.target;
    case ObjectiveKind::minimize:
      return value <= obj.target;
  }
  return false;
}

}  // namespace voxmat
