#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace voxmat {

// Effective properties a simulation can report.
enum class Property { E, G, nu, kappa, sigma, vf, Wp };

inline const char* to_string(Property p) {
  switch (p) {
    case Property::E: return "E";
    case Property::G: return "G";
    case Property::nu: return "nu";
    case Property::kappa: return "kappa";
    case Property::sigma: return "sigma";
    case Property::vf: return "vf";
    case Property::Wp: return "Wp";
  }
  return "?";
}

inline Property parse_property(const std::string& s) {
  if (s == "E") return Property::E;
  if (s == "G") return Property::G;
  if (s == "nu") return Property::nu;
  if (s == "kappa") return Property::kappa;
  if (s == "sigma") return Property::sigma;
  if (s == "vf") return Property::vf;
  if (s == "Wp" || s == "wp") return Property::Wp;
  throw std::invalid_argument("unknown property id: " + s);
}

struct SolveStats {
  std::string label;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = true;
};

struct MissingPropertyError : std::runtime_error {
  explicit MissingPropertyError(Property p)
      : std::runtime_error(std::string("property not evaluated: ") +
                           to_string(p)),
        property(p) {}
  Property property;
};

// Effective property set of one evaluated microstructure. `feasible` is the
// solid-phase connectivity verdict; solver statistics ride along for
// diagnostics and reporting.
struct PropertyVector {
  std::optional<double> E, G, nu, kappa, sigma, vf, Wp;
  bool feasible = true;
  std::vector<SolveStats> solver_stats;

  bool has(Property p) const { return slot(p).has_value(); }

  double get(Property p) const {
    const auto& v = slot(p);
    if (!v) throw MissingPropertyError(p);
    return *v;
  }

  void set(Property p, double value) { slot(p) = value; }

 private:
  const std::optional<double>& slot(Property p) const {
    return const_cast<PropertyVector*>(this)->slot(p);
  }
  std::optional<double>& slot(Property p) {
    switch (p) {
      case Property::E: return E;
      case Property::G: return G;
      case Property::nu: return nu;
      case Property::kappa: return kappa;
      case Property::sigma: return sigma;
      case Property::vf: return vf;
      case Property::Wp: return Wp;
    }
    throw std::logic_error("bad property enum");
  }
};

}  // namespace voxmat
