#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "junctionflow/flux.hpp"
#include "junctionflow/germ.hpp"
#include "junctionflow/grid.hpp"
#include "junctionflow/multibranch.hpp"

namespace jf {

// Flux of one branch. `param` is kappa for the quadratic family and s for
// the exponential one.
struct FluxSpec {
  std::string family;
  double a = 0.0;
  double c = 0.0;
  double param = 0.0;
  ConvexFlux build() const;
};

struct CouplingSpec {
  std::string type;    // "limited" or "general"
  std::string family;  // general only: "godunov", "linear" or "limited"
  double A = 0.0;
  double beta = 1.0;
};

struct GridSpec {
  double dx = 0.0;
  std::optional<double> dt;  // absent: auto-dt from the CFL bounds
  double safety = 0.9;
  double half_width = 0.0;
};

struct InitialSpec {
  std::string type;  // "riemann", "affine-germ" or "piecewise-affine"
  double kL = 0.0;
  double kR = 0.0;
  double u_at_zero = 0.0;
  std::vector<double> breakpoints;  // strictly increasing
  std::vector<double> slopes;       // breakpoints.size() + 1 entries

  // u0 and its slope rho0 = u0'.
  std::function<double(double)> potential() const;
  std::function<double(double)> density() const;
};

struct ConvergeSpec {
  int levels = 4;
  std::optional<double> dx0;         // defaults to grid.dx
  std::optional<double> dt_over_dx;  // defaults to the resolved dt/dx
};

struct AuditSpec {
  int entropy_samples = 20;
  double entropy_tol = 1e-12;
  double diagnostic_tol = 1e-10;
};

struct BranchSpec {
  double a = 0.0;
  double c = 0.0;
  double kappa = 1.0;
  double theta = 1.0;
};

struct MultiBranchSpec {
  std::vector<BranchSpec> incoming;
  std::vector<BranchSpec> outgoing;
  double A = 0.0;
  std::optional<double> lambda;  // defaults to A/2
  int alpha0 = 0;
  MultiBranchJunction build() const;
};

struct ExperimentConfig {
  FluxSpec left, right;
  CouplingSpec coupling_spec;
  GridSpec grid_spec;
  double T = 0.0;
  InitialSpec initial;
  int stride = 1;
  std::uint64_t seed = 20240601;
  ConvergeSpec converge;
  AuditSpec audit;
  std::vector<GermPoint> germ_queries;
  std::optional<MultiBranchSpec> multibranch;

  // Resolved objects.
  Box box() const;
  CouplingCondition coupling() const;
  double dt = 0.0;
  Grid1D grid() const;

  // Every resolved parameter, suitable for a run manifest.
  nlohmann::json to_json() const;
};

// Throws ConfigError listing every violation, one per line.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_string(const std::string& text);

}  // namespace jf
