#pragma once

#include <string>
#include <vector>

#include "junctionflow/germ.hpp"

namespace jf {

// Uniform space-time grid. Nodes x_j = j dx for j_min <= j <= j_max with the
// junction at j = 0; interfaces j + 1/2 for j_min <= j < j_max.
struct Grid1D {
  double dx = 0.0;
  double dt = 0.0;
  int j_min = 0;
  int j_max = 0;
  int n_steps = 0;

  // Symmetric window [-half_width, half_width] and n_steps = ceil(T / dt).
  static Grid1D make(double dx, double dt, double half_width, double T);

  int node_count() const { return j_max - j_min + 1; }
  int interface_count() const { return j_max - j_min; }
  double x(int j) const { return j * dx; }
  double x_mid(int j) const { return (j + 0.5) * dx; }
  double t(int n) const { return n * dt; }
  void validate() const;
};

struct CflReport {
  double L_H = 0.0;        // max(L_HL, L_HR, partial Lipschitz bounds of the coupling)
  double ratio = 0.0;      // dx / dt
  double gamma = 0.0;      // (dt/dx)(delta/2) M
  bool monotone_ok = false;   // dx/dt >= 2 L_H
  bool compact_ok = false;    // gamma <= 1
  bool pass = false;          // gates required by the caller
  double dt_max = 0.0;        // largest dt passing the required gates
  std::string message;
};

// L_H for a coupling.
double coupling_lipschitz(const CouplingCondition& F);

// Both gates evaluated; `require_gamma` selects whether gamma <= 1 counts
// towards `pass`.
CflReport make_cfl_report(const Grid1D& grid, const CouplingCondition& F, bool require_gamma);

// Frozen slopes used beyond the two ends of the truncated window.
struct BoundarySlopes {
  double left = 0.0;   // p_{j_min - 1/2}
  double right = 0.0;  // p_{j_max + 1/2}
};

// Flux at node j given the two adjacent interface values: Godunov flux of
// H_L for j < 0, of H_R for j > 0, the coupling at j = 0.
inline double node_flux(const CouplingCondition& F, int j, double p_left, double p_right) {
  if (j < 0) return godunov_flux(F.box().left(), p_left, p_right);
  if (j > 0) return godunov_flux(F.box().right(), p_left, p_right);
  return F(p_left, p_right);
}

// Adds b to the value hi + lo without losing the rounding error of the sum
// (Knuth's two-sum followed by a renormalisation of the pair).
inline void compensated_add(double& hi, double& lo, double b) {
  const double s = hi + b;
  const double bb = s - hi;
  const double err = (hi - (s - bb)) + (b - bb);
  const double l = lo + err;
  hi = s + l;
  lo = l - (hi - s);
}

// Node fluxes for every node of the window from interior interface values
// `p` (size interface_count) and the frozen ghosts.
void node_fluxes(const CouplingCondition& F, const Grid1D& g, const std::vector<double>& p,
                 const BoundarySlopes& ghost, std::vector<double>& out);

}  // namespace jf
