#include "junctionflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "junctionflow/errors.hpp"

namespace jf {

Grid1D Grid1D::make(double dx, double dt, double half_width, double T) {
  if (!(dx > 0.0) || !(dt > 0.0)) throw DomainError("grid: dx and dt must be positive");
  if (!(half_width >= dx)) throw DomainError("grid: half width must be at least dx");
  if (!(T >= 0.0)) throw DomainError("grid: final time must be nonnegative");
  Grid1D g;
  g.dx = dx;
  g.dt = dt;
  g.j_max = static_cast<int>(std::llround(half_width / dx));
  g.j_min = -g.j_max;
  // A tiny relative slack keeps T = k dt from rounding up to k + 1 steps.
  g.n_steps = static_cast<int>(std::ceil(T / dt * (1.0 - 1e-12)));
  return g;
}

void Grid1D::validate() const {
  if (!(dx > 0.0) || !(dt > 0.0)) throw DomainError("grid: dx and dt must be positive");
  if (!(j_min < 0 && j_max > 0)) throw DomainError("grid: the junction node must be interior");
  if (n_steps < 0) throw DomainError("grid: negative step count");
}

double coupling_lipschitz(const CouplingCondition& F) {
  const auto [l1, l2] = F.lipschitz_bounds();
  return std::max({F.box().left().lipschitz(), F.box().right().lipschitz(), l1, l2});
}

CflReport make_cfl_report(const Grid1D& grid, const CouplingCondition& F, bool require_gamma) {
  CflReport r;
  r.L_H = coupling_lipschitz(F);
  r.ratio = grid.dx / grid.dt;
  const double delta = std::min(F.box().left().delta(), F.box().right().delta());
  const double M = F.box().M();
  r.gamma = grid.dt / grid.dx * 0.5 * delta * M;
  // Both inequalities are non-strict; the relative slack only absorbs the
  // rounding of dx / dt when dt is set exactly at the bound.
  r.monotone_ok = r.ratio >= 2.0 * r.L_H * (1.0 - 1e-14);
  r.compact_ok = r.gamma <= 1.0 + 1e-14;
  r.pass = r.monotone_ok && (!require_gamma || r.compact_ok);
  r.dt_max = grid.dx / (2.0 * r.L_H);
  if (require_gamma) r.dt_max = std::min(r.dt_max, grid.dx / (0.5 * delta * M));
  std::ostringstream os;
  os.precision(17);
  if (!r.monotone_ok)
    os << "monotonicity CFL condition dx/dt >= 2 L_H violated: dx/dt=" << r.ratio
       << " < " << 2.0 * r.L_H << ". ";
  if (require_gamma && !r.compact_ok)
    os << "compactness CFL condition (dt/dx)(delta/2)M <= 1 violated: gamma=" << r.gamma << ". ";
  r.message = os.str();
  return r;
}

void node_fluxes(const CouplingCondition& F, const Grid1D& g, const std::vector<double>& p,
                 const BoundarySlopes& ghost, std::vector<double>& out) {
  const int nodes = g.node_count();
  out.resize(nodes);
  for (int k = 0; k < nodes; ++k) {
    const int j = g.j_min + k;
    const double pl = k == 0 ? ghost.left : p[k - 1];
    const double pr = k == nodes - 1 ? ghost.right : p[k];
    out[k] = node_flux(F, j, pl, pr);
  }
}

}  // namespace jf
