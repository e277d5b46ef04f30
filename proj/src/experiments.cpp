#include "trisphere/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trisphere {

TowedResult towed_sphere_sherwood(const SwimmerGeometry& geo, double pe,
                                  GridSpec grid, double core_half_x,
                                  double t_max, double steady_tol) {
  if (!(pe >= 0.0) || !std::isfinite(pe)) {
    throw PreconditionError("towed sphere: Pe must be finite and >= 0");
  }
  grid.core_half_x = core_half_x;
  TransportConfig cfg;
  cfg.D = pe > 0.0 ? geo.S * geo.R / pe : geo.S * geo.R;
  cfg.c_inf = 1.0;
  cfg.grid = grid;
  cfg.far_field = FarField::monopole;

  TransportSolver solver(geo, cfg);
  solver.set_window_center(0.0);
  solver.set_spheres({{0.0, geo.R}});
  solver.solve_steady();

  TowedResult out;
  out.pe = pe;
  out.J0 = solver.flux();
  out.J = out.J0;
  if (pe == 0.0) {
    // Diffusive limit: compare against the isolated-sphere flux 4 pi R D.
    out.sherwood = out.J0 / (4.0 * std::numbers::pi * geo.R * cfg.D * cfg.c_inf);
    out.converged = true;
    return out;
  }

  const FlowModel flow = FlowModel::towed_sphere(geo.R, geo.S);
  // Two advection substeps per implicit step, capped at a quarter of the
  // convective time R/U.
  const double rate = solver.max_courant_rate(flow);
  const double dt = std::min(2.0 * cfg.cfl / rate, 0.25 * geo.R / geo.S);
  const double t_min = 5.0 * geo.R / geo.S;
  double J_old = out.J0;
  double t = 0.0;
  while (t < t_max) {
    solver.advance(flow, dt);
    t += dt;
    const double J = solver.flux();
    if (t > t_min && std::abs(J - J_old) < steady_tol * std::abs(J) * dt) {
      out.converged = true;
      J_old = J;
      break;
    }
    J_old = J;
  }
  out.J = J_old;
  out.t_end = t;
  out.sherwood = out.J / out.J0;
  return out;
}

GridSpec grid_for_arm_length(GridSpec base, const SwimmerGeometry& geo) {
  const double need = geo.W / geo.R + 3.0;
  if (base.core_half_x < need) {
    // The monopole far field needs the outer boundary to stay several
    // swimmer lengths away: scale the outer extents with the core.
    const double scale = need / base.core_half_x;
    base.core_half_x = std::ceil(need / base.h - 1e-9) * base.h;
    base.outer_half_x *= scale;
    base.outer_rho *= scale;
  }
  return base;
}

double baseline_flux(const SwimmerGeometry& geo, const GridSpec& grid) {
  TransportConfig cfg;
  cfg.D = geo.S * geo.R;
  cfg.c_inf = 1.0;
  cfg.grid = grid_for_arm_length(grid, geo);
  cfg.far_field = FarField::monopole;
  return steady_diffusive_flux(posture_for(AgentState::from_label(4), geo), geo,
                               cfg);
}

double single_sphere_flux(const SwimmerGeometry& geo, const GridSpec& grid) {
  TransportConfig cfg;
  cfg.D = geo.S * geo.R;
  cfg.c_inf = 1.0;
  cfg.grid = grid;
  cfg.far_field = FarField::monopole;
  TransportSolver solver(geo, cfg);
  solver.set_window_center(0.0);
  solver.set_spheres({{0.0, geo.R}});
  solver.solve_steady();
  return solver.flux();
}

GaitRun run_gait(const SwimmerGeometry& geo, double pe,
                 const TransportConfig& base, double horizon,
                 CoupledOptions opt) {
  TransportConfig cfg = base;
  cfg.D = TransportConfig::from_peclet(geo, pe).D;
  cfg.c_inf = 1.0;
  cfg.g = 0.0;
  cfg.grid = grid_for_arm_length(cfg.grid, geo);

  GaitRun out;
  out.pe = pe;
  const AgentState s0 = AgentState::from_label(4);
  out.J0 = steady_diffusive_flux(posture_for(s0, geo), geo, cfg);
  const auto n_actions = static_cast<std::size_t>(
      std::ceil(horizon / geo.action_duration() - 1e-9));
  CoupledResult res = run_coupled(geo, gait_source(), cfg, n_actions, s0, opt);
  out.records = std::move(res.records);
  out.average = period_average_flux(out.records, geo.gait_period());
  return out;
}

std::vector<Experience> generate_experiences(const SwimmerGeometry& geo,
                                             double pe, double gradient,
                                             const TransportConfig& base,
                                             std::size_t n_actions,
                                             AgentState s0, std::uint64_t seed,
                                             CoupledOptions opt) {
  TransportConfig cfg = base;
  cfg.D = TransportConfig::from_peclet(geo, pe).D;
  cfg.c_inf = 0.0;
  cfg.g = gradient;
  cfg.grid = grid_for_arm_length(cfg.grid, geo);
  CoupledSimulation sim(geo, cfg, s0, 0.0, opt);
  sim.initialize_steady();
  return rollout_random(sim, n_actions, seed);
}

}  // namespace trisphere
