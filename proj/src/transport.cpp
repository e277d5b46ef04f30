#include "trisphere/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace trisphere {

double clift_sherwood(double Pe) {
  if (!(Pe >= 0.0)) throw PreconditionError("clift_sherwood: Pe must be >= 0");
  return 0.5 * (1.0 + std::cbrt(1.0 + 2.0 * Pe));
}

double default_lambda(const SwimmerGeometry& g, double D, double h) {
  return std::max(1e4 * g.S / g.R, 1e7 * D / (h * h));
}

TransportConfig TransportConfig::from_peclet(const SwimmerGeometry& g,
                                             double Pe) {
  if (!(Pe > 0.0)) {
    throw PreconditionError("from_peclet: Pe must be positive");
  }
  TransportConfig cfg;
  cfg.D = g.S * g.R / Pe;
  return cfg;
}

void TransportConfig::validate() const {
  if (!(D > 0.0 && std::isfinite(D))) {
    throw PreconditionError("transport: D must be positive");
  }
  if (!std::isfinite(c_inf) || !std::isfinite(g)) {
    throw PreconditionError("transport: non-finite background");
  }
  if (!(cfl > 0.0 && cfl <= 0.5)) {
    throw PreconditionError("transport: cfl must lie in (0, 0.5]");
  }
  if (!(mask_cfl > 0.0)) {
    throw PreconditionError("transport: mask_cfl must be positive");
  }
  if (!(min_link_fraction > 0.0 && min_link_fraction <= 1.0)) {
    throw PreconditionError("transport: min_link_fraction must lie in (0, 1]");
  }
  grid.validate();
}

std::vector<SphereBody> swimmer_bodies(const Posture& p,
                                       const SwimmerGeometry& g) {
  const auto pos = sphere_positions(p);
  return {{pos[0], g.R}, {pos[1], g.R}, {pos[2], g.R}};
}

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

TransportSolver::TransportSolver(const SwimmerGeometry& geo,
                                 TransportConfig cfg)
    : geo_(geo), cfg_(std::move(cfg)) {
  geo_.validate();
  cfg_.validate();
  grid_ = std::make_shared<const AxisymmetricGrid>(cfg_.grid, geo_.R);
  lambda_ = cfg_.lambda > 0.0 ? cfg_.lambda
                              : default_lambda(geo_, cfg_.D, grid_->h());

  const auto& G = *grid_;
  const std::size_t nx = G.nx();
  const std::size_t nr = G.nr();
  const std::size_t n = G.size();

  field_.grid = grid_;
  field_.c.assign(n, 0.0);
  field_.solid.assign(n, 0);
  volume_.resize(n);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nr; ++j) volume_[G.index(i, j)] = G.volume(i, j);
  }

  const auto& xc = G.x_centers();
  const auto& rc = G.rho_centers();
  // x links first (i, j)-(i+1, j), then rho links (i, j)-(i, j+1).
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      const double d = xc[i + 1] - xc[i];
      link_a_.push_back(static_cast<std::uint32_t>(G.index(i, j)));
      link_b_.push_back(static_cast<std::uint32_t>(G.index(i + 1, j)));
      link_dist_.push_back(d);
      link_base_.push_back(cfg_.D * G.x_face_area(j) / d);
      link_axis_.push_back(0);
    }
  }
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j + 1 < nr; ++j) {
      const double d = rc[j + 1] - rc[j];
      link_a_.push_back(static_cast<std::uint32_t>(G.index(i, j)));
      link_b_.push_back(static_cast<std::uint32_t>(G.index(i, j + 1)));
      link_dist_.push_back(d);
      link_base_.push_back(cfg_.D * G.rho_face_area(i, j + 1) / d);
      link_axis_.push_back(1);
    }
  }
  link_g_ = link_base_;

  const auto& xf = G.x_faces();
  const auto& rf = G.rho_faces();
  for (std::size_t j = 0; j < nr; ++j) {
    bnd_.push_back({static_cast<std::uint32_t>(G.index(0, j)), G.x_face_area(j),
                    0.5 * G.dx(0), xf.front(), rc[j], -1.0, 0.0});
    bnd_.push_back({static_cast<std::uint32_t>(G.index(nx - 1, j)),
                    G.x_face_area(j), 0.5 * G.dx(nx - 1), xf.back(), rc[j], 1.0,
                    0.0});
  }
  for (std::size_t i = 0; i < nx; ++i) {
    bnd_.push_back({static_cast<std::uint32_t>(G.index(i, nr - 1)),
                    G.rho_face_area(i, nr), 0.5 * G.drho(nr - 1), xc[i],
                    rf.back(), 0.0, 1.0});
  }

  // Lower-triangular pattern: diagonal plus (b, a) for every link.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + link_a_.size());
  for (std::size_t c = 0; c < n; ++c) {
    trip.emplace_back(static_cast<int>(c), static_cast<int>(c), 1.0);
  }
  for (std::size_t k = 0; k < link_a_.size(); ++k) {
    trip.emplace_back(static_cast<int>(link_b_[k]), static_cast<int>(link_a_[k]),
                      -1.0);
  }
  matrix_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  matrix_.setFromTriplets(trip.begin(), trip.end());
  matrix_.makeCompressed();

  auto find_pos = [&](Eigen::Index row, Eigen::Index col) {
    const auto* outer = matrix_.outerIndexPtr();
    const auto* inner = matrix_.innerIndexPtr();
    const auto* first = inner + outer[col];
    const auto* last = inner + outer[col + 1];
    const auto* it = std::lower_bound(first, last, static_cast<int>(row));
    return static_cast<Eigen::Index>(it - inner);
  };
  diag_pos_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    diag_pos_[c] = find_pos(static_cast<Eigen::Index>(c),
                            static_cast<Eigen::Index>(c));
  }
  link_pos_.resize(link_a_.size());
  for (std::size_t k = 0; k < link_a_.size(); ++k) {
    link_pos_[k] = find_pos(link_b_[k], link_a_[k]);
  }

  ux_.resize(n);
  ur_.resize(n);
  rate_.resize(n);
  stage_.resize(n);
  slope_x_.resize(n);
  slope_r_.resize(n);
}

void TransportSolver::set_window_center(double x_center) {
  window_base_ = x_center;
  window_shift_ = 0;
  field_.x0 = x_center;
  rebuild_mask();
}

void TransportSolver::fill_background() {
  const auto& G = *grid_;
  for (std::size_t i = 0; i < G.nx(); ++i) {
    const double v = background(field_.x_lab(i));
    for (std::size_t j = 0; j < G.nr(); ++j) {
      const std::size_t c = G.index(i, j);
      field_.c[c] = field_.solid[c] ? 0.0 : v;
    }
  }
}

void TransportSolver::set_values(std::vector<double> c) {
  if (c.size() != grid_->size()) {
    throw PreconditionError("set_values: size mismatch");
  }
  field_.c = std::move(c);
}

void TransportSolver::set_spheres(std::vector<SphereBody> spheres) {
  spheres_ = std::move(spheres);
  const auto& G = *grid_;
  const double lo = field_.x0 + G.x_faces()[G.core_begin()];
  const double hi = field_.x0 + G.x_faces()[G.core_end()];
  for (const auto& s : spheres_) {
    if (s.center - s.radius < lo || s.center + s.radius > hi) {
      throw SolverError("window drift: sphere at x=" + std::to_string(s.center) +
                        " leaves the uniform core of the window");
    }
  }
  rebuild_mask();
}

void TransportSolver::rebuild_mask() {
  const auto& G = *grid_;
  const auto& xc = G.x_centers();
  const auto& rc = G.rho_centers();
  const std::size_t nr = G.nr();
  const std::size_t nx = G.nx();
  const std::size_t n_xlinks = (nx - 1) * nr;

  for (auto k : modified_links_) link_g_[k] = link_base_[k];
  modified_links_.clear();
  std::fill(field_.solid.begin(), field_.solid.end(), 0);

  for (std::size_t s = 0; s < spheres_.size(); ++s) {
    const double cx = spheres_[s].center - field_.x0;
    const double R = spheres_[s].radius;
    const std::size_t i0 = G.column_of(cx - R);
    const std::size_t i1 = G.column_of(cx + R);
    for (std::size_t i = i0; i <= i1; ++i) {
      const double dx = xc[i] - cx;
      for (std::size_t j = 0; j < nr && rc[j] < R; ++j) {
        if (dx * dx + rc[j] * rc[j] < R * R) {
          field_.solid[G.index(i, j)] = static_cast<std::uint8_t>(s + 1);
        }
      }
    }
  }

  const double min_frac = cfg_.min_link_fraction;
  auto adjust = [&](std::size_t k) {
    const auto a = link_a_[k];
    const auto b = link_b_[k];
    const bool sa = field_.solid[a] != 0;
    const bool sb = field_.solid[b] != 0;
    if (sa == sb) return;
    const std::size_t fluid = sa ? b : a;
    const std::size_t solid = sa ? a : b;
    const auto& sp = spheres_[field_.solid[solid] - 1U];
    const double cx = sp.center - field_.x0;
    const double R = sp.radius;
    const std::size_t fi = fluid / nr, fj = fluid % nr;
    const std::size_t si = solid / nr, sj = solid % nr;
    const double d = link_dist_[k];
    double ds = d;
    if (link_axis_[k] == 0) {
      const double half = std::sqrt(std::max(0.0, R * R - rc[fj] * rc[fj]));
      const double surf = (xc[fi] < xc[si]) ? cx - half : cx + half;
      ds = std::abs(surf - xc[fi]);
    } else {
      const double dxs = xc[fi] - cx;
      const double surf = std::sqrt(std::max(0.0, R * R - dxs * dxs));
      ds = std::abs(rc[fj] - surf);
      (void)sj;
    }
    ds = std::clamp(ds, min_frac * d, d);
    link_g_[k] = link_base_[k] * d / ds;
    modified_links_.push_back(static_cast<std::uint32_t>(k));
  };

  for (std::size_t c = 0; c < field_.solid.size(); ++c) {
    if (!field_.solid[c]) continue;
    const std::size_t i = c / nr;
    const std::size_t j = c % nr;
    if (i > 0) adjust((i - 1) * nr + j);
    if (i + 1 < nx) adjust(i * nr + j);
    if (j > 0) adjust(n_xlinks + i * (nr - 1) + (j - 1));
    if (j + 1 < nr) adjust(n_xlinks + i * (nr - 1) + j);
  }
  // A link between a fluid cell and a solid cell is reached once from the
  // solid side, so no duplicates arise in modified_links_.
}

void TransportSolver::assemble(double inv_dt) {
  double* val = matrix_.valuePtr();
  const std::size_t n = grid_->size();
  for (std::size_t c = 0; c < n; ++c) {
    val[diag_pos_[c]] = volume_[c] * inv_dt +
                        (field_.solid[c] ? lambda_ * volume_[c] : 0.0);
  }
  for (std::size_t k = 0; k < link_a_.size(); ++k) {
    const double gk = link_g_[k];
    val[link_pos_[k]] = -gk;
    val[diag_pos_[link_a_[k]]] += gk;
    val[diag_pos_[link_b_[k]]] += gk;
  }
}

void TransportSolver::factorize_and_solve(const Eigen::VectorXd& rhs) {
  if (!analyzed_) {
    ldlt_.analyzePattern(matrix_);
    analyzed_ = true;
  }
  ldlt_.factorize(matrix_);
  if (ldlt_.info() != Eigen::Success) {
    throw SolverError("transport: factorization failed");
  }
  Eigen::VectorXd x = ldlt_.solve(rhs);
  if (ldlt_.info() != Eigen::Success) {
    throw SolverError("transport: linear solve failed");
  }
  std::copy(x.data(), x.data() + x.size(), field_.c.begin());
}

void TransportSolver::diffuse(double dt) {
  if (!(dt > 0.0)) throw PreconditionError("diffuse: dt must be positive");
  const double inv_dt = 1.0 / dt;
  assemble(inv_dt);
  const std::size_t n = grid_->size();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t c = 0; c < n; ++c) {
    rhs[static_cast<Eigen::Index>(c)] = volume_[c] * inv_dt * field_.c[c];
  }

  double xref = 0.0;
  if (!spheres_.empty()) {
    for (const auto& s : spheres_) xref += s.center;
    xref = xref / static_cast<double>(spheres_.size()) - field_.x0;
  }
  double* val = matrix_.valuePtr();
  for (const auto& f : bnd_) {
    const double cb = background(field_.x0 + f.x);
    double gb = cfg_.D * f.area / f.half_width;
    if (cfg_.far_field == FarField::monopole) {
      const double rx = f.x - xref;
      const double r = std::hypot(rx, f.rho);
      const double kappa = std::max(0.0, (rx * f.nx + f.rho * f.nrho) / (r * r));
      gb = cfg_.D * f.area * kappa / (1.0 + kappa * f.half_width);
    }
    val[diag_pos_[f.cell]] += gb;
    rhs[f.cell] += gb * cb;
  }
  factorize_and_solve(rhs);
  check_finite("diffuse");
}

void TransportSolver::solve_steady() {
  assemble(0.0);
  const std::size_t n = grid_->size();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  double xref = 0.0;
  if (!spheres_.empty()) {
    for (const auto& s : spheres_) xref += s.center;
    xref = xref / static_cast<double>(spheres_.size()) - field_.x0;
  }
  double* val = matrix_.valuePtr();
  for (const auto& f : bnd_) {
    const double cb = background(field_.x0 + f.x);
    double gb = cfg_.D * f.area / f.half_width;
    if (cfg_.far_field == FarField::monopole) {
      const double rx = f.x - xref;
      const double r = std::hypot(rx, f.rho);
      const double kappa = std::max(0.0, (rx * f.nx + f.rho * f.nrho) / (r * r));
      gb = cfg_.D * f.area * kappa / (1.0 + kappa * f.half_width);
    }
    val[diag_pos_[f.cell]] += gb;
    rhs[f.cell] += gb * cb;
  }
  factorize_and_solve(rhs);
  check_finite("solve_steady");
}

double TransportSolver::ghost_value(std::size_t i, std::size_t j,
                                    int side) const {
  const auto& G = *grid_;
  // side: 0 = x min, 1 = x max, 2 = rho max
  if (side == 0) return background(field_.x0 + G.x_faces().front());
  if (side == 1) return background(field_.x0 + G.x_faces().back());
  (void)j;
  return background(field_.x_lab(i));
}

void TransportSolver::advection_rate(const std::vector<double>& c,
                                     std::vector<double>& out) {
  const auto& G = *grid_;
  const std::size_t nx = G.nx();
  const std::size_t nr = G.nr();
  const auto& xc = G.x_centers();
  const auto& rc = G.rho_centers();
  const auto& xf = G.x_faces();
  const auto& rf = G.rho_faces();

  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      const std::size_t k = G.index(i, j);
      slope_x_[k] =
          (i == 0 || i + 1 == nx)
              ? 0.0
              : minmod((c[k] - c[k - nr]) / (xc[i] - xc[i - 1]),
                       (c[k + nr] - c[k]) / (xc[i + 1] - xc[i]));
      slope_r_[k] = (j == 0 || j + 1 == nr)
                        ? 0.0
                        : minmod((c[k] - c[k - 1]) / (rc[j] - rc[j - 1]),
                                 (c[k + 1] - c[k]) / (rc[j + 1] - rc[j]));
    }
  }

  for (std::size_t i = 0; i < nx; ++i) {
    const double dx = xf[i + 1] - xf[i];
    for (std::size_t j = 0; j < nr; ++j) {
      const std::size_t k = G.index(i, j);
      const double u = ux_[k];
      const double v = ur_[k];
      double ddx = 0.0;
      if (u > 0.0) {
        const double right = c[k] + slope_x_[k] * (xf[i + 1] - xc[i]);
        const double left =
            i > 0 ? c[k - nr] + slope_x_[k - nr] * (xf[i] - xc[i - 1])
                  : ghost_value(i, j, 0);
        ddx = (right - left) / dx;
      } else if (u < 0.0) {
        const double left = c[k] - slope_x_[k] * (xc[i] - xf[i]);
        const double right =
            i + 1 < nx ? c[k + nr] - slope_x_[k + nr] * (xc[i + 1] - xf[i + 1])
                       : ghost_value(i, j, 1);
        ddx = (right - left) / dx;
      }
      double ddr = 0.0;
      const double dr = rf[j + 1] - rf[j];
      if (v > 0.0) {
        const double right = c[k] + slope_r_[k] * (rf[j + 1] - rc[j]);
        // Mirror cell across the axis carries the same value.
        const double left =
            j > 0 ? c[k - 1] + slope_r_[k - 1] * (rf[j] - rc[j - 1]) : c[k];
        ddr = (right - left) / dr;
      } else if (v < 0.0) {
        const double left = c[k] - slope_r_[k] * (rc[j] - rf[j]);
        const double right =
            j + 1 < nr ? c[k + 1] - slope_r_[k + 1] * (rc[j + 1] - rf[j + 1])
                       : ghost_value(i, j, 2);
        ddr = (right - left) / dr;
      }
      out[k] = -(u * ddx + v * ddr);
    }
  }
}

double TransportSolver::max_courant_rate(const FlowModel& flow) const {
  const auto& G = *grid_;
  double rate = 0.0;
  for (std::size_t i = 0; i < G.nx(); ++i) {
    const double xl = field_.x_lab(i);
    for (std::size_t j = 0; j < G.nr(); ++j) {
      const auto u = flow_velocity(flow, xl, G.rho_centers()[j]);
      rate = std::max(rate,
                      std::abs(u.ux) / G.dx(i) + std::abs(u.urho) / G.drho(j));
    }
  }
  return rate;
}

int TransportSolver::advect(const FlowModel& flow, double dt) {
  const auto& G = *grid_;
  const std::size_t nx = G.nx();
  const std::size_t nr = G.nr();
  double rate = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double xl = field_.x_lab(i);
    const double dx = G.dx(i);
    for (std::size_t j = 0; j < nr; ++j) {
      const std::size_t k = G.index(i, j);
      const auto u = flow_velocity(flow, xl, G.rho_centers()[j]);
      ux_[k] = u.ux;
      ur_[k] = u.urho;
      rate = std::max(rate, std::abs(u.ux) / dx + std::abs(u.urho) / G.drho(j));
    }
  }
  if (rate == 0.0) return 0;
  const int nsub = std::max(1, static_cast<int>(std::ceil(dt * rate / cfg_.cfl)));
  const double h = dt / nsub;
  auto& c = field_.c;
  const std::size_t n = c.size();
  for (int s = 0; s < nsub; ++s) {
    advection_rate(c, rate_);
    for (std::size_t k = 0; k < n; ++k) stage_[k] = c[k] + h * rate_[k];
    advection_rate(stage_, rate_);
    for (std::size_t k = 0; k < n; ++k) {
      c[k] = 0.5 * c[k] + 0.5 * (stage_[k] + h * rate_[k]);
    }
  }
  check_finite("advect");
  return nsub;
}

void TransportSolver::advance(const FlowModel& flow, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("advance: dt must be positive");
  advect(flow, dt);
  diffuse(dt);
}

double TransportSolver::flux() const {
  double j = 0.0;
  for (std::size_t c = 0; c < field_.c.size(); ++c) {
    if (field_.solid[c]) j += field_.c[c] * volume_[c];
  }
  return lambda_ * j;
}

double TransportSolver::total_mass() const {
  double m = 0.0;
  for (std::size_t c = 0; c < field_.c.size(); ++c) m += field_.c[c] * volume_[c];
  return m;
}

long TransportSolver::recenter(double x_lab) {
  const auto& G = *grid_;
  const long shift = std::lround((x_lab - field_.x0) / G.h());
  if (shift == 0) return 0;

  const double old_x0 = field_.x0;
  window_shift_ += shift;
  const double new_x0 = window_base_ + static_cast<double>(window_shift_) * G.h();
  const auto& xf = G.x_faces();
  const std::size_t nx = G.nx();
  const std::size_t nr = G.nr();
  const double old_lo = old_x0 + xf.front();
  const double old_hi = old_x0 + xf.back();

  // Integral of the background over [a, b].
  auto bg_integral = [&](double a, double b) {
    return cfg_.c_inf * (b - a) + 0.5 * cfg_.g * (b * b - a * a);
  };

  std::vector<double> out(field_.c.size());
  std::size_t k0 = 0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double a = new_x0 + xf[i];
    const double b = new_x0 + xf[i + 1];
    const double eps = 1e-9 * (b - a);
    while (k0 < nx && old_x0 + xf[k0 + 1] <= a + eps) ++k0;
    std::vector<std::pair<std::size_t, double>> parts;
    double covered = 0.0;
    double bg_len = 0.0, bg_int = 0.0;
    if (a < old_lo - eps) {
      const double e = std::min(b, old_lo);
      bg_len += e - a;
      bg_int += bg_integral(a, e);
    }
    if (b > old_hi + eps) {
      const double s = std::max(a, old_hi);
      bg_len += b - s;
      bg_int += bg_integral(s, b);
    }
    for (std::size_t k = k0; k < nx; ++k) {
      const double oa = old_x0 + xf[k];
      const double ob = old_x0 + xf[k + 1];
      if (oa >= b - eps) break;
      const double ov = std::min(b, ob) - std::max(a, oa);
      if (ov > eps) {
        parts.emplace_back(k, ov);
        covered += ov;
      }
    }
    const double total = covered + bg_len;
    for (std::size_t j = 0; j < nr; ++j) {
      double acc = bg_int;
      for (const auto& [k, ov] : parts) acc += field_.c[G.index(k, j)] * ov;
      out[G.index(i, j)] = acc / total;
    }
  }
  field_.c = std::move(out);
  field_.x0 = new_x0;
  rebuild_mask();
  return shift;
}

void TransportSolver::check_finite(const char* where) const {
  for (double v : field_.c) {
    if (!std::isfinite(v)) {
      throw SolverError(std::string("transport: non-finite value after ") +
                        where);
    }
  }
}

double steady_diffusive_flux(const Posture& posture, const SwimmerGeometry& g,
                             const TransportConfig& cfg) {
  if (cfg.g != 0.0) {
    throw PreconditionError("steady_diffusive_flux: needs a homogeneous background");
  }
  TransportSolver solver(g, cfg);
  solver.set_window_center(posture.X);
  solver.set_spheres(swimmer_bodies(posture, g));
  solver.solve_steady();
  return solver.flux();
}

double instantaneous_flux(const TransportSolver& solver) { return solver.flux(); }

}  // namespace trisphere
