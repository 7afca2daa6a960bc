#include "syndatum/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "syndatum/quadrature.hpp"

namespace syndatum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct TruncNormal1D {
  double mean, sd, lo, hi, z_lo, z_hi, mass;
};

TruncNormal1D truncnorm_coordinate(const density::TruncatedNormalDiag& d, Eigen::Index i) {
  TruncNormal1D t{};
  t.mean = d.mean[i];
  t.sd = std::sqrt(d.variance[i]);
  t.lo = d.support.lower[i];
  t.hi = d.support.upper[i];
  t.z_lo = (t.lo - t.mean) / t.sd;
  t.z_hi = (t.hi - t.mean) / t.sd;
  t.mass = normal_cdf(t.z_hi) - normal_cdf(t.z_lo);
  return t;
}

std::string join(const Vector& v) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

BoxSupport::BoxSupport(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "box bounds must be non-empty and equal length");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw Error(ErrorCode::InvalidArgument, "box requires lower < upper");
  }
}

BoxSupport BoxSupport::interval(double lo, double hi) {
  return BoxSupport(Vector::Constant(1, lo), Vector::Constant(1, hi));
}

BoxSupport BoxSupport::cube(Eigen::Index p, double lo, double hi) {
  return BoxSupport(Vector::Constant(p, lo), Vector::Constant(p, hi));
}

bool BoxSupport::contains(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

Matrix BoxSupport::corners() const {
  const Eigen::Index p = dim();
  const Eigen::Index count = Eigen::Index{1} << p;
  Matrix out(count, p);
  for (Eigen::Index c = 0; c < count; ++c) {
    for (Eigen::Index j = 0; j < p; ++j) out(c, j) = ((c >> j) & 1) ? upper[j] : lower[j];
  }
  return out;
}

bool same_support(const BoxSupport& a, const BoxSupport& b) {
  if (a.dim() != b.dim()) return false;
  return ((a.lower - b.lower).cwiseAbs().maxCoeff() <= 1e-12) && ((a.upper - b.upper).cwiseAbs().maxCoeff() <= 1e-12);
}

DensityModel::DensityModel(Variant v) : variant_(std::move(v)) { finalize(); }

DensityModel DensityModel::uniform_box(BoxSupport support) { return DensityModel(density::UniformBox{std::move(support)}); }

DensityModel DensityModel::truncated_normal(BoxSupport support, Vector mean, Vector variance) {
  if (mean.size() != support.dim() || variance.size() != support.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "truncated normal parameters must match the support dimension");
  }
  if ((variance.array() <= 0.0).any()) throw Error(ErrorCode::InvalidVariance, "truncated normal variances must be > 0");
  return DensityModel(density::TruncatedNormalDiag{std::move(support), std::move(mean), std::move(variance)});
}

DensityModel DensityModel::piecewise_constant(std::vector<double> breakpoints, std::vector<double> heights) {
  if (breakpoints.size() < 2 || heights.size() + 1 != breakpoints.size()) {
    throw Error(ErrorCode::DimensionMismatch, "piecewise density needs k+1 breakpoints for k heights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) throw Error(ErrorCode::InvalidArgument, "breakpoints must increase");
    if (!(heights[i] >= 0.0) || !std::isfinite(heights[i])) throw Error(ErrorCode::InvalidArgument, "heights must be finite and >= 0");
    total += heights[i] * (breakpoints[i + 1] - breakpoints[i]);
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "piecewise density does not integrate to 1");
  return DensityModel(density::PiecewiseConstant1D{std::move(breakpoints), std::move(heights)});
}

DensityModel DensityModel::two_block(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  return piecewise_constant({-1.0, 0.0, 1.0}, {1.0 - alpha, alpha});
}

DensityModel DensityModel::linear_tilt(double slope) {
  if (!(std::abs(slope) <= 1.0)) throw Error(ErrorCode::InvalidArgument, "tilt slope must satisfy |slope| <= 1");
  return DensityModel(density::LinearTilt1D{slope});
}

DensityModel DensityModel::triangular(bool increasing) { return DensityModel(density::Triangular1D{increasing}); }

void DensityModel::finalize() {
  std::visit(
      Overloaded{
          [&](const density::UniformBox& d) {
            support_ = d.support;
            mean_ = 0.5 * (d.support.lower + d.support.upper);
            variances_ = (d.support.upper - d.support.lower).array().square() / 12.0;
          },
          [&](const density::TruncatedNormalDiag& d) {
            support_ = d.support;
            const Eigen::Index p = d.support.dim();
            mean_.resize(p);
            variances_.resize(p);
            for (Eigen::Index i = 0; i < p; ++i) {
              const auto t = truncnorm_coordinate(d, i);
              const double shift = (normal_pdf(t.z_lo) - normal_pdf(t.z_hi)) / t.mass;
              const double spread = (t.z_lo * normal_pdf(t.z_lo) - t.z_hi * normal_pdf(t.z_hi)) / t.mass;
              mean_[i] = t.mean + t.sd * shift;
              variances_[i] = t.sd * t.sd * (1.0 + spread - shift * shift);
            }
          },
          [&](const density::PiecewiseConstant1D& d) {
            support_ = BoxSupport::interval(d.breakpoints.front(), d.breakpoints.back());
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < d.heights.size(); ++i) {
              const double a = d.breakpoints[i], b = d.breakpoints[i + 1];
              m1 += d.heights[i] * (b * b - a * a) / 2.0;
              m2 += d.heights[i] * (b * b * b - a * a * a) / 3.0;
            }
            mean_ = Vector::Constant(1, m1);
            variances_ = Vector::Constant(1, m2 - m1 * m1);
          },
          [&](const density::LinearTilt1D& d) {
            support_ = BoxSupport::interval(0.0, 2.0);
            const double m1 = 1.0 + d.slope / 3.0;
            const double m2 = 4.0 / 3.0 + 2.0 * d.slope / 3.0;
            mean_ = Vector::Constant(1, m1);
            variances_ = Vector::Constant(1, m2 - m1 * m1);
          },
          [&](const density::Triangular1D& d) {
            support_ = BoxSupport::interval(0.0, 1.0);
            mean_ = Vector::Constant(1, d.increasing ? 2.0 / 3.0 : 1.0 / 3.0);
            variances_ = Vector::Constant(1, 1.0 / 18.0);
          },
      },
      variant_);
}

DensityModel DensityModel::marginal(Eigen::Index i) const {
  if (i < 0 || i >= dim()) throw Error(ErrorCode::InvalidArgument, "marginal index out of range");
  return std::visit(Overloaded{
                        [&](const density::UniformBox& d) {
                          return uniform_box(BoxSupport::interval(d.support.lower[i], d.support.upper[i]));
                        },
                        [&](const density::TruncatedNormalDiag& d) {
                          return truncated_normal(BoxSupport::interval(d.support.lower[i], d.support.upper[i]),
                                                  Vector::Constant(1, d.mean[i]), Vector::Constant(1, d.variance[i]));
                        },
                        [&](const auto&) { return *this; },
                    },
                    variant_);
}

double DensityModel::pdf1(double x) const {
  if (dim() != 1) throw Error(ErrorCode::DimensionMismatch, "pdf1 requires a one-dimensional density");
  return pdf(Vector::Constant(1, x));
}

double DensityModel::pdf(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension does not match density");
  if (!support_.contains(x)) return 0.0;
  return std::visit(Overloaded{
                        [&](const density::UniformBox& d) {
                          return 1.0 / (d.support.upper - d.support.lower).prod();
                        },
                        [&](const density::TruncatedNormalDiag& d) {
                          double v = 1.0;
                          for (Eigen::Index i = 0; i < x.size(); ++i) {
                            const auto t = truncnorm_coordinate(d, i);
                            v *= normal_pdf((x[i] - t.mean) / t.sd) / (t.sd * t.mass);
                          }
                          return v;
                        },
                        [&](const density::PiecewiseConstant1D& d) {
                          const double v = x[0];
                          for (std::size_t i = 0; i + 1 < d.breakpoints.size(); ++i) {
                            const bool last = i + 2 == d.breakpoints.size();
                            if (v >= d.breakpoints[i] && (v < d.breakpoints[i + 1] || last)) return d.heights[i];
                          }
                          return 0.0;
                        },
                        [&](const density::LinearTilt1D& d) { return 0.5 * (d.slope * (x[0] - 1.0) + 1.0); },
                        [&](const density::Triangular1D& d) { return d.increasing ? 2.0 * x[0] : 2.0 - 2.0 * x[0]; },
                    },
                    variant_);
}

double DensityModel::cdf1(double x) const {
  if (dim() != 1) throw Error(ErrorCode::DimensionMismatch, "cdf1 requires a one-dimensional density");
  const double lo = support_.lower[0], hi = support_.upper[0];
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return std::visit(Overloaded{
                        [&](const density::UniformBox&) { return (x - lo) / (hi - lo); },
                        [&](const density::TruncatedNormalDiag& d) {
                          const auto t = truncnorm_coordinate(d, 0);
                          return (normal_cdf((x - t.mean) / t.sd) - normal_cdf(t.z_lo)) / t.mass;
                        },
                        [&](const density::PiecewiseConstant1D& d) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i + 1 < d.breakpoints.size(); ++i) {
                            const double a = d.breakpoints[i], b = d.breakpoints[i + 1];
                            if (x >= b) {
                              acc += d.heights[i] * (b - a);
                            } else {
                              acc += d.heights[i] * (x - a);
                              break;
                            }
                          }
                          return std::clamp(acc, 0.0, 1.0);
                        },
                        [&](const density::LinearTilt1D& d) {
                          return 0.5 * (d.slope * (0.5 * x * x - x) + x);
                        },
                        [&](const density::Triangular1D& d) {
                          return d.increasing ? x * x : 1.0 - (1.0 - x) * (1.0 - x);
                        },
                    },
                    variant_);
}

std::vector<double> DensityModel::breakpoints1() const {
  if (dim() != 1) throw Error(ErrorCode::DimensionMismatch, "breakpoints1 requires a one-dimensional density");
  if (const auto* pc = std::get_if<density::PiecewiseConstant1D>(&variant_)) return pc->breakpoints;
  return {support_.lower[0], support_.upper[0]};
}

Matrix DensityModel::sample(Eigen::Index n, const SeedSpec& seed) const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  Rng rng(seed);
  Matrix out(n, dim());
  std::visit(
      Overloaded{
          [&](const density::UniformBox& d) {
            for (Eigen::Index r = 0; r < n; ++r) {
              for (Eigen::Index j = 0; j < dim(); ++j) out(r, j) = rng.uniform(d.support.lower[j], d.support.upper[j]);
            }
          },
          [&](const density::TruncatedNormalDiag& d) {
            double acceptance = 1.0;
            for (Eigen::Index j = 0; j < dim(); ++j) acceptance *= truncnorm_coordinate(d, j).mass;
            if (acceptance < 1e-4) {
              throw Error(ErrorCode::RejectionBudgetExceeded,
                          "truncated normal acceptance rate " + std::to_string(acceptance) + " is below 1e-4");
            }
            const Vector sd = d.variance.cwiseSqrt();
            Vector proposal(dim());
            for (Eigen::Index r = 0; r < n; ++r) {
              for (;;) {
                for (Eigen::Index j = 0; j < dim(); ++j) proposal[j] = d.mean[j] + sd[j] * rng.normal();
                if (d.support.contains(proposal)) break;
              }
              out.row(r) = proposal.transpose();
            }
          },
          [&](const density::PiecewiseConstant1D& d) {
            for (Eigen::Index r = 0; r < n; ++r) {
              const double u = rng.uniform();
              double acc = 0.0;
              std::size_t seg = d.heights.size() - 1;
              for (std::size_t i = 0; i < d.heights.size(); ++i) {
                acc += d.heights[i] * (d.breakpoints[i + 1] - d.breakpoints[i]);
                if (u < acc) {
                  seg = i;
                  break;
                }
              }
              // Segments with zero mass are never chosen above; the fallback is the last positive one.
              while (d.heights[seg] == 0.0 && seg > 0) --seg;
              out(r, 0) = rng.uniform(d.breakpoints[seg], d.breakpoints[seg + 1]);
            }
          },
          [&](const density::LinearTilt1D& d) {
            // Inverse CDF of a x^2 + b x = u with a = slope / 4, b = (1 - slope) / 2.
            const double a = d.slope / 4.0, b = (1.0 - d.slope) / 2.0;
            for (Eigen::Index r = 0; r < n; ++r) {
              const double u = rng.uniform();
              const double disc = std::sqrt(std::max(0.0, b * b + 4.0 * a * u));
              const double denom = b + disc;
              out(r, 0) = denom > 0.0 ? std::clamp(2.0 * u / denom, 0.0, 2.0) : 0.0;
            }
          },
          [&](const density::Triangular1D& d) {
            for (Eigen::Index r = 0; r < n; ++r) {
              const double s = std::sqrt(rng.uniform());
              out(r, 0) = d.increasing ? s : 1.0 - s;
            }
          },
      },
      variant_);
  return out;
}

std::string DensityModel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const density::UniformBox& d) {
                   os << "uniform lower=" << join(d.support.lower) << " upper=" << join(d.support.upper);
                 },
                 [&](const density::TruncatedNormalDiag& d) {
                   os << "truncnormal lower=" << join(d.support.lower) << " upper=" << join(d.support.upper)
                      << " mean=" << join(d.mean) << " var=" << join(d.variance);
                 },
                 [&](const density::PiecewiseConstant1D& d) {
                   os << "piecewise breaks=";
                   for (std::size_t i = 0; i < d.breakpoints.size(); ++i) os << (i ? "," : "") << d.breakpoints[i];
                   os << " heights=";
                   for (std::size_t i = 0; i < d.heights.size(); ++i) os << (i ? "," : "") << d.heights[i];
                 },
                 [&](const density::LinearTilt1D& d) { os << "tilt alpha=" << d.slope; },
                 [&](const density::Triangular1D& d) { os << "triangular " << (d.increasing ? "increasing" : "decreasing"); },
             },
             variant_);
  return os.str();
}

double pdf(const DensityModel& density, const Eigen::Ref<const Vector>& x) { return density.pdf(x); }

Matrix sample(const DensityModel& density, Eigen::Index n, const SeedSpec& seed) { return density.sample(n, seed); }

// ---------------------------------------------------------------------------
// chi-square divergence

namespace {

std::vector<double> merged_breakpoints(const DensityModel& p, const DensityModel& q) {
  auto cuts = p.breakpoints1();
  const auto more = q.breakpoints1();
  cuts.insert(cuts.end(), more.begin(), more.end());
  return quad::partition(p.support().lower[0], p.support().upper[0], cuts);
}

// Boundary slabs [h/4, h] shrinking by 4x each step. A finite integrand gives slab
// ratios near 1/4; a non-integrable p^2/q keeps the ratio near 1.
bool slab_contribution_diverges(const quad::Integrand& f, double edge, double inward, double width) {
  constexpr int kSteps = 20;
  double previous = -1.0;
  int stalled = 0;
  for (int k = 1; k <= kSteps; ++k) {
    const double h_outer = width * std::pow(0.25, k);
    const double h_inner = h_outer * 0.25;
    const double a = edge + inward * h_inner;
    const double b = edge + inward * h_outer;
    const double slab = quad::integrate(f, std::min(a, b), std::max(a, b), {}, 1e-10);
    if (previous > 0.0 && slab >= 0.9 * previous && slab > 1e-300) {
      ++stalled;
    } else {
      stalled = 0;
    }
    previous = slab;
  }
  return stalled >= 3;
}

double chi_square_1d(const DensityModel& p, const DensityModel& q) {
  const auto cuts = merged_breakpoints(p, q);
  const quad::Integrand ratio_sq = [&](double x) {
    const double pv = p.pdf1(x), qv = q.pdf1(x);
    if (qv > 0.0) return pv * pv / qv;
    return pv > 0.0 ? kInf : 0.0;
  };
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    // q vanishing on a set of positive p-mass.
    for (int k = 1; k <= 15; ++k) {
      const double x = a + (b - a) * k / 16.0;
      if (q.pdf1(x) == 0.0 && p.pdf1(x) > 0.0) return kInf;
    }
    const double w = 0.5 * (b - a);
    if (slab_contribution_diverges(ratio_sq, a, +1.0, w) || slab_contribution_diverges(ratio_sq, b, -1.0, w)) {
      return kInf;
    }
  }
  const double integral = quad::integrate(ratio_sq, cuts.front(), cuts.back(), cuts);
  return std::max(0.0, integral - 1.0);
}

void require_same_support(const DensityModel& p, const DensityModel& q) {
  if (!same_support(p.support(), q.support())) {
    throw Error(ErrorCode::SupportMismatch, "densities must share the same support box");
  }
}

}  // namespace

double chi_square_divergence(const DensityModel& p, const DensityModel& q) {
  require_same_support(p, q);
  if (p.dim() == 1) return chi_square_1d(p, q);
  // Independent coordinates: chi^2 + 1 factorizes.
  double prod = 1.0;
  for (Eigen::Index i = 0; i < p.dim(); ++i) {
    const double c = chi_square_1d(p.marginal(i), q.marginal(i));
    if (!std::isfinite(c)) return kInf;
    prod *= (c + 1.0);
  }
  return std::max(0.0, prod - 1.0);
}

// ---------------------------------------------------------------------------
// fidelity level

namespace {

// P_p(p(x) >= C q(x)) for one-dimensional densities.
double directional_tail_1d(const DensityModel& p, const DensityModel& q, double threshold) {
  const auto cuts = merged_breakpoints(p, q);
  const auto in_region = [&](double x) { return p.pdf1(x) - threshold * q.pdf1(x) >= 0.0; };
  double tail = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    // Stay strictly inside the segment so jump discontinuities at its ends do not register.
    const double eps = (b - a) * 1e-12;
    const auto switches = quad::switch_points(in_region, a + eps, b - eps);
    const auto pieces = quad::partition(a, b, switches);
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      const double lo = pieces[i], hi = pieces[i + 1];
      if (in_region(0.5 * (lo + hi))) tail += p.cdf1(hi) - p.cdf1(lo);
    }
  }
  return std::clamp(tail, 0.0, 1.0);
}

struct GridAxis {
  std::vector<double> p_density, q_density, p_mass, q_mass;
};

std::pair<double, double> directional_tails_product(const DensityModel& p, const DensityModel& q, double threshold) {
  const Eigen::Index dim = p.dim();
  const auto cells = static_cast<std::size_t>(
      std::clamp(std::floor(std::pow(4.0e6, 1.0 / static_cast<double>(dim))), 8.0, 2048.0));
  std::vector<GridAxis> axes(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto pm = p.marginal(j), qm = q.marginal(j);
    const double lo = p.support().lower[j], hi = p.support().upper[j];
    auto& ax = axes[static_cast<std::size_t>(j)];
    for (std::size_t c = 0; c < cells; ++c) {
      const double a = lo + (hi - lo) * c / cells, b = lo + (hi - lo) * (c + 1) / cells;
      const double mid = 0.5 * (a + b);
      ax.p_density.push_back(pm.pdf1(mid));
      ax.q_density.push_back(qm.pdf1(mid));
      ax.p_mass.push_back(pm.cdf1(b) - pm.cdf1(a));
      ax.q_mass.push_back(qm.cdf1(b) - qm.cdf1(a));
    }
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  double tail_p = 0.0, tail_q = 0.0;
  for (;;) {
    double pd = 1.0, qd = 1.0, pm = 1.0, qm = 1.0;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      pd *= axes[j].p_density[idx[j]];
      qd *= axes[j].q_density[idx[j]];
      pm *= axes[j].p_mass[idx[j]];
      qm *= axes[j].q_mass[idx[j]];
    }
    if (pd - threshold * qd >= 0.0) tail_p += pm;
    if (qd - threshold * pd >= 0.0) tail_q += qm;
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == cells) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  return {std::clamp(tail_p, 0.0, 1.0), std::clamp(tail_q, 0.0, 1.0)};
}

}  // namespace

double fidelity_tail_probability(const DensityModel& p, const DensityModel& q, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold C must be > 0");
  require_same_support(p, q);
  if (p.dim() == 1) {
    return std::max(directional_tail_1d(p, q, threshold), directional_tail_1d(q, p, threshold));
  }
  const auto [a, b] = directional_tails_product(p, q, threshold);
  return std::max(a, b);
}

bool FidelityCertificate::verify() const {
  for (const auto& g : grid) {
    if (g.tail > V * std::pow(g.threshold, -d) + 1e-9) return false;
  }
  return true;
}

std::vector<double> default_fidelity_grid(std::size_t points, double lo, double hi) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw Error(ErrorCode::InvalidGrid, "bad fidelity grid parameters");
  std::vector<double> grid(points);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  return grid;
}

FidelityCertificate certify_fidelity_level(const DensityModel& p, const DensityModel& q, double d,
                                           const std::vector<double>& grid) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidD, "fidelity exponent d must be > 0");
  if (grid.empty()) throw Error(ErrorCode::InvalidGrid, "threshold grid is empty");
  for (double c : grid) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidGrid, "thresholds must be finite and > 0");
  }
  FidelityCertificate cert;
  cert.d = d;
  for (double c : grid) {
    const double tail = fidelity_tail_probability(p, q, c);
    const double scaled = std::pow(c, d) * tail;
    if (cert.grid.empty() || scaled > cert.attained_sup) {
      cert.attained_sup = scaled;
      cert.worst_threshold = c;
    }
    cert.grid.push_back({c, tail, 0.0});
  }
  cert.V = cert.attained_sup;
  for (auto& g : cert.grid) g.bound = cert.V * std::pow(g.threshold, -d);
  return cert;
}

bool has_unit_infinite_fidelity(const DensityModel& p, const DensityModel& q, const std::vector<double>& grid) {
  for (double c : grid) {
    if (c > 1.0 && fidelity_tail_probability(p, q, c) != 0.0) return false;
  }
  return true;
}

FidelityLevel fidelity_from_chi2(double chi2_pq, double chi2_qp) {
  if (!std::isfinite(chi2_pq) || !std::isfinite(chi2_qp)) {
    throw Error(ErrorCode::InfiniteDivergence, "both chi^2 divergences must be finite");
  }
  if (chi2_pq < 0.0 || chi2_qp < 0.0) throw Error(ErrorCode::InvalidArgument, "chi^2 divergences must be >= 0");
  return {std::max(chi2_pq, chi2_qp) + 1.0, 1.0};
}

double chi2_bound_from_fidelity(double V, double d, double threshold) {
  if (!(d > 1.0)) throw Error(ErrorCode::InvalidD, "the converse bound needs d > 1");
  if (!(threshold >= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold C must be >= 1");
  return (threshold - 1.0) * (threshold - 1.0) +
         V * std::pow(2.0, d) / std::pow(threshold, d - 1.0) / (std::pow(2.0, d - 1.0) - 1.0);
}

}  // namespace syndatum
