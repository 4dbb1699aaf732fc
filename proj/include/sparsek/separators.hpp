#pragma once

#include <cmath>
#include <vector>

#include "sparsek/embedding.hpp"
#include "sparsek/rng.hpp"

namespace sparsek {

// Gaussian-threshold orthogonal separator. With separation threshold beta
// and orthogonality degree m, the threshold is t = tail^{-1}(1/m') for
// m' = m^{(1+beta)/(1-beta)}. Raw mode returns {u : <psi_u, gamma> >= t}
// with inclusion scale alpha = 1/m'; rescaled mode conditions the Gaussian
// on a uniformly chosen pivot vertex and keeps only lexicographically-first
// hits, boosting the scale to exactly 1/n.
struct SeparatorParams {
  double m = 0.0;
  double beta = 0.0;
  double log_mprime = 0.0;  // ((1+beta)/(1-beta)) * ln m
  double t = 0.0;
  double alpha = 0.0;  // 1/m' raw, 1/n rescaled
  bool rescaled = false;
  int n = 0;  // vertex count (rescaled ordering)

  static SeparatorParams raw(double m, double beta) {
    SeparatorParams p = base(m, beta);
    p.alpha = std::exp(-p.log_mprime);
    if (!(p.alpha > 0.0))
      throw BadParams("raw separator scale 1/m' underflows; use rescaled mode");
    return p;
  }

  static SeparatorParams rescaled_mode(double m, double beta, int n) {
    if (n < 1) throw BadParams("rescaled separator needs a vertex count");
    SeparatorParams p = base(m, beta);
    p.rescaled = true;
    p.n = n;
    p.alpha = 1.0 / n;
    return p;
  }

  // Parameters the rounding pipeline uses: m = 12k/eps, beta = 1 - eps/4, rescaled.
  static SeparatorParams pipeline(int k, double eps, int n) {
    return rescaled_mode(12.0 * k / eps, 1.0 - eps / 4.0, n);
  }

 private:
  static SeparatorParams base(double m, double beta) {
    if (!(m >= 2.0)) throw BadParams("separator degree m must be >= 2");
    if (!(beta > 0.0 && beta < 1.0)) throw BadParams("beta must lie in (0,1)");
    SeparatorParams p;
    p.m = m;
    p.beta = beta;
    p.log_mprime = (1.0 + beta) / (1.0 - beta) * std::log(m);
    p.t = gaussian_tail_inv_log(-p.log_mprime);
    return p;
  }
};

struct SeparatorSample {
  VertexSet members;
  Vector gamma;   // the Gaussian that generated the sample
  int iota = -1;  // rescaled pivot, -1 in raw mode
};

inline VertexSet threshold_set(const EmbeddedPoints& points, const Vector& gamma, double t) {
  VertexSet s(points.n());
  for (int u = 0; u < points.n(); ++u)
    if (points.psi.row(u).dot(gamma) >= t) s.add(u);
  return s;
}

namespace detail {
inline void require_unit(const EmbeddedPoints& points) {
  for (int u = 0; u < points.n(); ++u)
    if (std::abs(points.psi.row(u).squaredNorm() - 1.0) > 1e-6)
      throw NotUnitNorm("separator input vectors must be unit norm");
}
}  // namespace detail

inline SeparatorSample sample_separator(const EmbeddedPoints& points, const SeparatorParams& p,
                                        Rng& rng) {
  detail::require_unit(points);
  const int dim = points.dim();
  SeparatorSample out;
  if (!p.rescaled) {
    out.gamma = Vector(dim);
    for (int j = 0; j < dim; ++j) out.gamma[j] = rng.gaussian();
    out.members = threshold_set(points, out.gamma, p.t);
    return out;
  }

  if (p.n != points.n()) throw DimensionMismatch("separator params sized for another point set");
  out.iota = rng.uniform_int(points.n());
  const double coeff = rng.truncated_gaussian_above(p.t);
  Vector g(dim);
  for (int j = 0; j < dim; ++j) g[j] = rng.gaussian();
  const Vector pivot = points.psi.row(out.iota).transpose();
  out.gamma = coeff * pivot + (g - g.dot(pivot) * pivot);
  VertexSet hit = threshold_set(points, out.gamma, p.t);
  for (int u = 0; u < out.iota; ++u)
    if (hit.contains(u)) {
      out.members = VertexSet(points.n());
      return out;
    }
  out.members = hit;
  return out;
}

// Statistical audit of the three separator properties. Inclusion and joint
// rates are compared against their exact targets; the Lipschitz separation
// property is reported through the smallest constant c that makes
// Pr[separated] <= c * sqrt(ln m) * alpha * |psi_u - psi_v| hold empirically.
struct SeparatorAudit {
  long samples = 0;
  double alpha = 0.0;
  std::vector<double> inclusion_rate;
  double max_inclusion_sigma = 0.0;  // worst |rate - alpha| in binomial sigmas
  double max_joint_rate = 0.0;       // over beta-separated pairs
  double joint_bound = 0.0;          // alpha / m
  double max_joint_excess_sigma = 0.0;
  double fitted_distortion_c = 0.0;
  struct PairStat {
    int u, v;
    double inner;
    double joint_rate;
    double separation_rate;
  };
  std::vector<PairStat> pairs;
};

inline SeparatorAudit separator_property_audit(const EmbeddedPoints& points,
                                               const SeparatorParams& p, long num_samples,
                                               std::uint64_t seed) {
  if (num_samples < 10000) throw BadParams("audit needs at least 1e4 samples");
  const int n = points.n();
  std::vector<long> hits(n, 0);
  std::vector<std::vector<long>> joint(n, std::vector<long>(n, 0));
  for (long i = 0; i < num_samples; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    SeparatorSample s = sample_separator(points, p, rng);
    const std::vector<int> mem = s.members.members();
    for (size_t a = 0; a < mem.size(); ++a) {
      ++hits[mem[a]];
      for (size_t b = a + 1; b < mem.size(); ++b) ++joint[mem[a]][mem[b]];
    }
  }

  SeparatorAudit audit;
  audit.samples = num_samples;
  audit.alpha = p.alpha;
  audit.joint_bound = p.alpha / p.m;
  const double ns = static_cast<double>(num_samples);
  const double sigma_incl = std::sqrt(std::max(p.alpha * (1.0 - p.alpha) / ns, 1e-300));
  audit.inclusion_rate.resize(n);
  for (int u = 0; u < n; ++u) {
    audit.inclusion_rate[u] = hits[u] / ns;
    audit.max_inclusion_sigma = std::max(
        audit.max_inclusion_sigma, std::abs(audit.inclusion_rate[u] - p.alpha) / sigma_incl);
  }
  const double qb = audit.joint_bound;
  const double sigma_joint = std::sqrt(std::max(qb * (1.0 - qb) / ns, 1e-300));
  const double sqrt_log_m = std::sqrt(std::log(p.m));
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      SeparatorAudit::PairStat ps;
      ps.u = u;
      ps.v = v;
      ps.inner = points.inner(u, v);
      ps.joint_rate = joint[u][v] / ns;
      ps.separation_rate = (hits[u] + hits[v] - 2.0 * joint[u][v]) / ns;
      audit.pairs.push_back(ps);
      if (ps.inner <= p.beta)
        audit.max_joint_excess_sigma =
            std::max(audit.max_joint_excess_sigma, (ps.joint_rate - qb) / sigma_joint);
      if (ps.inner <= p.beta) audit.max_joint_rate = std::max(audit.max_joint_rate, ps.joint_rate);
      const double dist = (points.psi.row(u) - points.psi.row(v)).norm();
      if (dist > 1e-12)
        audit.fitted_distortion_c = std::max(
            audit.fitted_distortion_c, ps.separation_rate / (p.alpha * sqrt_log_m * dist));
    }
  return audit;
}

}  // namespace sparsek
