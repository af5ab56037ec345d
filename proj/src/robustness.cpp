#include "xorst/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace xorst {

QuadformProjection quadform_project(const MatC& H, const VecC& y) {
  if (H.rows() != H.cols() || H.rows() != y.size() || H.rows() < 2)
    throw ValidationError("quadform_project: shape mismatch");
  if (hermitian_defect(H) > 1e-10) throw ValidationError("quadform_project: H is not Hermitian");
  if (std::abs(y.norm() - 1.0) > 1e-10) throw ValidationError("quadform_project: y is not a unit vector");
  Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (H + H.adjoint()));
  const VecR& h = es.eigenvalues();
  const Eigen::Index d = h.size();
  const double h1 = h(d - 1);
  const double gap_tol = 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff());
  Eigen::Index top = d - 1;
  while (top > 0 && h(top - 1) >= h1 - gap_tol) --top;
  if (top == 0) throw ValidationError("quadform_project: H has a single eigenvalue");
  const double h2 = h(top - 1);
  const MatC v = es.eigenvectors().rightCols(d - top);
  VecC z = v * (v.adjoint() * y);
  if (z.norm() < 1e-12) throw ValidationError("quadform_project: y is orthogonal to the top eigenspace");
  z.normalize();
  auto q = [&](const VecC& x) { return x.dot(H * x).real(); };
  const double rad = std::max(0.0, 2.0 * (q(z) - q(y)) / (h1 - h2));
  return {z, (z - y).norm(), std::sqrt(rad)};
}

NearMaximumReport near_maximum_check(const XorGame& game, const Verdict& verdict, int samples, Rng& rng) {
  if (!verdict.is_self_test || !verdict.normalization || !verdict.normalized_witness)
    throw PreconditionError("near_maximum_check needs a self-testing game");
  const XorGame g = transform_game(game, *verdict.normalization);
  const TorusPoint& z = *verdict.normalized_witness;
  const double qz = eval_Z(g, z);
  const int n = g.players();
  std::uniform_real_distribution<double> t0(-kPi, kPi), tj(0.0, kPi);
  NearMaximumReport r;
  for (int s = 0; s < samples; ++s) {
    TorusPoint y(VecR(n + 1));
    y.theta(0) = t0(rng);
    for (int k = 1; k <= n; ++k) y.theta(k) = tj(rng);
    const double dist = torus_distance(y, z);
    if (dist < 1e-12) continue;
    ++r.samples;
    const double gap = qz - eval_Z(g, y);
    if (!(gap > 0)) {
      ++r.violations;
      continue;
    }
    r.C3 = std::max(r.C3, dist / std::sqrt(gap));
  }
  return r;
}

std::string to_string(StrategyClass c) {
  switch (c) {
    case StrategyClass::T:
      return "t";
    case StrategyClass::S:
      return "s";
    case StrategyClass::Qubit:
      return "qubit";
    case StrategyClass::Canonical:
      return "canonical";
  }
  return "unknown";
}

StrategyClass strategy_class_from_string(const std::string& s) {
  if (s == "t") return StrategyClass::T;
  if (s == "s") return StrategyClass::S;
  if (s == "qubit") return StrategyClass::Qubit;
  if (s == "canonical") return StrategyClass::Canonical;
  throw ValidationError("unknown strategy class '" + s + "'");
}

EnvelopeFit fit_envelope(const std::vector<RobustnessSample>& samples) {
  EnvelopeFit fit;
  std::map<long, std::pair<double, double>> bins;  // bin -> (eps, max distance)
  bool any = false;
  for (const auto& s : samples) {
    if (!(s.eps > 0) || !std::isfinite(s.distance)) continue;
    any = true;
    fit.C = std::max(fit.C, s.distance / std::sqrt(s.eps));
    const long b = std::lround(2.0 * std::log10(s.eps));
    auto it = bins.find(b);
    if (it == bins.end() || s.distance > it->second.second) bins[b] = {s.eps, s.distance};
  }
  if (!any) throw ValidationError("fit_envelope: no sample has positive eps");
  fit.bins = static_cast<int>(bins.size());
  std::vector<double> xs, ys;
  for (const auto& [b, v] : bins)
    if (v.second > 0) {
      xs.push_back(std::log(v.first));
      ys.push_back(std::log(v.second));
    }
  if (xs.size() >= 3) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i] / n;
      my += ys[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx > 0) fit.slope = sxy / sxx;
  }
  return fit;
}

namespace {

Eigen::Matrix2cd small_unitary(double sigma, Rng& rng) {
  const VecC a = complex_gaussian(4, rng);
  Eigen::Matrix2cd g;
  g << a(0), a(1), a(2), a(3);
  Eigen::Matrix2cd h = 0.5 * (g + g.adjoint());
  h /= std::max(1e-300, spectral_norm(MatC(h)));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
  Eigen::Vector2cd ph;
  for (int i = 0; i < 2; ++i) ph(i) = std::polar(1.0, sigma * es.eigenvalues()(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

VecC kicked(const VecC& v, double sigma, Rng& rng) {
  VecC t = complex_gaussian(static_cast<int>(v.size()), rng);
  t -= v.dot(t) * v;
  VecC out = v + sigma * t / t.norm();
  return out / out.norm();
}

double clamp_angle(double x) { return std::clamp(x, 0.0, kPi); }

// Draws strategies of one class at perturbation size sigma, in the frame of
// the normalized game.
class Sampler {
 public:
  Sampler(const XorGame& game, const Verdict& v, const RobustnessConfig& cfg)
      : game_(transform_game(game, *v.normalization)), q_(v.q_f), cfg_(cfg) {
    const TorusPoint beta = *v.normalized_witness;
    CriticalPoint cp;
    cp.point = beta;
    cp.value = q_;
    maxima_.q_f = q_;
    maxima_.maxima.push_back(cp);
    cp.point = (-beta).canonical();
    maxima_.maxima.push_back(cp);
    beta_ = beta;
    ref_ = canonicalize_qubit_strategy(make_T_strategy(beta)).canonical;
  }

  RobustnessSample draw(double sigma, Rng& rng) const {
    switch (cfg_.cls) {
      case StrategyClass::T:
        return measure(perturb_T(beta_, sigma, rng, PerturbMode::AnglesOnly));
      case StrategyClass::S:
        return measure(perturbed_S(sigma, rng).strategy);
      case StrategyClass::Qubit:
        return measure(perturbed_qubit(sigma, rng));
      case StrategyClass::Canonical:
        return canonical_sample(sigma, rng);
    }
    throw ValidationError("unknown strategy class");
  }

 private:
  RobustnessSample measure(const QubitStrategy& s) const {
    return {0.0, q_ - score(game_, s), distance_to_optimal(s, maxima_)};
  }

  SClassStrategy perturbed_S(double sigma, Rng& rng) const {
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> th = ref_.thetas;
    for (double& t : th) t = clamp_angle(t + noise(rng));
    VecC psi = kicked(ref_.strategy.state, sigma, rng);
    const double a0 = std::abs(psi(0));
    if (a0 > 0) psi *= std::conj(psi(0)) / a0;
    psi(0) = psi(0).real();
    return make_S_strategy(th, psi);
  }

  QubitStrategy perturbed_qubit(double sigma, Rng& rng) const {
    QubitStrategy s = ref_.strategy;
    for (auto& pair : s.measurements)
      for (auto& m : pair) {
        const Eigen::Matrix2cd u = small_unitary(sigma, rng);
        m = u * m * u.adjoint();
      }
    s.state = kicked(s.state, sigma, rng);
    std::vector<int> dims(s.players(), 2);
    for (int k = 0; k < s.players(); ++k) {
      const Eigen::Matrix2cd frame = random_unitary(2, rng);
      for (auto& m : s.measurements[k]) m = frame * m * frame.adjoint();
      s.state = apply_local(s.state, dims, k, frame);
    }
    return s;
  }

  RobustnessSample canonical_sample(double sigma, Rng& rng) const {
    const int n = game_.players();
    const int m = cfg_.junk_blocks;
    std::normal_distribution<double> noise(0.0, sigma);
    GeneralStrategy raw;
    raw.dims.assign(n, 2 * m);
    std::vector<std::vector<double>> th(n, std::vector<double>(m));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < m; ++l) th[k][l] = clamp_angle(ref_.thetas[k] + noise(rng));
    std::int64_t tuples = 1;
    for (int k = 0; k < n; ++k) tuples *= m;
    const VecC p = random_unit_vector(static_cast<int>(tuples), rng);
    const std::size_t nq = std::size_t{1} << n;
    CanonicalStrategy cs;
    cs.thetas = th;
    cs.state = VecC::Zero(checked_pow(2 * m, n, std::int64_t{1} << 20));
    std::vector<int> l(n);
    for (std::int64_t t = 0; t < tuples; ++t) {
      std::int64_t rem = t;
      for (int k = n - 1; k >= 0; --k) {
        l[k] = static_cast<int>(rem % m);
        rem /= m;
      }
      const VecC lam = kicked(ref_.strategy.state, sigma, rng);
      for (std::size_t a = 0; a < nq; ++a) {
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) idx = idx * (2 * m) + ((a >> (n - 1 - k)) & 1u) * m + l[k];
        cs.state(idx) = p(t) * lam(a);
      }
    }
    // Hide the block structure behind random local frames.
    const GeneralStrategy canon = cs.to_general();
    raw.state = canon.state;
    for (int k = 0; k < n; ++k) {
      const MatC v = random_unitary(2 * m, rng);
      raw.measurements.push_back({v * canon.measurements[k][0] * v.adjoint(), v * canon.measurements[k][1] * v.adjoint()});
      raw.state = apply_local(raw.state, raw.dims, k, v);
    }
    const CanonicalStrategy recovered = to_canonical_form(raw);
    const IdealProduct ip = nearest_ideal_product(game_, recovered, maxima_);
    return {0.0, q_ - score(game_, raw), ip.distance};
  }

  XorGame game_;
  double q_;
  RobustnessConfig cfg_;
  MaximaSet maxima_;
  TorusPoint beta_;
  SClassStrategy ref_;
};

}  // namespace

RobustnessCertificate run_robustness_experiment(const XorGame& game, const RobustnessConfig& config,
                                                const Verdict* verdict) {
  if (config.samples_per_eps < 1) throw ValidationError("samples_per_eps must be positive");
  if (config.eps_targets.empty()) throw ValidationError("no eps targets");
  for (double e : config.eps_targets)
    if (!(e > 0) || !std::isfinite(e)) throw ValidationError("eps targets must be positive");
  if (config.junk_blocks < 1) throw ValidationError("junk_blocks must be positive");
  std::optional<Verdict> own;
  if (!verdict) {
    own = classify(game);
    verdict = &*own;
  }
  if (!verdict->is_robust_self_test)
    throw PreconditionError("game is not a robust self-test (" + verdict->reason + ")");

  RobustnessCertificate cert;
  cert.cls = config.cls;
  cert.seed = config.seed;
  cert.q_f = verdict->q_f;
  cert.q_f_prime = verdict->q_f_prime.value_or(0.0);
  cert.K2 = verdict->K2.value_or(0.0);
  cert.eps_targets = config.eps_targets;
  const Sampler sampler(game, *verdict, config);

  for (std::size_t ti = 0; ti < config.eps_targets.size(); ++ti) {
    const double target = config.eps_targets[ti];
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(ti), static_cast<std::uint64_t>(config.cls)};
    Rng rng(seq);
    int attempts = 0;
    auto in_band = [&](double e) { return std::abs(e - target) <= config.band * target; };
    // Bisection on log sigma against the median eps of a small batch.
    double lo = std::log(1e-9), hi = std::log(4.0), ls = 0.5 * std::log(target);
    for (int it = 0; it < 60 && attempts < config.max_attempts_per_target; ++it) {
      std::vector<double> batch;
      for (int b = 0; b < 15; ++b, ++attempts) batch.push_back(sampler.draw(std::exp(ls), rng).eps);
      std::nth_element(batch.begin(), batch.begin() + 7, batch.end());
      const double med = batch[7];
      if (in_band(med)) break;
      (med < target ? lo : hi) = ls;
      ls = 0.5 * (lo + hi);
    }
    const double sigma = std::exp(ls);
    int accepted = 0;
    while (accepted < config.samples_per_eps && attempts < config.max_attempts_per_target) {
      ++attempts;
      RobustnessSample s = sampler.draw(sigma, rng);
      if (!in_band(s.eps)) continue;
      s.target = target;
      cert.samples.push_back(s);
      ++accepted;
    }
    if (accepted < config.samples_per_eps) {
      std::ostringstream msg;
      msg << "eps target " << target << ": only " << accepted << " of " << config.samples_per_eps
          << " samples within the band after " << attempts << " attempts";
      cert.warnings.push_back(msg.str());
    }
  }
  if (cert.samples.empty()) throw PreconditionError("no eps target produced any sample");
  const EnvelopeFit fit = fit_envelope(cert.samples);
  cert.fitted_C = fit.C;
  cert.slope = fit.slope;
  cert.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& s : cert.samples)
    cert.max_violation = std::max(cert.max_violation, s.distance - fit.C * std::sqrt(s.eps));
  return cert;
}

std::string certificate_csv(const RobustnessCertificate& cert) {
  std::ostringstream out;
  out.precision(17);
  out << "eps,distance,bound_C_sqrt_eps\n";
  for (const auto& s : cert.samples) out << s.eps << ',' << s.distance << ',' << cert.fitted_C * std::sqrt(s.eps) << '\n';
  return out.str();
}

}  // namespace xorst
