#include "nematic/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "krylov.hpp"

namespace nematic {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::constant_unit: return "constant_unit";
    case Classification::zero: return "zero";
    case Classification::other: return "other";
  }
  return "unknown";
}

std::string to_string(StationaryMethod m) {
  return m == StationaryMethod::newton ? "newton" : "gradient_flow";
}

StationaryMethod stationary_method_from_string(const std::string& name) {
  if (name == "newton") return StationaryMethod::newton;
  if (name == "gradient_flow") return StationaryMethod::gradient_flow;
  throw std::invalid_argument("unknown stationary method '" + name + "'");
}

VectorField stationary_residual(const Model& model, const VectorField& z) {
  return model.chemical_potential(z);
}

double configuration_energy(const Model& model, const VectorField& z) {
  State s;
  s.d = z;
  s.u = VectorField(model.grid(), FieldRole::velocity);
  const auto e = model.total_energy(s);
  return e.elastic + e.bulk;
}

Classification classify(const VectorField& z, double tol) {
  const std::size_t n = z.size();
  double max_r = 0.0, max_unit_dev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::hypot(z.c[0][k], z.c[1][k]);
    max_r = std::max(max_r, r);
    max_unit_dev = std::max(max_unit_dev, std::abs(r - 1.0));
  }
  if (max_r <= tol) return Classification::zero;
  const double m0 = mean(z.c[0]), m1 = mean(z.c[1]);
  double var = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    var += (z.c[0][k] - m0) * (z.c[0][k] - m0) + (z.c[1][k] - m1) * (z.c[1][k] - m1);
  }
  var /= static_cast<double>(n);
  if (std::sqrt(var) <= tol && max_unit_dev <= tol) return Classification::constant_unit;
  return Classification::other;
}

VectorField linearized_apply(const Model& model, const VectorField& zbar, const VectorField& w) {
  const Potential& pot = model.potential();
  VectorField out = w;
  out.role = FieldRole::director;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Mat2 J = pot.f_jacobian(zbar.at(k));
    const double w0 = w.c[0][k], w1 = w.c[1][k];
    out.c[0][k] = J[0] * w0 + J[1] * w1;
    out.c[1][k] = J[2] * w0 + J[3] * w1;
  }
  VectorField lap = w;
  lap.role = FieldRole::director;
  axpy(-model.params().L, model.ops().laplacian(lap), out);
  return out;
}

namespace {

Eigen::VectorXd to_vec(const VectorField& v) {
  const Eigen::Index n = static_cast<Eigen::Index>(v.size());
  Eigen::VectorXd x(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x[k] = v.c[0][static_cast<std::size_t>(k)];
    x[n + k] = v.c[1][static_cast<std::size_t>(k)];
  }
  return x;
}

VectorField from_vec(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& x) {
  VectorField v(g, FieldRole::director);
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    v.c[0][static_cast<std::size_t>(k)] = x[k];
    v.c[1][static_cast<std::size_t>(k)] = x[n + k];
  }
  return v;
}

// Orthogonalises W against Q (twice) and returns an orthonormal basis of
// what is left, dropping numerically dependent directions.
Eigen::MatrixXd extend_basis(const Eigen::MatrixXd& Q, Eigen::MatrixXd W) {
  for (int pass = 0; pass < 2; ++pass) {
    if (Q.cols() > 0) W -= Q * (Q.transpose() * W);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
  const auto& R = qr.matrixR();
  const Eigen::Index kmax = std::min(W.rows(), W.cols());
  double ref = 0.0;
  for (Eigen::Index c = 0; c < W.cols(); ++c) ref = std::max(ref, W.col(c).norm());
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < kmax; ++i) {
    if (std::abs(R(i, i)) > 1e-10 * std::max(ref, 1e-300)) ++rank;
  }
  Eigen::MatrixXd thin = qr.householderQ() * Eigen::MatrixXd::Identity(W.rows(), rank);
  for (int pass = 0; pass < 2; ++pass) {
    if (Q.cols() > 0) thin -= Q * (Q.transpose() * thin);
    for (Eigen::Index c = 0; c < thin.cols(); ++c) {
      thin.col(c) -= thin.leftCols(c) * (thin.leftCols(c).transpose() * thin.col(c));
      thin.col(c).normalize();
    }
  }
  return thin;
}

double largest_eigenvalue(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& A,
                          Eigen::Index n, std::mt19937_64& rng, int steps) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = nd(rng);
  q.normalize();
  const int m = static_cast<int>(std::min<Eigen::Index>(steps, n));
  Eigen::MatrixXd Q(n, m);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  int used = 0;
  for (int j = 0; j < m; ++j) {
    Q.col(j) = q;
    used = j + 1;
    Eigen::VectorXd w = A(q);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd h = Q.leftCols(j + 1).transpose() * w;
      w -= Q.leftCols(j + 1) * h;
      if (pass == 0) {
        T.col(j).head(j + 1) = h;
      } else {
        T.col(j).head(j + 1) += h;
      }
    }
    const double beta = w.norm();
    if (j + 1 < m) {
      if (beta < 1e-12 * std::abs(T(j, j)) + 1e-300) break;
      T(j + 1, j) = beta;
      q = w / beta;
    }
  }
  Eigen::MatrixXd H = T.topLeftCorner(used, used);
  H = 0.5 * (H + H.transpose().eval());
  for (int j = 0; j + 1 < used; ++j) H(j, j + 1) = H(j + 1, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

void finish_kernel_report(KernelReport& rep, const KernelOptions& opt) {
  rep.zero_tol = opt.zero_tol > 0.0 ? opt.zero_tol : 1e-8 * std::abs(rep.lambda_max);
  rep.kernel_dim = 0;
  rep.smallest_nonzero = 0.0;
  bool found = false;
  for (double ev : rep.eigenvalues) {
    if (std::abs(ev) <= rep.zero_tol) {
      ++rep.kernel_dim;
    } else if (!found) {
      rep.smallest_nonzero = ev;
      found = true;
    }
  }
  rep.low_spectrum = group_spectrum(rep.eigenvalues, rep.zero_tol);
}

}  // namespace

std::vector<SpectrumEntry> group_spectrum(const std::vector<double>& sorted, double tol) {
  std::vector<SpectrumEntry> out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    double sum = sorted[i];
    while (j < sorted.size() && sorted[j] - sorted[j - 1] <= tol) sum += sorted[j++];
    out.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  return out;
}

Eigen::MatrixXd linearized_matrix(const Model& model, const VectorField& zbar) {
  const Grid& g = model.grid();
  const Eigen::Index n = static_cast<Eigen::Index>(2 * g.size());
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    e[c] = 1.0;
    A.col(c) = to_vec(linearized_apply(model, zbar, from_vec(g, e)));
    e[c] = 0.0;
  }
  return A;
}

KernelReport kernel_dimension(const Model& model, const VectorField& zbar,
                              const KernelOptions& options) {
  const Grid& g = model.grid();
  const Eigen::Index n = static_cast<Eigen::Index>(2 * g.size());
  const int count = static_cast<int>(std::min<Eigen::Index>(std::max(1, options.count), n));
  KernelReport rep;

  const bool dense = options.method == EigenMethod::dense ||
                     (options.method == EigenMethod::automatic && g.size() <= 512);
  if (dense) {
    Eigen::MatrixXd A = linearized_matrix(model, zbar);
    A = 0.5 * (A + A.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    rep.lambda_max = ev[n - 1];
    for (int i = 0; i < count; ++i) rep.eigenvalues.push_back(ev[i]);
    rep.converged = es.info() == Eigen::Success;
    rep.method = "dense";
    finish_kernel_report(rep, options);
    return rep;
  }

  rep.method = "krylov";
  auto applyA = [&](const Eigen::VectorXd& x) {
    return to_vec(linearized_apply(model, zbar, from_vec(g, x)));
  };
  std::mt19937_64 rng(options.seed);
  rep.lambda_max = largest_eigenvalue(applyA, n, rng, 60);
  const double scale_ref = std::max(std::abs(rep.lambda_max), 1.0);

  // B = (A + 2 I)^-1 by CG, preconditioned with (c I - L Lap)^-1.
  const Potential& pot = model.potential();
  double c = 0.0;
  for (std::size_t k = 0; k < zbar.size(); ++k) {
    const Vec2 z = zbar.at(k);
    const double r = z[0] * z[0] + z[1] * z[1];
    c += pot.psi(r) + 2.0 * pot.dpsi(r) * r;
  }
  c = 1.0 + c / static_cast<double>(zbar.size());
  const double L = model.params().L;
  const detail::LinearMap shifted = [&](const VectorField& x) {
    VectorField y = linearized_apply(model, zbar, x);
    axpy(2.0, x, y);
    return y;
  };
  const detail::LinearMap precond = [&](const VectorField& x) {
    return model.ops().solve_shifted(x, c, L);
  };
  bool inner_ok = true;
  auto applyB = [&](const Eigen::VectorXd& b) {
    const VectorField rhs = from_vec(g, b);
    VectorField x = precond(rhs);
    const auto res = detail::pcg(shifted, precond, rhs, x, 1e-13, 2000);
    if (!res.converged && res.relative_residual > 1e-9) inner_ok = false;
    return to_vec(x);
  };

  const int p = std::max(options.block_size, 1);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd start(n, std::max(p, count));
  for (Eigen::Index i = 0; i < start.size(); ++i) start.data()[i] = nd(rng);

  for (int cycle = 0; cycle <= options.max_restarts; ++cycle) {
    Eigen::MatrixXd Q = extend_basis(Eigen::MatrixXd(n, 0), start);
    Eigen::MatrixXd block = Q;
    for (int s = 0; s < options.block_steps && block.cols() > 0; ++s) {
      Eigen::MatrixXd W(n, block.cols());
      for (Eigen::Index j = 0; j < block.cols(); ++j) W.col(j) = applyB(block.col(j));
      block = extend_basis(Q, W);
      Eigen::MatrixXd grown(n, Q.cols() + block.cols());
      grown << Q, block;
      Q = std::move(grown);
    }
    // Rayleigh-Ritz with A itself.
    Eigen::MatrixXd AQ(n, Q.cols());
    for (Eigen::Index j = 0; j < Q.cols(); ++j) AQ.col(j) = applyA(Q.col(j));
    Eigen::MatrixXd H = Q.transpose() * AQ;
    H = 0.5 * (H + H.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::MatrixXd X = Q * es.eigenvectors();
    const Eigen::MatrixXd AX = AQ * es.eigenvectors();
    rep.eigenvalues.clear();
    rep.max_residual = 0.0;
    const int have = static_cast<int>(std::min<Eigen::Index>(count, Q.cols()));
    for (int i = 0; i < have; ++i) {
      const double theta = es.eigenvalues()[i];
      rep.eigenvalues.push_back(theta);
      const double r = (AX.col(i) - theta * X.col(i)).norm() / scale_ref;
      rep.max_residual = std::max(rep.max_residual, r);
    }
    rep.converged = inner_ok && have == count && rep.max_residual <= options.residual_tol;
    if (rep.converged) break;
    const Eigen::Index keep = std::min<Eigen::Index>(X.cols(), std::max(p, count));
    start = X.leftCols(keep);
    inner_ok = true;
  }
  finish_kernel_report(rep, options);
  return rep;
}

namespace {

struct FlowResult {
  VectorField z;
  double residual = 0.0;
  bool converged = false;
  long steps = 0;
};

FlowResult gradient_flow(const Model& model, const VectorField& z0, const StationaryOptions& opt) {
  StepOptions so = model.options();
  so.freeze_velocity = true;
  const Model flow(model.grid(), model.params(), so);
  State s = flow.make_state(z0, VectorField(model.grid(), FieldRole::velocity));
  FlowResult best{z0, norm(stationary_residual(model, z0)), false, 0};
  if (best.residual <= opt.tol) {
    best.converged = true;
    return best;
  }
  double dt = 0.5 * flow.max_stable_dt(s);
  long step = 0;
  while (step < opt.max_steps && s.t < opt.max_time) {
    if (step % 50 == 0) dt = 0.5 * flow.max_stable_dt(s);
    Model::StepResult r;
    try {
      r = flow.step(s, dt);
    } catch (const CflError&) {
      dt *= 0.5;
      continue;
    } catch (const BlowUpError&) {
      break;
    }
    ++step;
    s = std::move(r.state);
    if (r.report.residual_norm < best.residual) {
      best.z = s.d;
      best.residual = r.report.residual_norm;
    }
    if (r.report.residual_norm <= opt.tol) {
      best.converged = true;
      break;
    }
  }
  best.steps = step;
  return best;
}

}  // namespace

StationaryReport solve_stationary(const Model& model, const VectorField& z0,
                                  const StationaryOptions& options) {
  StationaryReport rep;
  VectorField z = z0;
  z.role = FieldRole::director;
  bool need_flow = options.method == StationaryMethod::gradient_flow;
  rep.method_used = to_string(options.method);

  if (options.method == StationaryMethod::newton) {
    const double L = model.params().L;
    VectorField R = stationary_residual(model, z);
    double rn = norm(R);
    int it = 0;
    for (; it < options.max_iter && rn > options.tol; ++it) {
      const detail::LinearMap J = [&](const VectorField& w) { return linearized_apply(model, z, w); };
      const detail::LinearMap P = [&](const VectorField& w) {
        return model.ops().solve_shifted(w, 1.0, L);
      };
      VectorField minus_r = R;
      scale(minus_r, -1.0);
      VectorField delta = minus_r;
      scale(delta, 0.0);
      const auto cg = detail::pcg(J, P, minus_r, delta, 1e-12, 1000);
      if (cg.breakdown && norm(delta) == 0.0) {
        rep.message = "newton: negative curvature, falling back to gradient flow";
        need_flow = true;
        break;
      }
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
        VectorField trial = z;
        axpy(alpha, delta, trial);
        const VectorField Rt = stationary_residual(model, trial);
        const double tn = norm(Rt);
        if (std::isfinite(tn) && tn < (1.0 - 1e-4 * alpha) * rn) {
          z = std::move(trial);
          R = Rt;
          rn = tn;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        rep.message = "newton: line search stalled, falling back to gradient flow";
        need_flow = true;
        break;
      }
    }
    rep.iterations = it;
    if (rn > options.tol && !need_flow) {
      rep.message = "newton: iteration limit, falling back to gradient flow";
      need_flow = true;
    }
    if (need_flow) rep.method_used = "newton+gradient_flow";
  }

  if (need_flow) {
    const FlowResult fr = gradient_flow(model, z, options);
    z = fr.z;
    rep.iterations += static_cast<int>(fr.steps);
    if (!fr.converged) {
      rep.message += (rep.message.empty() ? "" : "; ");
      rep.message += "gradient flow did not reach the residual tolerance";
    }
  }

  rep.z = z;
  rep.residual_norm = norm(stationary_residual(model, z));
  rep.converged = rep.residual_norm <= options.tol;
  rep.energy = configuration_energy(model, z);
  rep.classification = classify(z, options.classify_tol);
  if (options.compute_kernel) {
    const KernelReport k = kernel_dimension(model, z, options.kernel);
    rep.kernel_dim = k.kernel_dim;
    rep.low_spectrum = k.low_spectrum;
    rep.eigenvalues = k.eigenvalues;
    rep.smallest_nonzero = k.smallest_nonzero;
    if (!k.converged) {
      rep.message += (rep.message.empty() ? "" : "; ");
      rep.message += "eigensolver did not converge";
    }
  }
  return rep;
}

double CriterionReport::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  throw std::out_of_range("no metric '" + key + "'");
}

CriterionReport check_large_L(const ModelParams& params, const Grid& grid) {
  const FieldOps ops(grid);
  const double lam = ops.laplacian_min_nonzero_eigenvalue();
  const double c = 1.0 / std::sqrt(lam);
  const double continuum_lam =
      grid.bc == BcMode::periodic ? 4.0 * std::numbers::pi * std::numbers::pi
                                  : std::numbers::pi * std::numbers::pi;
  CriterionReport r;
  r.name = "large_L";
  r.pass = params.L > c * c;
  r.metrics = {{"L", params.L},
               {"c_omega", c},
               {"threshold", c * c},
               {"continuum_c_omega", 1.0 / std::sqrt(continuum_lam)},
               {"continuum_threshold", 1.0 / continuum_lam}};
  r.notes = r.pass ? "L exceeds the squared Poincare-Wirtinger constant: only constant equilibria"
                   : "L at or below the squared Poincare-Wirtinger constant: no claim";
  return r;
}

CriterionReport check_small_energy(const Model& model, const State& s0, double kappa, double sigma,
                                   double epsilon) {
  if (model.params().delta > 0.0) {
    throw std::invalid_argument("check_small_energy requires delta = 0");
  }
  const double d0_max = max_magnitude(s0.d);
  if (d0_max > 1.0 + 1e-12) {
    throw std::invalid_argument("check_small_energy requires max |d0| <= 1");
  }
  if (!(kappa > 0.0) || !(sigma >= 1.0)) {
    throw std::invalid_argument("check_small_energy requires kappa > 0 and sigma >= 1");
  }
  const Potential& pot = model.potential();
  const int samples = 1 << 16;
  double worst = -INFINITY;
  for (int i = 0; i <= samples; ++i) {
    const double r = static_cast<double>(i) / samples;
    worst = std::max(worst, kappa * std::pow(1.0 - r, sigma) - (pot.psi_hat(r) - r));
  }
  const bool holds = worst <= 1e-12;
  const double ee0 = model.total_energy(s0).total;
  const double bound = std::pow(2.0 * std::max(ee0, 0.0) / kappa, 1.0 / sigma);
  CriterionReport r;
  r.name = "small_energy";
  r.pass = holds && bound <= epsilon;
  r.metrics = {{"kappa", kappa},
               {"sigma", sigma},
               {"hypothesis_worst_violation", worst},
               {"hypothesis_holds", holds ? 1.0 : 0.0},
               {"EE0", ee0},
               {"bound", bound},
               {"epsilon", epsilon},
               {"d0_max", d0_max}};
  r.notes = "bound = (2 EE0 / kappa)^(1/sigma) controls ||1 - |d_inf|^2||_L1";
  return r;
}

}  // namespace nematic
