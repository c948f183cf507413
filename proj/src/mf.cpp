#include "tlp/mf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "tlp/error.hpp"
#include "tlp/io.hpp"
#include "tlp/rng.hpp"
#include "tlp/summarize.hpp"

namespace tlp {

MfMethod mf_method_from_string(const std::string& name) {
  if (name == "crjmf") return MfMethod::Crjmf;
  if (name == "tlsi") return MfMethod::Tlsi;
  if (name == "mljfe") return MfMethod::Mljfe;
  if (name == "grnmf") return MfMethod::Grnmf;
  if (name == "deepeye") return MfMethod::DeepEye;
  if (name == "tmf") return MfMethod::Tmf;
  if (name == "list") return MfMethod::List;
  throw ValidationError("unknown matrix-factorization method '" + name + "'");
}

std::string to_string(MfMethod m) {
  switch (m) {
    case MfMethod::Crjmf: return "crjmf";
    case MfMethod::Tlsi: return "tlsi";
    case MfMethod::Mljfe: return "mljfe";
    case MfMethod::Grnmf: return "grnmf";
    case MfMethod::DeepEye: return "deepeye";
    case MfMethod::Tmf: return "tmf";
    case MfMethod::List: return "list";
  }
  return "?";
}

const DenseMat& FactorSet::at(const std::string& key) const {
  auto it = factors.find(key);
  if (it == factors.end()) throw ValidationError("factor set has no matrix '" + key + "'");
  return it->second;
}

DenseWindow to_dense_window(const Window& win) {
  DenseWindow dw;
  dw.mats.reserve(win.size());
  for (int k = 0; k < win.size(); ++k) dw.mats.push_back(win.at(k).to_dense());
  return dw;
}

// --- auxiliary builders -------------------------------------------------------

DenseMat build_laplacian(const DenseMat& m) {
  if (m.rows() != m.cols()) throw ValidationError("laplacian: matrix not square");
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (std::fabs(m(i, j) - m(j, i)) > 1e-9)
        throw ValidationError("laplacian: input asymmetric beyond 1e-9");
  DenseMat l = scaled(m, -1.0);
  for (int i = 0; i < m.rows(); ++i) {
    double deg = 0.0;
    for (int j = 0; j < m.cols(); ++j) deg += m(i, j);
    l(i, i) += deg;
  }
  return l;
}

DenseMat build_pmi(const DenseMat& a, int h) {
  if (h < 1) throw ValidationError("pmi: order h must be >= 1");
  const int n = a.rows();
  DenseMat acc(n, n);
  DenseMat power = DenseMat::identity(n);
  for (int r = 1; r <= h; ++r) {
    power = matmul(power, a);
    add_scaled(acc, power, 1.0 / double(h));
  }
  DenseMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = acc(i, j) > 0.0 ? std::log(acc(i, j)) : 0.0;
  return m;
}

DenseMat build_label_prop(const DenseMat& a, double theta_hat) {
  if (!(theta_hat > 0.0 && theta_hat < 1.0))
    throw ValidationError("label propagation: theta_hat must lie in (0,1)");
  const int n = a.rows();
  std::vector<double> dinv(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) deg += a(i, j);
    dinv[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) -= theta_hat * dinv[i] * a(i, j) * dinv[j];
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rc = lu.rcond();
  if (!(rc > 1e-14))
    throw ValidationError("label propagation: solve numerically singular, rcond = " +
                          std::to_string(rc));
  Eigen::MatrixXd x = lu.solve(Eigen::MatrixXd::Identity(n, n));
  DenseMat u(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u(i, j) = (1.0 - theta_hat) * x(i, j);
  return u;
}

std::vector<double> decay_weights(int L, double theta) {
  std::vector<double> w(L);
  for (int k = 0; k < L; ++k) {
    const int age = L - 1 - k;
    w[k] = age == 0 ? 1.0 : std::pow(theta, age);
  }
  return w;
}

std::vector<double> grnmf_decay(int L, double theta) {
  std::vector<double> w(std::max(L - 1, 0));
  for (int k = 0; k + 1 < L; ++k) {
    const int e = L - 2 - k;  // newest regularized snapshot gets exponent 0
    w[k] = e == 0 ? 1.0 : std::pow(theta, e);
  }
  return w;
}

std::vector<double> tmf_time_weights(int L, double theta) {
  std::vector<double> w(L);
  for (int k = 0; k < L; ++k) w[k] = std::exp(-theta * double(L - 1 - k));
  return w;
}

// --- shared machinery ----------------------------------------------------------

namespace {

constexpr double kDenFloor = 1e-12;
constexpr double kSlack = 1e-10;

void check_params(const MfHyperParams& p) {
  if (p.d < 1) throw ValidationError("mf: latent dimension d must be >= 1");
  if (p.iters < 1) throw ValidationError("mf: iters must be >= 1");
  if (!(p.tol > 0.0)) throw ValidationError("mf: tol must be > 0");
  if (p.alpha < 0.0 || p.beta < 0.0) throw ValidationError("mf: negative regularization weight");
}

void check_unit_theta(const MfHyperParams& p) {
  if (!(p.theta >= 0.0 && p.theta <= 1.0))
    throw ValidationError("mf: theta must lie in [0,1]");
}

void check_rate_theta(const MfHyperParams& p) {
  if (!(p.theta >= 0.0)) throw ValidationError("mf: decay rate theta must be >= 0");
}

void check_window(const DenseWindow& dw) {
  if (dw.L() < 1) throw ValidationError("mf: empty window");
  for (const auto& m : dw.mats)
    if (m.rows() != dw.n() || m.cols() != dw.n())
      throw ValidationError("mf: window matrices disagree on shape");
}

DenseMat init_factor(SplitMix64& rng, int rows, int cols, double data_mean, int d) {
  const double scale = std::sqrt(std::max(data_mean, 1e-6) / double(d));
  DenseMat m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double u = rng.uniform();
    if (u <= 0.0) u = 1e-12;
    m.data()[i] = u * scale;
  }
  return m;
}

// X = base ⊙ (neg / pos)^gamma with floored denominators
DenseMat mult_candidate(const DenseMat& base, const DenseMat& neg, const DenseMat& pos,
                        double gamma) {
  DenseMat x = base;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = neg.data()[i] / std::max(pos.data()[i], kDenFloor);
    x.data()[i] = base.data()[i] * (gamma == 1.0 ? r : std::pow(r, gamma));
  }
  return x;
}

// Applies one multiplicative step, halving the exponent while the step would
// increase the loss; the gamma -> 0 limit is the unchanged factor, so the
// recorded trace never climbs.
template <class Apply, class Restore, class Loss>
double safeguarded_step(double prev_loss, Apply&& apply, Restore&& restore, Loss&& loss) {
  double gamma = 1.0;
  for (int attempt = 0; attempt < 7; ++attempt) {
    apply(gamma);
    const double l = loss();
    if (std::isfinite(l) && l <= prev_loss + kSlack) return l;
    restore();
    gamma *= 0.5;
  }
  return prev_loss;
}

void track_min(double& acc, const DenseMat& m) { acc = std::min(acc, min_entry(m)); }

// positive / negative parts of a matrix with mixed signs
void split_signs(const DenseMat& m, DenseMat& pos, DenseMat& neg) {
  pos = DenseMat(m.rows(), m.cols());
  neg = DenseMat(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = m.data()[i];
    if (v > 0.0) pos.data()[i] = v;
    else neg.data()[i] = -v;
  }
}

// common-neighbor counts on presence structure, zero diagonal
DenseMat common_neighbor_matrix(const DenseMat& a) {
  const int n = a.rows();
  DenseMat s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int c = 0;
      for (int k = 0; k < n; ++k)
        if (k != i && k != j && a(i, k) > 0.0 && a(j, k) > 0.0) ++c;
      s(i, j) = double(c);
      s(j, i) = double(c);
    }
  }
  return s;
}

struct FitLoop {
  std::vector<double> trace;
  double min_seen = std::numeric_limits<double>::infinity();
  bool converged = false;

  // Runs `iterate` (which performs all block updates and returns the new loss)
  // until the relative loss change drops below tol or iters runs out.
  template <class Iterate>
  void run(double initial_loss, int iters, double tol, Iterate&& iterate) {
    trace.push_back(initial_loss);
    for (int it = 0; it < iters; ++it) {
      const double prev = trace.back();
      const double cur = iterate(prev);
      trace.push_back(cur);
      if (std::fabs(prev - cur) <= tol * std::max(1.0, std::fabs(prev))) {
        converged = true;
        break;
      }
    }
  }
};

}  // namespace

// --- CRJMF ----------------------------------------------------------------------

namespace {

struct CrjmfCtx {
  DenseMat W;     // collapsed window (exponential kernel)
  DenseMat S;     // common-neighbor matrix of the newest snapshot
  std::vector<double> sdeg;
  DenseMat X, Xp, Xn;  // attributes and their sign parts
  bool has_x = false;
  double alpha = 0.0, beta = 0.0;
};

CrjmfCtx crjmf_ctx(const DenseWindow& dw, const DenseMat* attrs, const MfHyperParams& p) {
  CrjmfCtx c;
  c.alpha = p.alpha;
  c.beta = p.beta;
  const int L = dw.L();
  const auto coeff = [&](int k) {
    SummarizationKernel ker{SummarizationKernel::Kind::Exponential, p.theta};
    return kernel_coefficient(ker, L, L - 1 - k);
  };
  c.W = DenseMat(dw.n(), dw.n());
  for (int k = 0; k < L; ++k) add_scaled(c.W, dw.mats[k], coeff(k));
  c.S = common_neighbor_matrix(dw.mats.back());
  c.sdeg.assign(dw.n(), 0.0);
  for (int i = 0; i < dw.n(); ++i)
    for (int j = 0; j < dw.n(); ++j) c.sdeg[i] += c.S(i, j);
  if (attrs && !attrs->empty()) {
    if (attrs->rows() != dw.n())
      throw ValidationError("crjmf: attribute rows must equal the node count");
    c.X = *attrs;
    split_signs(c.X, c.Xp, c.Xn);
    c.has_x = true;
  } else if (p.alpha > 0.0) {
    throw ValidationError("crjmf: alpha > 0 requires an attribute matrix");
  }
  return c;
}

double crjmf_loss(const CrjmfCtx& c, const DenseMat& U, const DenseMat& V, const DenseMat& Y) {
  const DenseMat UY = matmul(U, Y);
  double l = frob_sq(sub(c.W, a_bt(UY, U)));
  if (c.has_x && c.alpha > 0.0) l += c.alpha * frob_sq(sub(c.X, a_bt(U, V)));
  if (c.beta > 0.0) {
    double reg = -dot(U, matmul(c.S, U));
    for (int i = 0; i < U.rows(); ++i)
      for (int k = 0; k < U.cols(); ++k) reg += c.sdeg[i] * U(i, k) * U(i, k);
    l += c.beta * reg;
  }
  return l;
}

}  // namespace

FactorSet fit_crjmf(const DenseWindow& dw, const DenseMat* attrs, const MfHyperParams& p) {
  check_params(p);
  check_window(dw);
  const CrjmfCtx c = crjmf_ctx(dw, attrs, p);
  const int n = dw.n(), d = p.d;
  const int m_attr = c.has_x ? c.X.cols() : 0;

  SplitMix64 rng(mix_seed(p.seed, 0x11f));
  DenseMat U = init_factor(rng, n, d, mean_entry(c.W), d);
  DenseMat V = init_factor(rng, m_attr, d, c.has_x ? mean_entry(c.Xp) : 0.0, d);
  DenseMat Y = init_factor(rng, d, d, mean_entry(c.W), d);

  FitLoop loop;
  track_min(loop.min_seen, U);
  track_min(loop.min_seen, Y);
  if (c.has_x) track_min(loop.min_seen, V);

  const auto loss = [&] { return crjmf_loss(c, U, V, Y); };
  loop.run(loss(), p.iters, p.tol, [&](double prev) {
    // U block
    {
      const DenseMat base = U;
      prev = safeguarded_step(
          prev,
          [&](double g) {
            const DenseMat UtU = at_b(base, base);
            const DenseMat Ysum = add(Y, transpose(Y));
            DenseMat pos = add(matmul(matmul(base, Y), matmul(UtU, transpose(Y))),
                               matmul(matmul(base, transpose(Y)), matmul(UtU, Y)));
            DenseMat neg = matmul(matmul(c.W, base), Ysum);
            if (c.has_x && c.alpha > 0.0) {
              add_scaled(pos, add(matmul(base, at_b(V, V)), matmul(c.Xn, V)), c.alpha);
              add_scaled(neg, matmul(c.Xp, V), c.alpha);
            }
            if (c.beta > 0.0) {
              DenseMat du = base;
              for (int i = 0; i < n; ++i)
                for (int k = 0; k < d; ++k) du(i, k) *= c.sdeg[i];
              add_scaled(pos, du, c.beta);
              add_scaled(neg, matmul(c.S, base), c.beta);
            }
            U = mult_candidate(base, neg, pos, g);
          },
          [&] { U = base; }, loss);
      track_min(loop.min_seen, U);
    }
    // V block (attribute factor)
    if (c.has_x && c.alpha > 0.0) {
      const DenseMat base = V;
      prev = safeguarded_step(
          prev,
          [&](double g) {
            const DenseMat pos = add(matmul(base, at_b(U, U)), at_b(c.Xn, U));
            const DenseMat neg = at_b(c.Xp, U);
            V = mult_candidate(base, neg, pos, g);
          },
          [&] { V = base; }, loss);
      track_min(loop.min_seen, V);
    }
    // Y block
    {
      const DenseMat base = Y;
      prev = safeguarded_step(
          prev,
          [&](double g) {
            const DenseMat UtU = at_b(U, U);
            const DenseMat pos = matmul(matmul(UtU, base), UtU);
            const DenseMat neg = at_b(U, matmul(c.W, U));
            Y = mult_candidate(base, neg, pos, g);
          },
          [&] { Y = base; }, loss);
      track_min(loop.min_seen, Y);
    }
    return prev;
  });

  FactorSet fs;
  fs.method = MfMethod::Crjmf;
  fs.n = n;
  fs.L = dw.L();
  fs.theta = p.theta;
  fs.factors["U"] = std::move(U);
  fs.factors["V"] = std::move(V);
  fs.factors["Y"] = std::move(Y);
  fs.loss_trace = std::move(loop.trace);
  fs.min_entry_seen = loop.min_seen;
  fs.converged = loop.converged;
  return fs;
}

// --- TLSI -----------------------------------------------------------------------

namespace {

// Smoothness written as beta * (N - tr(U_t U_{t-1}^T)): zero for identical
// trace-normalized factors, positive otherwise, so beta > 0 rewards smooth
// trajectories.
double tlsi_loss(const std::vector<DenseMat>& A, const std::vector<DenseMat>& U, double beta) {
  const int n = A.front().rows();
  double l = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) l += frob_sq(sub(A[k], a_bt(U[k], U[k])));
  if (beta > 0.0)
    for (std::size_t k = 1; k < A.size(); ++k) l += beta * (double(n) - dot(U[k], U[k - 1]));
  return l;
}

void rescale_to_trace(DenseMat& u, double target) {
  const double s = std::sqrt(target / std::max(dot(u, u), kDenFloor));
  for (std::size_t i = 0; i < u.size(); ++i) u.data()[i] *= s;
}

}  // namespace

FactorSet fit_tlsi(const DenseWindow& dw, const MfHyperParams& p) {
  check_params(p);
  check_window(dw);
  const int n = dw.n(), d = p.d, L = dw.L();
  const auto& A = dw.mats;

  SplitMix64 rng(mix_seed(p.seed, 0x11f));
  std::vector<DenseMat> U;
  U.reserve(L);
  for (int k = 0; k < L; ++k) {
    U.push_back(init_factor(rng, n, d, mean_entry(A[k]), d));
    rescale_to_trace(U.back(), double(n));  // tr(U U^T) = N from the start
  }

  FitLoop loop;
  for (const auto& u : U) track_min(loop.min_seen, u);
  const auto loss = [&] { return tlsi_loss(A, U, p.beta); };

  loop.run(loss(), p.iters, p.tol, [&](double prev) {
    for (int k = 0; k < L; ++k) {
      const DenseMat base = U[k];
      prev = safeguarded_step(
          prev,
          [&](double g) {
            DenseMat pos = scaled(matmul(base, at_b(base, base)), 4.0);
            DenseMat neg = scaled(matmul(A[k], base), 4.0);
            if (p.beta > 0.0) {
              if (k > 0) add_scaled(neg, U[k - 1], p.beta);
              if (k + 1 < L) add_scaled(neg, U[k + 1], p.beta);
            }
            U[k] = mult_candidate(base, neg, pos, g);
            rescale_to_trace(U[k], double(n));
          },
          [&] { U[k] = base; }, loss);
      track_min(loop.min_seen, U[k]);
    }
    return prev;
  });

  FactorSet fs;
  fs.method = MfMethod::Tlsi;
  fs.n = n;
  fs.L = L;
  fs.theta = p.theta;
  for (int k = 0; k < L; ++k) fs.factors["U_" + std::to_string(k + 1)] = std::move(U[k]);
  fs.loss_trace = std::move(loop.trace);
  fs.min_entry_seen = loop.min_seen;
  fs.converged = loop.converged;
  return fs;
}

// --- MLjFE ----------------------------------------------------------------------

namespace {

struct MljfeCtx {
  std::vector<DenseMat> M, Mp, Mn;  // PMI matrices and sign parts
  double alpha = 0.0, beta = 0.0;
};

double mljfe_loss(const MljfeCtx& c, const std::vector<DenseMat>& A,
                  const std::vector<DenseMat>& U, const std::vector<DenseMat>& V,
                  const std::vector<DenseMat>& Y) {
  double l = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) {
    l += frob_sq(sub(A[k], a_bt(U[k], V[k])));
    if (c.alpha > 0.0) l += c.alpha * frob_sq(sub(c.M[k], a_bt(V[k], Y[k])));
  }
  if (c.beta > 0.0)
    for (std::size_t k = 1; k < A.size(); ++k) l += c.beta * frob_sq(sub(U[k], U[k - 1]));
  return l;
}

}  // namespace

FactorSet fit_mljfe(const DenseWindow& dw, const MfHyperParams& p) {
  check_params(p);
  check_unit_theta(p);
  check_window(dw);
  if (p.h < 1) throw ValidationError("mljfe: PMI order h must be >= 1");
  const int n = dw.n(), d = p.d, L = dw.L();
  const auto& A = dw.mats;

  MljfeCtx c;
  c.alpha = p.alpha;
  c.beta = p.beta;
  c.M.reserve(L);
  for (int k = 0; k < L; ++k) {
    c.M.push_back(build_pmi(A[k], p.h));
    DenseMat mp, mn;
    split_signs(c.M.back(), mp, mn);
    c.Mp.push_back(std::move(mp));
    c.Mn.push_back(std::move(mn));
  }

  SplitMix64 rng(mix_seed(p.seed, 0x11f));
  std::vector<DenseMat> U, V, Y;
  for (int k = 0; k < L; ++k) {
    const double am = mean_entry(A[k]);
    U.push_back(init_factor(rng, n, d, am, d));
    V.push_back(init_factor(rng, n, d, am, d));
    Y.push_back(init_factor(rng, n, d, mean_entry(c.Mp[k]), d));
    // constraint tr(V^T V) = d, scale absorbed so the products are unchanged
    const double s = std::sqrt(double(d) / std::max(dot(V[k], V[k]), kDenFloor));
    V[k] = scaled(V[k], s);
    U[k] = scaled(U[k], 1.0 / s);
    Y[k] = scaled(Y[k], 1.0 / s);
  }

  FitLoop loop;
  for (int k = 0; k < L; ++k) {
    track_min(loop.min_seen, U[k]);
    track_min(loop.min_seen, V[k]);
    track_min(loop.min_seen, Y[k]);
  }
  const auto loss = [&] { return mljfe_loss(c, A, U, V, Y); };

  loop.run(loss(), p.iters, p.tol, [&](double prev) {
    for (int k = 0; k < L; ++k) {
      {  // U_k
        const DenseMat base = U[k];
        prev = safeguarded_step(
            prev,
            [&](double g) {
              DenseMat pos = matmul(base, at_b(V[k], V[k]));
              DenseMat neg = matmul(A[k], V[k]);
              if (c.beta > 0.0) {
                const double cnt = (k > 0 ? 1.0 : 0.0) + (k + 1 < L ? 1.0 : 0.0);
                add_scaled(pos, base, c.beta * cnt);
                if (k > 0) add_scaled(neg, U[k - 1], c.beta);
                if (k + 1 < L) add_scaled(neg, U[k + 1], c.beta);
              }
              U[k] = mult_candidate(base, neg, pos, g);
            },
            [&] { U[k] = base; }, loss);
        track_min(loop.min_seen, U[k]);
      }
      {  // V_k with compensated trace normalization
        const DenseMat baseV = V[k], baseU = U[k], baseY = Y[k];
        prev = safeguarded_step(
            prev,
            [&](double g) {
              DenseMat pos = matmul(baseV, at_b(baseU, baseU));
              DenseMat neg = matmul(A[k], baseU);
              if (c.alpha > 0.0) {
                add_scaled(pos, add(matmul(baseV, at_b(baseY, baseY)), matmul(c.Mn[k], baseY)),
                           c.alpha);
                add_scaled(neg, matmul(c.Mp[k], baseY), c.alpha);
              }
              V[k] = mult_candidate(baseV, neg, pos, g);
              const double s = std::sqrt(double(d) / std::max(dot(V[k], V[k]), kDenFloor));
              V[k] = scaled(V[k], s);
              U[k] = scaled(baseU, 1.0 / s);
              Y[k] = scaled(baseY, 1.0 / s);
            },
            [&] {
              V[k] = baseV;
              U[k] = baseU;
              Y[k] = baseY;
            },
            loss);
        track_min(loop.min_seen, V[k]);
      }
      if (c.alpha > 0.0) {  // Y_k
        const DenseMat base = Y[k];
        prev = safeguarded_step(
            prev,
            [&](double g) {
              const DenseMat pos = add(matmul(base, at_b(V[k], V[k])), matmul(c.Mn[k], V[k]));
              const DenseMat neg = matmul(c.Mp[k], V[k]);
              Y[k] = mult_candidate(base, neg, pos, g);
            },
            [&] { Y[k] = base; }, loss);
        track_min(loop.min_seen, Y[k]);
      }
    }
    return prev;
  });

  FactorSet fs;
  fs.method = MfMethod::Mljfe;
  fs.n = n;
  fs.L = L;
  fs.order = p.h;
  fs.theta = p.theta;
  for (int k = 0; k < L; ++k) {
    fs.factors["U_" + std::to_string(k + 1)] = std::move(U[k]);
    fs.factors["V_" + std::to_string(k + 1)] = std::move(V[k]);
    fs.factors["Y_" + std::to_string(k + 1)] = std::move(Y[k]);
  }
  fs.loss_trace = std::move(loop.trace);
  fs.min_entry_seen = loop.min_seen;
  fs.converged = loop.converged;
  return fs;
}

// --- GrNMF ----------------------------------------------------------------------

namespace {

double grnmf_loss(const std::vector<DenseMat>& A, const std::vector<double>& coeff,
                  const std::vector<std::vector<double>>& deg, const DenseMat& U,
                  const DenseMat& V, double alpha) {
  double l = frob_sq(sub(A.back(), a_bt(U, V)));
  if (alpha > 0.0) {
    for (std::size_t k = 0; k + 1 < A.size(); ++k) {
      if (coeff[k] == 0.0) continue;
      double reg = -dot(V, matmul(A[k], V));
      for (int i = 0; i < V.rows(); ++i)
        for (int c = 0; c < V.cols(); ++c) reg += deg[k][i] * V(i, c) * V(i, c);
      l += alpha * coeff[k] * reg;
    }
  }
  return l;
}

}  // namespace

FactorSet fit_grnmf(const DenseWindow& dw, const MfHyperParams& p) {
  check_params(p);
  check_unit_theta(p);
  check_window(dw);
  const int n = dw.n(), d = p.d, L = dw.L();
  const auto& A = dw.mats;
  const std::vector<double> coeff = grnmf_decay(L, p.theta);
  std::vector<std::vector<double>> deg(std::max(L - 1, 0), std::vector<double>(n, 0.0));
  for (int k = 0; k + 1 < L; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) deg[k][i] += A[k](i, j);

  SplitMix64 rng(mix_seed(p.seed, 0x11f));
  DenseMat U = init_factor(rng, n, d, mean_entry(A.back()), d);
  DenseMat V = init_factor(rng, n, d, mean_entry(A.back()), d);

  FitLoop loop;
  track_min(loop.min_seen, U);
  track_min(loop.min_seen, V);
  const auto loss = [&] { return grnmf_loss(A, coeff, deg, U, V, p.alpha); };

  loop.run(loss(), p.iters, p.tol, [&](double prev) {
    {  // U
      const DenseMat base = U;
      prev = safeguarded_step(
          prev,
          [&](double g) {
            const DenseMat pos = matmul(base, at_b(V, V));
            const DenseMat neg = matmul(A.back(), V);
            U = mult_candidate(base, neg, pos, g);
          },
          [&] { U = base; }, loss);
      track_min(loop.min_seen, U);
    }
    {  // V
      const DenseMat base = V;
      prev = safeguarded_step(
          prev,
          [&](double g) {
            DenseMat pos = matmul(base, at_b(U, U));
            DenseMat neg = matmul(A.back(), U);
            if (p.alpha > 0.0) {
              for (int k = 0; k + 1 < L; ++k) {
                if (coeff[k] == 0.0) continue;
                DenseMat dv = base;
                for (int i = 0; i < n; ++i)
                  for (int cix = 0; cix < d; ++cix) dv(i, cix) *= deg[k][i];
                add_scaled(pos, dv, p.alpha * coeff[k]);
                add_scaled(neg, matmul(A[k], base), p.alpha * coeff[k]);
              }
            }
            V = mult_candidate(base, neg, pos, g);
          },
          [&] { V = base; }, loss);
      track_min(loop.min_seen, V);
    }
    return prev;
  });

  FactorSet fs;
  fs.method = MfMethod::Grnmf;
  fs.n = n;
  fs.L = L;
  fs.theta = p.theta;
  fs.factors["U"] = std::move(U);
  fs.factors["V"] = std::move(V);
  fs.loss_trace = std::move(loop.trace);
  fs.min_entry_seen = loop.min_seen;
  fs.converged = loop.converged;
  return fs;
}

// --- DeepEye --------------------------------------------------------------------

namespace {

double deepeye_loss(const std::vector<DenseMat>& A, const std::vector<double>& coeff,
                    const std::vector<DenseMat>& Ut, const std::vector<DenseMat>& Vt,
                    const DenseMat& U, const DenseMat& V) {
  double l = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (coeff[k] == 0.0) continue;
    l += coeff[k] * (frob_sq(sub(A[k], a_bt(Ut[k], Vt[k]))) + frob_sq(sub(Ut[k], U)) +
                     frob_sq(sub(Vt[k], V)));
  }
  return l;
}

}  // namespace

FactorSet fit_deepeye(const DenseWindow& dw, const MfHyperParams& p) {
  check_params(p);
  check_unit_theta(p);
  check_window(dw);
  const int n = dw.n(), d = p.d, L = dw.L();
  const auto& A = dw.mats;
  const std::vector<double> coeff = decay_weights(L, p.theta);

  SplitMix64 rng(mix_seed(p.seed, 0x11f));
  std::vector<DenseMat> Ut, Vt;
  for (int k = 0; k < L; ++k) {
    Ut.push_back(init_factor(rng, n, d, mean_entry(A[k]), d));
    Vt.push_back(init_factor(rng, n, d, mean_entry(A[k]), d));
  }
  DenseMat U = init_factor(rng, n, d, mean_entry(A.back()), d);
  DenseMat V = init_factor(rng, n, d, mean_entry(A.back()), d);

  double csum = 0.0;
  for (double c : coeff) csum += c;

  FitLoop loop;
  for (int k = 0; k < L; ++k) {
    track_min(loop.min_seen, Ut[k]);
    track_min(loop.min_seen, Vt[k]);
  }
  track_min(loop.min_seen, U);
  track_min(loop.min_seen, V);
  const auto loss = [&] { return deepeye_loss(A, coeff, Ut, Vt, U, V); };

  loop.run(loss(), p.iters, p.tol, [&](double prev) {
    for (int k = 0; k < L; ++k) {
      if (coeff[k] == 0.0) continue;  // no contribution to the objective
      {
        const DenseMat base = Ut[k];
        prev = safeguarded_step(
            prev,
            [&](double g) {
              const DenseMat pos = add(matmul(base, at_b(Vt[k], Vt[k])), base);
              const DenseMat neg = add(matmul(A[k], Vt[k]), U);
              Ut[k] = mult_candidate(base, neg, pos, g);
            },
            [&] { Ut[k] = base; }, loss);
        track_min(loop.min_seen, Ut[k]);
      }
      {
        const DenseMat base = Vt[k];
        prev = safeguarded_step(
            prev,
            [&](double g) {
              const DenseMat pos = add(matmul(base, at_b(Ut[k], Ut[k])), base);
              const DenseMat neg = add(matmul(A[k], Ut[k]), V);
              Vt[k] = mult_candidate(base, neg, pos, g);
            },
            [&] { Vt[k] = base; }, loss);
        track_min(loop.min_seen, Vt[k]);
      }
    }
    {  // consensus U
      const DenseMat base = U;
      prev = safeguarded_step(
          prev,
          [&](double g) {
            DenseMat neg(n, d);
            for (int k = 0; k < L; ++k)
              if (coeff[k] > 0.0) add_scaled(neg, Ut[k], coeff[k]);
            U = mult_candidate(base, neg, scaled(base, csum), g);
          },
          [&] { U = base; }, loss);
      track_min(loop.min_seen, U);
    }
    {  // consensus V
      const DenseMat base = V;
      prev = safeguarded_step(
          prev,
          [&](double g) {
            DenseMat neg(n, d);
            for (int k = 0; k < L; ++k)
              if (coeff[k] > 0.0) add_scaled(neg, Vt[k], coeff[k]);
            V = mult_candidate(base, neg, scaled(base, csum), g);
          },
          [&] { V = base; }, loss);
      track_min(loop.min_seen, V);
    }
    return prev;
  });

  FactorSet fs;
  fs.method = MfMethod::DeepEye;
  fs.n = n;
  fs.L = L;
  fs.theta = p.theta;
  for (int k = 0; k < L; ++k) {
    fs.factors["U_" + std::to_string(k + 1)] = std::move(Ut[k]);
    fs.factors["V_" + std::to_string(k + 1)] = std::move(Vt[k]);
  }
  fs.factors["U"] = std::move(U);
  fs.factors["V"] = std::move(V);
  fs.loss_trace = std::move(loop.trace);
  fs.min_entry_seen = loop.min_seen;
  fs.converged = loop.converged;
  return fs;
}

// --- TMF / LIST (gradient descent) ------------------------------------------------

namespace {

DenseMat mask_of(const DenseMat& a) {
  DenseMat e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) e.data()[i] = a.data()[i] > 0.0 ? 1.0 : 0.0;
  return e;
}

DenseMat poly_combine(const std::vector<DenseMat>& vc, double x) {
  DenseMat out(vc.front().rows(), vc.front().cols());
  double p = 1.0;
  for (std::size_t i = 0; i < vc.size(); ++i) {
    add_scaled(out, vc[i], p);
    p *= x;
  }
  return out;
}

std::vector<DenseMat> collect_poly(const FactorSet& fs) {
  std::vector<DenseMat> vc;
  for (int i = 0; i <= fs.order; ++i) vc.push_back(fs.at("V_" + std::to_string(i)));
  return vc;
}

struct TmfCtx {
  std::vector<DenseMat> E;
  std::vector<double> D;
};

TmfCtx tmf_ctx(const DenseWindow& dw, const MfHyperParams& p) {
  TmfCtx c;
  for (const auto& a : dw.mats) c.E.push_back(mask_of(a));
  c.D = tmf_time_weights(dw.L(), p.theta);
  return c;
}

MfGradients tmf_eval(const DenseWindow& dw, const TmfCtx& c, const MfHyperParams& p,
                     const DenseMat& U, const std::vector<DenseMat>& Vc, bool want_grad) {
  const int L = dw.L();
  MfGradients out;
  DenseMat gU(U.rows(), U.cols());
  std::vector<DenseMat> gV(Vc.size(), DenseMat(Vc.front().rows(), Vc.front().cols()));
  for (int k = 0; k < L; ++k) {
    const double s = double(k + 1);  // t - (tau - L)
    const DenseMat Vt = poly_combine(Vc, s);
    DenseMat R = hadamard(c.E[k], sub(a_bt(U, Vt), dw.mats[k]));
    out.loss += c.D[k] * frob_sq(R);
    if (!want_grad) continue;
    add_scaled(gU, matmul(R, Vt), 2.0 * c.D[k]);
    const DenseMat RtU = at_b(R, U);
    double sp = 1.0;
    for (std::size_t i = 0; i < Vc.size(); ++i) {
      add_scaled(gV[i], RtU, 2.0 * c.D[k] * sp);
      sp *= s;
    }
  }
  out.loss += p.alpha * frob_sq(U);
  for (std::size_t i = 0; i < Vc.size(); ++i) out.loss += p.beta_of_order(int(i)) * frob_sq(Vc[i]);
  if (want_grad) {
    add_scaled(gU, U, 2.0 * p.alpha);
    for (std::size_t i = 0; i < Vc.size(); ++i)
      add_scaled(gV[i], Vc[i], 2.0 * p.beta_of_order(int(i)));
    out.grad["U"] = std::move(gU);
    for (std::size_t i = 0; i < Vc.size(); ++i) out.grad["V_" + std::to_string(i)] = std::move(gV[i]);
  }
  return out;
}

struct ListCtx {
  std::vector<DenseMat> E;
  std::vector<double> D;
  std::vector<DenseMat> Ulp;  // label-propagation solutions per step
};

ListCtx list_ctx(const DenseWindow& dw, const MfHyperParams& p) {
  ListCtx c;
  for (const auto& a : dw.mats) {
    c.E.push_back(mask_of(a));
    c.Ulp.push_back(build_label_prop(a, p.theta_hat));
  }
  c.D = tmf_time_weights(dw.L(), p.theta);
  return c;
}

MfGradients list_eval(const DenseWindow& dw, const ListCtx& c, const MfHyperParams& p,
                      const std::vector<DenseMat>& Vc, bool want_grad) {
  const int L = dw.L();
  MfGradients out;
  std::vector<DenseMat> gV(Vc.size(), DenseMat(Vc.front().rows(), Vc.front().cols()));
  for (int k = 0; k < L; ++k) {
    const double s = double(k + 1);
    const DenseMat Vt = poly_combine(Vc, s);
    const DenseMat P = matmul(c.Ulp[k], Vt);
    DenseMat R = hadamard(c.E[k], sub(a_bt(P, P), dw.mats[k]));
    out.loss += c.D[k] * frob_sq(R);
    if (!want_grad) continue;
    // d||E⊙(PPᵀ-A)||²/dP = 2(R + Rᵀ)P
    const DenseMat gP = scaled(matmul(add(R, transpose(R)), P), 2.0 * c.D[k]);
    const DenseMat gVt = at_b(c.Ulp[k], gP);
    double sp = 1.0;
    for (std::size_t i = 0; i < Vc.size(); ++i) {
      add_scaled(gV[i], gVt, sp);
      sp *= s;
    }
  }
  for (std::size_t i = 0; i < Vc.size(); ++i) out.loss += p.beta_of_order(int(i)) * frob_sq(Vc[i]);
  if (want_grad) {
    for (std::size_t i = 0; i < Vc.size(); ++i) {
      add_scaled(gV[i], Vc[i], 2.0 * p.beta_of_order(int(i)));
      out.grad["V_" + std::to_string(i)] = std::move(gV[i]);
    }
  }
  return out;
}

void check_gd_params(const MfHyperParams& p) {
  check_params(p);
  if (p.h < 0) throw ValidationError("polynomial order h must be >= 0");
  if (!(p.learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (!p.beta_i.empty() && int(p.beta_i.size()) != p.h + 1)
    throw ValidationError("beta_i must carry h+1 entries");
}

}  // namespace

FactorSet fit_tmf(const DenseWindow& dw, const MfHyperParams& p) {
  check_gd_params(p);
  check_rate_theta(p);
  check_window(dw);
  const int n = dw.n(), d = p.d;
  const TmfCtx c = tmf_ctx(dw, p);

  SplitMix64 rng(mix_seed(p.seed, 0x11f));
  const double am = mean_entry(dw.mats.back());
  DenseMat U = init_factor(rng, n, d, am, d);
  std::vector<DenseMat> Vc;
  for (int i = 0; i <= p.h; ++i) Vc.push_back(init_factor(rng, n, d, am, d));

  std::vector<double> trace;
  bool converged = false;
  MfGradients g = tmf_eval(dw, c, p, U, Vc, true);
  trace.push_back(g.loss);
  for (int it = 0; it < p.iters; ++it) {
    add_scaled(U, g.grad.at("U"), -p.learning_rate);
    for (int i = 0; i <= p.h; ++i)
      add_scaled(Vc[i], g.grad.at("V_" + std::to_string(i)), -p.learning_rate);
    g = tmf_eval(dw, c, p, U, Vc, true);
    if (!std::isfinite(g.loss))
      throw DivergenceError("tmf: loss diverged; try a smaller learning_rate");
    const double prev = trace.back();
    trace.push_back(g.loss);
    if (std::fabs(prev - g.loss) <= p.tol * std::max(1.0, std::fabs(prev))) {
      converged = true;
      break;
    }
  }

  FactorSet fs;
  fs.method = MfMethod::Tmf;
  fs.n = n;
  fs.L = dw.L();
  fs.order = p.h;
  fs.theta = p.theta;
  fs.factors["U"] = std::move(U);
  for (int i = 0; i <= p.h; ++i) fs.factors["V_" + std::to_string(i)] = std::move(Vc[i]);
  fs.loss_trace = std::move(trace);
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& [k, m] : fs.factors) mn = std::min(mn, min_entry(m));
  fs.min_entry_seen = mn;
  fs.converged = converged;
  return fs;
}

FactorSet fit_list(const DenseWindow& dw, const MfHyperParams& p) {
  check_gd_params(p);
  check_rate_theta(p);
  check_window(dw);
  const int n = dw.n(), d = p.d;
  const ListCtx c = list_ctx(dw, p);

  SplitMix64 rng(mix_seed(p.seed, 0x11f));
  const double am = mean_entry(dw.mats.back());
  std::vector<DenseMat> Vc;
  for (int i = 0; i <= p.h; ++i) Vc.push_back(init_factor(rng, n, d, am, d));

  std::vector<double> trace;
  bool converged = false;
  MfGradients g = list_eval(dw, c, p, Vc, true);
  trace.push_back(g.loss);
  for (int it = 0; it < p.iters; ++it) {
    for (int i = 0; i <= p.h; ++i)
      add_scaled(Vc[i], g.grad.at("V_" + std::to_string(i)), -p.learning_rate);
    g = list_eval(dw, c, p, Vc, true);
    if (!std::isfinite(g.loss))
      throw DivergenceError("list: loss diverged; try a smaller learning_rate");
    const double prev = trace.back();
    trace.push_back(g.loss);
    if (std::fabs(prev - g.loss) <= p.tol * std::max(1.0, std::fabs(prev))) {
      converged = true;
      break;
    }
  }

  FactorSet fs;
  fs.method = MfMethod::List;
  fs.n = n;
  fs.L = dw.L();
  fs.order = p.h;
  fs.theta = p.theta;
  for (int i = 0; i <= p.h; ++i) fs.factors["V_" + std::to_string(i)] = std::move(Vc[i]);
  fs.loss_trace = std::move(trace);
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& [k, m] : fs.factors) mn = std::min(mn, min_entry(m));
  fs.min_entry_seen = mn;
  fs.converged = converged;
  return fs;
}

// --- Window wrappers ------------------------------------------------------------

FactorSet fit_crjmf(const Window& win, const DenseMat* attrs, const MfHyperParams& p) {
  return fit_crjmf(to_dense_window(win), attrs, p);
}
FactorSet fit_tlsi(const Window& win, const MfHyperParams& p) {
  return fit_tlsi(to_dense_window(win), p);
}
FactorSet fit_mljfe(const Window& win, const MfHyperParams& p) {
  return fit_mljfe(to_dense_window(win), p);
}
FactorSet fit_grnmf(const Window& win, const MfHyperParams& p) {
  return fit_grnmf(to_dense_window(win), p);
}
FactorSet fit_deepeye(const Window& win, const MfHyperParams& p) {
  return fit_deepeye(to_dense_window(win), p);
}
FactorSet fit_tmf(const Window& win, const MfHyperParams& p) {
  return fit_tmf(to_dense_window(win), p);
}
FactorSet fit_list(const Window& win, const MfHyperParams& p) {
  return fit_list(to_dense_window(win), p);
}

FactorSet fit_mf(MfMethod m, const Window& win, const MfHyperParams& p, const DenseMat* attrs) {
  switch (m) {
    case MfMethod::Crjmf: return fit_crjmf(win, attrs, p);
    case MfMethod::Tlsi: return fit_tlsi(win, p);
    case MfMethod::Mljfe: return fit_mljfe(win, p);
    case MfMethod::Grnmf: return fit_grnmf(win, p);
    case MfMethod::DeepEye: return fit_deepeye(win, p);
    case MfMethod::Tmf: return fit_tmf(win, p);
    case MfMethod::List: return fit_list(win, p);
  }
  throw ValidationError("fit_mf: unknown method");
}

// --- decode -----------------------------------------------------------------------

ScoreMatrix mf_predict(const FactorSet& model, int horizon) {
  if (horizon < 1) throw UnsupportedHorizonError("horizon must be >= 1");
  const bool multi_step = model.method == MfMethod::Tmf || model.method == MfMethod::List;
  if (!multi_step && horizon != 1)
    throw UnsupportedHorizonError(to_string(model.method) + " decodes one step ahead only");

  DenseMat out;
  switch (model.method) {
    case MfMethod::Crjmf: {
      const DenseMat uy = matmul(model.at("U"), model.at("Y"));
      out = a_bt(uy, model.at("U"));
      break;
    }
    case MfMethod::Tlsi: {
      const DenseMat& u = model.at("U_" + std::to_string(model.L));
      out = a_bt(u, u);
      break;
    }
    case MfMethod::Mljfe: {
      const std::vector<double> w = decay_weights(model.L, model.theta);
      out = DenseMat(model.n, model.n);
      for (int k = 0; k < model.L; ++k) {
        if (w[k] == 0.0) continue;
        add_scaled(out,
                   a_bt(model.at("U_" + std::to_string(k + 1)), model.at("V_" + std::to_string(k + 1))),
                   w[k]);
      }
      break;
    }
    case MfMethod::Grnmf:
    case MfMethod::DeepEye:
      out = a_bt(model.at("U"), model.at("V"));
      break;
    case MfMethod::Tmf: {
      const DenseMat vt = poly_combine(collect_poly(model), double(model.L + horizon));
      out = a_bt(model.at("U"), vt);
      break;
    }
    case MfMethod::List: {
      const DenseMat vt = poly_combine(collect_poly(model), double(model.L + horizon));
      out = a_bt(vt, vt);
      break;
    }
  }
  clamp_min(out, 0.0);
  return symmetrized(out);
}

// --- loss ---------------------------------------------------------------------------

double mf_loss(const FactorSet& model, const DenseWindow& dw, const MfHyperParams& p,
               const DenseMat* attrs) {
  check_window(dw);
  if (dw.n() != model.n) throw ValidationError("mf_loss: node count mismatch");
  if (dw.L() != model.L) throw ValidationError("mf_loss: window length mismatch");
  const int L = dw.L();
  switch (model.method) {
    case MfMethod::Crjmf: {
      const CrjmfCtx c = crjmf_ctx(dw, attrs, p);
      return crjmf_loss(c, model.at("U"), model.at("V"), model.at("Y"));
    }
    case MfMethod::Tlsi: {
      std::vector<DenseMat> U;
      for (int k = 0; k < L; ++k) U.push_back(model.at("U_" + std::to_string(k + 1)));
      return tlsi_loss(dw.mats, U, p.beta);
    }
    case MfMethod::Mljfe: {
      MljfeCtx c;
      c.alpha = p.alpha;
      c.beta = p.beta;
      for (const auto& a : dw.mats) {
        c.M.push_back(build_pmi(a, p.h));
        DenseMat mp, mn;
        split_signs(c.M.back(), mp, mn);
        c.Mp.push_back(std::move(mp));
        c.Mn.push_back(std::move(mn));
      }
      std::vector<DenseMat> U, V, Y;
      for (int k = 0; k < L; ++k) {
        U.push_back(model.at("U_" + std::to_string(k + 1)));
        V.push_back(model.at("V_" + std::to_string(k + 1)));
        Y.push_back(model.at("Y_" + std::to_string(k + 1)));
      }
      return mljfe_loss(c, dw.mats, U, V, Y);
    }
    case MfMethod::Grnmf: {
      const std::vector<double> coeff = grnmf_decay(L, p.theta);
      std::vector<std::vector<double>> deg(std::max(L - 1, 0),
                                           std::vector<double>(dw.n(), 0.0));
      for (int k = 0; k + 1 < L; ++k)
        for (int i = 0; i < dw.n(); ++i)
          for (int j = 0; j < dw.n(); ++j) deg[k][i] += dw.mats[k](i, j);
      return grnmf_loss(dw.mats, coeff, deg, model.at("U"), model.at("V"), p.alpha);
    }
    case MfMethod::DeepEye: {
      const std::vector<double> coeff = decay_weights(L, p.theta);
      std::vector<DenseMat> Ut, Vt;
      for (int k = 0; k < L; ++k) {
        Ut.push_back(model.at("U_" + std::to_string(k + 1)));
        Vt.push_back(model.at("V_" + std::to_string(k + 1)));
      }
      return deepeye_loss(dw.mats, coeff, Ut, Vt, model.at("U"), model.at("V"));
    }
    case MfMethod::Tmf: {
      const TmfCtx c = tmf_ctx(dw, p);
      return tmf_eval(dw, c, p, model.at("U"), collect_poly(model), false).loss;
    }
    case MfMethod::List: {
      const ListCtx c = list_ctx(dw, p);
      return list_eval(dw, c, p, collect_poly(model), false).loss;
    }
  }
  throw ValidationError("mf_loss: unknown method");
}

double mf_loss(const FactorSet& model, const Window& win, const MfHyperParams& p,
               const DenseMat* attrs) {
  return mf_loss(model, to_dense_window(win), p, attrs);
}

MfGradients tmf_gradients(const FactorSet& model, const DenseWindow& dw, const MfHyperParams& p) {
  const TmfCtx c = tmf_ctx(dw, p);
  return tmf_eval(dw, c, p, model.at("U"), collect_poly(model), true);
}

MfGradients list_gradients(const FactorSet& model, const DenseWindow& dw, const MfHyperParams& p) {
  const ListCtx c = list_ctx(dw, p);
  return list_eval(dw, c, p, collect_poly(model), true);
}

// --- serialization -------------------------------------------------------------------

void save_factors(const FactorSet& fs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "tlp-factors,1," << to_string(fs.method) << ',' << fs.n << ',' << fs.L << ','
      << fs.order << ',' << format_double(fs.theta) << ',' << (fs.converged ? 1 : 0) << ','
      << format_double(fs.min_entry_seen) << '\n';
  for (const auto& [name, m] : fs.factors) {
    out << "factor," << name << ',' << m.rows() << ',' << m.cols() << '\n';
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        if (j) out << ',';
        out << format_double(m(i, j));
      }
      out << '\n';
    }
  }
  out << "trace," << fs.loss_trace.size() << '\n';
  for (std::size_t i = 0; i < fs.loss_trace.size(); ++i) {
    if (i) out << ',';
    out << format_double(fs.loss_trace[i]);
  }
  out << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw ParseError("factor bundle: bad number '" + s + "'");
  }
}

}  // namespace

FactorSet load_factors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("factor bundle: empty file");
  auto head = split_csv(line);
  if (head.size() != 9 || head[0] != "tlp-factors" || head[1] != "1")
    throw ParseError("factor bundle: bad header");
  FactorSet fs;
  fs.method = mf_method_from_string(head[2]);
  fs.n = std::stoi(head[3]);
  fs.L = std::stoi(head[4]);
  fs.order = std::stoi(head[5]);
  fs.theta = to_double(head[6]);
  fs.converged = head[7] == "1";
  fs.min_entry_seen = to_double(head[8]);
  while (std::getline(in, line)) {
    auto parts = split_csv(line);
    if (parts.empty()) continue;
    if (parts[0] == "factor") {
      if (parts.size() != 4) throw ParseError("factor bundle: bad factor record");
      const std::string name = parts[1];
      const int r = std::stoi(parts[2]), cnum = std::stoi(parts[3]);
      DenseMat m(r, cnum);
      for (int i = 0; i < r; ++i) {
        if (!std::getline(in, line)) throw ParseError("factor bundle: truncated matrix");
        auto vals = split_csv(line);
        if (int(vals.size()) != cnum) throw ParseError("factor bundle: wrong column count");
        for (int j = 0; j < cnum; ++j) m(i, j) = to_double(vals[j]);
      }
      fs.factors[name] = std::move(m);
    } else if (parts[0] == "trace") {
      const int k = std::stoi(parts[1]);
      if (k > 0) {
        if (!std::getline(in, line)) throw ParseError("factor bundle: truncated trace");
        auto vals = split_csv(line);
        if (int(vals.size()) != k) throw ParseError("factor bundle: wrong trace length");
        for (const auto& v : vals) fs.loss_trace.push_back(to_double(v));
      } else {
        std::getline(in, line);
      }
    }
  }
  return fs;
}

}  // namespace tlp
