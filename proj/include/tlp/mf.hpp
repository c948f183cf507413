#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tlp/graph.hpp"
#include "tlp/matrix.hpp"
#include "tlp/similarity.hpp"

namespace tlp {

enum class MfMethod { Crjmf, Tlsi, Mljfe, Grnmf, DeepEye, Tmf, List };

MfMethod mf_method_from_string(const std::string& name);
std::string to_string(MfMethod m);

struct MfHyperParams {
  int d = 8;               // latent dimension
  double alpha = 0.0;      // secondary-term weight
  double beta = 0.0;       // smoothness / regularization weight
  std::vector<double> beta_i;  // per-order ridge weights (TMF/LIST); empty -> all beta
  double theta = 0.5;      // decay parameter
  int h = 1;               // PMI order (MLjFE) / polynomial order (TMF, LIST)
  double theta_hat = 0.5;  // label-propagation damping (LIST), in (0,1)
  int iters = 300;
  double tol = 1e-6;       // relative loss-change stop
  double learning_rate = 1e-3;  // TMF/LIST gradient step
  std::uint64_t seed = 0;

  double beta_of_order(int i) const {
    return beta_i.empty() ? beta : beta_i.at(std::size_t(i));
  }
};

// Learned latent matrices plus the per-iteration loss record. Keys: "U", "V",
// "Y" for shared factors, "U_1".."U_L" (and V_/Y_) for per-step factors,
// "V_0".."V_h" for polynomial coefficients.
struct FactorSet {
  MfMethod method = MfMethod::Grnmf;
  int n = 0;
  int L = 0;
  int order = 0;       // h where applicable
  double theta = 0.0;  // decay used by time-discounted decoders
  std::map<std::string, DenseMat> factors;
  std::vector<double> loss_trace;
  double min_entry_seen = 0.0;  // across all factors, every iteration
  bool converged = true;

  const DenseMat& at(const std::string& key) const;
};

// Dense view of a snapshot window: mats[k] is the adjacency of step
// tau-L+1+k. The engine-level fit entry points consume this form directly so
// tests can plant arbitrary symmetric targets.
struct DenseWindow {
  std::vector<DenseMat> mats;

  int L() const { return int(mats.size()); }
  int n() const { return mats.empty() ? 0 : mats.front().rows(); }
};

DenseWindow to_dense_window(const Window& win);

// --- auxiliary builders -----------------------------------------------------

// diag(row sums) - M; validates symmetry to 1e-9.
DenseMat build_laplacian(const DenseMat& m);

// Elementwise log of (sum_{r=1..h} A^r)/h where that average is positive, 0
// elsewhere. The summand exponent is r (the printed source uses a constant
// exponent, which would make the sum index dead).
DenseMat build_pmi(const DenseMat& a, int h);

// (1 - th)(I - th*Ahat)^{-1} with Ahat = D^{-1/2} A D^{-1/2}; zero-degree rows
// contribute zero rows/cols to Ahat.
DenseMat build_label_prop(const DenseMat& a, double theta_hat);

// Decay ladders, newest step last; 0^0 = 1 throughout.
std::vector<double> decay_weights(int L, double theta);        // theta^(tau-t), t in window
std::vector<double> grnmf_decay(int L, double theta);          // theta^(tau-t-1), t < tau
std::vector<double> tmf_time_weights(int L, double theta);     // exp(-theta (tau-t))

// --- fits --------------------------------------------------------------------

FactorSet fit_crjmf(const DenseWindow& dw, const DenseMat* attrs, const MfHyperParams& p);
FactorSet fit_tlsi(const DenseWindow& dw, const MfHyperParams& p);
FactorSet fit_mljfe(const DenseWindow& dw, const MfHyperParams& p);
FactorSet fit_grnmf(const DenseWindow& dw, const MfHyperParams& p);
FactorSet fit_deepeye(const DenseWindow& dw, const MfHyperParams& p);
FactorSet fit_tmf(const DenseWindow& dw, const MfHyperParams& p);
FactorSet fit_list(const DenseWindow& dw, const MfHyperParams& p);

FactorSet fit_crjmf(const Window& win, const DenseMat* attrs, const MfHyperParams& p);
FactorSet fit_tlsi(const Window& win, const MfHyperParams& p);
FactorSet fit_mljfe(const Window& win, const MfHyperParams& p);
FactorSet fit_grnmf(const Window& win, const MfHyperParams& p);
FactorSet fit_deepeye(const Window& win, const MfHyperParams& p);
FactorSet fit_tmf(const Window& win, const MfHyperParams& p);
FactorSet fit_list(const Window& win, const MfHyperParams& p);

FactorSet fit_mf(MfMethod m, const Window& win, const MfHyperParams& p,
                 const DenseMat* attrs = nullptr);

// --- decode / loss -----------------------------------------------------------

// Method decoder at the given horizon; entries clamped at >= 0, then averaged
// with the transpose. One-step methods accept only r = 1.
ScoreMatrix mf_predict(const FactorSet& model, int horizon);

// Exact objective value of the model's method on this window.
double mf_loss(const FactorSet& model, const DenseWindow& dw, const MfHyperParams& p,
               const DenseMat* attrs = nullptr);
double mf_loss(const FactorSet& model, const Window& win, const MfHyperParams& p,
               const DenseMat* attrs = nullptr);

// --- TMF/LIST gradients (exposed for finite-difference checks) ---------------

struct MfGradients {
  double loss = 0.0;
  std::map<std::string, DenseMat> grad;
};

MfGradients tmf_gradients(const FactorSet& model, const DenseWindow& dw, const MfHyperParams& p);
MfGradients list_gradients(const FactorSet& model, const DenseWindow& dw, const MfHyperParams& p);

// --- serialization ------------------------------------------------------------

// Flat CSV bundle: matrix name, shape, row-major values. Exact round trip.
void save_factors(const FactorSet& fs, const std::string& path);
FactorSet load_factors(const std::string& path);

}  // namespace tlp
