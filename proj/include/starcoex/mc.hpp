#pragma once

#include <cstdint>
#include <vector>

#include "starcoex/metrics.hpp"

// Monte-Carlo oracle for the closed forms in metrics: every expectation is
// re-estimated from sampled channel realizations and reported with a standard
// error, plus a finite-difference check for the optimizer gradients.
// Realizations use per-index derived seeds and a fixed reduction order, so
// results do not depend on the thread count.
namespace starcoex::mc {

using la::cplx;
using la::CMat;
using la::CVec;
using model::Scenario;
using star::PassiveBeamformer;

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// UaTF SINR for UE k assembled from sample moments of the effective channels
// (matched filters f_i drawn from the same realization). Standard error from
// batch means over 10 batches.
Estimate estimate_ue_sinr(const Scenario& scn, const PassiveBeamformer& pb,
                          const std::vector<CVec>& u_beams, std::size_t k,
                          std::size_t runs, std::uint64_t seed,
                          unsigned threads = 0);

// Sample average of the BS->radar interference covariance
// (lambda rho / K) E{ v v^H }, v = (h_br^H + h_sr^H phi^H h_bs^H) sum_i f_i;
// compare against metrics' a_interf.
CMat estimate_radar_interference(const Scenario& scn,
                                 const PassiveBeamformer& pb, std::size_t runs,
                                 std::uint64_t seed, unsigned threads = 0);

// 1 / E{ sum_i |f_i|^2 } with matched filters f_i = h_bsi; the Monte-Carlo
// counterpart of metrics::normalization_lambda.
Estimate estimate_lambda(const Scenario& scn, const PassiveBeamformer& pb,
                         std::size_t runs, std::uint64_t seed,
                         unsigned threads = 0);

// Sample covariance of vectors produced by sample(), for channel model
// validation: mean of x x^H over runs draws.
template <typename Sampler>
CMat estimate_covariance(std::size_t dim, std::size_t runs, Sampler&& sample) {
  CMat acc(dim, dim);
  for (std::size_t r = 0; r < runs; ++r) {
    const CVec x = sample(r);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        acc(i, j) += x[i] * std::conj(x[j]);
  }
  acc *= cplx(1.0 / static_cast<double>(runs), 0.0);
  return acc;
}

// Central-difference check of the closed-form SE gradients along random
// directions; returns the worst relative error.
double fd_gradient_check(const Scenario& scn, const PassiveBeamformer& pb,
                         const std::vector<CVec>& u_beams,
                         std::size_t directions, double epsilon,
                         std::uint64_t seed);

}  // namespace starcoex::mc
