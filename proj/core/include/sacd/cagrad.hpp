#pragma once

#include <span>
#include <vector>

namespace sacd {

/// Per-component critic-loss gradients, one vector per value head.
struct HeadGradients {
  std::vector<std::vector<double>> heads;

  std::size_t num_heads() const { return heads.size(); }
  std::size_t dim() const { return heads.empty() ? 0 : heads[0].size(); }

  /// g0 = (1/n) sum_i grad_i
  std::vector<double> mean() const;
};

struct CagradSolverConfig {
  int iterations = 20000;  // cap; the solve exits early once stationary
  double step = 0.1;       // initial step, shrunk by backtracking
};

/// F(w) = g_w . g0 + sqrt(phi) * ||g_w||, with g_w = (1/n) sum_i w_i grad_i
/// and phi = c^2 ||g0||^2. Evaluated on the raw (un-normalized) gradients.
double cagrad_objective(std::span<const double> w, const HeadGradients& grads, double c);

/// argmin of F over the probability simplex, by projected gradient descent
/// from the uniform point. Head gradients are divided by the mean of their
/// norms inside the solve only.
std::vector<double> cagrad_weights(const HeadGradients& grads, double c,
                                   CagradSolverConfig cfg = {});

/// Final update direction: sum_i w_i grad_i over the raw gradients.
std::vector<double> cagrad_direction(const HeadGradients& grads, std::span<const double> w);

/// Alternative direction g0 + (sqrt(phi)/||g_w||) g_w from the original
/// CAGrad formulation.
std::vector<double> cagrad_direction_original(const HeadGradients& grads,
                                              std::span<const double> w, double c);

std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace sacd
