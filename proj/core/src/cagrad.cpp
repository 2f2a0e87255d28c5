#include "sacd/cagrad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sacd {
namespace {

// Gram matrix M[i][j] = g_i . g_j.
std::vector<std::vector<double>> gram(const HeadGradients& grads) {
  const std::size_t n = grads.num_heads();
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < grads.dim(); ++k) dot += grads.heads[i][k] * grads.heads[j][k];
      M[i][j] = M[j][i] = dot;
    }
  return M;
}

double quad(const std::vector<std::vector<double>>& M, std::span<const double> a,
            std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M.size(); ++j) s += a[i] * M[i][j] * b[j];
  return s;
}

double objective_from_gram(const std::vector<std::vector<double>>& M, std::span<const double> w,
                           double c) {
  const std::size_t n = M.size();
  const std::vector<double> ones(n, 1.0);
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  const double gw_g0 = inv_n2 * quad(M, w, ones);
  const double gw_norm = std::sqrt(std::max(0.0, inv_n2 * quad(M, w, w)));
  const double g0_norm = std::sqrt(std::max(0.0, inv_n2 * quad(M, ones, ones)));
  return gw_g0 + c * g0_norm * gw_norm;
}

}  // namespace

std::vector<double> HeadGradients::mean() const {
  if (heads.empty()) throw std::invalid_argument("HeadGradients::mean: no heads");
  std::vector<double> g0(dim(), 0.0);
  for (const auto& g : heads)
    for (std::size_t k = 0; k < g0.size(); ++k) g0[k] += g[k];
  for (double& x : g0) x /= static_cast<double>(heads.size());
  return g0;
}

double cagrad_objective(std::span<const double> w, const HeadGradients& grads, double c) {
  if (w.size() != grads.num_heads())
    throw std::invalid_argument("cagrad_objective: weight count mismatch");
  if (c < 0.0) throw std::invalid_argument("cagrad_objective: c must be non-negative");
  return objective_from_gram(gram(grads), w, c);
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double theta = 0.0;
  std::size_t rho = 0;
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    running += u[i];
    const double t = (running - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      css = running;
    }
  }
  theta = (css - 1.0) / static_cast<double>(rho);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, v[i] - theta);
  return out;
}

std::vector<double> cagrad_weights(const HeadGradients& grads, double c, CagradSolverConfig cfg) {
  const std::size_t n = grads.num_heads();
  if (n < 2) throw std::invalid_argument("cagrad_weights: need at least 2 heads");
  auto M = gram(grads);
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(M[i][i])) throw std::runtime_error("cagrad_weights: non-finite gradients");

  // Normalize by the mean head norm (solver-internal only).
  double mean_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_norm += std::sqrt(std::max(0.0, M[i][i]));
  mean_norm /= static_cast<double>(n);
  if (mean_norm > 0.0) {
    const double s = 1.0 / (mean_norm * mean_norm);
    for (auto& row : M)
      for (double& x : row) x *= s;
  }

  const std::vector<double> ones(n, 1.0);
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  const double g0_norm = std::sqrt(std::max(0.0, inv_n2 * quad(M, ones, ones)));
  const double sqrt_phi = c * g0_norm;

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> grad(n), trial(n);
  double f_cur = objective_from_gram(M, w, c);
  for (int it = 0; it < cfg.iterations; ++it) {
    const double gw_norm = std::sqrt(std::max(0.0, inv_n2 * quad(M, w, w)));
    for (std::size_t i = 0; i < n; ++i) {
      double Mw = 0.0, M1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        Mw += M[i][j] * w[j];
        M1 += M[i][j];
      }
      grad[i] = inv_n2 * M1;
      if (gw_norm > 0.0) grad[i] += sqrt_phi * inv_n2 * Mw / gw_norm;
    }
    // Backtracking from the nominal step keeps the iteration monotone. If no
    // step length makes progress, the iterate is stationary; stop early.
    double step = cfg.step;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] - step * grad[i];
      const auto cand = project_to_simplex(trial);
      const double f_cand = objective_from_gram(M, cand, c);
      if (f_cand < f_cur) {
        w = cand;
        f_cur = f_cand;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return w;
}

std::vector<double> cagrad_direction(const HeadGradients& grads, std::span<const double> w) {
  if (w.size() != grads.num_heads())
    throw std::invalid_argument("cagrad_direction: weight count mismatch");
  std::vector<double> dir(grads.dim(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t k = 0; k < dir.size(); ++k) dir[k] += w[i] * grads.heads[i][k];
  return dir;
}

std::vector<double> cagrad_direction_original(const HeadGradients& grads,
                                              std::span<const double> w, double c) {
  const std::size_t n = grads.num_heads();
  std::vector<double> g0 = grads.mean();
  std::vector<double> gw(grads.dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < gw.size(); ++k)
      gw[k] += w[i] * grads.heads[i][k] / static_cast<double>(n);
  double g0n = 0.0, gwn = 0.0;
  for (std::size_t k = 0; k < gw.size(); ++k) {
    g0n += g0[k] * g0[k];
    gwn += gw[k] * gw[k];
  }
  const double sqrt_phi = c * std::sqrt(g0n);
  std::vector<double> dir = g0;
  if (gwn > 0.0) {
    const double scale = sqrt_phi / std::sqrt(gwn);
    for (std::size_t k = 0; k < dir.size(); ++k) dir[k] += scale * gw[k];
  }
  return dir;
}

}  // namespace sacd
