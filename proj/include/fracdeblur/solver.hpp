#pragma once

#include "fracdeblur/fracdiff.hpp"
#include "fracdeblur/framelet.hpp"
#include "fracdeblur/grid.hpp"
#include "fracdeblur/spectral.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fracdeblur {

/// Weights and step sizes for
///   min_u |Au - f|_1 + lambda1 (|Wu|_1 - beta |u|_2) + lambda2 |u|_FTV
/// solved by ADMM with splitting m1 = Au - f, m2 = Wu, m3 = u.
struct SolverConfig {
    double alpha = 1.3;  // fractional order
    int taps = 15;       // Grünwald-Letnikov taps
    double lambda1 = 0.05;
    double lambda2 = 0.02;
    double beta = 0.5;
    double mu1 = 50.0;
    double mu2 = 3.0;
    double mu3 = 1.0;
    double tau = 0.5;    // primal step of the FTV sub-solver
    double gamma = 1.0;  // dual step constant of the FTV sub-solver
    double tol = 1e-3;   // on |u^{k+1} - u^k| / |u^{k+1}|
    int max_iter = 500;
    double eps_norm = 1e-12;
    double eps_coef = 1e-8;
    int primal_dual_steps = 1; // (p, m3) steps per outer iteration

    /// Throws UsageError on out-of-range values.
    void validate() const;
};

/// ADMM iterates. Per-channel quantities share the image's channel layout;
/// framelet blocks are stored per channel.
struct SolverState {
    PixelGrid u;
    PixelGrid m1, n1;
    std::vector<FrameletCoeffs> m2, n2;
    PixelGrid m3, n3, m3_hat;
    VectorField p;
    int k = 0;

    /// u = f, multipliers and auxiliaries zero, m3_hat = u.
    static SolverState initial(const PixelGrid& f);
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    double rel_change = 0.0;
    double residual_blur = 0.0;     // |Au - f - m1|
    double residual_frame = 0.0;    // |Wu - m2|
    double residual_identity = 0.0; // |u - m3|
    double ms = 0.0;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    std::vector<std::string> warnings;
    double grad_norm = 0.0;         // estimate of |grad_alpha|
    double stability_product = 0.0; // tau * gamma * (lambda2/mu3)^2 * |grad_alpha|^2
    bool converged = false;
};

struct RestoreResult {
    PixelGrid image; // clamped to [0,1]
    IterationTrace trace;
};

/// Called after every outer iteration with the updated state.
using IterationObserver = std::function<void(const SolverState&, const IterationRecord&)>;

/// Framelet analysis of every channel.
std::vector<FrameletCoeffs> frame_analysis(const PixelGrid& u);
/// Framelet synthesis of every channel.
PixelGrid frame_synthesis(const std::vector<FrameletCoeffs>& c);

/// sign(x) * max(|x| - a, 0), elementwise.
double shrink(double x, double a);
std::vector<double> shrink(std::span<const double> x, double a);
PixelGrid shrink(const PixelGrid& x, double a);

double objective(const PixelGrid& u, const PixelGrid& f, const SpectralOperator& A,
                 const SolverConfig& cfg);
double lagrangian(const SolverState& s, const PixelGrid& f, const SpectralOperator& A,
                  const SolverConfig& cfg);

/// Diagonal coefficient mu3 + mu2 - lambda1*beta/|u^k| of the u-system,
/// floored at eps_coef. `floored` reports whether the floor was hit.
double u_update_coefficient(const SolverState& s, const SolverConfig& cfg, bool* floored = nullptr);

/// mu1 A^T (f + m1 - n1) + mu2 W^T (m2 - n2) + mu3 (m3 - n3).
PixelGrid u_update_rhs(const SolverState& s, const PixelGrid& f, const SpectralOperator& A,
                       const SolverConfig& cfg);

/// Solves (mu1 A^T A + c I) u = rhs in the Fourier domain. Uses the 3 x 3
/// block solve when A couples channels.
PixelGrid update_u(const SolverState& s, const PixelGrid& f, const SpectralOperator& A,
                   const SolverConfig& cfg, std::string* warning = nullptr);

/// shrink(Au - f + n1, 1/mu1); `blurred` is A u^{k+1}.
PixelGrid update_m1(const PixelGrid& blurred, const PixelGrid& f, const SolverState& s,
                    const SolverConfig& cfg);
PixelGrid update_m1(const SolverState& s, const PixelGrid& f, const SpectralOperator& A,
                    const SolverConfig& cfg);
/// n1 + Au - f - m1, with m1 already updated in `s`.
PixelGrid update_n1(const PixelGrid& blurred, const PixelGrid& f, const SolverState& s);
PixelGrid update_n1(const SolverState& s, const PixelGrid& f, const SpectralOperator& A);

/// shrink(Wu + n2, lambda1/mu2); `frames` is W u^{k+1}.
std::vector<FrameletCoeffs> update_m2(const std::vector<FrameletCoeffs>& frames,
                                      const SolverState& s, const SolverConfig& cfg);
std::vector<FrameletCoeffs> update_m2(const SolverState& s, const SolverConfig& cfg);
/// n2 + Wu - m2, with m2 already updated in `s`.
std::vector<FrameletCoeffs> update_n2(const std::vector<FrameletCoeffs>& frames,
                                      const SolverState& s);
std::vector<FrameletCoeffs> update_n2(const SolverState& s);

/// Dual ascent on the FTV field followed by projection onto |p_i| <= 1.
VectorField update_p(const SolverState& s, const SolverConfig& cfg);
/// Primal descent step towards u + n3, using the already updated p.
PixelGrid update_m3(const SolverState& s, const SolverConfig& cfg);
/// 2 m3_new - m3_old.
PixelGrid extrapolate_m3(const PixelGrid& m3_new, const PixelGrid& m3_old);
/// n3 + u - m3, with m3 already updated in `s`.
PixelGrid update_n3(const SolverState& s);

/// p, m3 and m3_hat updates in place (one primal-dual step).
void primal_dual_step(SolverState& s, const SolverConfig& cfg);

/// Runs the ADMM iteration from SolverState::initial(f) until the relative
/// change drops to cfg.tol or cfg.max_iter iterations. Throws NumericalError
/// if an iterate becomes non-finite.
RestoreResult restore(const PixelGrid& f, const SpectralOperator& A, const SolverConfig& cfg,
                      const IterationObserver& observer = {});

} // namespace fracdeblur
