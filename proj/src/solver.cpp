#include "fracdeblur/solver.hpp"

#include "fracdeblur/errors.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace fracdeblur {

void SolverConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw UsageError(std::string(name) + " must be positive and finite");
    };
    auto nonnegative = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw UsageError(std::string(name) + " must be nonnegative and finite");
    };
    positive(alpha, "alpha");
    nonnegative(lambda1, "lambda1");
    nonnegative(lambda2, "lambda2");
    nonnegative(beta, "beta");
    positive(mu1, "mu1");
    positive(mu2, "mu2");
    positive(mu3, "mu3");
    positive(tau, "tau");
    positive(gamma, "gamma");
    positive(tol, "tol");
    positive(eps_norm, "eps_norm");
    positive(eps_coef, "eps_coef");
    if (taps < 2) throw UsageError("taps must be at least 2");
    if (max_iter < 1) throw UsageError("max_iter must be at least 1");
    if (primal_dual_steps < 1) throw UsageError("primal_dual_steps must be at least 1");
}

SolverState SolverState::initial(const PixelGrid& f) {
    SolverState s;
    const int h = f.height();
    const int w = f.width();
    const int c = f.channels();
    s.u = f;
    s.m1 = PixelGrid(h, w, c);
    s.n1 = PixelGrid(h, w, c);
    s.m2.assign(std::size_t(c), FrameletCoeffs(h, w));
    s.n2.assign(std::size_t(c), FrameletCoeffs(h, w));
    s.m3 = PixelGrid(h, w, c);
    s.n3 = PixelGrid(h, w, c);
    s.m3_hat = f;
    s.p = VectorField(h, w, c);
    return s;
}

std::vector<FrameletCoeffs> frame_analysis(const PixelGrid& u) {
    std::vector<FrameletCoeffs> out;
    out.reserve(std::size_t(u.channels()));
    for (int ch = 0; ch < u.channels(); ++ch) out.push_back(analysis(u.extract_channel(ch)));
    return out;
}

PixelGrid frame_synthesis(const std::vector<FrameletCoeffs>& c) {
    const auto& first = c.front().bands[0];
    PixelGrid out(first.height(), first.width(), int(c.size()));
    for (std::size_t ch = 0; ch < c.size(); ++ch) out.set_channel(int(ch), synthesis(c[ch]));
    return out;
}

double shrink(double x, double a) {
    const double mag = std::abs(x) - a;
    return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

std::vector<double> shrink(std::span<const double> x, double a) {
    if (!(a >= 0.0)) throw UsageError("shrinkage threshold must be nonnegative");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = shrink(x[i], a);
    return out;
}

PixelGrid shrink(const PixelGrid& x, double a) {
    if (!(a >= 0.0)) throw UsageError("shrinkage threshold must be nonnegative");
    PixelGrid out = x;
    for (double& v : out.data()) v = shrink(v, a);
    return out;
}

namespace {

FrameletCoeffs combine(const FrameletCoeffs& a, double sa, const FrameletCoeffs& b, double sb) {
    FrameletCoeffs out;
    for (std::size_t k = 0; k < a.bands.size(); ++k)
        out.bands[k] = axpy(sb, b.bands[k], sa * a.bands[k]);
    return out;
}

double frames_norm1(const std::vector<FrameletCoeffs>& c) {
    double s = 0.0;
    for (const auto& x : c) s += norm1(x);
    return s;
}

double frames_inner(const std::vector<FrameletCoeffs>& a, const std::vector<FrameletCoeffs>& b) {
    double s = 0.0;
    for (std::size_t ch = 0; ch < a.size(); ++ch) s += inner(a[ch], b[ch]);
    return s;
}

double frames_norm2_sq(const std::vector<FrameletCoeffs>& c) {
    double s = 0.0;
    for (const auto& x : c) {
        const double n = norm2(x);
        s += n * n;
    }
    return s;
}

std::vector<FrameletCoeffs> frames_diff(const std::vector<FrameletCoeffs>& a,
                                        const std::vector<FrameletCoeffs>& b) {
    std::vector<FrameletCoeffs> out;
    out.reserve(a.size());
    for (std::size_t ch = 0; ch < a.size(); ++ch) out.push_back(combine(a[ch], 1.0, b[ch], -1.0));
    return out;
}

void check_problem(const PixelGrid& f, const SpectralOperator& A) {
    if (!A.compatible(f.height(), f.width(), f.channels()))
        throw UsageError("blur operator does not match the observed image shape");
}

double ftv_weight(const SolverConfig& cfg) { return cfg.lambda2 * cfg.gamma / cfg.mu3; }

} // namespace

double objective(const PixelGrid& u, const PixelGrid& f, const SpectralOperator& A,
                 const SolverConfig& cfg) {
    require_same_shape(u, f, "objective");
    check_problem(f, A);
    const FracCoeffs coeffs = gl_coefficients(cfg.alpha, cfg.taps);
    const double fidelity = norm1(A.apply(u) - f);
    const double frame = frames_norm1(frame_analysis(u));
    return fidelity + cfg.lambda1 * (frame - cfg.beta * norm2(u)) +
           cfg.lambda2 * ftv_norm(u, coeffs);
}

double lagrangian(const SolverState& s, const PixelGrid& f, const SpectralOperator& A,
                  const SolverConfig& cfg) {
    check_problem(f, A);
    const FracCoeffs coeffs = gl_coefficients(cfg.alpha, cfg.taps);
    const PixelGrid r1 = A.apply(s.u) - f - s.m1;
    const auto r2 = frames_diff(frame_analysis(s.u), s.m2);
    const PixelGrid r3 = s.u - s.m3;
    const double n1 = norm2(r1);
    const double n3 = norm2(r3);
    return norm1(s.m1) + cfg.lambda1 * (frames_norm1(s.m2) - cfg.beta * norm2(s.u)) +
           cfg.lambda2 * ftv_norm(s.m3, coeffs) + cfg.mu1 * inner(r1, s.n1) +
           0.5 * cfg.mu1 * n1 * n1 + cfg.mu2 * frames_inner(r2, s.n2) +
           0.5 * cfg.mu2 * frames_norm2_sq(r2) + cfg.mu3 * inner(r3, s.n3) +
           0.5 * cfg.mu3 * n3 * n3;
}

double u_update_coefficient(const SolverState& s, const SolverConfig& cfg, bool* floored) {
    const double unorm = std::max(norm2(s.u), cfg.eps_norm);
    double c = cfg.mu3 + cfg.mu2 - cfg.lambda1 * cfg.beta / unorm;
    const bool hit = !(c > 0.0);
    if (hit) c = cfg.eps_coef;
    if (floored) *floored = hit;
    return c;
}

PixelGrid u_update_rhs(const SolverState& s, const PixelGrid& f, const SpectralOperator& A,
                       const SolverConfig& cfg) {
    const PixelGrid data_term = A.apply_adjoint(f + s.m1 - s.n1);
    const PixelGrid frame_term = frame_synthesis(frames_diff(s.m2, s.n2));
    return axpy(cfg.mu1, data_term, axpy(cfg.mu2, frame_term, cfg.mu3 * (s.m3 - s.n3)));
}

PixelGrid update_u(const SolverState& s, const PixelGrid& f, const SpectralOperator& A,
                   const SolverConfig& cfg, std::string* warning) {
    check_problem(f, A);
    bool floored = false;
    const double c = u_update_coefficient(s, cfg, &floored);
    if (floored && warning) {
        std::ostringstream msg;
        msg << "iteration " << s.k + 1 << ": u-system coefficient mu3+mu2-lambda1*beta/|u| <= 0, "
            << "floored at " << cfg.eps_coef;
        *warning = msg.str();
    }

    // Spectral right-hand side: mu1 L^H F(f + m1 - n1) + F(mu2 W^T(m2 - n2) + mu3 (m3 - n3)).
    ComplexGrid rhs = A.apply_adjoint(dft2(f + s.m1 - s.n1));
    const PixelGrid local =
        axpy(cfg.mu2, frame_synthesis(frames_diff(s.m2, s.n2)), cfg.mu3 * (s.m3 - s.n3));
    const ComplexGrid local_hat = dft2(local);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = cfg.mu1 * rhs[i] + local_hat[i];

    const ComplexGrid solution = A.channels() == 3 ? solve_block_freq(A, cfg.mu1, c, rhs)
                                                   : solve_scalar_freq(A, cfg.mu1, c, rhs);
    return idft2(solution);
}

PixelGrid update_m1(const PixelGrid& blurred, const PixelGrid& f, const SolverState& s,
                    const SolverConfig& cfg) {
    return shrink(blurred - f + s.n1, 1.0 / cfg.mu1);
}

PixelGrid update_m1(const SolverState& s, const PixelGrid& f, const SpectralOperator& A,
                    const SolverConfig& cfg) {
    return update_m1(A.apply(s.u), f, s, cfg);
}

PixelGrid update_n1(const PixelGrid& blurred, const PixelGrid& f, const SolverState& s) {
    return s.n1 + blurred - f - s.m1;
}

PixelGrid update_n1(const SolverState& s, const PixelGrid& f, const SpectralOperator& A) {
    return update_n1(A.apply(s.u), f, s);
}

std::vector<FrameletCoeffs> update_m2(const std::vector<FrameletCoeffs>& frames,
                                      const SolverState& s, const SolverConfig& cfg) {
    const double a = cfg.lambda1 / cfg.mu2;
    std::vector<FrameletCoeffs> out;
    out.reserve(frames.size());
    for (std::size_t ch = 0; ch < frames.size(); ++ch) {
        FrameletCoeffs m;
        for (std::size_t k = 0; k < m.bands.size(); ++k)
            m.bands[k] = shrink(frames[ch].bands[k] + s.n2[ch].bands[k], a);
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<FrameletCoeffs> update_m2(const SolverState& s, const SolverConfig& cfg) {
    return update_m2(frame_analysis(s.u), s, cfg);
}

std::vector<FrameletCoeffs> update_n2(const std::vector<FrameletCoeffs>& frames,
                                      const SolverState& s) {
    std::vector<FrameletCoeffs> out;
    out.reserve(frames.size());
    for (std::size_t ch = 0; ch < frames.size(); ++ch) {
        FrameletCoeffs n = combine(s.n2[ch], 1.0, frames[ch], 1.0);
        for (std::size_t k = 0; k < n.bands.size(); ++k) n.bands[k] = n.bands[k] - s.m2[ch].bands[k];
        out.push_back(std::move(n));
    }
    return out;
}

std::vector<FrameletCoeffs> update_n2(const SolverState& s) {
    return update_n2(frame_analysis(s.u), s);
}

VectorField update_p(const SolverState& s, const SolverConfig& cfg) {
    const FracCoeffs coeffs = gl_coefficients(cfg.alpha, cfg.taps);
    const double theta = ftv_weight(cfg);
    VectorField g = grad_alpha(s.m3_hat, coeffs);
    auto gx = g.px.data();
    auto gy = g.py.data();
    auto px = s.p.px.data();
    auto py = s.p.py.data();
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double x = px[i] + theta * gx[i];
        const double y = py[i] + theta * gy[i];
        const double scale = std::max(std::hypot(x, y), 1.0);
        gx[i] = x / scale;
        gy[i] = y / scale;
    }
    return g;
}

PixelGrid update_m3(const SolverState& s, const SolverConfig& cfg) {
    const FracCoeffs coeffs = gl_coefficients(cfg.alpha, cfg.taps);
    const PixelGrid div = grad_alpha_adjoint(s.p, coeffs);
    // grad = theta * (grad_alpha)^T p + m3 - (u + n3)
    const PixelGrid grad = axpy(ftv_weight(cfg), div, s.m3 - (s.u + s.n3));
    return axpy(-cfg.tau, grad, s.m3);
}

PixelGrid extrapolate_m3(const PixelGrid& m3_new, const PixelGrid& m3_old) {
    return axpy(-1.0, m3_old, 2.0 * m3_new);
}

PixelGrid update_n3(const SolverState& s) { return s.n3 + s.u - s.m3; }

void primal_dual_step(SolverState& s, const SolverConfig& cfg) {
    s.p = update_p(s, cfg);
    PixelGrid m3_new = update_m3(s, cfg);
    s.m3_hat = extrapolate_m3(m3_new, s.m3);
    s.m3 = std::move(m3_new);
}

RestoreResult restore(const PixelGrid& f, const SpectralOperator& A, const SolverConfig& cfg,
                      const IterationObserver& observer) {
    cfg.validate();
    check_problem(f, A);
    const FracCoeffs coeffs = gl_coefficients(cfg.alpha, cfg.taps);
    if (coeffs.taps() > std::min(f.height(), f.width()))
        throw UsageError("taps exceed the image size");

    RestoreResult result;
    IterationTrace& trace = result.trace;
    trace.grad_norm = estimate_grad_norm(coeffs, f.height(), f.width());
    const double theta = ftv_weight(cfg);
    trace.stability_product = cfg.tau * cfg.gamma * (cfg.lambda2 / cfg.mu3) *
                              (cfg.lambda2 / cfg.mu3) * trace.grad_norm * trace.grad_norm;
    if (cfg.tau * (1.0 + theta * trace.grad_norm) >= 2.0) {
        std::ostringstream msg;
        msg << "step size check: tau*(1 + lambda2*gamma/mu3*|grad|) = "
            << cfg.tau * (1.0 + theta * trace.grad_norm) << " >= 2; the FTV step may diverge";
        trace.warnings.push_back(msg.str());
    }

    SolverState s = SolverState::initial(f);
    using Clock = std::chrono::steady_clock;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const auto start = Clock::now();

        std::string warning;
        PixelGrid u_next = update_u(s, f, A, cfg, &warning);
        if (!warning.empty()) trace.warnings.push_back(std::move(warning));
        if (!u_next.all_finite())
            throw NumericalError("non-finite value in u at iteration " + std::to_string(it), it);
        const double diff = norm2(u_next - s.u);
        const double unorm = norm2(u_next);
        s.u = std::move(u_next);

        const PixelGrid blurred = A.apply(s.u);
        s.m1 = update_m1(blurred, f, s, cfg);
        s.n1 = update_n1(blurred, f, s);

        const auto frames = frame_analysis(s.u);
        s.m2 = update_m2(frames, s, cfg);
        s.n2 = update_n2(frames, s);

        for (int step = 0; step < cfg.primal_dual_steps; ++step) primal_dual_step(s, cfg);
        s.n3 = update_n3(s);
        s.k = it;

        if (!s.m3.all_finite() || !s.n1.all_finite() || !s.n3.all_finite())
            throw NumericalError("non-finite auxiliary variable at iteration " + std::to_string(it),
                                 it);

        IterationRecord rec;
        rec.iteration = it;
        rec.rel_change = unorm > 0.0 ? diff / unorm : (diff == 0.0 ? 0.0 : INFINITY);
        rec.residual_blur = norm2(blurred - f - s.m1);
        rec.residual_frame = std::sqrt(frames_norm2_sq(frames_diff(frames, s.m2)));
        rec.residual_identity = norm2(s.u - s.m3);
        rec.objective = norm1(blurred - f) +
                        cfg.lambda1 * (frames_norm1(frames) - cfg.beta * unorm) +
                        cfg.lambda2 * ftv_norm(s.u, coeffs);
        if (!std::isfinite(rec.objective))
            throw NumericalError("non-finite objective at iteration " + std::to_string(it), it);
        rec.ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        trace.records.push_back(rec);
        if (observer) observer(s, rec);

        if (rec.rel_change <= cfg.tol) {
            trace.converged = true;
            break;
        }
    }
    result.image = clamp01(s.u);
    return result;
}

} // namespace fracdeblur
