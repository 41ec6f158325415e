#include "fracdeblur/metrics.hpp"

#include "fracdeblur/errors.hpp"
#include "fracdeblur/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fracdeblur {

namespace {

double decibels(double ratio) {
    if (ratio <= 0.0) return -kDecibelCap;
    if (!std::isfinite(ratio)) return kDecibelCap;
    return std::clamp(10.0 * std::log10(ratio), -kDecibelCap, kDecibelCap);
}

double squared_distance(const PixelGrid& a, const PixelGrid& b) {
    auto x = a.data();
    auto y = b.data();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

// Separable 'valid' filtering with a normalized 1-D Gaussian.
std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(std::size_t(size), 0.0);
    const double c = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        w[std::size_t(i)] = std::exp(-(i - c) * (i - c) / (2 * sigma * sigma));
        sum += w[std::size_t(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

std::vector<double> filter_valid(std::span<const double> img, int h, int w,
                                 const std::vector<double>& win) {
    const int n = int(win.size());
    const int oh = h - n + 1;
    const int ow = w - n + 1;
    std::vector<double> tmp(std::size_t(h) * ow);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += win[std::size_t(k)] * img[std::size_t(r) * w + c + k];
            tmp[std::size_t(r) * ow + c] = s;
        }
    std::vector<double> out(std::size_t(oh) * ow);
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += win[std::size_t(k)] * tmp[std::size_t(r + k) * ow + c];
            out[std::size_t(r) * ow + c] = s;
        }
    return out;
}

double ssim_plane(std::span<const double> x, std::span<const double> y, int h, int w) {
    constexpr double C1 = 0.01 * 0.01;
    constexpr double C2 = 0.03 * 0.03;
    int size = std::min({11, h, w});
    const auto win = gaussian_window(size, 1.5);

    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, h, w, win);
    const auto my = filter_valid(y, h, w, win);
    const auto sxx = filter_valid(xx, h, w, win);
    const auto syy = filter_valid(yy, h, w, win);
    const auto sxy = filter_valid(xy, h, w, win);

    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cov = sxy[i] - mx[i] * my[i];
        total += ((2 * mx[i] * my[i] + C1) * (2 * cov + C2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + C1) * (vx + vy + C2));
    }
    return total / double(mx.size());
}

PixelGrid luminance255(const PixelGrid& g) {
    PixelGrid y(g.height(), g.width(), 1);
    if (g.channels() == 1) {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = 255.0 * g[i];
        return y;
    }
    auto r = g.channel(0);
    auto gr = g.channel(1);
    auto b = g.channel(2);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = 255.0 * (0.299 * r[i] + 0.587 * gr[i] + 0.114 * b[i]);
    return y;
}

// Zero-padded 2-D convolution returning the central part (MATLAB 'same').
PixelGrid conv_same(const PixelGrid& img, const std::vector<double>& k, int kr, int kc) {
    const int h = img.height();
    const int w = img.width();
    const int orr = kr / 2;
    const int oc = kc / 2;
    PixelGrid out(h, w, 1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double s = 0.0;
            for (int a = 0; a < kr; ++a) {
                const int rr = r + orr - a;
                if (rr < 0 || rr >= h) continue;
                for (int b = 0; b < kc; ++b) {
                    const int cc = c + oc - b;
                    if (cc < 0 || cc >= w) continue;
                    s += k[std::size_t(a) * kc + b] * img(rr, cc);
                }
            }
            out(r, c) = s;
        }
    return out;
}

PixelGrid downsample(const PixelGrid& img, int factor) {
    if (factor <= 1) return img;
    const std::vector<double> box(std::size_t(factor) * factor, 1.0 / (factor * factor));
    const PixelGrid smooth = conv_same(img, box, factor, factor);
    const int h = (img.height() + factor - 1) / factor;
    const int w = (img.width() + factor - 1) / factor;
    PixelGrid out(h, w, 1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out(r, c) = smooth(r * factor, c * factor);
    return out;
}

// Frequency coordinate of index i after ifftshift, normalized as in the
// reference phase-congruency code.
double shifted_freq(int i, int n) {
    const int half = n / 2;
    const double den = (n % 2) ? double(n - 1) : double(n);
    if (n == 1) return 0.0;
    return double(((i + half) % n) - half) / den;
}

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    const double hi = v[n / 2];
    if (n % 2) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
    return 0.5 * (lo + hi);
}

} // namespace

double reerr(const PixelGrid& candidate, const PixelGrid& reference) {
    require_same_shape(candidate, reference, "reerr");
    const double ref = norm2(reference);
    if (ref == 0.0) throw UsageError("reerr: reference image is all zero");
    return squared_distance(candidate, reference) / (ref * ref);
}

double psnr(const PixelGrid& candidate, const PixelGrid& reference) {
    require_same_shape(candidate, reference, "psnr");
    const double mse = squared_distance(candidate, reference) / double(reference.size());
    if (mse == 0.0) return kDecibelCap;
    return decibels(1.0 / mse);
}

double snr(const PixelGrid& candidate, const PixelGrid& reference) {
    require_same_shape(candidate, reference, "snr");
    double mean = 0.0;
    for (double v : reference.data()) mean += v;
    mean /= double(reference.size());
    double signal = 0.0;
    for (double v : reference.data()) signal += (v - mean) * (v - mean);
    const double noise = squared_distance(candidate, reference);
    if (noise == 0.0) return kDecibelCap;
    return decibels(signal / noise);
}

double isnr(const PixelGrid& candidate, const PixelGrid& reference, const PixelGrid& degraded) {
    require_same_shape(candidate, reference, "isnr");
    require_same_shape(degraded, reference, "isnr");
    const double after = squared_distance(candidate, reference);
    if (after == 0.0) return kDecibelCap;
    return decibels(squared_distance(degraded, reference) / after);
}

double ssim(const PixelGrid& candidate, const PixelGrid& reference) {
    require_same_shape(candidate, reference, "ssim");
    double total = 0.0;
    for (int ch = 0; ch < reference.channels(); ++ch)
        total += ssim_plane(candidate.channel(ch), reference.channel(ch), reference.height(),
                            reference.width());
    return total / reference.channels();
}

PixelGrid phase_congruency(const PixelGrid& image) {
    constexpr int kScales = 4;
    constexpr int kOrients = 4;
    constexpr double kMinWavelength = 6.0;
    constexpr double kMult = 2.0;
    constexpr double kSigmaOnf = 0.55;
    constexpr double kDThetaOnSigma = 1.2;
    constexpr double kNoiseStd = 2.0;
    constexpr double kEpsilon = 1e-4;
    const double theta_sigma = std::numbers::pi / kOrients / kDThetaOnSigma;

    const int rows = image.height();
    const int cols = image.width();
    const std::size_t n = image.plane_size();
    const ComplexGrid image_hat = dft2(image);

    std::vector<double> radius(n), sin_theta(n), cos_theta(n), lowpass(n);
    for (int r = 0; r < rows; ++r) {
        const double y = shifted_freq(r, rows);
        for (int c = 0; c < cols; ++c) {
            const double x = shifted_freq(c, cols);
            const std::size_t i = std::size_t(r) * cols + c;
            radius[i] = std::sqrt(x * x + y * y);
            lowpass[i] = 1.0 / (1.0 + std::pow(radius[i] / 0.45, 30));
            const double theta = std::atan2(-y, x);
            sin_theta[i] = std::sin(theta);
            cos_theta[i] = std::cos(theta);
        }
    }
    radius[0] = 1.0;

    std::vector<std::vector<double>> log_gabor(kScales, std::vector<double>(n));
    const double denom = 2.0 * std::log(kSigmaOnf) * std::log(kSigmaOnf);
    for (int s = 0; s < kScales; ++s) {
        const double fo = 1.0 / (kMinWavelength * std::pow(kMult, s));
        for (std::size_t i = 0; i < n; ++i) {
            const double lr = std::log(radius[i] / fo);
            log_gabor[s][i] = std::exp(-lr * lr / denom) * lowpass[i];
        }
        log_gabor[s][0] = 0.0;
    }

    std::vector<double> energy_all(n, 0.0), amplitude_all(n, 0.0);
    for (int o = 0; o < kOrients; ++o) {
        const double angle = o * std::numbers::pi / kOrients;
        std::vector<double> spread(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ds = sin_theta[i] * std::cos(angle) - cos_theta[i] * std::sin(angle);
            const double dc = cos_theta[i] * std::cos(angle) + sin_theta[i] * std::sin(angle);
            const double dtheta = std::abs(std::atan2(ds, dc));
            spread[i] = std::exp(-dtheta * dtheta / (2 * theta_sigma * theta_sigma));
        }

        std::vector<double> sum_e(n, 0.0), sum_o(n, 0.0), sum_an(n, 0.0), energy(n, 0.0);
        std::vector<ComplexGrid> responses;
        std::vector<std::vector<double>> spatial_filters;
        double em_n = 0.0;
        for (int s = 0; s < kScales; ++s) {
            ComplexGrid filter(rows, cols, 1);
            for (std::size_t i = 0; i < n; ++i) filter[i] = log_gabor[s][i] * spread[i];
            if (s == 0)
                for (std::size_t i = 0; i < n; ++i) em_n += std::norm(filter[i]);

            const ComplexGrid spatial = idft2_complex(filter);
            std::vector<double> sf(n);
            for (std::size_t i = 0; i < n; ++i) sf[i] = spatial[i].real() * std::sqrt(double(n));
            spatial_filters.push_back(std::move(sf));

            ComplexGrid product(rows, cols, 1);
            for (std::size_t i = 0; i < n; ++i) product[i] = image_hat[i] * filter[i];
            ComplexGrid eo = idft2_complex(product);
            for (std::size_t i = 0; i < n; ++i) {
                sum_an[i] += std::abs(eo[i]);
                sum_e[i] += eo[i].real();
                sum_o[i] += eo[i].imag();
            }
            responses.push_back(std::move(eo));
        }

        for (std::size_t i = 0; i < n; ++i) {
            const double xe = std::hypot(sum_e[i], sum_o[i]) + kEpsilon;
            const double mean_e = sum_e[i] / xe;
            const double mean_o = sum_o[i] / xe;
            for (int s = 0; s < kScales; ++s) {
                const double e = responses[std::size_t(s)][i].real();
                const double od = responses[std::size_t(s)][i].imag();
                energy[i] += e * mean_e + od * mean_o - std::abs(e * mean_o - od * mean_e);
            }
        }

        // Noise compensation from the smallest-scale response statistics.
        std::vector<double> e2(n);
        for (std::size_t i = 0; i < n; ++i) e2[i] = std::norm(responses[0][i]);
        const double mean_e2n = -median(std::move(e2)) / std::log(0.5);
        const double noise_power = em_n > 0.0 ? mean_e2n / em_n : 0.0;
        double sum_an2 = 0.0;
        double sum_aiaj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (int s = 0; s < kScales; ++s) {
                const double a = spatial_filters[std::size_t(s)][i];
                sum_an2 += a * a;
                for (int t = s + 1; t < kScales; ++t) sum_aiaj += a * spatial_filters[std::size_t(t)][i];
            }
        }
        const double noise_energy2 = 2 * noise_power * sum_an2 + 4 * noise_power * sum_aiaj;
        const double tau = std::sqrt(std::max(noise_energy2, 0.0) / 2.0);
        const double noise_mean = tau * std::sqrt(std::numbers::pi / 2.0);
        const double noise_sigma = std::sqrt((2.0 - std::numbers::pi / 2.0) * tau * tau);
        const double threshold = (noise_mean + kNoiseStd * noise_sigma) / 1.7;

        for (std::size_t i = 0; i < n; ++i) {
            energy_all[i] += std::max(energy[i] - threshold, 0.0);
            amplitude_all[i] += sum_an[i];
        }
    }

    PixelGrid pc(rows, cols, 1);
    for (std::size_t i = 0; i < n; ++i)
        pc[i] = amplitude_all[i] > 0.0 ? energy_all[i] / amplitude_all[i] : 0.0;
    return pc;
}

double fsim(const PixelGrid& candidate, const PixelGrid& reference) {
    require_same_shape(candidate, reference, "fsim");
    constexpr double T1 = 0.85;
    constexpr double T2 = 160.0;

    const int factor = std::max(1, int(std::lround(std::min(reference.height(), reference.width()) / 256.0)));
    const PixelGrid y1 = downsample(luminance255(reference), factor);
    const PixelGrid y2 = downsample(luminance255(candidate), factor);

    const PixelGrid pc1 = phase_congruency(y1);
    const PixelGrid pc2 = phase_congruency(y2);

    const std::vector<double> dx = {3 / 16.0,  0, -3 / 16.0, 10 / 16.0, 0,
                                    -10 / 16.0, 3 / 16.0, 0, -3 / 16.0};
    const std::vector<double> dy = {3 / 16.0, 10 / 16.0, 3 / 16.0, 0, 0, 0,
                                    -3 / 16.0, -10 / 16.0, -3 / 16.0};
    const PixelGrid gx1 = conv_same(y1, dx, 3, 3);
    const PixelGrid gy1 = conv_same(y1, dy, 3, 3);
    const PixelGrid gx2 = conv_same(y2, dx, 3, 3);
    const PixelGrid gy2 = conv_same(y2, dy, 3, 3);

    double num = 0.0;
    double den = 0.0;
    double grad_only = 0.0;
    for (std::size_t i = 0; i < y1.size(); ++i) {
        const double g1 = std::hypot(gx1[i], gy1[i]);
        const double g2 = std::hypot(gx2[i], gy2[i]);
        const double pc_sim = (2 * pc1[i] * pc2[i] + T1) / (pc1[i] * pc1[i] + pc2[i] * pc2[i] + T1);
        const double g_sim = (2 * g1 * g2 + T2) / (g1 * g1 + g2 * g2 + T2);
        const double weight = std::max(pc1[i], pc2[i]);
        num += g_sim * pc_sim * weight;
        den += weight;
        grad_only += g_sim;
    }
    // Featureless images (zero phase congruency everywhere) fall back to the
    // mean gradient similarity.
    if (den <= 0.0) return grad_only / double(y1.size());
    return std::clamp(num / den, 0.0, 1.0);
}

QualityReport evaluate(const PixelGrid& candidate, const PixelGrid& reference,
                       const PixelGrid& degraded, bool with_fsim) {
    QualityReport q;
    q.psnr = psnr(candidate, reference);
    q.snr = snr(candidate, reference);
    q.isnr = isnr(candidate, reference, degraded);
    q.reerr = reerr(candidate, reference);
    q.ssim = ssim(candidate, reference);
    if (with_fsim) q.fsim = fsim(candidate, reference);
    return q;
}

} // namespace fracdeblur
