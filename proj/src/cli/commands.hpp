#pragma once

#include "fracdeblur/degrade.hpp"
#include "fracdeblur/kernel.hpp"
#include "fracdeblur/metrics.hpp"
#include "fracdeblur/solver.hpp"
#include "fracdeblur/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracdeblur::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitNumerical = 3 };

/// A grayscale kernel or a cross-channel 3 x 3 blur, plus the text it came from.
struct BlurModel {
    std::string label;
    bool color = false;
    Kernel kernel;
    ColorBlurSpec color_spec;

    nlohmann::json describe() const;
    /// Throws UsageError when the blur cannot act on an image of this shape.
    void check_fits(const PixelGrid& u) const;
    /// Periodic blur in the pixel domain; a grayscale kernel blurs every channel.
    PixelGrid apply(const PixelGrid& u) const;
    SpectralOperator spectral(int height, int width) const;
    /// Random-valued noise for the peppers presets, salt & pepper otherwise.
    NoiseKind default_noise() const;
};

/// Exactly one source may be given. `kernel` is an inline spec such as
/// "gaussian:7,4", or a colour preset name (optionally prefixed "preset:").
/// With no source the identity kernel is used.
BlurModel resolve_blur(const std::string& kernel, const std::string& kernel_file = {},
                       const std::string& color_kernel_file = {});

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(const std::string& s);
/// Shortest text that reads back to the same double.
std::string format_number(double v);

/// "<dir>/<stem of path><suffix>"; `ext` replaces the extension when non-empty.
std::string derived_path(const std::string& dir, const std::string& path, const std::string& suffix,
                         const std::string& ext = {});

struct DegradeOptions {
    std::string input;
    std::string out_dir = ".";
    std::string kernel;
    std::string kernel_file;
    std::string color_kernel_file;
    std::string noise; // empty: the blur's default kind at density 0.1
    std::uint64_t seed = 1;
};

struct DegradeOutputs {
    std::string blurred;
    std::string degraded;
    std::string sidecar;
};

DegradeOutputs cmd_degrade(const DegradeOptions& opt);

struct RestoreOptions {
    std::string input;
    std::string out_dir = ".";
    std::string kernel;
    std::string kernel_file;
    std::string color_kernel_file;
    std::string config;
    std::vector<std::string> overrides; // key=value
};

struct RestoreOutputs {
    std::string restored;
    std::string trace;
    std::string sidecar;
    int iterations = 0;
    bool converged = false;
};

RestoreOutputs cmd_restore(const RestoreOptions& opt);

inline constexpr const char* kEvaluateHeader = "psnr,snr,isnr,reerr,ssim,fsim";

struct EvaluateOptions {
    std::string candidate;
    std::string reference;
    std::string degraded; // optional; ISNR is left blank without it
    std::string metrics = "all"; // "fast" skips FSIM
};

struct EvaluateResult {
    QualityReport report;
    bool has_isnr = false;
    std::string csv_row;
};

EvaluateResult cmd_evaluate(const EvaluateOptions& opt);

inline constexpr const char* kBenchHeader =
    "image,kernel,noise,density,psnr,snr,isnr,reerr,ssim,fsim,iters,ms";

struct BenchOptions {
    std::string suite;
    std::string out_dir = ".";
    std::string image_dir; // relative image paths resolve here; default: the suite's directory
    int jobs = 1;
    bool timing = true; // false writes ms = 0 so reruns are byte-identical
};

struct BenchSummary {
    std::vector<std::string> tables; // CSV paths
    int cells = 0;
    int failures = 0;
};

BenchSummary cmd_bench(const BenchOptions& opt);

/// Loads an image path or "synthetic:HxW[xC]".
PixelGrid load_bench_image(const std::string& spec, const std::string& base_dir, int* max_value = nullptr);

/// Parses the command line and maps exceptions to exit codes.
int run(int argc, char** argv);

} // namespace fracdeblur::cli
