#include "commands.hpp"

#include "config_io.hpp"

#include "fracdeblur/errors.hpp"
#include "fracdeblur/image_io.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace fracdeblur::cli {

// --- blur sources ------------------------------------------------------------

namespace {

nlohmann::json kernel_json(const Kernel& k) {
    return {{"rows", k.rows}, {"cols", k.cols}, {"weights", k.weights}};
}

std::string strip_preset_prefix(const std::string& s) {
    return s.rfind("preset:", 0) == 0 ? s.substr(7) : s;
}

} // namespace

nlohmann::json BlurModel::describe() const {
    nlohmann::json j = {{"source", label}, {"color", color}};
    if (!color) {
        j["kernel"] = kernel_json(kernel);
        return j;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : color_spec.entries) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& e : row) r.push_back({{"weight", e.weight}, {"kernel", kernel_json(e.kernel)}});
        rows.push_back(r);
    }
    j["matrix"] = rows;
    return j;
}

void BlurModel::check_fits(const PixelGrid& u) const {
    auto fits = [&](const Kernel& k) { return k.rows <= u.height() && k.cols <= u.width(); };
    if (color) {
        if (u.channels() != 3)
            throw UsageError("cross-channel blur '" + label + "' needs a three-channel image");
        for (const auto& row : color_spec.entries)
            for (const auto& e : row)
                if (!fits(e.kernel))
                    throw UsageError("blur '" + label + "' has a " + std::to_string(e.kernel.rows) + "x" +
                                     std::to_string(e.kernel.cols) + " kernel, larger than the " +
                                     std::to_string(u.height()) + "x" + std::to_string(u.width()) +
                                     " image");
    } else if (!fits(kernel)) {
        throw UsageError("kernel '" + label + "' is larger than the " + std::to_string(u.height()) + "x" +
                         std::to_string(u.width()) + " image");
    }
}

PixelGrid BlurModel::apply(const PixelGrid& u) const {
    check_fits(u);
    if (color) return blur_color(u, color_spec);
    if (u.channels() == 1) return blur_gray(u, kernel);
    PixelGrid out(u.height(), u.width(), u.channels());
    for (int ch = 0; ch < u.channels(); ++ch) out.set_channel(ch, blur_gray(u.extract_channel(ch), kernel));
    return out;
}

SpectralOperator BlurModel::spectral(int height, int width) const {
    return color ? SpectralOperator::from_color(color_spec, height, width)
                 : SpectralOperator::from_kernel(kernel, height, width);
}

NoiseKind BlurModel::default_noise() const {
    const std::string name = strip_preset_prefix(label);
    return name == "peppers" || name == "peppers-small" ? NoiseKind::RandomValued : NoiseKind::SaltPepper;
}

BlurModel resolve_blur(const std::string& kernel, const std::string& kernel_file,
                       const std::string& color_kernel_file) {
    const int given = !kernel.empty() + !kernel_file.empty() + !color_kernel_file.empty();
    if (given > 1) throw UsageError("give at most one of --kernel, --kernel-file, --color-kernel-file");
    BlurModel m;
    if (!kernel_file.empty()) {
        m.label = "file:" + kernel_file;
        m.kernel = read_kernel_file(kernel_file);
    } else if (!color_kernel_file.empty()) {
        m.label = "color-file:" + color_kernel_file;
        m.color = true;
        m.color_spec = read_color_blur_file(color_kernel_file);
    } else if (kernel.empty()) {
        m.label = "identity";
        m.kernel = identity_kernel();
    } else if (is_color_preset(strip_preset_prefix(kernel))) {
        m.label = "preset:" + strip_preset_prefix(kernel);
        m.color = true;
        m.color_spec = color_preset(strip_preset_prefix(kernel));
    } else {
        m.label = kernel;
        m.kernel = parse_kernel_spec(kernel);
    }
    return m;
}

// --- hashing, CSV, paths -------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("SHA-256 computation failed");
    std::string hex;
    static constexpr char kDigits[] = "0123456789abcdef";
    for (unsigned i = 0; i < len; ++i) {
        hex += kDigits[digest[i] >> 4];
        hex += kDigits[digest[i] & 0xf];
    }
    return hex;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string derived_path(const std::string& dir, const std::string& path, const std::string& suffix,
                         const std::string& ext) {
    const fs::path p(path);
    const std::string e = ext.empty() ? p.extension().string() : ext;
    return (fs::path(dir) / (p.stem().string() + suffix + e)).string();
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("error writing " + path);
}

nlohmann::json file_record(const std::string& path) {
    return {{"path", path}, {"sha256", sha256_file(path)}};
}

} // namespace

// --- degrade ------------------------------------------------------------------

DegradeOutputs cmd_degrade(const DegradeOptions& opt) {
    const Image img = read_image(opt.input);
    const BlurModel blur = resolve_blur(opt.kernel, opt.kernel_file, opt.color_kernel_file);

    NoiseSpec noise;
    if (opt.noise.empty()) {
        noise.kind = blur.default_noise();
        noise.density = 0.1;
    } else {
        noise = parse_noise_spec(opt.noise);
    }
    noise.seed = opt.seed;

    const PixelGrid blurred = blur.apply(img.pixels);
    const PixelGrid degraded = add_impulse_noise(blurred, noise);

    ensure_dir(opt.out_dir);
    DegradeOutputs out;
    out.blurred = derived_path(opt.out_dir, opt.input, "_blurred");
    out.degraded = derived_path(opt.out_dir, opt.input, "_degraded");
    out.sidecar = derived_path(opt.out_dir, opt.input, "_degrade", ".json");
    write_image(out.blurred, blurred, img.max_value);
    write_image(out.degraded, degraded, img.max_value);

    const nlohmann::json side = {
        {"schema", 1},
        {"command", "degrade"},
        {"input", file_record(opt.input)},
        {"blur", blur.describe()},
        {"noise", {{"kind", to_string(noise.kind)}, {"density", noise.density}, {"seed", noise.seed}}},
        {"outputs", {{"blurred", file_record(out.blurred)}, {"degraded", file_record(out.degraded)}}},
    };
    write_text(out.sidecar, side.dump(2) + "\n");
    return out;
}

// --- restore ------------------------------------------------------------------

RestoreOutputs cmd_restore(const RestoreOptions& opt) {
    const SolverConfig cfg = load_config(opt.config, opt.overrides);
    const Image img = read_image(opt.input);
    const BlurModel blur = resolve_blur(opt.kernel, opt.kernel_file, opt.color_kernel_file);
    blur.check_fits(img.pixels);
    const SpectralOperator A = blur.spectral(img.pixels.height(), img.pixels.width());

    const RestoreResult result = restore(img.pixels, A, cfg);

    ensure_dir(opt.out_dir);
    RestoreOutputs out;
    out.restored = derived_path(opt.out_dir, opt.input, "_restored");
    out.trace = derived_path(opt.out_dir, opt.input, "_trace", ".csv");
    out.sidecar = derived_path(opt.out_dir, opt.input, "_restore", ".json");
    out.iterations = int(result.trace.records.size());
    out.converged = result.trace.converged;
    write_image(out.restored, result.image, img.max_value);

    std::string csv = "iteration,objective,rel_change,res_blur,res_frame,res_identity,ms\n";
    for (const auto& r : result.trace.records)
        csv += std::to_string(r.iteration) + ',' + format_number(r.objective) + ',' +
               format_number(r.rel_change) + ',' + format_number(r.residual_blur) + ',' +
               format_number(r.residual_frame) + ',' + format_number(r.residual_identity) + ',' +
               format_number(r.ms) + '\n';
    write_text(out.trace, csv);

    const nlohmann::json side = {
        {"schema", 1},
        {"command", "restore"},
        {"input", file_record(opt.input)},
        {"blur", blur.describe()},
        {"config", config_to_json(cfg)},
        {"iterations", out.iterations},
        {"converged", out.converged},
        {"grad_norm", result.trace.grad_norm},
        {"stability_product", result.trace.stability_product},
        {"warnings", result.trace.warnings},
        {"outputs", {{"restored", file_record(out.restored)}, {"trace", file_record(out.trace)}}},
    };
    write_text(out.sidecar, side.dump(2) + "\n");
    return out;
}

// --- evaluate -----------------------------------------------------------------

EvaluateResult cmd_evaluate(const EvaluateOptions& opt) {
    if (opt.metrics != "all" && opt.metrics != "fast")
        throw UsageError("--metrics must be 'all' or 'fast'");
    const PixelGrid cand = read_image(opt.candidate).pixels;
    const PixelGrid ref = read_image(opt.reference).pixels;
    if (!cand.same_shape(ref)) throw UsageError("candidate and reference differ in shape");

    EvaluateResult res;
    res.has_isnr = !opt.degraded.empty();
    const PixelGrid deg = res.has_isnr ? read_image(opt.degraded).pixels : cand;
    if (!deg.same_shape(ref)) throw UsageError("degraded and reference differ in shape");
    res.report = evaluate(cand, ref, deg, opt.metrics == "all");

    const QualityReport& q = res.report;
    res.csv_row = format_number(q.psnr) + ',' + format_number(q.snr) + ',' +
                  (res.has_isnr ? format_number(q.isnr) : std::string()) + ',' + format_number(q.reerr) +
                  ',' + format_number(q.ssim) + ',' + (q.fsim ? format_number(*q.fsim) : std::string());
    return res;
}

// --- command line -------------------------------------------------------------

int run(int argc, char** argv) {
    CLI::App app{"Restoration of blurred images corrupted by impulse noise"};
    app.require_subcommand(1);

    DegradeOptions dopt;
    auto* degrade = app.add_subcommand("degrade", "Blur an image and add impulse noise");
    degrade->add_option("input", dopt.input, "Clean image")->required();
    degrade->add_option("--kernel", dopt.kernel, "gaussian:H,S | average:R,C | motion:L,T | identity | preset name");
    degrade->add_option("--kernel-file", dopt.kernel_file, "Kernel text file");
    degrade->add_option("--color-kernel-file", dopt.color_kernel_file, "3x3 cross-channel blur file");
    degrade->add_option("--noise", dopt.noise, "sp:DENSITY or rv:DENSITY");
    degrade->add_option("--seed", dopt.seed, "Noise seed");
    degrade->add_option("--out-dir", dopt.out_dir, "Output directory");

    RestoreOptions ropt;
    auto* restore_cmd = app.add_subcommand("restore", "Restore a degraded image");
    restore_cmd->add_option("input", ropt.input, "Degraded image")->required();
    restore_cmd->add_option("--kernel", ropt.kernel, "Blur used for the degradation");
    restore_cmd->add_option("--kernel-file", ropt.kernel_file, "Kernel text file");
    restore_cmd->add_option("--color-kernel-file", ropt.color_kernel_file, "3x3 cross-channel blur file");
    restore_cmd->add_option("--config", ropt.config, "Solver config JSON");
    restore_cmd->add_option("--set", ropt.overrides, "Config override key=value (repeatable)");
    restore_cmd->add_option("--out-dir", ropt.out_dir, "Output directory");

    EvaluateOptions eopt;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("evaluate", "Print quality metrics as CSV");
    eval_cmd->add_option("candidate", eopt.candidate, "Restored image")->required();
    eval_cmd->add_option("reference", eopt.reference, "Clean image")->required();
    eval_cmd->add_option("--degraded", eopt.degraded, "Degraded observation (enables ISNR)");
    eval_cmd->add_option("--metrics", eopt.metrics, "all | fast");
    eval_cmd->add_option("--out", eval_out, "Also write the CSV here");

    BenchOptions bopt;
    bool no_timing = false;
    auto* bench = app.add_subcommand("bench", "Run a degrade/restore/evaluate suite");
    bench->add_option("suite", bopt.suite, "Suite JSON")->required();
    bench->add_option("--out-dir", bopt.out_dir, "Output directory");
    bench->add_option("--image-dir", bopt.image_dir, "Directory for relative image paths");
    bench->add_option("--jobs", bopt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    bench->add_flag("--no-timing", no_timing, "Write ms = 0 for byte-identical reruns");

    std::string synth_spec, synth_out;
    auto* synth = app.add_subcommand("synth", "Write the built-in synthetic test scene");
    synth->add_option("size", synth_spec, "HxW or HxWx3")->required();
    synth->add_option("output", synth_out, "Output image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*degrade) {
            const auto out = cmd_degrade(dopt);
            std::cout << out.blurred << '\n' << out.degraded << '\n' << out.sidecar << '\n';
        } else if (*restore_cmd) {
            const auto out = cmd_restore(ropt);
            std::cout << out.restored << '\n' << out.trace << '\n' << out.sidecar << '\n';
            if (!out.converged)
                std::cerr << "warning: stopped at max_iter after " << out.iterations << " iterations\n";
        } else if (*eval_cmd) {
            const auto res = cmd_evaluate(eopt);
            const std::string text = std::string(kEvaluateHeader) + "\n" + res.csv_row + "\n";
            std::cout << text;
            if (!eval_out.empty()) write_text(eval_out, text);
        } else if (*synth) {
            write_image(synth_out, load_bench_image("synthetic:" + synth_spec, {}));
            std::cout << synth_out << '\n';
        } else if (*bench) {
            bopt.timing = !no_timing;
            const auto summary = cmd_bench(bopt);
            for (const auto& t : summary.tables) std::cout << t << '\n';
            if (summary.failures > 0)
                std::cerr << summary.failures << " of " << summary.cells << " cells failed\n";
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what();
        if (e.iteration() >= 0) std::cerr << " (iteration " << e.iteration() << ")";
        std::cerr << '\n';
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

} // namespace fracdeblur::cli
