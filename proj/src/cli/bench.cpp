#include "commands.hpp"
#include "config_io.hpp"

#include "fracdeblur/errors.hpp"
#include "fracdeblur/image_io.hpp"
#include "fracdeblur/synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace fracdeblur::cli {

PixelGrid load_bench_image(const std::string& spec, const std::string& base_dir, int* max_value) {
    if (spec.rfind("synthetic:", 0) == 0) {
        int h = 0, w = 0, c = 1;
        const std::string dims = spec.substr(10);
        char x1 = 0, x2 = 0;
        std::istringstream in(dims);
        in >> h >> x1 >> w;
        if (!in.eof()) in >> x2 >> c;
        if (!in || x1 != 'x' || (x2 != 0 && x2 != 'x') || h < 1 || w < 1 || (c != 1 && c != 3) || !in.eof())
            throw UsageError("bad synthetic image spec '" + spec + "' (want synthetic:HxW or synthetic:HxWx3)");
        if (max_value) *max_value = 255;
        return make_synthetic_image(h, w, c);
    }
    fs::path p(spec);
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    Image img = read_image(p.string());
    if (max_value) *max_value = img.max_value;
    return std::move(img.pixels);
}

namespace {

// Grid-search axes: config key -> candidate values, iterated in key order.
using Grid = std::map<std::string, std::vector<double>>;

struct TableSpec {
    std::string name;
    std::vector<std::string> images;
    std::vector<std::string> kernels;
    std::vector<std::string> noise; // empty: each blur's default kind
    std::vector<double> densities{0.1, 0.2, 0.3, 0.4};
    Grid grid;
};

struct Cell {
    std::size_t table = 0;
    std::string image;
    std::string kernel;
    NoiseKind noise = NoiseKind::SaltPepper;
    double density = 0.0;
};

struct Task {
    std::size_t cell = 0;
    std::vector<std::string> overrides; // one grid point
};

struct Outcome {
    std::optional<QualityReport> report;
    int iters = 0;
    double ms = 0.0;
    std::string error;
    PixelGrid restored;
    int max_value = 255;
};

template <class T>
std::vector<T> get_list(const nlohmann::json& t, const char* key) {
    if (!t.contains(key)) return {};
    if (!t[key].is_array()) throw UsageError(std::string("suite field '") + key + "' must be an array");
    return t[key].get<std::vector<T>>();
}

std::vector<TableSpec> parse_tables(const nlohmann::json& suite) {
    if (!suite.contains("tables") || !suite["tables"].is_array() || suite["tables"].empty())
        throw UsageError("suite needs a non-empty 'tables' array");
    std::vector<TableSpec> out;
    for (const auto& t : suite["tables"]) {
        TableSpec spec;
        spec.name = t.value("name", "table" + std::to_string(out.size() + 1));
        if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos)
            throw UsageError("table name '" + spec.name + "' is not a valid file name");
        spec.images = get_list<std::string>(t, "images");
        spec.kernels = get_list<std::string>(t, "kernels");
        spec.noise = get_list<std::string>(t, "noise");
        if (t.contains("densities")) spec.densities = get_list<double>(t, "densities");
        if (spec.images.empty() || spec.kernels.empty() || spec.densities.empty())
            throw UsageError("table '" + spec.name + "' needs images, kernels and densities");
        for (double d : spec.densities)
            if (!(d >= 0.0 && d <= 1.0)) throw UsageError("densities must lie in [0,1]");
        if (t.contains("grid")) {
            for (const auto& [key, values] : t["grid"].items()) {
                SolverConfig probe;
                apply_override(probe, key + "=0"); // rejects unknown keys early
                spec.grid[key] = values.get<std::vector<double>>();
                if (spec.grid[key].empty()) throw UsageError("grid axis '" + key + "' is empty");
            }
        }
        out.push_back(std::move(spec));
    }
    return out;
}

std::vector<std::vector<std::string>> grid_points(const Grid& grid) {
    std::vector<std::vector<std::string>> points{{}};
    for (const auto& [key, values] : grid) {
        std::vector<std::vector<std::string>> next;
        for (const auto& p : points)
            for (double v : values) {
                auto q = p;
                q.push_back(key + "=" + format_number(v));
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    return points;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_';
    return out;
}

std::string image_label(const std::string& spec) {
    return spec.rfind("synthetic:", 0) == 0 ? spec : fs::path(spec).filename().string();
}

std::string cell_key(const Cell& c) {
    return sanitize(image_label(c.image)) + "__" + sanitize(c.kernel) + "__" + to_string(c.noise) + "__" +
           sanitize(format_number(c.density));
}

Outcome run_task(const Cell& cell, const Task& task, const nlohmann::json& base_config, std::uint64_t seed,
                 bool with_fsim, const std::string& image_dir) {
    Outcome out;
    try {
        SolverConfig cfg = config_from_json(base_config);
        for (const auto& o : task.overrides) apply_override(cfg, o);
        cfg.validate();

        const PixelGrid clean = load_bench_image(cell.image, image_dir, &out.max_value);
        const BlurModel blur = resolve_blur(cell.kernel);
        const PixelGrid blurred = blur.apply(clean);
        const PixelGrid degraded = add_impulse_noise(blurred, {cell.noise, cell.density, seed});
        const SpectralOperator A = blur.spectral(clean.height(), clean.width());

        const auto t0 = std::chrono::steady_clock::now();
        RestoreResult res = restore(degraded, A, cfg);
        out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.iters = int(res.trace.records.size());
        out.report = evaluate(res.image, clean, degraded, with_fsim);
        out.restored = std::move(res.image);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::string metric_row(const Cell& c, const Outcome& o, bool timing) {
    std::string row = csv_field(image_label(c.image)) + ',' + csv_field(c.kernel) + ',' + to_string(c.noise) +
                      ',' + format_number(c.density);
    if (!o.report) return row + ",,,,,,,,";
    const QualityReport& q = *o.report;
    row += ',' + format_number(q.psnr) + ',' + format_number(q.snr) + ',' + format_number(q.isnr) + ',' +
           format_number(q.reerr) + ',' + format_number(q.ssim) + ',' +
           (q.fsim ? format_number(*q.fsim) : std::string()) + ',' + std::to_string(o.iters) + ',' +
           format_number(timing ? o.ms : 0.0);
    return row;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("error writing " + path.string());
}

} // namespace

BenchSummary cmd_bench(const BenchOptions& opt) {
    std::ifstream in(opt.suite);
    if (!in) throw IoError("cannot open suite " + opt.suite);
    nlohmann::json suite;
    try {
        suite = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("suite " + opt.suite + " is not valid JSON: " + e.what());
    }
    if (suite.value("schema", 1) != 1) throw UsageError("unsupported suite schema");
    if (opt.jobs < 1) throw UsageError("--jobs must be positive");

    const std::string metrics = suite.value("metrics", "all");
    if (metrics != "all" && metrics != "fast") throw UsageError("suite 'metrics' must be 'all' or 'fast'");
    const std::uint64_t seed = suite.value("seed", std::uint64_t{1});
    const nlohmann::json base_config = suite.value("config", nlohmann::json::object());
    config_from_json(base_config).validate(); // fail fast on a bad suite config
    const std::string image_dir =
        !opt.image_dir.empty() ? opt.image_dir : fs::path(opt.suite).parent_path().string();
    const std::vector<TableSpec> tables = parse_tables(suite);

    std::vector<Cell> cells;
    std::vector<Task> tasks;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        const auto& spec = tables[t];
        const auto points = grid_points(spec.grid);
        for (const auto& image : spec.images)
            for (const auto& kernel : spec.kernels) {
                std::vector<NoiseKind> kinds;
                if (spec.noise.empty())
                    kinds.push_back(resolve_blur(kernel).default_noise());
                else
                    for (const auto& n : spec.noise) kinds.push_back(parse_noise_spec(n + ":0").kind);
                for (NoiseKind kind : kinds)
                    for (double d : spec.densities) {
                        cells.push_back({t, image, kernel, kind, d});
                        for (const auto& p : points) tasks.push_back({cells.size() - 1, p});
                    }
            }
    }

    // Workers pull task indices; every result lands in its own slot, so the
    // output order never depends on scheduling.
    std::vector<Outcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++)
            outcomes[i] = run_task(cells[tasks[i].cell], tasks[i], base_config, seed, metrics == "all", image_dir);
    };
    const int width = std::min<int>(opt.jobs, int(std::max<std::size_t>(tasks.size(), 1)));
    std::vector<std::thread> pool;
    for (int j = 1; j < width; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    // Best grid point per cell by SSIM (first wins ties).
    std::vector<std::optional<std::size_t>> best(cells.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        auto& b = best[tasks[i].cell];
        if (!b) {
            b = i;
            continue;
        }
        const auto& cur = outcomes[*b];
        const auto& cand = outcomes[i];
        if (cand.report && (!cur.report || cand.report->ssim > cur.report->ssim)) b = i;
    }

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create " + opt.out_dir + ": " + ec.message());

    BenchSummary summary;
    summary.cells = int(cells.size());
    std::string failures;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        const auto& spec = tables[t];
        const fs::path cell_dir = fs::path(opt.out_dir) / spec.name;
        fs::create_directories(cell_dir, ec);
        if (ec) throw IoError("cannot create " + cell_dir.string() + ": " + ec.message());

        std::string csv = std::string(kBenchHeader) + "\r\n";
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].table != t) continue;
            const Outcome& o = outcomes[*best[c]];
            csv += metric_row(cells[c], o, opt.timing) + "\r\n";
            if (o.report) {
                write_image((cell_dir / (cell_key(cells[c]) + "_restored.png")).string(), o.restored, o.max_value);
            } else {
                ++summary.failures;
                failures += spec.name + "," + cell_key(cells[c]) + ": " + o.error + "\n";
                std::cerr << "cell " << cell_key(cells[c]) << " failed: " << o.error << '\n';
            }
        }
        const fs::path csv_path = fs::path(opt.out_dir) / (spec.name + ".csv");
        write_file(csv_path, csv);
        summary.tables.push_back(csv_path.string());

        if (!spec.grid.empty()) {
            std::string g = "image,kernel,noise,density";
            for (const auto& [key, values] : spec.grid) g += ',' + key;
            g += ",psnr,ssim,iters\r\n";
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                const Cell& c = cells[tasks[i].cell];
                if (c.table != t) continue;
                g += csv_field(image_label(c.image)) + ',' + csv_field(c.kernel) + ',' + to_string(c.noise) + ',' +
                     format_number(c.density);
                for (const auto& o : tasks[i].overrides) g += ',' + o.substr(o.find('=') + 1);
                const Outcome& o = outcomes[i];
                g += o.report ? ',' + format_number(o.report->psnr) + ',' + format_number(o.report->ssim) + ',' +
                                    std::to_string(o.iters)
                              : std::string(",,,");
                g += "\r\n";
            }
            write_file(fs::path(opt.out_dir) / (spec.name + "_grid.csv"), g);
        }
    }
    const fs::path fail_path = fs::path(opt.out_dir) / "failures.txt";
    if (!failures.empty())
        write_file(fail_path, failures);
    else
        fs::remove(fail_path, ec);
    return summary;
}

} // namespace fracdeblur::cli
