// Command-line front end: encode, decode, sweep, bdrate, macs.
//
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 training failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "inrc/bitstream.hpp"
#include "inrc/common.hpp"
#include "inrc/image_io.hpp"
#include "inrc/metrics.hpp"
#include "inrc/rqat.hpp"
#include "inrc/siren.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> dims;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) dims.push_back(std::stoi(item));
    return dims;
}

std::string dims_label(const std::vector<int>& dims) {
    std::string s;
    for (size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw inrc::CodecError("cannot open: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw inrc::CodecError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw inrc::CodecError("write failed: " + path);
}

struct EncodeSettings {
    std::vector<int> dims = {2, 32, 32, 32, 32, 32, 3};
    double w0 = 30.0;
    int q = 8;
    std::vector<double> lambda_grid = inrc::kDefaultLambdaGrid;
    int iters_fp = 5000;
    int iters_qat = 2000;
    double lr = 2e-4;
    uint64_t seed = 0;
    std::string init = "fit";  // fit | random
};

struct EncodeOutcome {
    std::vector<uint8_t> stream;
    double bpp_total = 0, bpp_payload = 0;
    double psnr_fp = 0, psnr_quant = 0;
    double lambda = 0, rate_bits = 0, seconds = 0;
};

EncodeOutcome run_encode(const inrc::ImageBuffer& image, const EncodeSettings& s) {
    const auto t0 = std::chrono::steady_clock::now();

    inrc::SirenNetwork start;
    if (s.init == "random" || s.iters_fp == 0) {
        start = inrc::init_siren(s.dims, s.w0, s.seed);
    } else {
        inrc::FitConfig fit;
        fit.layer_dims = s.dims;
        fit.w0 = s.w0;
        fit.lr = s.lr;
        fit.iterations = s.iters_fp;
        fit.seed = s.seed;
        start = inrc::fit_full_precision(image, fit);
    }
    const inrc::CoordinateGrid grid = inrc::make_grid(image.width, image.height);
    const double psnr_fp = inrc::psnr_from_predictions(inrc::forward(start, grid), image);

    inrc::RqatConfig cfg;
    cfg.q = s.q;
    cfg.iterations = s.iters_qat;
    cfg.lr = s.lr;
    cfg.seed = s.seed;
    const inrc::LambdaSelection sel = inrc::select_lambda(image, start, s.lambda_grid, cfg);

    EncodeOutcome out;
    out.stream = inrc::serialize(sel.best.qnet, image.width, image.height);
    const inrc::StreamHeader header = inrc::read_header(out.stream);
    const inrc::EntropyPlan plan = inrc::entropy_plan(sel.best.qnet);
    out.bpp_total = inrc::bpp(out.stream.size(), image.width, image.height);
    out.bpp_payload = inrc::bpp(header.payload_byte_len, image.width, image.height);
    out.psnr_fp = psnr_fp;
    out.psnr_quant = sel.best.final_psnr_quantized;
    out.lambda = sel.best_lambda;
    out.rate_bits = inrc::rate(plan.model, plan.symbols);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

void print_encode_summary(const std::string& input, const EncodeOutcome& o) {
    std::printf(
        "encode input=%s bpp_total=%.6f bpp_payload=%.6f psnr_fp=%.10f psnr_quant=%.10f "
        "lambda=%g rate_bits=%.3f seconds=%.2f\n",
        input.c_str(), o.bpp_total, o.bpp_payload, o.psnr_fp, o.psnr_quant, o.lambda,
        o.rate_bits, o.seconds);
}

int cmd_encode(const std::string& input, const std::string& output, const EncodeSettings& s) {
    const inrc::ImageBuffer image = inrc::load_image(input);
    const EncodeOutcome out = run_encode(image, s);
    write_file(output, out.stream);
    print_encode_summary(input, out);
    return kExitOk;
}

int cmd_decode(const std::string& input, const std::string& output, double w0,
               const std::string& reference) {
    const std::vector<uint8_t> stream = read_file(input);
    const inrc::ImageBuffer image = inrc::decode_image(stream, w0);
    inrc::save_image(output, image);
    if (!reference.empty()) {
        const inrc::ImageBuffer ref = inrc::load_image(reference);
        std::printf("decode output=%s psnr=%.10f\n", output.c_str(), inrc::psnr(image, ref));
    } else {
        std::printf("decode output=%s width=%d height=%d\n", output.c_str(), image.width,
                    image.height);
    }
    return kExitOk;
}

// One sweep config = one (architecture, q, lambda grid, budgets) combination
// applied to every image; emits a CSV row per (image, config) plus one
// average row per config.
int cmd_sweep(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) throw inrc::CodecError("cannot open config: " + config_path);
    json cfg = json::parse(in);

    std::vector<std::string> images;
    if (cfg.contains("images"))
        for (const auto& p : cfg["images"]) images.push_back(p.get<std::string>());
    if (cfg.contains("image_dir")) {
        std::vector<std::string> listed;
        for (const auto& entry : std::filesystem::directory_iterator(cfg["image_dir"].get<std::string>()))
            if (entry.is_regular_file()) listed.push_back(entry.path().string());
        std::sort(listed.begin(), listed.end());
        images.insert(images.end(), listed.begin(), listed.end());
    }
    if (images.empty()) throw inrc::CodecError("sweep: no images configured");
    const std::string csv_path = cfg.value("output_csv", std::string("sweep.csv"));

    std::ofstream csv(csv_path);
    if (!csv) throw inrc::CodecError("cannot open for writing: " + csv_path);
    csv << "image,dims,q,lambda,bpp_total,bpp_payload,psnr_fp,psnr_quant,rate_bits_eq3,seconds\n";

    int failures = 0;
    bool training_failure = false;
    for (const auto& jc : cfg["configs"]) {
        EncodeSettings s;
        s.dims = jc["dims"].get<std::vector<int>>();
        s.q = jc.value("q", 8);
        if (jc.contains("lambda_grid")) s.lambda_grid = jc["lambda_grid"].get<std::vector<double>>();
        s.iters_fp = jc.value("iters_fp", 5000);
        s.iters_qat = jc.value("iters_qat", 2000);
        s.lr = jc.value("lr", 2e-4);
        s.w0 = jc.value("w0", 30.0);
        s.seed = jc.value("seed", 0);
        s.init = jc.value("init", std::string("fit"));
        const std::string label = dims_label(s.dims);

        int n_ok = 0;
        double acc[7] = {0};
        for (const std::string& path : images) {
            try {
                const inrc::ImageBuffer image = inrc::load_image(path);
                const EncodeOutcome o = run_encode(image, s);
                char line[512];
                std::snprintf(line, sizeof(line), "%s,%s,%d,%g,%.6f,%.6f,%.6f,%.6f,%.3f,%.2f\n",
                              path.c_str(), label.c_str(), s.q, o.lambda, o.bpp_total,
                              o.bpp_payload, o.psnr_fp, o.psnr_quant, o.rate_bits, o.seconds);
                csv << line;
                csv.flush();
                ++n_ok;
                const double vals[7] = {o.lambda, o.bpp_total, o.bpp_payload,
                                        o.psnr_fp, o.psnr_quant, o.rate_bits, o.seconds};
                for (int i = 0; i < 7; ++i) acc[i] += vals[i];
            } catch (const inrc::TrainingError& e) {
                std::fprintf(stderr, "sweep: %s [%s]: %s\n", path.c_str(), label.c_str(), e.what());
                ++failures;
                training_failure = true;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "sweep: %s [%s]: %s\n", path.c_str(), label.c_str(), e.what());
                ++failures;
            }
        }
        if (n_ok > 0) {
            for (double& v : acc) v /= n_ok;
            char line[512];
            std::snprintf(line, sizeof(line), "average,%s,%d,%g,%.6f,%.6f,%.6f,%.6f,%.3f,%.2f\n",
                          label.c_str(), s.q, acc[0], acc[1], acc[2], acc[3], acc[4], acc[5],
                          acc[6]);
            csv << line;
        }
    }
    std::printf("sweep csv=%s failures=%d\n", csv_path.c_str(), failures);
    if (failures > 0) return training_failure ? kExitTraining : kExitData;
    return kExitOk;
}

std::vector<inrc::RDPoint> load_rd_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw inrc::CodecError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw inrc::CorruptDataError("csv: empty file: " + path);
    auto split = [](const std::string& text) {
        std::vector<std::string> cells;
        std::stringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    const std::vector<std::string> header = split(line);
    auto col = [&header](std::initializer_list<const char*> names) {
        for (const char* n : names)
            for (size_t i = 0; i < header.size(); ++i)
                if (header[i] == n) return static_cast<int>(i);
        return -1;
    };
    const int c_bpp = col({"bpp_total", "bpp"});
    const int c_psnr = col({"psnr_quant", "psnr"});
    const int c_image = col({"image"});
    if (c_bpp < 0 || c_psnr < 0)
        throw inrc::CorruptDataError("csv: need bpp/psnr columns: " + path);

    std::vector<inrc::RDPoint> all, averaged;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (static_cast<int>(cells.size()) <= std::max(c_bpp, c_psnr)) continue;
        inrc::RDPoint p;
        p.bpp = std::stod(cells[c_bpp]);
        p.psnr = std::stod(cells[c_psnr]);
        all.push_back(p);
        if (c_image >= 0 && cells[c_image] == "average") averaged.push_back(p);
    }
    return averaged.empty() ? all : averaged;
}

int cmd_bdrate(const std::string& anchor_csv, const std::string& test_csv) {
    const double percent = inrc::bd_rate(load_rd_csv(anchor_csv), load_rd_csv(test_csv));
    std::printf("bdrate percent=%.6f\n", percent);
    return kExitOk;
}

int cmd_macs(const std::vector<int>& dims) {
    std::printf("macs dims=%s kmac_per_pixel=%.6f\n", dims_label(dims).c_str(),
                inrc::mac_per_pixel(dims));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overfitted sine-network image codec"};
    app.require_subcommand(1);

    std::string input, output, reference, dims_text = "2,32,32,32,32,32,3", lambda_text;
    EncodeSettings enc;
    double w0 = 30.0;

    CLI::App* c_encode = app.add_subcommand("encode", "compress an image into a stream");
    c_encode->add_option("input", input, "PNG or binary PPM image")->required();
    c_encode->add_option("output", output, "output stream path")->required();
    c_encode->add_option("--dims", dims_text, "comma-separated layer sizes (2,...,3)");
    c_encode->add_option("--w0", enc.w0, "sine frequency scale");
    c_encode->add_option("--q", enc.q, "quantization bit depth")->check(CLI::IsMember({8, 10}));
    c_encode->add_option("--lambda-grid", lambda_text, "comma-separated regularizer weights");
    c_encode->add_option("--iters-fp", enc.iters_fp, "full-precision fit steps (0 skips the fit)");
    c_encode->add_option("--iters-qat", enc.iters_qat, "quantization-aware steps per lambda");
    c_encode->add_option("--lr", enc.lr, "Adam learning rate");
    c_encode->add_option("--seed", enc.seed, "RNG seed");
    c_encode->add_option("--init", enc.init, "fit | random")
        ->check(CLI::IsMember({"fit", "random"}));

    CLI::App* c_decode = app.add_subcommand("decode", "reconstruct an image from a stream");
    c_decode->add_option("input", input, "stream path")->required();
    c_decode->add_option("output", output, "output image (.png or .ppm)")->required();
    c_decode->add_option("--w0", w0, "sine frequency scale used by the encoder");
    c_decode->add_option("--reference", reference, "original image; prints PSNR against it");

    CLI::App* c_sweep = app.add_subcommand("sweep", "encode an image set over configs, emit CSV");
    c_sweep->add_option("config", input, "JSON sweep configuration")->required();

    CLI::App* c_bdrate = app.add_subcommand("bdrate", "delta-rate between two RD CSV curves");
    c_bdrate->add_option("anchor", input, "anchor CSV")->required();
    c_bdrate->add_option("test", output, "test CSV")->required();

    CLI::App* c_macs = app.add_subcommand("macs", "multiply-adds per pixel for an architecture");
    c_macs->add_option("--dims", dims_text, "comma-separated layer sizes")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_encode->parsed()) {
            enc.dims = parse_dims(dims_text);
            if (!lambda_text.empty()) {
                enc.lambda_grid.clear();
                std::stringstream ss(lambda_text);
                std::string item;
                while (std::getline(ss, item, ',')) enc.lambda_grid.push_back(std::stod(item));
            }
            return cmd_encode(input, output, enc);
        }
        if (c_decode->parsed()) return cmd_decode(input, output, w0, reference);
        if (c_sweep->parsed()) return cmd_sweep(input);
        if (c_bdrate->parsed()) return cmd_bdrate(input, output);
        if (c_macs->parsed()) return cmd_macs(parse_dims(dims_text));
    } catch (const inrc::TrainingError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTraining;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
