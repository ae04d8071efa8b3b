// Command-line front end: transcribe | bench | wer | gen-model | features.
//
// Exit codes: 0 success, 1 runtime/inference failure, 2 usage or file errors.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgespeech/edgespeech.hpp"

namespace es = edgespeech;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string fmt4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%#.4g", v);
    return buf;
}

int env_threads() {
    const char* s = std::getenv("EDGESPEECH_THREADS");
    if (s == nullptr) return 1;
    const int v = std::atoi(s);
    return v >= 1 ? v : 1;
}

/// Usage-level check: every referenced input must exist before any work runs.
bool require_files(const std::vector<std::string>& paths) {
    for (const std::string& p : paths) {
        if (!p.empty() && !std::filesystem::exists(p)) {
            std::cerr << "error: file not found: " << p << "\n";
            return false;
        }
    }
    return true;
}

struct PipelineArgs {
    std::string model, alphabet, audio, trie;
    std::string strategy = "eager";
    std::string decode = "greedy";
    std::uint32_t beam_width = es::BeamConfig{}.beam_width;
    float alpha = es::BeamConfig{}.lm_weight;
    float beta = es::BeamConfig{}.word_bonus;

    void register_on(CLI::App* sub) {
        sub->add_option("--model", model, "acoustic model file (EDSM)")->required();
        sub->add_option("--alphabet", alphabet, "alphabet file, one character per line")
            ->required();
        sub->add_option("--audio", audio, "16-bit PCM WAV input")->required();
        sub->add_option("--trie", trie, "vocabulary trie file (EDST) for beam decoding");
        sub->add_option("--load-strategy", strategy, "eager | mapped")
            ->check(CLI::IsMember({"eager", "mapped"}));
        sub->add_option("--decode", decode, "greedy | beam")
            ->check(CLI::IsMember({"greedy", "beam"}));
        sub->add_option("--beam-width", beam_width, "beam width for --decode beam");
        sub->add_option("--alpha", alpha, "vocabulary score weight");
        sub->add_option("--beta", beta, "per-word bonus");
    }

    es::TranscribeOptions to_options() const {
        es::TranscribeOptions opts;
        opts.strategy = strategy == "mapped" ? es::LoadStrategy::Mapped : es::LoadStrategy::Eager;
        opts.decode = decode == "beam" ? es::DecodeMode::Beam : es::DecodeMode::Greedy;
        opts.beam = es::BeamConfig{beam_width, alpha, beta};
        opts.trie_path = trie;
        opts.threads = env_threads();
        return opts;
    }
};

int cmd_transcribe(const PipelineArgs& args, bool timings) {
    if (!require_files({args.model, args.alphabet, args.audio, args.trie})) return kExitUsage;
    const es::TranscribeResult res =
        es::transcribe_file(args.model, args.alphabet, args.audio, args.to_options());
    std::cout << res.transcript.text << "\n";
    if (timings) {
        std::cerr << "load_model_s: " << fmt4(res.load_model_s) << "\n";
        std::cerr << "inference_s: " << fmt4(res.inference_s) << "\n";
    }
    return kExitOk;
}

int cmd_bench(const PipelineArgs& args, std::uint32_t interval_ms, const std::string& csv_out) {
    if (!require_files({args.model, args.alphabet, args.audio, args.trie})) return kExitUsage;
    es::BenchReport report;
    std::string transcript;
    int rc = kExitOk;
    try {
        es::run_profiled(
            [&](es::BenchReport& r) {
                const es::TranscribeResult res =
                    es::transcribe_file(args.model, args.alphabet, args.audio, args.to_options());
                r.load_model_s = res.load_model_s;
                r.inference_s = res.inference_s;
                r.audio_duration_s = res.audio_duration_s;
                transcript = res.transcript.text;
            },
            interval_ms, report);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = kExitRuntime;
    }
    if (rc == kExitOk) std::cout << "Transcript: " << transcript << "\n";
    std::cout << es::emit_summary(report);
    if (!csv_out.empty()) es::emit_csv(report, csv_out);
    return rc;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

int cmd_wer(const std::string& ref_path, const std::string& hyp_path,
            const std::string& csv_out, bool chars) {
    if (!require_files({ref_path, hyp_path})) return kExitUsage;
    const std::vector<std::string> refs = read_lines(ref_path);
    const std::vector<std::string> hyps = read_lines(hyp_path);
    if (refs.size() != hyps.size()) {
        std::cerr << "error: line count mismatch: " << refs.size() << " reference vs "
                  << hyps.size() << " hypothesis lines\n";
        return kExitUsage;
    }

    const char* metric = chars ? "CER" : "WER";
    es::ErrorBreakdown total;
    std::string csv = std::string("line,") + (chars ? "cer" : "wer") +
                      ",substitutions,deletions,insertions,ref_len\n";
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const es::ErrorBreakdown e = chars ? es::char_error_rate(refs[i], hyps[i])
                                           : es::word_error_rate(refs[i], hyps[i]);
        std::printf("line %zu: %s %s  S=%zu D=%zu I=%zu ref_len=%zu\n", i + 1, metric,
                    fmt4(e.rate).c_str(), e.substitutions, e.deletions, e.insertions, e.ref_len);
        char row[160];
        std::snprintf(row, sizeof(row), "%zu,%.10g,%zu,%zu,%zu,%zu\n", i + 1, e.rate,
                      e.substitutions, e.deletions, e.insertions, e.ref_len);
        csv += row;
        total.substitutions += e.substitutions;
        total.deletions += e.deletions;
        total.insertions += e.insertions;
        total.ref_len += e.ref_len;
    }
    total.rate = static_cast<double>(total.distance()) / static_cast<double>(total.ref_len);
    std::printf("corpus: %s %s  S=%zu D=%zu I=%zu ref_len=%zu\n", metric,
                fmt4(total.rate).c_str(), total.substitutions, total.deletions, total.insertions,
                total.ref_len);
    char row[160];
    std::snprintf(row, sizeof(row), "corpus,%.10g,%zu,%zu,%zu,%zu\n", total.rate,
                  total.substitutions, total.deletions, total.insertions, total.ref_len);
    csv += row;
    if (!csv_out.empty()) {
        std::ofstream out(csv_out, std::ios::binary | std::ios::trunc);
        if (!out || !(out << csv).flush())
            throw std::runtime_error("cannot write " + csv_out);
    }
    return kExitOk;
}

int cmd_gen_model(std::uint64_t seed, std::uint32_t feat_dim, std::uint32_t hidden,
                  const std::string& alphabet_path, const std::string& out_path) {
    if (!require_files({alphabet_path})) return kExitUsage;
    const es::Alphabet ab = es::Alphabet::from_file(alphabet_path);
    const es::ModelDims dims{feat_dim, hidden,
                             static_cast<std::uint32_t>(ab.num_classes())};
    const es::ModelWeights w = es::gen_model(seed, dims);
    const std::uint64_t bytes = es::save_model(w, dims, out_path);
    std::cout << "wrote " << out_path << " (" << bytes << " bytes, D=" << dims.feat_dim
              << " H=" << dims.n_hidden << " K=" << dims.alphabet_size << ")\n";
    return kExitOk;
}

int cmd_features(const std::string& audio_path, const std::string& out_path, int n_mel,
                 bool with_context, bool with_normalize) {
    if (!require_files({audio_path})) return kExitUsage;
    es::FeatureConfig cfg;
    cfg.n_mel = n_mel;
    cfg.validate();
    const es::AudioBuffer audio =
        es::resample(es::load_wav(audio_path), es::kCanonicalSampleRate);
    es::FeatureMatrix feat = es::spectrogram(audio, cfg);
    if (with_context) feat = es::add_context(feat, cfg.n_context);
    if (with_normalize) feat = es::normalize(feat);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        out = &file;
    }
    *out << "t";
    for (std::size_t j = 0; j < feat.cols; ++j) *out << ",f" << j;
    *out << "\n";
    const double hop_s =
        cfg.hop_samples(es::kCanonicalSampleRate) / static_cast<double>(es::kCanonicalSampleRate);
    char buf[48];
    for (std::size_t i = 0; i < feat.rows; ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g", i * hop_s);
        *out << buf;
        for (std::size_t j = 0; j < feat.cols; ++j) {
            std::snprintf(buf, sizeof(buf), ",%.9g", static_cast<double>(feat.at(i, j)));
            *out << buf;
        }
        *out << "\n";
    }
    out->flush();
    if (!*out) throw std::runtime_error("feature output failed");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Speech-to-text inference engine with a resource-profiling harness"};
    app.require_subcommand(1);

    PipelineArgs tr_args;
    bool tr_timings = false;
    CLI::App* transcribe = app.add_subcommand("transcribe", "decode one WAV file to text");
    tr_args.register_on(transcribe);
    transcribe->add_flag("--timings", tr_timings, "print phase wall-times to stderr");

    PipelineArgs bench_args;
    std::uint32_t bench_interval = 100;
    std::string bench_csv;
    CLI::App* bench = app.add_subcommand("bench", "profile a transcription run");
    bench_args.register_on(bench);
    bench->add_option("--interval-ms", bench_interval, "sampling period (>= 10 ms)");
    bench->add_option("--out", bench_csv, "write the sample timeline as CSV");

    std::string wer_ref, wer_hyp, wer_csv;
    bool wer_chars = false;
    CLI::App* wer = app.add_subcommand("wer", "score hypothesis transcripts against references");
    wer->add_option("--ref", wer_ref, "reference transcripts, one per line")->required();
    wer->add_option("--hyp", wer_hyp, "hypothesis transcripts, line-aligned")->required();
    wer->add_option("--csv", wer_csv, "also write per-line breakdowns as CSV");
    wer->add_flag("--chars", wer_chars, "character error rate instead of word error rate");

    std::uint64_t gen_seed = 42;
    std::uint32_t gen_feat_dim = 494, gen_hidden = 2048;
    std::string gen_alphabet, gen_out;
    CLI::App* gen = app.add_subcommand("gen-model", "generate a deterministic synthetic model");
    gen->add_option("--seed", gen_seed, "PRNG seed");
    gen->add_option("--feat-dim", gen_feat_dim, "input feature dimension");
    gen->add_option("--hidden", gen_hidden, "hidden layer width");
    gen->add_option("--alphabet-file", gen_alphabet, "alphabet file defining the class count")
        ->required();
    gen->add_option("--out", gen_out, "output model path")->required();

    std::string feat_audio, feat_out;
    int feat_mel = es::FeatureConfig{}.n_mel;
    bool feat_context = false, feat_norm = false;
    CLI::App* features = app.add_subcommand("features", "dump audio features as CSV");
    features->add_option("--audio", feat_audio, "16-bit PCM WAV input")->required();
    features->add_option("--out", feat_out, "CSV path (default: standard output)");
    features->add_option("--mel", feat_mel, "mel filter count; 0 = raw log-power spectrogram");
    features->add_flag("--context", feat_context, "stack context frames");
    features->add_flag("--normalize", feat_norm, "normalize feature columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (transcribe->parsed()) return cmd_transcribe(tr_args, tr_timings);
        if (bench->parsed()) return cmd_bench(bench_args, bench_interval, bench_csv);
        if (wer->parsed()) return cmd_wer(wer_ref, wer_hyp, wer_csv, wer_chars);
        if (gen->parsed())
            return cmd_gen_model(gen_seed, gen_feat_dim, gen_hidden, gen_alphabet, gen_out);
        if (features->parsed())
            return cmd_features(feat_audio, feat_out, feat_mel, feat_context, feat_norm);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
