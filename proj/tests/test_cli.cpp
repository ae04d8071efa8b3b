// End-to-end tests of the command-line binary. The build defines
// EDGESPEECH_CLI_PATH as the absolute path of the compiled executable.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "edgespeech/alphabet.hpp"
#include "edgespeech/audio.hpp"
#include "edgespeech/storage.hpp"
#include "edgespeech/trie.hpp"
#include "test_helpers.hpp"

#ifndef EDGESPEECH_CLI_PATH
#error "EDGESPEECH_CLI_PATH must point at the compiled CLI binary"
#endif

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out, err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Run the CLI through the shell, capturing exit code, stdout, and stderr.
CliResult run_cli(const ref::TempDir& dir, const std::string& args) {
    static std::atomic<int> serial{0};
    const int id = serial++;
    const std::string out_path = dir.file("stdout." + std::to_string(id));
    const std::string err_path = dir.file("stderr." + std::to_string(id));
    const std::string cmd = std::string(EDGESPEECH_CLI_PATH) + " " + args + " > \"" + out_path +
                            "\" 2> \"" + err_path + "\"";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

/// Shared fixture: a tiny model generated through the CLI itself, a matching
/// alphabet, a tone and a silence WAV.
class CliSuite : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        dir_ = new ref::TempDir;
        write_text(alphabet_path(), "a\nb\n \n");

        edgespeech::AudioBuffer tone;
        tone.samples = ref::sine_wave(440.0, 16000, 2.0);
        tone.sample_rate = 16000;
        edgespeech::save_wav(tone_path(), tone);

        edgespeech::AudioBuffer silence;
        silence.samples.assign(8000, 0.0f);
        silence.sample_rate = 16000;
        edgespeech::save_wav(silence_path(), silence);

        // Feature dimension must match the default feature pipeline (26 mel
        // bands with +/-9 context frames = 494) since transcribe/bench take
        // no feature flags.
        const CliResult gen = run_cli(
            *dir_, "gen-model --seed 42 --feat-dim 494 --hidden 16 --alphabet-file \"" +
                       alphabet_path() + "\" --out \"" + model_path() + "\"");
        ASSERT_EQ(gen.exit_code, 0) << gen.err;
        ASSERT_NE(gen.out.find("wrote "), std::string::npos);
        ASSERT_NE(gen.out.find("D=494 H=16 K=4)"), std::string::npos) << gen.out;
    }

    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }

    static std::string alphabet_path() { return dir_->file("alphabet.txt"); }
    static std::string model_path() { return dir_->file("tiny.edsm"); }
    static std::string tone_path() { return dir_->file("tone.wav"); }
    static std::string silence_path() { return dir_->file("silence.wav"); }
    static std::string pipeline_args() {
        return "--model \"" + model_path() + "\" --alphabet \"" + alphabet_path() +
               "\" --audio \"" + tone_path() + "\"";
    }

    static ref::TempDir* dir_;
};

ref::TempDir* CliSuite::dir_ = nullptr;

}  // namespace

TEST_F(CliSuite, HelpExitsZero) {
    const CliResult r = run_cli(*dir_, "--help");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("transcribe"), std::string::npos);
    EXPECT_NE(r.out.find("bench"), std::string::npos);
}

TEST_F(CliSuite, UnknownFlagExitsUsage) {
    const CliResult r = run_cli(*dir_, "transcribe --bogus");
    EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliSuite, MissingSubcommandExitsUsage) {
    const CliResult r = run_cli(*dir_, "");
    EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliSuite, GenModelIsByteDeterministic) {
    const std::string a = dir_->file("gen_a.edsm");
    const std::string b = dir_->file("gen_b.edsm");
    const std::string base = " --feat-dim 12 --hidden 16 --alphabet-file \"" + alphabet_path() +
                             "\" --out \"";
    ASSERT_EQ(run_cli(*dir_, "gen-model --seed 7" + base + a + "\"").exit_code, 0);
    ASSERT_EQ(run_cli(*dir_, "gen-model --seed 7" + base + b + "\"").exit_code, 0);
    EXPECT_EQ(edgespeech::read_file_bytes(a), edgespeech::read_file_bytes(b));

    const std::string c = dir_->file("gen_c.edsm");
    ASSERT_EQ(run_cli(*dir_, "gen-model --seed 8" + base + c + "\"").exit_code, 0);
    EXPECT_NE(edgespeech::read_file_bytes(a), edgespeech::read_file_bytes(c));
}

TEST_F(CliSuite, GenModelMissingAlphabetExitsUsage) {
    const CliResult r = run_cli(*dir_, "gen-model --alphabet-file /nonexistent/ab.txt --out \"" +
                                           dir_->file("x.edsm") + "\"");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("file not found: /nonexistent/ab.txt"), std::string::npos);
}

TEST_F(CliSuite, TranscribeIsLoadStrategyInvariant) {
    const CliResult eager =
        run_cli(*dir_, "transcribe " + pipeline_args() + " --load-strategy eager");
    const CliResult mapped =
        run_cli(*dir_, "transcribe " + pipeline_args() + " --load-strategy mapped");
    ASSERT_EQ(eager.exit_code, 0) << eager.err;
    ASSERT_EQ(mapped.exit_code, 0) << mapped.err;
    EXPECT_EQ(eager.out, mapped.out);
    EXPECT_FALSE(eager.out.empty());
    EXPECT_EQ(eager.out.back(), '\n');
}

TEST_F(CliSuite, TranscribeTimingsGoToStderr) {
    const CliResult r = run_cli(*dir_, "transcribe " + pipeline_args() + " --timings");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.err.find("load_model_s: "), std::string::npos);
    EXPECT_NE(r.err.find("inference_s: "), std::string::npos);
    EXPECT_EQ(r.out.find("load_model_s"), std::string::npos);
}

TEST_F(CliSuite, TranscribeBeamWithTrieRuns) {
    const std::string words = dir_->file("words.txt");
    write_text(words, "ab\na\n");
    // Build the trie through the library (the CLI consumes, never builds it).
    const edgespeech::Alphabet ab("ab ");
    edgespeech::save_trie(edgespeech::build_trie({"ab", "a"}, ab), dir_->file("vocab.trie"));

    const CliResult r = run_cli(*dir_, "transcribe " + pipeline_args() +
                                           " --decode beam --beam-width 8 --trie \"" +
                                           dir_->file("vocab.trie") + "\"");
    EXPECT_EQ(r.exit_code, 0) << r.err;
}

TEST_F(CliSuite, TranscribeMissingModelExitsUsageNamingPath) {
    const CliResult r = run_cli(
        *dir_, "transcribe --model /nonexistent/m.edsm --alphabet \"" + alphabet_path() +
                   "\" --audio \"" + tone_path() + "\"");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("error: file not found: /nonexistent/m.edsm"), std::string::npos);
}

TEST_F(CliSuite, TranscribeCorruptModelExitsRuntime) {
    auto bytes = edgespeech::read_file_bytes(model_path());
    bytes[0] = static_cast<std::byte>('X');
    const std::string bad = dir_->file("bad.edsm");
    std::ofstream f(bad, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    f.close();

    const CliResult r = run_cli(*dir_, "transcribe --model \"" + bad + "\" --alphabet \"" +
                                           alphabet_path() + "\" --audio \"" + tone_path() +
                                           "\"");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("bad magic"), std::string::npos);
}

TEST_F(CliSuite, WerScoresTranscriptPair) {
    write_text(dir_->file("refs.txt"), "i wish you would not\n");
    write_text(dir_->file("hyps.txt"), "i wish you live\n");
    const std::string csv = dir_->file("wer.csv");
    const CliResult r = run_cli(*dir_, "wer --ref \"" + dir_->file("refs.txt") + "\" --hyp \"" +
                                           dir_->file("hyps.txt") + "\" --csv \"" + csv + "\"");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("line 1: WER 0.4000  S=1 D=1 I=0 ref_len=5"), std::string::npos)
        << r.out;
    EXPECT_NE(r.out.find("corpus: WER 0.4000"), std::string::npos);

    const auto lines = split_lines(slurp(csv));
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "line,wer,substitutions,deletions,insertions,ref_len");
    EXPECT_EQ(lines[1], "1,0.4,1,1,0,5");
    EXPECT_EQ(lines[2], "corpus,0.4,1,1,0,5");
}

TEST_F(CliSuite, WerCharacterMode) {
    write_text(dir_->file("cref.txt"), "abc\n");
    write_text(dir_->file("chyp.txt"), "axc\n");
    const CliResult r = run_cli(*dir_, "wer --chars --ref \"" + dir_->file("cref.txt") +
                                           "\" --hyp \"" + dir_->file("chyp.txt") + "\"");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("line 1: CER 0.3333  S=1 D=0 I=0 ref_len=3"), std::string::npos)
        << r.out;
}

TEST_F(CliSuite, WerLineCountMismatchExitsUsage) {
    write_text(dir_->file("r2.txt"), "one\ntwo\n");
    write_text(dir_->file("h1.txt"), "one\n");
    const CliResult r = run_cli(
        *dir_, "wer --ref \"" + dir_->file("r2.txt") + "\" --hyp \"" + dir_->file("h1.txt") +
                   "\"");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("line count mismatch"), std::string::npos);
}

TEST_F(CliSuite, FeaturesOfSilenceAreTheLogFloor) {
    const CliResult r = run_cli(*dir_, "features --audio \"" + silence_path() + "\" --mel 26");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto lines = split_lines(r.out);
    // Header plus 1 + (8000 - 400) / 160 = 48 frames of half a second.
    ASSERT_EQ(lines.size(), 49u);
    EXPECT_EQ(lines[0].substr(0, 8), "t,f0,f1,");

    for (const std::size_t row : {std::size_t{1}, std::size_t{48}}) {
        std::istringstream in(lines[row]);
        std::string cell;
        ASSERT_TRUE(std::getline(in, cell, ','));
        EXPECT_NEAR(std::stod(cell), 0.01 * static_cast<double>(row - 1), 1e-9);
        int cells = 0;
        while (std::getline(in, cell, ',')) {
            EXPECT_NEAR(std::stod(cell), std::log(1e-10), 1e-4) << "row " << row;
            ++cells;
        }
        EXPECT_EQ(cells, 26);
    }
}

TEST_F(CliSuite, FeaturesRawSpectrogramWidth) {
    const CliResult r = run_cli(*dir_, "features --audio \"" + silence_path() + "\" --mel 0");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto lines = split_lines(r.out);
    ASSERT_GE(lines.size(), 2u);
    // t column + fft_size/2 + 1 = 257 feature columns.
    const auto commas = static_cast<std::size_t>(
        std::count(lines[0].begin(), lines[0].end(), ','));
    EXPECT_EQ(commas, 257u);
}

TEST_F(CliSuite, BenchEmitsSummaryAndTimeline) {
    const std::string csv = dir_->file("timeline.csv");
    const CliResult r = run_cli(
        *dir_, "bench " + pipeline_args() + " --interval-ms 50 --out \"" + csv + "\"");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("Transcript: "), std::string::npos);
    EXPECT_NE(r.out.find("CPU Usage ( % ): "), std::string::npos);
    EXPECT_NE(r.out.find("Memory Usage ( MB ): "), std::string::npos);
    EXPECT_NE(r.out.find("Processing Time ( s ): "), std::string::npos);
    EXPECT_NE(r.out.find("Loading Model ( s ): "), std::string::npos);
    EXPECT_NE(r.out.find("Inference Time ( s ): "), std::string::npos);
    EXPECT_NE(r.out.find("Real-Time Factor: "), std::string::npos);

    const auto lines = split_lines(slurp(csv));
    ASSERT_GE(lines.size(), 2u);  // header + the t = 0 baseline at minimum
    EXPECT_EQ(lines[0], "t_ms,cpu_pct,rss_bytes");
}

TEST_F(CliSuite, BenchIntervalBelowMinimumExitsRuntime) {
    const CliResult r = run_cli(*dir_, "bench " + pipeline_args() + " --interval-ms 5");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("interval_ms must be >= 10"), std::string::npos);
}
