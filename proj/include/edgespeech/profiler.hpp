#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#if defined(__linux__)
#include <unistd.h>
#endif

namespace edgespeech {

/// One point on the resource timeline. cpu_pct is process CPU time over wall
/// time since the previous sample, times 100 — it exceeds 100 when more than
/// one core is busy.
struct Sample {
    double t_ms = 0.0;  // milliseconds since the timeline started
    double cpu_pct = 0.0;
    std::uint64_t rss_bytes = 0;
};

/// Timeline plus phase wall-times for one profiled run. The workload fills
/// load_model_s, inference_s, and audio_duration_s; the harness fills the
/// rest. rtf = inference_s / audio_duration_s.
struct BenchReport {
    std::vector<Sample> timeline;
    double load_model_s = 0.0;
    double inference_s = 0.0;
    double processing_s = 0.0;
    double peak_cpu_pct = 0.0;
    std::uint64_t peak_rss_bytes = 0;
    double audio_duration_s = 0.0;
    double rtf = 0.0;
    bool metrics_available = true;
    std::string error;  // non-empty when the workload failed (partial data)
};

namespace detail {

/// Read cumulative process CPU seconds and resident set bytes from the
/// operating system's process accounting. Returns false where unsupported —
/// callers degrade to wall-time-only reporting rather than fabricate values.
inline bool read_process_accounting(double& cpu_seconds, std::uint64_t& rss_bytes) {
#if defined(__linux__)
    std::ifstream stat("/proc/self/stat");
    if (!stat) return false;
    std::string line;
    std::getline(stat, line);
    // Fields after the parenthesized command name; utime and stime are the
    // 12th and 13th of those (clock ticks).
    const auto paren = line.rfind(')');
    if (paren == std::string::npos) return false;
    std::istringstream rest(line.substr(paren + 1));
    std::string tok;
    unsigned long long utime = 0, stime = 0;
    bool got = false;
    for (int i = 0; rest >> tok; ++i) {
        if (i == 11) utime = std::stoull(tok);
        if (i == 12) {
            stime = std::stoull(tok);
            got = true;
            break;
        }
    }
    if (!got) return false;
    const long hz = ::sysconf(_SC_CLK_TCK);
    cpu_seconds = static_cast<double>(utime + stime) / static_cast<double>(hz > 0 ? hz : 100);

    std::ifstream statm("/proc/self/statm");
    if (!statm) return false;
    unsigned long long total_pages = 0, resident_pages = 0;
    statm >> total_pages >> resident_pages;
    const long page = ::sysconf(_SC_PAGESIZE);
    rss_bytes = resident_pages * static_cast<std::uint64_t>(page > 0 ? page : 4096);
    return rss_bytes > 0;
#else
    (void)cpu_seconds;
    (void)rss_bytes;
    return false;
#endif
}

}  // namespace detail

/// Stateful sampler: each call reports CPU% relative to the previous call
/// (the constructor takes the baseline reading) and the current resident set.
class ResourceSampler {
  public:
    ResourceSampler() {
        start_ = prev_wall_ = std::chrono::steady_clock::now();
        std::uint64_t rss = 0;
        available_ = detail::read_process_accounting(prev_cpu_, rss);
    }

    bool available() const { return available_; }

    Sample sample_process_stats() {
        const auto now = std::chrono::steady_clock::now();
        Sample s;
        s.t_ms = std::chrono::duration<double, std::milli>(now - start_).count();
        double cpu = 0.0;
        std::uint64_t rss = 0;
        if (available_ && detail::read_process_accounting(cpu, rss)) {
            const double wall_s = std::chrono::duration<double>(now - prev_wall_).count();
            s.cpu_pct = wall_s > 0.0 ? 100.0 * (cpu - prev_cpu_) / wall_s : 0.0;
            if (s.cpu_pct < 0.0) s.cpu_pct = 0.0;
            s.rss_bytes = rss;
            prev_cpu_ = cpu;
            prev_wall_ = now;
        } else {
            available_ = false;
        }
        return s;
    }

  private:
    std::chrono::steady_clock::time_point start_, prev_wall_;
    double prev_cpu_ = 0.0;
    bool available_ = true;
};

/// Run `workload` while a sampler thread appends to the timeline every
/// `interval_ms` (>= 10). The report is delivered through the out-parameter
/// so it carries the partial timeline even when the workload throws; the
/// workload's exception then propagates after the report is complete.
/// The workload writes its own phase times into the report it is handed.
inline void run_profiled(const std::function<void(BenchReport&)>& workload,
                         std::uint32_t interval_ms, BenchReport& out) {
    if (interval_ms < 10)
        throw std::invalid_argument("run_profiled: interval_ms must be >= 10");
    out = BenchReport{};
    ResourceSampler sampler;
    out.metrics_available = sampler.available();

    std::vector<Sample> timeline;
    timeline.push_back(sampler.sample_process_stats());  // t = 0 baseline

    std::mutex mu;
    std::condition_variable cv;
    bool stop = false;
    std::thread ticker([&] {
        std::unique_lock<std::mutex> lk(mu);
        while (!cv.wait_for(lk, std::chrono::milliseconds(interval_ms),
                            [&] { return stop; })) {
            lk.unlock();
            Sample s = sampler.sample_process_stats();
            lk.lock();
            timeline.push_back(s);
        }
    });

    const auto t0 = std::chrono::steady_clock::now();
    std::exception_ptr failure;
    try {
        workload(out);
    } catch (...) {
        failure = std::current_exception();
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        std::lock_guard<std::mutex> lk(mu);
        stop = true;
    }
    cv.notify_all();
    ticker.join();

    out.timeline = std::move(timeline);
    out.processing_s = wall;
    for (const Sample& s : out.timeline) {
        if (s.cpu_pct > out.peak_cpu_pct) out.peak_cpu_pct = s.cpu_pct;
        if (s.rss_bytes > out.peak_rss_bytes) out.peak_rss_bytes = s.rss_bytes;
    }
    out.metrics_available = out.metrics_available && sampler.available();
    out.rtf = out.audio_duration_s > 0.0 ? out.inference_s / out.audio_duration_s : 0.0;

    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            out.error = e.what();
        } catch (...) {
            out.error = "unknown workload failure";
        }
        std::rethrow_exception(failure);
    }
}

/// Timeline as CSV with columns exactly `t_ms,cpu_pct,rss_bytes`.
inline void emit_csv(const BenchReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("emit_csv: cannot write " + path);
    out << "t_ms,cpu_pct,rss_bytes\n";
    char buf[96];
    for (const Sample& s : r.timeline) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%llu\n", s.t_ms, s.cpu_pct,
                      static_cast<unsigned long long>(s.rss_bytes));
        out << buf;
    }
    if (!out.flush()) throw std::runtime_error("emit_csv: write failed for " + path);
}

/// Five-row summary in the benchmark-table shape, plus the real-time factor.
/// Values carry four significant digits with trailing zeros kept, e.g. an
/// inference time of 7.0 prints as "Inference Time ( s ): 7.000".
inline std::string emit_summary(const BenchReport& r) {
    auto fmt = [](double v) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%#.4g", v);
        return std::string(buf);
    };
    std::string out;
    if (r.metrics_available) {
        out += "CPU Usage ( % ): " + fmt(r.peak_cpu_pct) + "\n";
        out += "Memory Usage ( MB ): " +
               fmt(static_cast<double>(r.peak_rss_bytes) / (1024.0 * 1024.0)) + "\n";
    } else {
        out += "CPU Usage ( % ): unavailable\n";
        out += "Memory Usage ( MB ): unavailable\n";
    }
    out += "Processing Time ( s ): " + fmt(r.processing_s) + "\n";
    out += "Loading Model ( s ): " + fmt(r.load_model_s) + "\n";
    out += "Inference Time ( s ): " + fmt(r.inference_s) + "\n";
    out += "Real-Time Factor: " + fmt(r.rtf) + "\n";
    if (!r.error.empty()) out += "Workload Error: " + r.error + "\n";
    return out;
}

}  // namespace edgespeech
