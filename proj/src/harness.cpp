#include "tailtest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "tailtest/error.hpp"

namespace tailtest {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Moments {
    std::optional<double> mean;
    std::optional<double> std;
    std::size_t degenerate = 0;
};

Moments moments(const std::vector<BucketStatistic>& values) {
    Moments m;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& v : values) {
        if (!v) {
            ++m.degenerate;
            continue;
        }
        sum += *v;
        ++count;
    }
    if (count == 0) return m;
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& v : values) {
        if (v) ss += (*v - mean) * (*v - mean);
    }
    m.mean = mean;
    m.std = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
    return m;
}

ordered_json optional_number(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

std::string csv_field(const std::optional<double>& v) { return v ? format_decimal(*v) : ""; }

void write_csv_row(std::ostream& out, int i, const std::optional<double>& mean,
                   const std::optional<double>& std, const std::optional<double>& proxy,
                   double threshold, double boundary) {
    out << i << ',' << csv_field(mean) << ',' << csv_field(std) << ',' << csv_field(proxy) << ','
        << format_decimal(threshold) << ',' << format_decimal(boundary) << '\n';
}

constexpr const char* kCsvHeader = "i,s_hat_mean,s_hat_std,proxy_s,threshold,boundary\n";

double checked_sample(double v, const std::string& where) {
    if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << "sample value " << v << " at " << where << " outside [0, inf)";
        throw DomainError(msg.str());
    }
    return v;
}

}  // namespace

std::size_t ReplicationReport::heavy_count() const {
    return static_cast<std::size_t>(std::count(verdicts.begin(), verdicts.end(), Verdict::heavy));
}

ReplicationReport replicate(const DistributionModel& model, std::size_t reps, std::size_t n,
                            const TestConfig& config, std::uint64_t base_seed, unsigned threads) {
    if (reps < 2) throw DomainError("replication needs reps >= 2");
    config.validate();

    std::vector<TestOutcome> outcomes(reps);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t r = next++; r < reps && !failed; r = next++) {
            try {
                outcomes[r] = run_test_on_model(model, n, base_seed + r, config);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ReplicationReport report;
    report.model = model.name();
    report.config = config;
    report.n = n;
    for (std::size_t r = 0; r < reps; ++r) {
        report.seeds.push_back(base_seed + r);
        report.verdicts.push_back(outcomes[r].verdict);
    }
    const std::size_t buckets = outcomes.front().records.size();
    for (std::size_t b = 0; b < buckets; ++b) {
        std::vector<BucketStatistic> values;
        values.reserve(reps);
        for (const auto& o : outcomes) values.push_back(o.records[b].s_hat);
        const auto m = moments(values);
        const int i = outcomes.front().records[b].i;
        const double z = static_cast<double>(i) / config.k;
        std::optional<double> proxy;
        try {
            proxy = proxy_S(model, z);
        } catch (const SingularError&) {
        }
        report.rows.push_back({i, m.mean, m.std, m.degenerate, proxy, 1.0 - z,
                               outcomes.front().records[b].boundary});
    }
    return report;
}

std::vector<double> parse_text_samples(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || ptr != end) {
            throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" +
                                 std::string(begin, end) + "' as a number",
                             line_no);
        }
        out.push_back(checked_sample(v, "line " + std::to_string(line_no)));
    }
    return out;
}

std::vector<double> read_samples(const std::filesystem::path& path, SampleFormat format) {
    if (format == SampleFormat::text) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open " + path.string(), 0);
        return parse_text_samples(in);
    }

    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string(), 0);
    const std::vector<char> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
    if (bytes.size() % 8 != 0) {
        const std::size_t offset = bytes.size() - bytes.size() % 8;
        throw ParseError("trailing partial value at byte offset " + std::to_string(offset) +
                             " in " + path.string(),
                         offset);
    }
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t j = 0; j < out.size(); ++j) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) {
            bits = (bits << 8) | static_cast<unsigned char>(bytes[8 * j + static_cast<std::size_t>(b)]);
        }
        out[j] = checked_sample(std::bit_cast<double>(bits), "byte offset " + std::to_string(8 * j));
    }
    return out;
}

SortedSampleSplit load_samples(const std::filesystem::path& path, SampleFormat format) {
    auto values = read_samples(path, format);
    if (values.empty()) throw ParseError("no samples in " + path.string(), 0);
    return SortedSampleSplit::from_unsorted(std::move(values));
}

FourSplits load_four_splits(const std::filesystem::path& path, SampleFormat format) {
    const auto values = read_samples(path, format);
    return split_round_robin(values);
}

void write_samples(std::ostream& out, const std::vector<double>& values, SampleFormat format) {
    if (format == SampleFormat::text) {
        for (const double v : values) out << format_decimal(v) << '\n';
        return;
    }
    for (const double v : values) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        char buf[8];
        for (auto& c : buf) {
            c = static_cast<char>(bits & 0xff);
            bits >>= 8;
        }
        out.write(buf, 8);
    }
}

std::string format_decimal(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

ordered_json to_json(const TestOutcome& outcome) {
    const auto& c = outcome.config;
    ordered_json j;
    j["verdict"] = to_string(outcome.verdict);
    j["k"] = c.k;
    j["n"] = outcome.n;
    j["alpha"] = c.tail.alpha;
    j["rho"] = c.tail.rho;
    j["beta"] = optional_number(c.bounds.beta);
    j["b1"] = c.bounds.b1;
    j["b2"] = c.bounds.b2;
    j["seed"] = outcome.seed ? ordered_json(*outcome.seed) : ordered_json(nullptr);
    j["buckets"] = ordered_json::array();
    for (const auto& r : outcome.records) {
        ordered_json b;
        b["i"] = r.i;
        b["s_hat"] = optional_number(r.s_hat);
        b["boundary"] = r.boundary;
        b["margin"] = optional_number(r.margin());
        b["degenerate"] = !r.s_hat.has_value();
        j["buckets"].push_back(std::move(b));
    }
    return j;
}

TestOutcome outcome_from_json(const nlohmann::json& j) {
    TestOutcome o;
    o.verdict = j.at("verdict").get<std::string>() == "heavy" ? Verdict::heavy : Verdict::light;
    o.config.k = j.at("k").get<int>();
    o.n = j.at("n").get<std::size_t>();
    o.config.tail = {j.at("alpha").get<double>(), j.at("rho").get<double>()};
    const auto& beta = j.at("beta");
    o.config.bounds.beta =
        beta.is_null() ? std::numeric_limits<double>::infinity() : beta.get<double>();
    o.config.bounds.b1 = j.at("b1").get<double>();
    o.config.bounds.b2 = j.at("b2").get<double>();
    if (!j.at("seed").is_null()) o.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& b : j.at("buckets")) {
        BucketStatistic s;
        if (!b.at("degenerate").get<bool>()) s = b.at("s_hat").get<double>();
        o.records.push_back({b.at("i").get<int>(), s, b.at("boundary").get<double>()});
    }
    return o;
}

ordered_json to_json(const ReplicationReport& report) {
    const auto& c = report.config;
    ordered_json j;
    j["model"] = report.model;
    j["variant"] = c.variant == Variant::full ? "full" : "weak";
    j["k"] = c.k;
    j["n"] = report.n;
    j["reps"] = report.seeds.size();
    j["seeds"] = report.seeds;
    j["alpha"] = c.tail.alpha;
    j["rho"] = c.tail.rho;
    j["beta"] = optional_number(c.bounds.beta);
    j["b1"] = c.bounds.b1;
    j["b2"] = c.bounds.b2;
    j["heavy_count"] = report.heavy_count();
    j["buckets"] = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json b;
        b["i"] = r.i;
        b["s_hat_mean"] = optional_number(r.s_hat_mean);
        b["s_hat_std"] = optional_number(r.s_hat_std);
        b["degenerate_count"] = r.degenerate;
        b["proxy_s"] = optional_number(r.proxy_s);
        b["threshold"] = r.threshold;
        b["boundary"] = r.boundary;
        j["buckets"].push_back(std::move(b));
    }
    return j;
}

void write_report(const TestOutcome& outcome, std::ostream& sink, ReportFormat format) {
    if (format == ReportFormat::json) {
        sink << to_json(outcome).dump(2) << '\n';
    } else {
        sink << kCsvHeader;
        for (const auto& r : outcome.records) {
            const double threshold = 1.0 - static_cast<double>(r.i) / outcome.config.k;
            write_csv_row(sink, r.i, r.s_hat, r.s_hat ? std::optional<double>(0.0) : std::nullopt,
                          std::nullopt, threshold, r.boundary);
        }
    }
    if (!sink) throw std::runtime_error("failed writing report");
}

void write_report(const ReplicationReport& report, std::ostream& sink, ReportFormat format) {
    if (format == ReportFormat::json) {
        sink << to_json(report).dump(2) << '\n';
    } else {
        sink << kCsvHeader;
        for (const auto& r : report.rows) {
            write_csv_row(sink, r.i, r.s_hat_mean, r.s_hat_std, r.proxy_s, r.threshold, r.boundary);
        }
    }
    if (!sink) throw std::runtime_error("failed writing report");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace tailtest
