// irqbench: run interrupt latency/throughput scenarios on the simulated
// platform, analyze captures, and run the benchmark suite.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "irqbench/irqbench.hpp"

namespace fs = std::filesystem;
using namespace irqbench;

namespace {

enum ExitCode { kOk = 0, kConfig = 3, kIo = 4, kFormat = 5 };

class IoError : public Error {
public:
  using Error::Error;
};

timing::TimingModel load_timing(const std::string& path) {
  if (path.empty()) {
    return {};
  }
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read timing config '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return timing::parse_config(ss.str());
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

trace::TraceCapture load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read trace '" + path + "'");
  }
  return trace::read(in);
}

void write_report(const analysis::SummaryReport& r, const fs::path& path, const std::string& format) {
  auto out = open_out(path);
  if (format == "csv") {
    analysis::write_csv(r, out);
  } else {
    out << analysis::to_json(r).dump(2) << '\n';
  }
  finish(out, path);
}

std::string stat_cell(const analysis::SummaryReport& r, double analysis::Summary::*field) {
  if (!r.stats) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(r.mode == stimulus::Mode::latency ? 0 : 0) << (*r.stats).*field;
  return os.str();
}

struct RunArgs {
  std::string scenario;
  std::uint64_t seed = 1;
  std::string duration;
  std::uint64_t scale = stimulus::kDefaultTimeScale;
  std::string mode;
  std::string stack = "bare-metal";
  std::string timing_path;
  std::string out = "trace.itrc";
  unsigned lmax_t6 = scenarios::kDefaultT6Variant;
};

void cmd_run(const RunArgs& a) {
  const auto resolved = scenarios::resolve(a.scenario, a.lmax_t6);
  auto config = resolved.config;
  config.stack = timing::parse_stack(a.stack);
  stimulus::Mode mode;
  if (!a.mode.empty()) {
    mode = stimulus::parse_mode(a.mode);
  } else if (resolved.mode) {
    mode = *resolved.mode;
  } else {
    mode = config.supports(stimulus::Mode::latency) ? stimulus::Mode::latency : stimulus::Mode::throughput;
  }
  const auto full = a.duration.empty() ? stimulus::capture_length(mode) : parse_duration(a.duration);
  if (a.scale == 0) throw ConfigError("--scale must be positive");
  const auto timing = load_timing(a.timing_path);

  platform::RunOptions ro;
  ro.mode = mode;
  ro.time_scale = a.scale;
  const auto result = platform::simulate(config, timing, a.seed, full / static_cast<std::int64_t>(a.scale), ro);

  const fs::path path = a.out;
  auto out = open_out(path, true);
  trace::write(result.capture, out);
  finish(out, path);
  std::cout << "wrote " << path.string() << ": " << config.name << ", " << stimulus::to_string(mode) << ", "
            << result.stats.phases << " phases, " << result.capture.events.size() << " events\n";
}

struct AnalyzeArgs {
  std::string trace;
  std::string mode;
  std::string out;
  std::string format = "json";
  int stim_channel = -1;
  int isr_channel = -1;
};

void cmd_analyze(const AnalyzeArgs& a) {
  const auto capture = load_trace(a.trace);
  if (capture.events.empty()) {
    throw ConfigError("capture '" + a.trace + "' contains no events");
  }
  stimulus::Mode mode;
  if (!a.mode.empty()) {
    mode = stimulus::parse_mode(a.mode);
  } else if (capture.metadata.contains(trace::meta::kMode)) {
    mode = stimulus::parse_mode(capture.metadata.at(trace::meta::kMode).get<std::string>());
  } else {
    throw ConfigError("capture has no recorded mode; pass --mode");
  }
  analysis::AnalyzeOptions opt;
  if (a.stim_channel >= 0) opt.stim_channel = static_cast<std::uint16_t>(a.stim_channel);
  if (a.isr_channel >= 0) {
    opt.isr_channel = static_cast<std::uint16_t>(a.isr_channel);
    opt.isr_channels = std::set<std::uint16_t>{static_cast<std::uint16_t>(a.isr_channel)};
  }
  const auto report = analysis::analyze(capture, mode, opt);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';

  const fs::path path = a.out.empty() ? fs::path(a.trace).replace_extension(a.format) : fs::path(a.out);
  write_report(report, path, a.format);
  std::cout << "wrote " << path.string() << ": " << report.count() << " samples";
  if (report.stats) std::cout << ", median " << analysis::format_number(report.stats->median) << ' ' << report.unit;
  std::cout << '\n';
}

struct BenchArgs {
  std::string name = "all";
  std::string seeds = "1..10";
  std::string out_dir = "bench-out";
  std::string duration;
  std::uint64_t scale = stimulus::kDefaultTimeScale;
  std::string timing_path;
  unsigned threads = 0;
  unsigned lmax_t6 = scenarios::kDefaultT6Variant;
};

void cmd_bench(const BenchArgs& a) {
  std::vector<std::string> names;
  if (a.name == "all") {
    names = scenarios::kBenchmarkNames;
  } else {
    scenarios::benchmark(a.name, a.lmax_t6);  // validates the name
    names.push_back(a.name);
  }
  const auto seeds = parse_seed_list(a.seeds);
  const auto timing = load_timing(a.timing_path);
  if (a.scale == 0) throw ConfigError("--scale must be positive");
  bench::Options opt;
  opt.duration = a.duration.empty() ? 0 : parse_duration(a.duration);
  opt.time_scale = a.scale;
  opt.threads = a.threads;

  const fs::path root = a.out_dir;
  std::ostringstream table;
  std::ostringstream csv;
  table << "| benchmark | unit | bare-metal median | bare-metal min | bare-metal max | rtos median | rtos min | rtos max |\n"
        << "|---|---|---|---|---|---|---|---|\n";
  csv << "benchmark,unit,stack,count,misses,min,median,max,p95,p99\n";

  for (const auto& name : names) {
    const auto def = scenarios::benchmark(name, a.lmax_t6);
    std::vector<bench::Aggregate> aggs;
    for (auto stack : {timing::StackKind::bare_metal, timing::StackKind::rtos}) {
      auto agg = bench::run(def, stack, timing, seeds, opt);
      const auto dir = root / name / timing::to_string(stack);
      for (const auto& run : agg.runs) {
        write_report(run.report, dir / ("seed-" + std::to_string(run.seed) + ".json"), "json");
      }
      write_report(agg.pooled, dir / "aggregate.json", "json");
      write_report(agg.pooled, dir / "aggregate.csv", "csv");
      const auto& p = agg.pooled;
      csv << name << ',' << p.unit << ',' << timing::to_string(stack) << ',' << p.count() << ',' << p.misses;
      if (p.stats) {
        for (double v : {p.stats->min, p.stats->median, p.stats->max, p.stats->p95, p.stats->p99}) {
          csv << ',' << analysis::format_number(v);
        }
      } else {
        csv << ",,,,,";
      }
      csv << '\n';
      aggs.push_back(std::move(agg));
    }
    table << "| " << name << " | " << aggs[0].pooled.unit;
    for (const auto& agg : aggs) {
      table << " | " << stat_cell(agg.pooled, &analysis::Summary::median) << " | "
            << stat_cell(agg.pooled, &analysis::Summary::min) << " | "
            << stat_cell(agg.pooled, &analysis::Summary::max);
    }
    table << " |\n";
  }

  {
    const auto path = root / "comparison.md";
    auto out = open_out(path);
    out << table.str();
    finish(out, path);
  }
  {
    const auto path = root / "comparison.csv";
    auto out = open_out(path);
    out << csv.str();
    finish(out, path);
  }
  std::cout << table.str();
}

void cmd_export_csv(const std::string& trace_path, const std::string& out_path) {
  const auto capture = load_trace(trace_path);
  const fs::path path = out_path.empty() ? fs::path(trace_path).replace_extension("csv") : fs::path(out_path);
  auto out = open_out(path);
  trace::write_csv(capture, out);
  finish(out, path);
  std::cout << "wrote " << path.string() << ": " << capture.events.size() << " events\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interrupt latency and throughput benchmark on a simulated GICv2 platform"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario or benchmark and write a trace");
  run_cmd->add_option("scenario", run.scenario, "T1..T7, T4-<n>, T6-<k>, B-Lmin, B-Lmax, B-Tmax, or ids joined by '+'")
      ->required();
  run_cmd->add_option("--seed", run.seed, "RNG seed");
  run_cmd->add_option("--duration", run.duration, "capture length before scaling (default 30s latency, 120s throughput)");
  run_cmd->add_option("--scale", run.scale, "time-scale divisor")->capture_default_str();
  run_cmd->add_option("--mode", run.mode, "latency or throughput (default: scenario's first mode)");
  run_cmd->add_option("--stack", run.stack, "bare-metal or rtos")->capture_default_str();
  run_cmd->add_option("--timing", run.timing_path, "timing model config file");
  run_cmd->add_option("--lmax-t6", run.lmax_t6, "T6 core count used in B-Lmax")->capture_default_str();
  run_cmd->add_option("-o,--out", run.out, "output trace path")->capture_default_str();

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "Extract latency or throughput samples from a trace");
  an_cmd->add_option("trace", an.trace, "trace file")->required();
  an_cmd->add_option("--mode", an.mode, "latency or throughput (must match the capture)");
  an_cmd->add_option("-o,--out", an.out, "report path (default: trace path with format extension)");
  an_cmd->add_option("--format", an.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  an_cmd->add_option("--stim-channel", an.stim_channel, "stimulus hardware channel (default from metadata)");
  an_cmd->add_option("--isr-channel", an.isr_channel, "ISR software-event channel (default from metadata)");

  BenchArgs be;
  auto* be_cmd = app.add_subcommand("bench", "Run B-Lmin, B-Lmax, B-Tmax (or all) across seeds and stacks");
  be_cmd->add_option("name", be.name, "B-Lmin, B-Lmax, B-Tmax or all")->capture_default_str();
  be_cmd->add_option("--seeds", be.seeds, "seed list, e.g. 1..10 or 1,2,3")->capture_default_str();
  be_cmd->add_option("--out-dir", be.out_dir, "output directory")->capture_default_str();
  be_cmd->add_option("--duration", be.duration, "capture length before scaling");
  be_cmd->add_option("--scale", be.scale, "time-scale divisor")->capture_default_str();
  be_cmd->add_option("--timing", be.timing_path, "timing model config file");
  be_cmd->add_option("--threads", be.threads, "worker threads (0: all cores)");
  be_cmd->add_option("--lmax-t6", be.lmax_t6, "T6 core count used in B-Lmax")->capture_default_str();

  std::string ex_trace, ex_out;
  auto* ex_cmd = app.add_subcommand("export-csv", "Write a trace as tick,kind,channel,payload CSV");
  ex_cmd->add_option("trace", ex_trace, "trace file")->required();
  ex_cmd->add_option("-o,--out", ex_out, "CSV path");

  auto* tm_cmd = app.add_subcommand("timing", "Print the default timing model config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) cmd_run(run);
    if (*an_cmd) cmd_analyze(an);
    if (*be_cmd) cmd_bench(be);
    if (*ex_cmd) cmd_export_csv(ex_trace, ex_out);
    if (*tm_cmd) std::cout << timing::to_config({});
  } catch (const TraceFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
