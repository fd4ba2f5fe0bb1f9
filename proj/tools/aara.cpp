// aara: evaluate and analyse RaML-lite programs, check inherent polynomial time, and
// compile Turing machines.
//
// Exit codes: 0 success, 1 rejected by the analysis, 2 usage or input errors.

#include "aara/ip.hpp"
#include "aara/multi.hpp"
#include "aara/parser.hpp"
#include "aara/report.hpp"
#include "aara/tm.hpp"
#include "aara/uni.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace aara;

namespace {

constexpr int kOk = 0, kRejected = 1, kUsage = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

// Source errors carry "line:col: " already.
CheckedProgram load(const std::string& path) {
  try {
    return check_program(parse_program(slurp(path)));
  } catch (const SyntaxError& e) {
    throw InputError(path + ":" + e.what());
  }
}

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

struct AnalyzeArgs {
  std::string mode = "uni";
  unsigned degree = 2;
  std::string metric = "tick";
  std::string require_output;
};

AnalysisReport analyze(const std::string& id, const CheckedProgram& cp, const AnalyzeArgs& a, bool dump_lp,
                       std::string* lp_out) {
  CostMetric metric = parse_metric(a.metric);
  if (a.mode == "uni") {
    UniOptions opt;
    opt.degree = a.degree;
    opt.metric = metric;
    opt.probe_higher_degree = true;
    opt.keep_lp = dump_lp;
    if (!a.require_output.empty()) opt.require_output = parse_annot(slurp(a.require_output));
    return report_uni(id, cp, opt, lp_out);
  }
  if (a.mode == "multi") {
    MultiOptions opt;
    opt.degree = a.degree;
    opt.metric = metric;
    opt.probe_higher_degree = true;
    opt.keep_lp = dump_lp;
    if (!a.require_output.empty())
      opt.require_output = parse_poly(slurp(a.require_output), {{"", entry_info(cp).result}}, a.degree);
    return report_multi(id, cp, opt, lp_out);
  }
  throw InputError("unknown mode `" + a.mode + "` (expected uni or multi)");
}

void emit(const AnalysisReport& r, bool json) { std::cout << (json ? to_json(r) : to_text(r)); }

int code(const AnalysisReport& r) { return r.ok ? kOk : kRejected; }

// ---------------------------------------------------------------- corpus

struct Entry {
  std::string id, file, mode, metric = "tick", require_output;
  unsigned degree = 1;
  std::vector<std::string> inputs;
  std::size_t max_len = 6;
};

std::vector<Entry> read_manifest(const fs::path& dir) {
  auto j = nlohmann::json::parse(slurp((dir / "manifest.json").string()));
  std::vector<Entry> out;
  for (auto& e : j) {
    Entry x;
    x.id = e.at("id");
    x.file = e.at("file");
    x.mode = e.at("mode");
    x.metric = e.value("metric", x.metric);
    x.degree = e.value("degree", x.degree);
    x.require_output = e.value("require_output", "");
    x.inputs = e.value("inputs", std::vector<std::string>{});
    x.max_len = e.value("max_len", x.max_len);
    out.push_back(std::move(x));
  }
  return out;
}

AnalysisReport run_entry(const fs::path& dir, const Entry& e) {
  std::string path = (dir / e.file).string();
  if (e.mode == "tm") return report_tm(e.id, parse_tm(slurp(path)), e.max_len);
  CheckedProgram cp = load(path);
  if (e.mode == "ip") return report_ip(e.id, cp);
  if (e.mode == "eval") {
    std::vector<ValuePtr> in;
    for (auto& v : e.inputs) in.push_back(parse_value(v));
    return report_eval(e.id, cp, in, parse_metric(e.metric), kDefaultFuel);
  }
  AnalyzeArgs a{e.mode, e.degree, e.metric, e.require_output.empty() ? "" : (dir / e.require_output).string()};
  return analyze(e.id, cp, a, false, nullptr);
}

int corpus_run(const std::string& dir_arg, bool check) {
  fs::path dir(dir_arg), golden = dir / "golden";
  auto entries = read_manifest(dir);
  std::vector<std::future<std::string>> jobs;
  for (auto& e : entries)
    jobs.push_back(std::async(std::launch::async, [&dir, &e] { return to_json(run_entry(dir, e)); }));
  if (!check) fs::create_directories(golden);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::string now = jobs[i].get();
    fs::path file = golden / (entries[i].id + ".json");
    std::string before;
    if (fs::exists(file)) before = slurp(file.string());
    bool same = before == now;
    if (!same) ++changed;
    std::cout << (same ? "unchanged " : check ? "DIFFERS   " : "updated   ") << entries[i].id << "\n";
    if (!same && !check) spit(file.string(), now);
  }
  std::cout << entries.size() << " reports, " << changed << (check ? " differ" : " updated") << "\n";
  return check && changed > 0 ? kRejected : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource analysis for RaML-lite"};
  app.require_subcommand(1);
  bool json = false, timing = false;
  std::uint64_t fuel = kDefaultFuel;
  app.add_flag("--json", json, "Print the structured report")->envname("AARA_JSON");
  app.add_flag("--timing", timing, "Append wall-clock time to text reports");
  app.add_option("--fuel", fuel, "Evaluation step budget")->envname("AARA_FUEL");

  std::string file;
  auto* eval_cmd = app.add_subcommand("eval", "Run a program and print its value and cost");
  std::string eval_metric = "time";
  eval_cmd->add_option("file", file, "Program")->required();
  // Input values are taken raw so that [<>, <>] is not split into items.
  eval_cmd->allow_extras();
  eval_cmd->footer("Remaining arguments are input values, one per parameter.");
  eval_cmd->add_option("--metric", eval_metric, "time, tick or costfree")->envname("AARA_METRIC");

  auto* an = app.add_subcommand("analyze", "Infer a resource bound");
  AnalyzeArgs aa;
  bool dump_lp = false;
  an->add_option("file", file, "Program")->required();
  an->add_option("--mode", aa.mode, "uni or multi")->envname("AARA_MODE")->check(CLI::IsMember({"uni", "multi"}));
  an->add_option("--degree", aa.degree, "Maximal degree")->envname("AARA_DEGREE");
  an->add_option("--metric", aa.metric, "time, tick or costfree")
      ->envname("AARA_METRIC")
      ->check(CLI::IsMember({"time", "tick", "costfree"}));
  an->add_flag("--dump-lp", dump_lp, "Print the linear program")->envname("AARA_DUMP_LP");
  an->add_option("--require-output", aa.require_output, "File with the demanded output annotation")
      ->envname("AARA_REQUIRE_OUTPUT");

  auto* ip = app.add_subcommand("ip", "Check inherent polynomial time");
  ip->add_option("file", file, "Program")->required();

  auto* ctm = app.add_subcommand("compile-tm", "Compile a Turing machine to RaML-lite");
  std::string out_path;
  ctm->add_option("machine", file, "Machine description")->required();
  ctm->add_option("-o,--output", out_path, "Output file (default: stdout)");

  auto* cert = app.add_subcommand("certify-tm", "Compile, sweep all short inputs and analyse");
  std::size_t max_len = 8;
  cert->add_option("machine", file, "Machine description")->required();
  cert->add_option("--max-len", max_len, "Longest input word")->envname("AARA_MAX_LEN");

  auto* corpus = app.add_subcommand("corpus", "Regression corpus");
  corpus->require_subcommand(1);
  auto* crun = corpus->add_subcommand("run", "Regenerate golden reports");
  std::string dir = "corpus";
  bool check = false;
  crun->add_option("--dir", dir, "Corpus directory with manifest.json")->envname("AARA_CORPUS");
  crun->add_flag("--check", check, "Compare only; exit 1 on any difference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&](AnalysisReport r) {
      if (timing) r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      emit(r, json);
      return code(r);
    };
    if (*eval_cmd) {
      CheckedProgram cp = load(file);
      std::vector<ValuePtr> in;
      for (auto& v : eval_cmd->remaining()) in.push_back(parse_value(v));
      auto ei = entry_info(cp);
      std::size_t want = ei.is_function ? 1 : ei.params.size();
      if (in.size() != want)
        throw InputError("expected " + std::to_string(want) + " input value(s), got " + std::to_string(in.size()));
      for (std::size_t i = 0; i < in.size(); ++i)
        if (!has_type(*in[i], *ei.params[i].second))
          throw InputError("input " + std::to_string(i + 1) + " is not of type " + to_string(ei.params[i].second));
      return finish(report_eval(stem(file), cp, in, parse_metric(eval_metric), fuel));
    }
    if (*an) {
      CheckedProgram cp = load(file);
      std::string lp;
      auto r = analyze(stem(file), cp, aa, dump_lp, &lp);
      if (dump_lp) std::cout << lp << (lp.empty() || lp.back() == '\n' ? "" : "\n");
      return finish(r);
    }
    if (*ip) return finish(report_ip(stem(file), load(file)));
    if (*ctm) {
      TmSpec spec = parse_tm(slurp(file));
      if (!spec.bound) throw InputError(file + ": machine has no `bound` line");
      std::string src = compile_tm_source(spec.machine, *spec.bound);
      if (out_path.empty())
        std::cout << src;
      else
        spit(out_path, src);
      return kOk;
    }
    if (*cert) return finish(report_tm(stem(file), parse_tm(slurp(file)), max_len));
    if (*crun) return corpus_run(dir, check);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TmError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: manifest: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
