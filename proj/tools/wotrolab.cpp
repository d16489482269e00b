// Experiment runner: every audit in the library as a named, seeded command
// emitting a JSON (or CSV) report with pass/fail against the registered
// thresholds.  `suite` replays a manifest of experiments and summarizes.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wotrolab/experiments.hpp"

using nlohmann::json;
namespace ex = wotrolab::experiments;

namespace {

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

std::string to_csv(const json& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::string out = "key,value\n";
  for (auto& [k, v] : rows) out += k + "," + v + "\n";
  return out;
}

void emit(const json& report, const std::string& out_path, const std::string& format) {
  std::string text = format == "csv" ? to_csv(report) : report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path);
    f << text;
  }
}

int run_suite(const std::string& manifest_path, const std::string& out_path, const std::string& format) {
  std::ifstream in(manifest_path);
  if (!in) {
    std::cerr << "cannot open manifest " << manifest_path << "\n";
    return 2;
  }
  json manifest = json::parse(in);
  json reports = json::array();
  bool all_pass = true;
  for (const auto& entry : manifest) {
    std::string name = entry.at("experiment").get<std::string>();
    json params = entry.contains("params") ? entry.at("params") : json::object();
    json rep = ex::run_report(name, params);
    bool pass = rep.at("pass").get<bool>();
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << "  (" << rep.at("wall_ms").get<double>() << " ms)\n";
    reports.push_back(std::move(rep));
  }
  json summary = {{"schema", 1}, {"suite", manifest_path}, {"pass", all_pass}, {"reports", reports}};
  if (!out_path.empty()) emit(summary, out_path, format);
  std::cout << (all_pass ? "suite: all experiments passed\n" : "suite: FAILURES present\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WOTRO protocol simulation lab"};
  app.require_subcommand(1);

  struct Flags {
    uint64_t seed = 1, trials = 0, p = 0, n = 0, m = 0, k = 0, pairs = 0, queries = 0, runs = 0, targets = 0;
    double alpha = -1;
    bool degenerate = false;
    std::string out, format = "json";
  };

  std::string manifest;
  std::map<std::string, std::pair<CLI::App*, std::shared_ptr<Flags>>> subs;
  for (const std::string& name : ex::registry()) {
    auto flags = std::make_shared<Flags>();
    CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
    sub->add_option("--seed", flags->seed, "rng seed");
    sub->add_option("--trials", flags->trials, "trial count");
    sub->add_option("--p", flags->p, "field characteristic");
    sub->add_option("--n", flags->n, "input length / extension degree");
    sub->add_option("--m", flags->m, "output length");
    sub->add_option("--k", flags->k, "prover register size");
    sub->add_option("--alpha", flags->alpha, "dual certificate parameter");
    sub->add_option("--pairs", flags->pairs, "basis pairs to audit");
    sub->add_option("--queries", flags->queries, "oracle queries");
    sub->add_option("--runs", flags->runs, "independent runs");
    sub->add_option("--targets", flags->targets, "random target functions");
    sub->add_flag("--degenerate", flags->degenerate, "pin the toy protocol to one basis");
    sub->add_option("--out", flags->out, "write the report to a file");
    sub->add_option("--format", flags->format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    subs[name] = {sub, flags};
  }

  CLI::App* suite = app.add_subcommand("suite", "run a manifest of experiments");
  auto suite_flags = std::make_shared<Flags>();
  suite->add_option("manifest", manifest, "manifest JSON file")->required();
  suite->add_option("--out", suite_flags->out, "write the combined report to a file");
  suite->add_option("--format", suite_flags->format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (suite->parsed()) return run_suite(manifest, suite_flags->out, suite_flags->format);
    for (auto& [name, entry] : subs) {
      auto& [sub, flags] = entry;
      if (!sub->parsed()) continue;
      json params;
      params["seed"] = flags->seed;
      if (flags->trials) params["trials"] = flags->trials;
      if (flags->p) params["p"] = flags->p;
      if (flags->n) params["n"] = flags->n;
      if (flags->m) params["m"] = flags->m;
      if (flags->k) params["k"] = flags->k;
      if (flags->pairs) params["pairs"] = flags->pairs;
      if (flags->queries) params["queries"] = flags->queries;
      if (flags->runs) params["runs"] = flags->runs;
      if (flags->targets) params["targets"] = flags->targets;
      if (flags->alpha >= 0) params["alpha"] = flags->alpha;
      if (flags->degenerate) params["degenerate"] = 1;
      json report = ex::run_report(name, params);
      emit(report, flags->out, flags->format);
      return report.at("pass").get<bool>() ? 0 : 1;
    }
  } catch (const wotrolab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
