#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "exsamp/verify.hpp"
#include "json.hpp"

// exc: exact samples from weighted local CSPs over a simulated network,
// plus the verification and benchmarking harness around the sampler.

using namespace exsamp;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
  std::string graph = "cycle:n=8";
  std::string model = "hardcore:lambda=1";
  std::string csp_file;  // custom instance instead of --model
  double p = -1.0;       // <0: model default
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string mode = "local";
  int samples = 1;
  int max_stages = 40;
  std::string format = "json";
  std::string output;
};

std::uint64_t env_seed() {
  if (const char* s = std::getenv("EXC_SEED")) return std::strtoull(s, nullptr, 10);
  return 1;
}

// --config JSON pre-pass; explicit flags override its values.
void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.contains("graph")) cfg.graph = j["graph"];
  if (j.contains("model")) cfg.model = j["model"];
  if (j.contains("csp")) cfg.csp_file = j["csp"];
  if (j.contains("p")) cfg.p = j["p"];
  if (j.contains("seed")) {
    cfg.seed = j["seed"];
    cfg.seed_set = true;
  }
  if (j.contains("mode")) cfg.mode = j["mode"];
  if (j.contains("samples")) cfg.samples = j["samples"];
  if (j.contains("max_stages")) cfg.max_stages = j["max_stages"];
  if (j.contains("format")) cfg.format = j["format"];
  if (j.contains("output")) cfg.output = j["output"];
}

struct Instance {
  Graph g;
  CspInstance csp;
  std::optional<Model> model;
  Rational weight;
  double p = 0.1;
  NetworkMode mode;
};

Instance build_instance(const RunConfig& cfg) {
  Graph g = parse_graph_spec(cfg.graph, cfg.seed_set ? cfg.seed : env_seed());
  if (!cfg.csp_file.empty()) {
    std::ifstream in(cfg.csp_file);
    if (!in) throw std::invalid_argument("cannot open csp file " + cfg.csp_file);
    std::stringstream ss;
    ss << in.rdbuf();
    CspInstance csp = load_csp_json(ss.str());
    double p = cfg.p < 0 ? 0.1 : cfg.p;
    NetworkMode mode = cfg.mode == "congest" ? NetworkMode::congest(g.vertex_count())
                                             : NetworkMode::local();
    if (cfg.mode != "local" && cfg.mode != "congest")
      throw std::invalid_argument("mode must be local or congest");
    return {std::move(g), std::move(csp), std::nullopt, Rational(0), p, mode};
  }
  ModelParams mp = parse_model_spec(cfg.model);
  double p = cfg.p < 0 ? mp.p : cfg.p;
  CspInstance csp = make_model(mp.model, g, mp.weight);
  NetworkMode mode = cfg.mode == "congest" ? NetworkMode::congest(g.vertex_count())
                                           : NetworkMode::local();
  if (cfg.mode != "local" && cfg.mode != "congest")
    throw std::invalid_argument("mode must be local or congest");
  return {std::move(g), std::move(csp), mp.model, mp.weight, p, mode};
}

std::ostream& open_output(const RunConfig& cfg, std::ofstream& file) {
  if (cfg.output.empty()) return std::cout;
  file.open(cfg.output);
  if (!file) throw std::invalid_argument("cannot open output " + cfg.output);
  return file;
}

bool oracle_small(const CspInstance& csp) {
  double states = std::pow(double(csp.num_labels()), csp.num_vertices());
  return states <= double(1 << 14);
}

SampleReport draw_one(const Instance& inst, const StepRules* rules, std::uint64_t seed,
                      int max_stages) {
  if (inst.model == Model::Ising)
    return monotone_cftp_ising(inst.g, inst.weight, seed, inst.p, max_stages);
  return cftp_sample(inst.csp, inst.g, inst.mode, seed, inst.p, max_stages, rules);
}

int cmd_sample(const RunConfig& cfg) {
  Instance inst = build_instance(cfg);
  std::uint64_t seed0 = cfg.seed_set ? cfg.seed : env_seed();
  std::unique_ptr<StepRules> rules;
  if (inst.model) rules = make_rules(*inst.model, inst.csp);
  std::ofstream file;
  std::ostream& out = open_output(cfg, file);

  std::optional<EnumeratedDistribution> dist;
  std::vector<std::int64_t> counts;
  if (oracle_small(inst.csp)) {
    dist = enumerate_distribution(inst.csp);
    counts.assign(dist->support.size(), 0);
  }
  int aborted = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    SampleReport rep = draw_one(inst, rules.get(), seed0 + i, cfg.max_stages);
    if (rep.status == SampleReport::Status::Exact) {
      if (dist) counts[dist->index_of(rep.labeling)]++;
    } else {
      ++aborted;
    }
    if (cfg.format == "csv") {
      out << seed0 + i << ','
          << (rep.status == SampleReport::Status::Exact ? "Exact" : "Aborted") << ','
          << rep.stages_used << ',' << rep.total_rounds << ',' << rep.total_messages
          << ',' << rep.peak_message_bits << ',' << rep.congest_ok << '\n';
    } else {
      out << rep.to_json() << '\n';
    }
  }
  if (dist && cfg.samples > 0 && cfg.format == "json") {
    ordered_json sum;
    sum["summary"] = true;
    sum["samples"] = cfg.samples;
    sum["aborted"] = aborted;
    if (aborted > 0)
      sum["warning"] = "aborted runs excluded from the empirical distribution; their "
                       "absence biases it";
    if (cfg.samples > aborted) {
      sum["tv_distance"] = tv_distance(counts, dist->prob_d);
      ordered_json emp = ordered_json::object();
      for (std::size_t i = 0; i < counts.size(); ++i) {
        std::string key;
        for (std::uint8_t l : dist->support[i])
          key += inst.csp.label_names()[l] + ",";
        key.pop_back();
        emp[key] = counts[i];
      }
      sum["counts"] = emp;
    }
    out << sum.dump() << '\n';
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg, int soundness_seeds, int soundness_t, double tv_tol,
               double chi_p_min, bool corrupt_rule) {
  Instance inst = build_instance(cfg);
  std::uint64_t seed0 = cfg.seed_set ? cfg.seed : env_seed();
  ordered_json rep;
  bool ok = true;

  if (inst.csp.num_vertices() <= 6 && inst.csp.num_labels() <= 3) {
    Rational p_exact = parse_rational(std::to_string(inst.p));
    TransitionMatrix tm = build_transition_matrix(inst.csp, p_exact);
    double bal = check_detailed_balance(tm);
    double sta = check_stationarity(tm);
    rep["detailed_balance"] = bal;
    rep["stationarity"] = sta;
    ok &= bal <= 1e-12 && sta <= 1e-12;
  } else {
    rep["detailed_balance"] = "skipped: instance too large for exact enumeration";
    rep["stationarity"] = "skipped: instance too large for exact enumeration";
  }

  if (enumerate_distribution(inst.csp).support.size() <= 12) {
    BoundedStepFn step = bounded_step_general;
    if (inst.model == Model::Hardcore) step = hardcore_bounded_step;
    if (inst.model == Model::Wds) step = wds_bounded_step;
    if (corrupt_rule)
      step = [](const CspInstance& c, const LabelSetState& s, const StepRandomness& r) {
        // Deliberately unsound: marked vertices always collapse to the
        // proposal, ignoring constraint outcomes.
        LabelSetState out = s;
        for (int v = 0; v < c.num_vertices(); ++v)
          if (r.mark[v]) out.sets[v] = 1u << r.proposal[v];
        return out;
      };
    SoundnessResult sr =
        bounding_soundness_bruteforce(inst.csp, inst.p, seed0, soundness_seeds, soundness_t, step);
    rep["soundness"] = sr.ok;
    if (!sr.ok) {
      rep["soundness_witness"] = {{"seed", sr.seed}, {"t", sr.t},
                                  {"state_index", sr.state_index}, {"vertex", sr.vertex}};
      ok = false;
    }
  } else {
    rep["soundness"] = "skipped: more than 12 valid states";
  }

  if (oracle_small(inst.csp) && cfg.samples > 0) {
    EnumeratedDistribution dist = enumerate_distribution(inst.csp);
    std::vector<std::int64_t> counts(dist.support.size(), 0);
    std::unique_ptr<StepRules> rules;
    if (inst.model) rules = make_rules(*inst.model, inst.csp);
    int aborted = 0;
    for (int i = 0; i < cfg.samples; ++i) {
      SampleReport r = draw_one(inst, rules.get(), seed0 + i, cfg.max_stages);
      if (r.status == SampleReport::Status::Exact)
        counts[dist.index_of(r.labeling)]++;
      else
        ++aborted;
    }
    rep["samples"] = cfg.samples;
    rep["aborted"] = aborted;
    double tv = tv_distance(counts, dist.prob_d);
    ChiSquareResult cs = chi_square(counts, dist.prob_d);
    rep["tv_distance"] = tv;
    rep["chi_square_p"] = cs.p_value;
    ok &= aborted == 0 && tv <= tv_tol && cs.p_value >= chi_p_min;
  } else if (cfg.samples > 0) {
    rep["sampling_check"] = "skipped: instance too large to enumerate";
  }

  rep["ok"] = ok;
  std::ofstream file;
  std::ostream& out = open_output(cfg, file);
  out << rep.dump() << '\n';
  return ok ? 0 : 1;
}

int cmd_bench(const RunConfig& cfg, const std::vector<int>& sizes, const std::string& family,
              int seeds_per_size) {
  if (sizes.empty()) throw std::invalid_argument("bench: at least one size required");
  ModelParams mp = parse_model_spec(cfg.model);
  double p = cfg.p < 0 ? mp.p : cfg.p;
  std::uint64_t seed0 = cfg.seed_set ? cfg.seed : env_seed();
  NetKind net = cfg.mode == "congest" ? NetKind::Congest : NetKind::Local;
  ScalingReport rep =
      scaling_experiment(mp.model, mp.weight, p, family, sizes, seeds_per_size, seed0, net);
  std::ofstream file;
  std::ostream& out = open_output(cfg, file);
  if (cfg.format == "csv") {
    out << "n,seeds_used,aborted,median_total_rounds,median_t_star,peak_bits,congest_ok\n";
    for (const ScalingPoint& pt : rep.points)
      out << pt.n << ',' << pt.seeds_used << ',' << pt.aborted << ','
          << pt.median_total_rounds << ',' << pt.median_t_star << ',' << pt.peak_bits
          << ',' << pt.congest_ok << '\n';
  } else {
    out << rep.to_json() << '\n';
  }
  return 0;
}

int cmd_chain_run(const RunConfig& cfg, int steps, const std::string& start) {
  Instance inst = build_instance(cfg);
  std::uint64_t seed0 = cfg.seed_set ? cfg.seed : env_seed();
  Labeling x(inst.csp.num_vertices(), 0);
  if (!start.empty()) {
    std::stringstream ss(start);
    std::string tok;
    std::size_t i = 0;
    while (std::getline(ss, tok, ',')) {
      if (i >= x.size()) throw std::invalid_argument("chain-run: start labeling too long");
      x[i++] = static_cast<std::uint8_t>(std::stoi(tok));
    }
    if (i != x.size()) throw std::invalid_argument("chain-run: start labeling too short");
  }
  if (!is_valid(inst.csp, x))
    throw std::invalid_argument("chain-run: start labeling violates a constraint");
  Labeling y = run_forward(inst.csp, x, seed0, inst.p, steps);
  ordered_json j;
  j["steps"] = steps;
  j["final"] = y;
  j["valid"] = is_valid(inst.csp, y);
  std::ostringstream w;
  w << labeling_weight(inst.csp, y);
  j["weight"] = w.str();
  std::ofstream file;
  std::ostream& out = open_output(cfg, file);
  out << j.dump() << '\n';
  return 0;
}

int cmd_gen_graph(const RunConfig& cfg) {
  Graph g = parse_graph_spec(cfg.graph, cfg.seed_set ? cfg.seed : env_seed());
  std::ofstream file;
  std::ostream& out = open_output(cfg, file);
  write_graph_file(g, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  // Pre-pass for --config so explicit flags can override file values.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      try {
        load_config_file(cfg, argv[i + 1]);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
      }
    }

  CLI::App app{"exact sampling from weighted local CSPs on a simulated network"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--graph", cfg.graph, "graph spec, e.g. cycle:n=8 or path:n=4");
    sub->add_option("--model", cfg.model,
                    "model spec: hardcore:lambda=.. | wds:lambda=.. | ising:beta=..");
    sub->add_option("--csp", cfg.csp_file, "custom CSP instance JSON file");
    sub->add_option("--p", cfg.p, "marking probability (default: model's)");
    sub->add_option("--seed", cfg.seed, "base seed (fallback: EXC_SEED, then 1)")
        ->each([&](const std::string&) { cfg.seed_set = true; });
    sub->add_option("--mode", cfg.mode, "local | congest");
    sub->add_option("--max-stages", cfg.max_stages, "doubling stages before aborting");
    sub->add_option("--format", cfg.format, "json | csv");
    sub->add_option("--output", cfg.output, "output file (default: stdout)");
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
  };

  CLI::App* sample = app.add_subcommand("sample", "draw exact samples");
  add_common(sample);
  sample->add_option("--samples", cfg.samples, "number of independent samples");

  CLI::App* verify = app.add_subcommand("verify", "run oracle and statistical checks");
  add_common(verify);
  int soundness_seeds = 200, soundness_t = 12, verify_samples = 20000;
  double tv_tol = 0.02, chi_p_min = 1e-3;
  bool corrupt_rule = false;
  verify->add_option("--samples", verify_samples, "samples for the statistical checks");
  verify->add_option("--soundness-seeds", soundness_seeds, "seeds for the brute force");
  verify->add_option("--soundness-t", soundness_t, "max horizon for the brute force");
  verify->add_option("--tv-tol", tv_tol, "TV distance tolerance");
  verify->add_option("--chi-p-min", chi_p_min, "minimum chi-square p-value");
  verify->add_flag("--corrupt-rule", corrupt_rule)->group("");  // negative control

  CLI::App* bench = app.add_subcommand("bench", "round-scaling experiment");
  add_common(bench);
  std::vector<int> sizes;
  std::string family = "cycle";
  int seeds_per_size = 5;
  bench->add_option("--sizes", sizes, "graph sizes, ascending")->required();
  bench->add_option("--family", family, "graph family");
  bench->add_option("--seeds-per-size", seeds_per_size, "runs per size");

  CLI::App* chain = app.add_subcommand("chain-run", "forward chain simulation");
  add_common(chain);
  int steps = 100;
  std::string start;
  chain->add_option("--steps", steps, "number of chain steps");
  chain->add_option("--start", start, "comma-separated start labeling (default all 0)");

  CLI::App* gen = app.add_subcommand("gen-graph", "emit a generated graph");
  add_common(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) return cmd_sample(cfg);
    if (verify->parsed()) {
      cfg.samples = verify_samples;
      return cmd_verify(cfg, soundness_seeds, soundness_t, tv_tol, chi_p_min, corrupt_rule);
    }
    if (bench->parsed()) return cmd_bench(cfg, sizes, family, seeds_per_size);
    if (chain->parsed()) return cmd_chain_run(cfg, steps, start);
    if (gen->parsed()) return cmd_gen_graph(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
